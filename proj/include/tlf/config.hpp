#pragma once

#include <map>
#include <string>

#include "tlf/types.hpp"

namespace tlf {

enum class MissingScorePolicy : uint8_t { AvailableOnly, Strict };
enum class WindowAlignment : uint8_t { Start, Center };

// Every tunable of the pipeline in one flat structure. Values default to the
// published constants where those exist (region sides, 15 fps, 45-frame
// windows, 1 s test stride, T_act 0.5) and to documented choices elsewhere.
struct Config {
    // ingest
    std::map<ObjectCategory, double> min_confidence = {
        {ObjectCategory::HCPH, 0.5},
        {ObjectCategory::BMR, 0.5},
        {ObjectCategory::HRS, 0.5},
        {ObjectCategory::SD, 0.5},
    };
    double min_fps_training = 5.0;

    // tracking
    int smoothing_window_frames = 15;  // ~1 s at the working rate; odd
    int max_peak_frames = 7;
    double jump_px = 150.0;
    int object_region_side_px = 500;

    // newborn region
    int newborn_region_side_px = 700;

    // temporal
    double target_fps = 15.0;
    int window_frames = 45;        // 3 s at 15 fps
    int test_stride_frames = 15;   // one analysis per second
    int train_stride_frames = 22;  // floor(45/2)

    // fusion
    std::map<Activity, double> t_act = {
        {Activity::Uncovered, 0.5},       {Activity::Stimulation, 0.5},
        {Activity::Ventilation, 0.5},     {Activity::Suction, 0.5},
        {Activity::AttachAdjustHrs, 0.5}, {Activity::RemoveHrs, 0.5},
    };
    MissingScorePolicy missing_score_policy = MissingScorePolicy::AvailableOnly;
    WindowAlignment window_alignment = WindowAlignment::Start;

    // evaluation
    double kfcv_grid_step = 0.01;
    double detection_iou_thresh = 0.5;
    double coverage_detected_fraction = 0.8;  // strict ">" rule

    // Serialize as "key = value" lines, keys sorted.
    std::string dump() const;

    // Parse a flat key-value document. Unknown keys are rejected.
    static Config parse(const std::string& text);
    static Config load_file(const std::string& path);

    // Apply TLF_-prefixed environment variable overrides (TLF_TARGET_FPS=30
    // overrides key "target_fps"; dots in keys become double underscores).
    void apply_env_overrides();

    void set_key(const std::string& key, const std::string& value);
    void validate() const;
};

}  // namespace tlf
