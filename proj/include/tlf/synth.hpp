#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tlf/frames.hpp"
#include "tlf/ingest.hpp"
#include "tlf/types.hpp"

namespace tlf::synth {

struct Waypoint {
    double t_s = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct ObjectMotion {
    ObjectCategory category = ObjectCategory::BMR;
    int box_w = 80;
    int box_h = 80;
    std::vector<Waypoint> waypoints;  // piecewise linear, clamped at the ends
};

struct HcpPhase {
    double start_s = 0.0;
    int count = 0;
};

struct NoiseSpec {
    double dropout_rate = 0.0;         // per frame per object
    double false_positive_rate = 0.0;  // per frame per tracked category
    double fp_min_displacement_px = 300.0;
    double confidence_jitter = 0.0;  // uniform +- around base_confidence
    double logit_margin = 5.0;
    double logit_noise_sigma = 0.0;
};

// A fully scripted episode: ground-truth activity intervals, object
// trajectories, an HCP schedule, and the noise applied on top. Identical
// (seed, scenario) pairs generate identical outputs; each noise source draws
// from its own random stream so toggling one leaves the others untouched.
struct Scenario {
    uint64_t seed = 1;
    std::string episode_id = "synthetic";
    double duration_s = 60.0;
    double fps = 15.0;
    int im_width = 1920;
    int im_height = 1080;
    std::map<Activity, std::vector<Interval>> script;
    std::vector<ObjectMotion> objects;
    std::vector<HcpPhase> hcp_schedule;  // piecewise-constant, sorted by start
    PixelPos newborn_center{960, 540};   // HCPH detections cluster here
    int hcph_box_w = 120;
    int hcph_box_h = 120;
    double base_confidence = 0.85;
    NoiseSpec noise;
    bool emit_truth_boxes = true;
    bool emit_frames = false;
    int frame_channels = 1;
    uint8_t background = 30;
    double background_ramp_per_s = 0.0;

    void validate() const;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

struct GeneratedEpisode {
    EpisodeMeta meta;
    std::vector<DetectionRecord> detections;
    std::vector<WindowScore> scores;
    GroundTruthAnnotation truth;
};

GeneratedEpisode generate_episode(const Scenario& scenario);

// True (noise-free) center of one category at time t.
PixelPos true_center(const Scenario& scenario, ObjectCategory category, double t);

// Flat background plus solid rectangles at the true object positions.
FrameSequence generate_frames(const Scenario& scenario);

// Writes the ingest-format episode directory (meta.json, detections.jsonl,
// scores.jsonl, truth.json, frames/ when the scenario emits them).
void write_episode_dir(const GeneratedEpisode& gen, const Scenario& scenario,
                       const std::string& dir);

// Per-pixel affine-in-time test signal: value(x, y, t) = a(x, y) + b(x, y)*t
// with a = (3x + 5y) mod 96 and b = (x + y) mod 2, quantization-free at
// integer timestamps.
FrameSequence affine_video(int width, int height, const std::vector<double>& timestamps);
double affine_value(int x, int y, double t);

}  // namespace tlf::synth
