#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlf/config.hpp"
#include "tlf/frames.hpp"
#include "tlf/types.hpp"

namespace tlf {

struct Episode {
    EpisodeMeta meta;
    std::vector<DetectionRecord> detections;  // sorted by frame_index, contiguous from 0
    std::vector<WindowScore> scores;          // sorted by (activity, window_start_s)
    std::optional<GroundTruthAnnotation> truth;
    std::optional<FrameSequence> frames;

    double first_ts() const { return detections.front().timestamp_s; }
    double last_ts() const { return detections.back().timestamp_s; }
    double duration_s() const { return last_ts() - first_ts(); }
};

struct EpisodePaths {
    std::string meta;        // required
    std::string detections;  // required
    std::string scores;      // optional ("" = absent)
    std::string truth;       // optional
    std::string frames_dir;  // optional

    // Conventional layout: meta.json, detections.jsonl, scores.jsonl,
    // truth.json, frames/ inside one episode directory. Optional pieces are
    // picked up when present.
    static EpisodePaths in_dir(const std::string& dir);
};

// Parses, validates, and filters one episode. Boxes below the per-category
// confidence cutoff are dropped (frames are kept); boxes are clipped to
// frame bounds; scores with tuples outside the routing table are rejected.
Episode load_episode(const EpisodePaths& paths, const Config& config);

// Training admission: strictly more than min_fps.
bool admit_for_training(const EpisodeMeta& meta, double min_fps = 5.0);

void save_meta(const EpisodeMeta& meta, const std::string& path);
void save_detections(const std::vector<DetectionRecord>& records, const std::string& path);
void save_scores(const std::vector<WindowScore>& scores, const std::string& path);
void save_truth(const GroundTruthAnnotation& truth, const std::string& path);

}  // namespace tlf
