#pragma once

#include <array>
#include <map>
#include <vector>

#include "tlf/config.hpp"
#include "tlf/ingest.hpp"
#include "tlf/types.hpp"

namespace tlf {

// Numerically stable two-way softmax; components sum to 1.
std::array<double, 2> softmax2(const std::array<double, 2>& logits);

// Element-wise mean of the logit pairs for one (activity, region, window),
// softmax, and the activity component. Callers pass the scores of the
// stream(s) they have; empty input is rejected.
double fuse_streams(const std::vector<WindowScore>& scores);

// Arithmetic mean over the per-region probabilities of one window.
double fuse_regions(const std::vector<double>& region_probs);

struct FusedWindowProb {
    Activity activity = Activity::Uncovered;
    double window_start_s = 0.0;
    double prob_activity = 0.0;
    std::vector<RegionSource> regions_used;
    std::vector<Stream> streams_used;
};

// Groups an episode's scores by (activity, window) and runs the two-level
// average. Under the available-only policy a window missing streams or whole
// regions fuses whatever is present; under strict the gap is an error.
std::vector<FusedWindowProb> fuse_episode_windows(const Episode& episode, const Config& config);

// One probability per second covering [0, duration]: each window's value
// lands on its assigned second (start second by default), seconds without a
// window carry the nearest earlier value, and the leading edge back-fills.
ActivityTimeline assemble_timeline(Activity activity, const std::vector<FusedWindowProb>& fused,
                                   double t_act, double duration_s,
                                   const Config& config = Config{});

// Per-frame count of HCPH boxes that survived the ingest confidence cutoff.
HcpTimeline estimate_hcp(const Episode& episode);

// All timelines derivable from the episode's scores, keyed by activity.
std::map<Activity, ActivityTimeline> fuse_episode(const Episode& episode, const Config& config);

}  // namespace tlf
