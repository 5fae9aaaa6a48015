#pragma once

#include <vector>

#include "tlf/config.hpp"
#include "tlf/frames.hpp"
#include "tlf/types.hpp"

namespace tlf {

// Fixed-rate output clock laid over a source time span. Output timestamps
// are origin_s + i / target_fps for i = 0 .. count-1 and cover the span.
struct ResampleGrid {
    double target_fps = 15.0;
    double origin_s = 0.0;
    int64_t count = 0;

    double time_at(int64_t i) const { return origin_s + double(i) / target_fps; }

    static ResampleGrid covering(double first_ts, double last_ts, double target_fps);
};

struct LfiWeights {
    double c1 = 1.0;  // weight of the earlier frame
    double c2 = 0.0;  // weight of the later frame
};

// Convex blend weights for reconstructing time ti from samples at t1 < t2.
// Weight is proportional to proximity: c1 = (t2-ti)/(t2-t1), c2 = 1 - c1,
// so the blend reproduces each endpoint exactly.
LfiWeights lfi_weights(double t1, double t2, double ti);

// Per-pixel blend of the bracketing source frames onto the grid; times
// outside the source span clamp to the nearest frame, exact hits pass the
// source frame through bit-identically. Needs >= 2 source frames.
FrameSequence resample_frames(const FrameSequence& src, const ResampleGrid& grid);

// Same weighting applied to integer coordinate streams (half-up rounding);
// the provenance flag rides along from the nearer source frame.
std::vector<TrackPoint> resample_points(const std::vector<TrackPoint>& points,
                                        const std::vector<double>& timestamps,
                                        const ResampleGrid& grid);

Track resample_track(const Track& track, const std::vector<double>& timestamps,
                     const ResampleGrid& grid);
RegionSpec resample_region(const RegionSpec& region, const std::vector<double>& timestamps,
                           const ResampleGrid& grid);

enum class WindowMode { Train, Test };

struct AnalysisWindow {
    double start_s = 0.0;
    int length_frames = 45;
    int stride_frames = 15;
};

// Sliding analysis windows over [0, duration]: 45 frames (3 s at 15 fps),
// stride 15 frames in test mode (one analysis per second) or 22 in train
// mode. Durations under one window yield an empty list.
std::vector<AnalysisWindow> make_windows(double duration_s, WindowMode mode,
                                         const Config& config);

}  // namespace tlf
