#include "tlf/temporal.hpp"

#include <algorithm>
#include <cmath>

#include "tlf/kernels.hpp"

namespace tlf {

ResampleGrid ResampleGrid::covering(double first_ts, double last_ts, double target_fps) {
    if (target_fps <= 0) throw ConfigError("target_fps must be > 0");
    if (last_ts < first_ts) throw ValidationError("resample span must not be negative");
    ResampleGrid grid;
    grid.target_fps = target_fps;
    grid.origin_s = first_ts;
    grid.count = int64_t(std::floor((last_ts - first_ts) * target_fps + 1e-9)) + 1;
    return grid;
}

LfiWeights lfi_weights(double t1, double t2, double ti) {
    if (!(t2 > t1)) throw ValidationError("lfi_weights requires t1 < t2");
    double c1 = (t2 - ti) / (t2 - t1);
    return {c1, 1.0 - c1};
}

namespace {

// Index of the last source timestamp <= t (caller guarantees t >= ts.front()).
size_t bracket_lo(const std::vector<double>& ts, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    return size_t(it - ts.begin()) - 1;
}

}  // namespace

FrameSequence resample_frames(const FrameSequence& src, const ResampleGrid& grid) {
    if (src.frames.size() < 2)
        throw ValidationError("resampling needs at least 2 source frames");
    for (const auto& f : src.frames)
        if (f.size() != src.frame_bytes())
            throw ValidationError("source frame size does not match dimensions");

    const auto& ops = kernels::active_ops();
    FrameSequence out;
    out.width = src.width;
    out.height = src.height;
    out.channels = src.channels;
    out.timestamps.reserve(size_t(grid.count));
    out.frames.reserve(size_t(grid.count));
    const size_t n = src.frame_bytes();
    for (int64_t i = 0; i < grid.count; ++i) {
        double t = grid.time_at(i);
        out.timestamps.push_back(t);
        if (t <= src.timestamps.front()) {
            out.frames.push_back(src.frames.front());
            continue;
        }
        if (t >= src.timestamps.back()) {
            out.frames.push_back(src.frames.back());
            continue;
        }
        size_t lo = bracket_lo(src.timestamps, t);
        if (src.timestamps[lo] == t) {
            out.frames.push_back(src.frames[lo]);
            continue;
        }
        LfiWeights w = lfi_weights(src.timestamps[lo], src.timestamps[lo + 1], t);
        std::vector<uint8_t> blended(n);
        ops.blend_u8(blended.data(), src.frames[lo].data(), src.frames[lo + 1].data(),
                     float(w.c1), float(w.c2), n);
        out.frames.push_back(std::move(blended));
    }
    return out;
}

std::vector<TrackPoint> resample_points(const std::vector<TrackPoint>& points,
                                        const std::vector<double>& timestamps,
                                        const ResampleGrid& grid) {
    if (points.empty()) throw ValidationError("cannot resample an empty track");
    if (points.size() != timestamps.size())
        throw ValidationError("track length does not match timestamp series");
    if (points.size() < 2)
        throw ValidationError("resampling needs at least 2 source frames");

    std::vector<TrackPoint> out;
    out.reserve(size_t(grid.count));
    for (int64_t i = 0; i < grid.count; ++i) {
        double t = grid.time_at(i);
        if (t <= timestamps.front()) {
            out.push_back(points.front());
            continue;
        }
        if (t >= timestamps.back()) {
            out.push_back(points.back());
            continue;
        }
        size_t lo = bracket_lo(timestamps, t);
        if (timestamps[lo] == t) {
            out.push_back(points[lo]);
            continue;
        }
        LfiWeights w = lfi_weights(timestamps[lo], timestamps[lo + 1], t);
        const PixelPos& p1 = points[lo].pos;
        const PixelPos& p2 = points[lo + 1].pos;
        PixelPos p{round_half_up(w.c1 * p1.x + w.c2 * p2.x),
                   round_half_up(w.c1 * p1.y + w.c2 * p2.y)};
        Provenance prov = (w.c1 >= w.c2) ? points[lo].prov : points[lo + 1].prov;
        out.push_back({p, prov});
    }
    return out;
}

Track resample_track(const Track& track, const std::vector<double>& timestamps,
                     const ResampleGrid& grid) {
    Track out;
    out.category = track.category;
    out.points = resample_points(track.points, timestamps, grid);
    return out;
}

RegionSpec resample_region(const RegionSpec& region, const std::vector<double>& timestamps,
                           const ResampleGrid& grid) {
    if (region.episode_fixed) return region;
    std::vector<TrackPoint> as_points;
    as_points.reserve(region.top_left.size());
    for (const auto& tl : region.top_left) as_points.push_back({tl, Provenance::Observed});
    auto resampled = resample_points(as_points, timestamps, grid);
    RegionSpec out;
    out.source = region.source;
    out.side_px = region.side_px;
    out.episode_fixed = false;
    out.top_left.reserve(resampled.size());
    for (const auto& tp : resampled) out.top_left.push_back(tp.pos);
    return out;
}

std::vector<AnalysisWindow> make_windows(double duration_s, WindowMode mode,
                                         const Config& config) {
    const int stride =
        mode == WindowMode::Test ? config.test_stride_frames : config.train_stride_frames;
    const int length = config.window_frames;
    const double fps = config.target_fps;
    std::vector<AnalysisWindow> out;
    for (int64_t f = 0;; f += stride) {
        double end_s = double(f + length) / fps;
        if (end_s > duration_s + 1e-9) break;
        out.push_back({double(f) / fps, length, stride});
    }
    return out;
}

}  // namespace tlf
