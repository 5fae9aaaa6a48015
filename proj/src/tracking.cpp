#include "tlf/tracking.hpp"

#include <algorithm>
#include <cmath>

namespace tlf {

namespace {

double dist(PixelPos a, PixelPos b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

RawPositions localize(const Episode& episode, ObjectCategory category) {
    RawPositions out;
    out.reserve(episode.detections.size());
    for (const auto& rec : episode.detections) {
        const BoundingBox* best = nullptr;
        for (const auto& box : rec.boxes) {
            if (box.category != category) continue;
            if (!best || box.confidence > best->confidence ||
                (box.confidence == best->confidence &&
                 std::pair(box.y, box.x) < std::pair(best->y, best->x)))
                best = &box;
        }
        out.push_back(best ? std::optional<PixelPos>(best->center()) : std::nullopt);
    }
    return out;
}

std::vector<TrackPoint> fill_gaps(const RawPositions& raw) {
    auto first = std::find_if(raw.begin(), raw.end(),
                              [](const auto& p) { return p.has_value(); });
    if (first == raw.end())
        throw ValidationError("no observations to track in any frame");
    std::vector<TrackPoint> out;
    out.reserve(raw.size());
    PixelPos last = first->value();
    for (const auto& p : raw) {
        if (p) {
            last = *p;
            out.push_back({last, Provenance::Observed});
        } else {
            out.push_back({last, Provenance::GapFilled});
        }
    }
    return out;
}

std::vector<TrackPoint> remove_short_peaks(std::vector<TrackPoint> points, int max_peak_frames,
                                           double jump_px) {
    const size_t n = points.size();
    size_t i = 1;
    while (i < n) {
        const PixelPos base = points[i - 1].pos;
        if (dist(points[i].pos, base) <= jump_px) {
            ++i;
            continue;
        }
        // excursion run starting at i
        size_t j = i;
        while (j < n && dist(points[j].pos, base) > jump_px) ++j;
        size_t run = j - i;
        if (run <= size_t(max_peak_frames) && j < n) {
            // quick return: flatten the excursion onto the pre-excursion position
            for (size_t k = i; k < j; ++k) points[k] = {base, Provenance::GapFilled};
            i = j;
        } else {
            // genuine move (or truncated at the end): re-anchor inside it
            ++i;
        }
    }
    return points;
}

Track smooth(const std::vector<TrackPoint>& points, ObjectCategory category, int window_frames) {
    if (window_frames < 1 || window_frames % 2 == 0)
        throw ConfigError("smoothing window must be odd and >= 1");
    const int n = int(points.size());
    const int radius = window_frames / 2;
    Track track;
    track.category = category;
    track.points.reserve(points.size());
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - radius);
        int hi = std::min(n - 1, i + radius);
        long sx = 0, sy = 0;
        for (int k = lo; k <= hi; ++k) {
            sx += points[k].pos.x;
            sy += points[k].pos.y;
        }
        int count = hi - lo + 1;
        PixelPos p{round_half_up(double(sx) / count), round_half_up(double(sy) / count)};
        track.points.push_back({p, Provenance::Smoothed});
    }
    return track;
}

RegionSpec propose_object_region(const Track& track, int side_px, const EpisodeMeta& meta) {
    if (side_px > std::min(meta.im_width, meta.im_height))
        throw ConfigError("region side " + std::to_string(side_px) +
                          " exceeds frame dimensions " + std::to_string(meta.im_width) + "x" +
                          std::to_string(meta.im_height));
    RegionSpec spec;
    switch (track.category) {
        case ObjectCategory::BMR: spec.source = RegionSource::BMR; break;
        case ObjectCategory::HRS: spec.source = RegionSource::HRS; break;
        case ObjectCategory::SD: spec.source = RegionSource::SD; break;
        default: throw ValidationError("object regions exist only for BMR/HRS/SD tracks");
    }
    spec.side_px = side_px;
    spec.episode_fixed = false;
    spec.top_left.reserve(track.points.size());
    for (const auto& tp : track.points) {
        int x = std::clamp(tp.pos.x - side_px / 2, 0, meta.im_width - side_px);
        int y = std::clamp(tp.pos.y - side_px / 2, 0, meta.im_height - side_px);
        spec.top_left.push_back({x, y});
    }
    return spec;
}

std::optional<Track> track_category(const Episode& episode, ObjectCategory category,
                                    const Config& config) {
    RawPositions raw = localize(episode, category);
    if (std::none_of(raw.begin(), raw.end(), [](const auto& p) { return p.has_value(); }))
        return std::nullopt;
    auto filled = fill_gaps(raw);
    auto cleaned = remove_short_peaks(std::move(filled), config.max_peak_frames, config.jump_px);
    return smooth(cleaned, category, config.smoothing_window_frames);
}

}  // namespace tlf
