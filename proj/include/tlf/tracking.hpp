#pragma once

#include <optional>
#include <vector>

#include "tlf/config.hpp"
#include "tlf/ingest.hpp"
#include "tlf/types.hpp"

namespace tlf {

using RawPositions = std::vector<std::optional<PixelPos>>;

// Per frame, the center of the highest-confidence box of the category, or
// nullopt when the frame has none. Confidence ties go to the box with the
// smaller (y, x) top-left, which makes the result independent of detection
// order within a frame.
RawPositions localize(const Episode& episode, ObjectCategory category);

// Hold-last gap filling; frames before the first observation are back-filled
// with it. Throws ValidationError when no frame has an observation.
std::vector<TrackPoint> fill_gaps(const RawPositions& raw);

// Drops excursions of at most max_peak_frames consecutive frames that jump
// more than jump_px away from the pre-excursion position and then return to
// within jump_px of it. Sustained moves are kept.
std::vector<TrackPoint> remove_short_peaks(std::vector<TrackPoint> points, int max_peak_frames,
                                           double jump_px);

// Centered moving average (odd window, clipped at the sequence edges), x and
// y independently, rounded half-up.
Track smooth(const std::vector<TrackPoint>& points, ObjectCategory category, int window_frames);

// Square side_px region centered per frame on the track, translated to stay
// inside the frame. side_px larger than either frame dimension is a
// configuration error.
RegionSpec propose_object_region(const Track& track, int side_px, const EpisodeMeta& meta);

// localize -> fill_gaps -> remove_short_peaks -> smooth for one category.
// Returns nullopt when the episode never observes the category.
std::optional<Track> track_category(const Episode& episode, ObjectCategory category,
                                    const Config& config);

}  // namespace tlf
