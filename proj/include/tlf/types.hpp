#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlf {

// Errors are split by how the CLI reports them: validation problems exit
// with status 1, I/O problems with status 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public ValidationError {
public:
    explicit ConfigError(const std::string& msg) : ValidationError(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ObjectCategory : uint8_t { HCPH, BMR, HRS, SD };

// HCPH is multi-instance; the other three are tracked as single objects.
inline constexpr std::array<ObjectCategory, 4> kAllCategories = {
    ObjectCategory::HCPH, ObjectCategory::BMR, ObjectCategory::HRS, ObjectCategory::SD};
inline constexpr std::array<ObjectCategory, 3> kTrackedCategories = {
    ObjectCategory::BMR, ObjectCategory::HRS, ObjectCategory::SD};

enum class Activity : uint8_t {
    Uncovered,
    Stimulation,
    Ventilation,
    Suction,
    AttachAdjustHrs,
    RemoveHrs,
};

inline constexpr std::array<Activity, 6> kAllActivities = {
    Activity::Uncovered,       Activity::Stimulation, Activity::Ventilation,
    Activity::Suction,         Activity::AttachAdjustHrs, Activity::RemoveHrs};

enum class Stream : uint8_t { Appearance, Flow };

enum class RegionSource : uint8_t { BMR, HRS, SD, Newborn };

std::string to_string(ObjectCategory c);
std::string to_string(Activity a);
std::string to_string(Stream s);
std::string to_string(RegionSource r);

// Token parsers reject unknown spellings with a ValidationError.
ObjectCategory parse_category(const std::string& token);
Activity parse_activity(const std::string& token);
Stream parse_stream(const std::string& token);
RegionSource parse_region_source(const std::string& token);

struct PixelPos {
    int x = 0;
    int y = 0;

    bool operator==(const PixelPos&) const = default;
};

// Integer pixel coordinates, origin top-left. Sub-pixel values are rounded
// half-up before they enter a PixelPos.
int round_half_up(double v);

struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    ObjectCategory category = ObjectCategory::HCPH;
    double confidence = 1.0;

    PixelPos center() const;
    double area() const { return double(w) * double(h); }

    bool operator==(const BoundingBox&) const = default;
};

struct DetectionRecord {
    int64_t frame_index = 0;
    double timestamp_s = 0.0;
    std::vector<BoundingBox> boxes;

    bool operator==(const DetectionRecord&) const = default;
};

struct EpisodeMeta {
    std::string episode_id;
    int im_width = 0;
    int im_height = 0;
    double native_fps = 0.0;  // summary only; per-frame timestamps are authoritative
    int64_t frame_count = 0;

    bool operator==(const EpisodeMeta&) const = default;
};

enum class Provenance : uint8_t { Observed, GapFilled, Smoothed };

std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& token);

struct TrackPoint {
    PixelPos pos;
    Provenance prov = Provenance::Observed;

    bool operator==(const TrackPoint&) const = default;
};

// One smoothed per-frame center series for a single-instance category.
struct Track {
    ObjectCategory category = ObjectCategory::BMR;
    std::vector<TrackPoint> points;  // length == episode frame_count

    bool operator==(const Track&) const = default;
};

// Square analysis window. Object regions move with the track (one top-left
// per frame); the newborn region is fixed for the whole episode and stores
// a single top-left.
struct RegionSpec {
    RegionSource source = RegionSource::Newborn;
    int side_px = 0;
    bool episode_fixed = false;
    std::vector<PixelPos> top_left;  // size 1 when episode_fixed

    bool operator==(const RegionSpec&) const = default;
};

struct WindowScore {
    Activity activity = Activity::Uncovered;
    RegionSource region = RegionSource::Newborn;
    Stream stream = Stream::Appearance;
    double window_start_s = 0.0;
    // (logit_no_activity, logit_activity)
    std::array<double, 2> logits = {0.0, 0.0};

    bool operator==(const WindowScore&) const = default;
};

struct ActivityTimeline {
    Activity activity = Activity::Uncovered;
    double sample_period_s = 1.0;
    std::vector<double> probs;
    std::vector<uint8_t> binary;  // binary[k] = 1  <=>  probs[k] > threshold_used
    double threshold_used = 0.5;

    bool operator==(const ActivityTimeline&) const = default;
};

struct HcpTimeline {
    std::vector<int> counts;  // one entry per native frame

    bool operator==(const HcpTimeline&) const = default;
};

struct Interval {
    double start_s = 0.0;
    double end_s = 0.0;

    double length() const { return end_s - start_s; }
    bool contains(double t) const { return t >= start_s && t < end_s; }
    bool operator==(const Interval&) const = default;
};

struct GroundTruthAnnotation {
    std::map<Activity, std::vector<Interval>> activities;
    std::vector<int> hcp;  // per-frame true HCP count (may be empty)
    // Optional per-frame truth boxes for detection evaluation.
    std::optional<std::vector<std::vector<BoundingBox>>> boxes;

    bool operator==(const GroundTruthAnnotation&) const = default;
};

// Activity -> (ordered region sources, streams). Total over all activities:
// 6 appearance slots and 5 flow slots (uncovered is appearance-only).
struct Routing {
    std::vector<RegionSource> regions;
    std::vector<Stream> streams;
};

const Routing& routing_for(Activity a);

bool routing_allows(Activity a, RegionSource region, Stream stream);

}  // namespace tlf
