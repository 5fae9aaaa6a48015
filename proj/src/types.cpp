#include "tlf/types.hpp"

#include <algorithm>
#include <cmath>

namespace tlf {

std::string to_string(ObjectCategory c) {
    switch (c) {
        case ObjectCategory::HCPH: return "HCPH";
        case ObjectCategory::BMR: return "BMR";
        case ObjectCategory::HRS: return "HRS";
        case ObjectCategory::SD: return "SD";
    }
    return "?";
}

std::string to_string(Activity a) {
    switch (a) {
        case Activity::Uncovered: return "uncovered";
        case Activity::Stimulation: return "stimulation";
        case Activity::Ventilation: return "ventilation";
        case Activity::Suction: return "suction";
        case Activity::AttachAdjustHrs: return "attach_adjust_hrs";
        case Activity::RemoveHrs: return "remove_hrs";
    }
    return "?";
}

std::string to_string(Stream s) {
    return s == Stream::Appearance ? "appearance" : "flow";
}

std::string to_string(RegionSource r) {
    switch (r) {
        case RegionSource::BMR: return "BMR";
        case RegionSource::HRS: return "HRS";
        case RegionSource::SD: return "SD";
        case RegionSource::Newborn: return "newborn";
    }
    return "?";
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Observed: return "observed";
        case Provenance::GapFilled: return "gap_filled";
        case Provenance::Smoothed: return "smoothed";
    }
    return "?";
}

ObjectCategory parse_category(const std::string& token) {
    for (ObjectCategory c : kAllCategories)
        if (to_string(c) == token) return c;
    throw ValidationError("unknown object category: '" + token + "'");
}

Activity parse_activity(const std::string& token) {
    for (Activity a : kAllActivities)
        if (to_string(a) == token) return a;
    throw ValidationError("unknown activity: '" + token + "'");
}

Stream parse_stream(const std::string& token) {
    if (token == "appearance") return Stream::Appearance;
    if (token == "flow") return Stream::Flow;
    throw ValidationError("unknown stream: '" + token + "'");
}

RegionSource parse_region_source(const std::string& token) {
    if (token == "BMR") return RegionSource::BMR;
    if (token == "HRS") return RegionSource::HRS;
    if (token == "SD") return RegionSource::SD;
    if (token == "newborn") return RegionSource::Newborn;
    throw ValidationError("unknown region source: '" + token + "'");
}

Provenance parse_provenance(const std::string& token) {
    if (token == "observed") return Provenance::Observed;
    if (token == "gap_filled") return Provenance::GapFilled;
    if (token == "smoothed") return Provenance::Smoothed;
    throw ValidationError("unknown provenance flag: '" + token + "'");
}

int round_half_up(double v) {
    return static_cast<int>(std::floor(v + 0.5));
}

PixelPos BoundingBox::center() const {
    return {round_half_up(x + w / 2.0), round_half_up(y + h / 2.0)};
}

const Routing& routing_for(Activity a) {
    static const Routing uncovered{{RegionSource::Newborn}, {Stream::Appearance}};
    static const Routing stimulation{{RegionSource::Newborn},
                                     {Stream::Appearance, Stream::Flow}};
    static const Routing ventilation{{RegionSource::BMR, RegionSource::Newborn},
                                     {Stream::Appearance, Stream::Flow}};
    static const Routing suction{{RegionSource::SD, RegionSource::Newborn},
                                 {Stream::Appearance, Stream::Flow}};
    static const Routing hrs{{RegionSource::HRS, RegionSource::Newborn},
                             {Stream::Appearance, Stream::Flow}};
    switch (a) {
        case Activity::Uncovered: return uncovered;
        case Activity::Stimulation: return stimulation;
        case Activity::Ventilation: return ventilation;
        case Activity::Suction: return suction;
        case Activity::AttachAdjustHrs: return hrs;
        case Activity::RemoveHrs: return hrs;
    }
    throw ValidationError("invalid activity value");
}

bool routing_allows(Activity a, RegionSource region, Stream stream) {
    const Routing& r = routing_for(a);
    bool region_ok = std::find(r.regions.begin(), r.regions.end(), region) != r.regions.end();
    bool stream_ok = std::find(r.streams.begin(), r.streams.end(), stream) != r.streams.end();
    return region_ok && stream_ok;
}

}  // namespace tlf
