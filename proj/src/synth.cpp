#include "tlf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "tlf/temporal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tlf::synth {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent generator per noise source.
std::mt19937_64 sub_rng(uint64_t seed, uint64_t stream_tag) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream_tag)));
}

constexpr uint64_t kStreamDropout = 1;
constexpr uint64_t kStreamConfidence = 2;
constexpr uint64_t kStreamFpEvent = 3;
constexpr uint64_t kStreamFpAttr = 4;
constexpr uint64_t kStreamLogits = 5;

bool clip_box(BoundingBox& b, int im_w, int im_h) {
    int x0 = std::max(b.x, 0);
    int y0 = std::max(b.y, 0);
    int x1 = std::min(b.x + b.w, im_w);
    int y1 = std::min(b.y + b.h, im_h);
    if (x1 <= x0 || y1 <= y0) return false;
    b = {x0, y0, x1 - x0, y1 - y0, b.category, b.confidence};
    return true;
}

BoundingBox box_at(PixelPos center, int w, int h, ObjectCategory cat, double conf) {
    return {center.x - w / 2, center.y - h / 2, w, h, cat, conf};
}

// Deterministic hand choreography around the newborn.
PixelPos hand_center(const Scenario& s, int hand, double t) {
    double angle = 2.0 * M_PI * double(hand) / 6.0 + 0.3 * t;
    double radius = 180.0 + 40.0 * std::sin(0.7 * t + double(hand));
    return {s.newborn_center.x + int(std::lround(radius * std::cos(angle))),
            s.newborn_center.y + int(std::lround(radius * std::sin(angle)))};
}

int hcp_count_at(const Scenario& s, double t) {
    int count = 0;
    for (const auto& phase : s.hcp_schedule)
        if (phase.start_s <= t) count = phase.count;
    return count;
}

bool script_active(const Scenario& s, Activity act, double t) {
    auto it = s.script.find(act);
    if (it == s.script.end()) return false;
    for (const auto& iv : it->second)
        if (iv.contains(t)) return true;
    return false;
}

}  // namespace

void Scenario::validate() const {
    if (duration_s <= 0) throw ValidationError("scenario: duration_s must be > 0");
    if (fps <= 0) throw ValidationError("scenario: fps must be > 0");
    if (im_width <= 0 || im_height <= 0)
        throw ValidationError("scenario: frame dimensions must be positive");
    for (const auto& [act, intervals] : script) {
        for (const auto& iv : intervals) {
            if (!(iv.start_s < iv.end_s))
                throw ValidationError("scenario: interval start must precede end for " +
                                      to_string(act));
            if (iv.start_s < 0 || iv.end_s > duration_s)
                throw ValidationError("scenario: interval outside episode duration for " +
                                      to_string(act));
        }
        for (size_t i = 1; i < intervals.size(); ++i)
            if (intervals[i].start_s < intervals[i - 1].end_s)
                throw ValidationError("scenario: intervals must be sorted and non-overlapping for " +
                                      to_string(act));
    }
    std::vector<bool> seen(kAllCategories.size(), false);
    for (const auto& obj : objects) {
        if (obj.category == ObjectCategory::HCPH)
            throw ValidationError("scenario: HCPH motion comes from the hcp schedule");
        if (seen[size_t(obj.category)])
            throw ValidationError("scenario: duplicate motion for " + to_string(obj.category));
        seen[size_t(obj.category)] = true;
        if (obj.waypoints.empty())
            throw ValidationError("scenario: object motion needs at least one waypoint");
        for (size_t i = 1; i < obj.waypoints.size(); ++i)
            if (obj.waypoints[i].t_s <= obj.waypoints[i - 1].t_s)
                throw ValidationError("scenario: waypoints must have increasing times");
        if (obj.box_w <= 0 || obj.box_h <= 0)
            throw ValidationError("scenario: object box must have positive size");
    }
    for (size_t i = 1; i < hcp_schedule.size(); ++i)
        if (hcp_schedule[i].start_s <= hcp_schedule[i - 1].start_s)
            throw ValidationError("scenario: hcp schedule must have increasing start times");
    for (const auto& phase : hcp_schedule)
        if (phase.count < 0 || phase.count > 6)
            throw ValidationError("scenario: hcp count must be in [0, 6]");
    if (noise.dropout_rate < 0 || noise.dropout_rate > 1 || noise.false_positive_rate < 0 ||
        noise.false_positive_rate > 1)
        throw ValidationError("scenario: rates must be in [0, 1]");
    if (base_confidence < 0 || base_confidence > 1)
        throw ValidationError("scenario: base_confidence must be in [0, 1]");
}

PixelPos true_center(const Scenario& scenario, ObjectCategory category, double t) {
    for (const auto& obj : scenario.objects) {
        if (obj.category != category) continue;
        const auto& wp = obj.waypoints;
        if (t <= wp.front().t_s)
            return {round_half_up(wp.front().x), round_half_up(wp.front().y)};
        if (t >= wp.back().t_s)
            return {round_half_up(wp.back().x), round_half_up(wp.back().y)};
        for (size_t i = 1; i < wp.size(); ++i) {
            if (t > wp[i].t_s) continue;
            double a = (t - wp[i - 1].t_s) / (wp[i].t_s - wp[i - 1].t_s);
            return {round_half_up(wp[i - 1].x + a * (wp[i].x - wp[i - 1].x)),
                    round_half_up(wp[i - 1].y + a * (wp[i].y - wp[i - 1].y))};
        }
    }
    throw ValidationError("scenario has no motion for " + to_string(category));
}

GeneratedEpisode generate_episode(const Scenario& scenario) {
    scenario.validate();
    GeneratedEpisode gen;
    gen.meta.episode_id = scenario.episode_id;
    gen.meta.im_width = scenario.im_width;
    gen.meta.im_height = scenario.im_height;

    auto dropout_rng = sub_rng(scenario.seed, kStreamDropout);
    auto conf_rng = sub_rng(scenario.seed, kStreamConfidence);
    auto fp_event_rng = sub_rng(scenario.seed, kStreamFpEvent);
    auto fp_attr_rng = sub_rng(scenario.seed, kStreamFpAttr);
    auto logit_rng = sub_rng(scenario.seed, kStreamLogits);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const int64_t n_frames = int64_t(std::floor(scenario.duration_s * scenario.fps + 1e-9)) + 1;
    gen.meta.frame_count = n_frames;
    gen.meta.native_fps = scenario.fps;

    std::vector<std::vector<BoundingBox>> truth_boxes;
    truth_boxes.resize(size_t(n_frames));
    for (int64_t f = 0; f < n_frames; ++f) {
        double t = double(f) / scenario.fps;
        DetectionRecord rec;
        rec.frame_index = f;
        rec.timestamp_s = t;

        for (const auto& obj : scenario.objects) {
            PixelPos c = true_center(scenario, obj.category, t);
            BoundingBox truth = box_at(c, obj.box_w, obj.box_h, obj.category, 1.0);
            if (clip_box(truth, scenario.im_width, scenario.im_height))
                truth_boxes[size_t(f)].push_back(truth);

            double conf = scenario.base_confidence +
                          scenario.noise.confidence_jitter * (2.0 * uniform(conf_rng) - 1.0);
            conf = std::clamp(conf, 0.01, 1.0);
            bool dropped = uniform(dropout_rng) < scenario.noise.dropout_rate;
            if (!dropped) {
                BoundingBox det = box_at(c, obj.box_w, obj.box_h, obj.category, conf);
                if (clip_box(det, scenario.im_width, scenario.im_height))
                    rec.boxes.push_back(det);
            }
        }

        int hands = hcp_count_at(scenario, t);
        for (int hand = 0; hand < hands; ++hand) {
            PixelPos c = hand_center(scenario, hand, t);
            BoundingBox truth =
                box_at(c, scenario.hcph_box_w, scenario.hcph_box_h, ObjectCategory::HCPH, 1.0);
            if (clip_box(truth, scenario.im_width, scenario.im_height))
                truth_boxes[size_t(f)].push_back(truth);

            double conf = scenario.base_confidence +
                          scenario.noise.confidence_jitter * (2.0 * uniform(conf_rng) - 1.0);
            conf = std::clamp(conf, 0.01, 1.0);
            bool dropped = uniform(dropout_rng) < scenario.noise.dropout_rate;
            if (!dropped) {
                BoundingBox det =
                    box_at(c, scenario.hcph_box_w, scenario.hcph_box_h, ObjectCategory::HCPH, conf);
                if (clip_box(det, scenario.im_width, scenario.im_height))
                    rec.boxes.push_back(det);
            }
        }

        for (const auto& obj : scenario.objects) {
            if (uniform(fp_event_rng) >= scenario.noise.false_positive_rate) continue;
            PixelPos truth_c = true_center(scenario, obj.category, t);
            for (int attempt = 0; attempt < 64; ++attempt) {
                int x = int(uniform(fp_attr_rng) * (scenario.im_width - obj.box_w));
                int y = int(uniform(fp_attr_rng) * (scenario.im_height - obj.box_h));
                PixelPos c{x + obj.box_w / 2, y + obj.box_h / 2};
                double dx = c.x - truth_c.x, dy = c.y - truth_c.y;
                if (std::sqrt(dx * dx + dy * dy) < scenario.noise.fp_min_displacement_px)
                    continue;
                double conf = 0.5 + 0.5 * uniform(fp_attr_rng);
                BoundingBox det = box_at(c, obj.box_w, obj.box_h, obj.category, conf);
                if (clip_box(det, scenario.im_width, scenario.im_height))
                    rec.boxes.push_back(det);
                break;
            }
        }

        gen.detections.push_back(std::move(rec));
    }

    // Scores for every activity over the test window grid, oracle-signed.
    Config window_cfg;
    window_cfg.target_fps = 15.0;
    for (Activity act : kAllActivities) {
        const Routing& routing = routing_for(act);
        for (const auto& win : make_windows(scenario.duration_s, WindowMode::Test, window_cfg)) {
            bool active = script_active(scenario, act, win.start_s + 0.5);
            for (RegionSource region : routing.regions) {
                for (Stream stream : routing.streams) {
                    double noise = scenario.noise.logit_noise_sigma * normal(logit_rng);
                    WindowScore s;
                    s.activity = act;
                    s.region = region;
                    s.stream = stream;
                    s.window_start_s = win.start_s;
                    s.logits = {0.0, scenario.noise.logit_margin * (active ? 1.0 : -1.0) + noise};
                    gen.scores.push_back(s);
                }
            }
        }
    }
    std::stable_sort(gen.scores.begin(), gen.scores.end(),
                     [](const WindowScore& a, const WindowScore& b) {
                         if (a.activity != b.activity) return a.activity < b.activity;
                         if (a.window_start_s != b.window_start_s)
                             return a.window_start_s < b.window_start_s;
                         if (a.region != b.region) return a.region < b.region;
                         return a.stream < b.stream;
                     });

    gen.truth.activities = scenario.script;
    for (int64_t f = 0; f < n_frames; ++f)
        gen.truth.hcp.push_back(hcp_count_at(scenario, double(f) / scenario.fps));
    if (scenario.emit_truth_boxes) gen.truth.boxes = std::move(truth_boxes);
    return gen;
}

FrameSequence generate_frames(const Scenario& scenario) {
    scenario.validate();
    FrameSequence seq;
    seq.width = scenario.im_width;
    seq.height = scenario.im_height;
    seq.channels = scenario.frame_channels;
    const int64_t n_frames = int64_t(std::floor(scenario.duration_s * scenario.fps + 1e-9)) + 1;

    auto fill_rect = [&](std::vector<uint8_t>& px, BoundingBox b, uint8_t value) {
        if (!clip_box(b, seq.width, seq.height)) return;
        for (int y = b.y; y < b.y + b.h; ++y)
            for (int x = b.x; x < b.x + b.w; ++x)
                for (int c = 0; c < seq.channels; ++c)
                    px[(size_t(y) * seq.width + x) * seq.channels + c] = value;
    };
    auto category_value = [](ObjectCategory c) -> uint8_t {
        switch (c) {
            case ObjectCategory::HCPH: return 160;
            case ObjectCategory::BMR: return 210;
            case ObjectCategory::HRS: return 230;
            case ObjectCategory::SD: return 90;
        }
        return 255;
    };

    for (int64_t f = 0; f < n_frames; ++f) {
        double t = double(f) / scenario.fps;
        double bg = scenario.background + scenario.background_ramp_per_s * t;
        uint8_t bgv = uint8_t(std::clamp(round_half_up(bg), 0, 255));
        std::vector<uint8_t> px(seq.frame_bytes(), bgv);
        for (const auto& obj : scenario.objects) {
            PixelPos c = true_center(scenario, obj.category, t);
            fill_rect(px, box_at(c, obj.box_w, obj.box_h, obj.category, 1.0),
                      category_value(obj.category));
        }
        for (int hand = 0; hand < hcp_count_at(scenario, t); ++hand)
            fill_rect(px,
                      box_at(hand_center(scenario, hand, t), scenario.hcph_box_w,
                             scenario.hcph_box_h, ObjectCategory::HCPH, 1.0),
                      category_value(ObjectCategory::HCPH));
        seq.timestamps.push_back(t);
        seq.frames.push_back(std::move(px));
    }
    return seq;
}

void write_episode_dir(const GeneratedEpisode& gen, const Scenario& scenario,
                       const std::string& dir) {
    fs::create_directories(dir);
    save_meta(gen.meta, (fs::path(dir) / "meta.json").string());
    save_detections(gen.detections, (fs::path(dir) / "detections.jsonl").string());
    save_scores(gen.scores, (fs::path(dir) / "scores.jsonl").string());
    save_truth(gen.truth, (fs::path(dir) / "truth.json").string());
    if (scenario.emit_frames)
        save_frames(generate_frames(scenario), (fs::path(dir) / "frames").string());
}

double affine_value(int x, int y, double t) {
    double a = double((3 * x + 5 * y) % 96);
    double b = double((x + y) % 2);
    return a + b * t;
}

FrameSequence affine_video(int width, int height, const std::vector<double>& timestamps) {
    FrameSequence seq;
    seq.width = width;
    seq.height = height;
    seq.channels = 1;
    seq.timestamps = timestamps;
    for (double t : timestamps) {
        std::vector<uint8_t> px(seq.frame_bytes());
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                double v = affine_value(x, y, t);
                px[size_t(y) * width + x] = uint8_t(std::clamp(round_half_up(v), 0, 255));
            }
        seq.frames.push_back(std::move(px));
    }
    return seq;
}

namespace {

json scenario_to_json(const Scenario& s) {
    json j;
    j["seed"] = s.seed;
    j["episode_id"] = s.episode_id;
    j["duration_s"] = s.duration_s;
    j["fps"] = s.fps;
    j["width"] = s.im_width;
    j["height"] = s.im_height;
    json script = json::object();
    for (const auto& [act, intervals] : s.script) {
        json list = json::array();
        for (const auto& iv : intervals) list.push_back({iv.start_s, iv.end_s});
        script[to_string(act)] = std::move(list);
    }
    j["script"] = std::move(script);
    json objects = json::array();
    for (const auto& obj : s.objects) {
        json jo;
        jo["category"] = to_string(obj.category);
        jo["box_w"] = obj.box_w;
        jo["box_h"] = obj.box_h;
        json wps = json::array();
        for (const auto& wp : obj.waypoints) wps.push_back({wp.t_s, wp.x, wp.y});
        jo["waypoints"] = std::move(wps);
        objects.push_back(std::move(jo));
    }
    j["objects"] = std::move(objects);
    json schedule = json::array();
    for (const auto& phase : s.hcp_schedule) schedule.push_back({phase.start_s, double(phase.count)});
    j["hcp_schedule"] = std::move(schedule);
    j["newborn_center"] = {s.newborn_center.x, s.newborn_center.y};
    j["hcph_box"] = {s.hcph_box_w, s.hcph_box_h};
    j["base_confidence"] = s.base_confidence;
    json n;
    n["dropout_rate"] = s.noise.dropout_rate;
    n["false_positive_rate"] = s.noise.false_positive_rate;
    n["fp_min_displacement_px"] = s.noise.fp_min_displacement_px;
    n["confidence_jitter"] = s.noise.confidence_jitter;
    n["logit_margin"] = s.noise.logit_margin;
    n["logit_noise_sigma"] = s.noise.logit_noise_sigma;
    j["noise"] = std::move(n);
    j["emit_truth_boxes"] = s.emit_truth_boxes;
    j["emit_frames"] = s.emit_frames;
    j["frame_channels"] = s.frame_channels;
    j["background"] = int(s.background);
    j["background_ramp_per_s"] = s.background_ramp_per_s;
    return j;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("scenario " + path + ": " + e.what());
    }
    Scenario s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "seed") s.seed = v.get<uint64_t>();
        else if (key == "episode_id") s.episode_id = v.get<std::string>();
        else if (key == "duration_s") s.duration_s = v.get<double>();
        else if (key == "fps") s.fps = v.get<double>();
        else if (key == "width") s.im_width = v.get<int>();
        else if (key == "height") s.im_height = v.get<int>();
        else if (key == "script") {
            for (auto a = v.begin(); a != v.end(); ++a) {
                Activity act = parse_activity(a.key());
                std::vector<Interval> intervals;
                for (const auto& ji : a.value())
                    intervals.push_back({ji.at(0).get<double>(), ji.at(1).get<double>()});
                s.script[act] = std::move(intervals);
            }
        }
        else if (key == "objects") {
            for (const auto& jo : v) {
                ObjectMotion obj;
                obj.category = parse_category(jo.at("category").get<std::string>());
                obj.box_w = jo.value("box_w", obj.box_w);
                obj.box_h = jo.value("box_h", obj.box_h);
                for (const auto& jw : jo.at("waypoints"))
                    obj.waypoints.push_back({jw.at(0).get<double>(), jw.at(1).get<double>(),
                                             jw.at(2).get<double>()});
                s.objects.push_back(std::move(obj));
            }
        }
        else if (key == "hcp_schedule") {
            for (const auto& jp : v)
                s.hcp_schedule.push_back({jp.at(0).get<double>(), jp.at(1).get<int>()});
        }
        else if (key == "newborn_center")
            s.newborn_center = {v.at(0).get<int>(), v.at(1).get<int>()};
        else if (key == "hcph_box") {
            s.hcph_box_w = v.at(0).get<int>();
            s.hcph_box_h = v.at(1).get<int>();
        }
        else if (key == "base_confidence") s.base_confidence = v.get<double>();
        else if (key == "noise") {
            for (auto n = v.begin(); n != v.end(); ++n) {
                if (n.key() == "dropout_rate") s.noise.dropout_rate = n.value().get<double>();
                else if (n.key() == "false_positive_rate")
                    s.noise.false_positive_rate = n.value().get<double>();
                else if (n.key() == "fp_min_displacement_px")
                    s.noise.fp_min_displacement_px = n.value().get<double>();
                else if (n.key() == "confidence_jitter")
                    s.noise.confidence_jitter = n.value().get<double>();
                else if (n.key() == "logit_margin") s.noise.logit_margin = n.value().get<double>();
                else if (n.key() == "logit_noise_sigma")
                    s.noise.logit_noise_sigma = n.value().get<double>();
                else throw ValidationError("scenario: unknown noise key '" + n.key() + "'");
            }
        }
        else if (key == "emit_truth_boxes") s.emit_truth_boxes = v.get<bool>();
        else if (key == "emit_frames") s.emit_frames = v.get<bool>();
        else if (key == "frame_channels") s.frame_channels = v.get<int>();
        else if (key == "background") s.background = uint8_t(v.get<int>());
        else if (key == "background_ramp_per_s") s.background_ramp_per_s = v.get<double>();
        else throw ValidationError("scenario: unknown key '" + key + "'");
    }
    s.validate();
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scenario: " + path);
    out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace tlf::synth
