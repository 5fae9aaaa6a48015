#include "tlf/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace tlf {

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

BoundingBox parse_box(const json& jb, const std::string& where, bool conf_required) {
    reject_unknown_keys(jb, {"cat", "x", "y", "w", "h", "conf"}, where);
    BoundingBox box;
    box.category = parse_category(jb.at("cat").get<std::string>());
    box.x = jb.at("x").get<int>();
    box.y = jb.at("y").get<int>();
    box.w = jb.at("w").get<int>();
    box.h = jb.at("h").get<int>();
    if (conf_required || jb.contains("conf")) box.confidence = jb.at("conf").get<double>();
    if (box.w <= 0 || box.h <= 0) throw ValidationError(where + ": box must have w > 0 and h > 0");
    if (box.confidence < 0.0 || box.confidence > 1.0)
        throw ValidationError(where + ": confidence must be in [0,1]");
    return box;
}

// Clip to [0,w)x[0,h); returns false when nothing remains.
bool clip_box(BoundingBox& b, int im_w, int im_h) {
    int x0 = std::max(b.x, 0);
    int y0 = std::max(b.y, 0);
    int x1 = std::min(b.x + b.w, im_w);
    int y1 = std::min(b.y + b.h, im_h);
    if (x1 <= x0 || y1 <= y0) return false;
    b.x = x0;
    b.y = y0;
    b.w = x1 - x0;
    b.h = y1 - y0;
    return true;
}

EpisodeMeta load_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open meta file: " + path);
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw ValidationError("meta " + path + ": " + e.what());
    }
    reject_unknown_keys(m, {"episode_id", "width", "height"}, "meta");
    EpisodeMeta meta;
    meta.episode_id = m.at("episode_id").get<std::string>();
    meta.im_width = m.at("width").get<int>();
    meta.im_height = m.at("height").get<int>();
    if (meta.im_width <= 0 || meta.im_height <= 0)
        throw ValidationError("meta: width and height must be positive");
    return meta;
}

std::vector<DetectionRecord> load_detections(const std::string& path, const EpisodeMeta& meta,
                                             const Config& config) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detections file: " + path);
    std::vector<DetectionRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string where = "detections line " + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(where + ": " + e.what());
        }
        reject_unknown_keys(j, {"frame", "t", "boxes"}, where);
        DetectionRecord rec;
        rec.frame_index = j.at("frame").get<int64_t>();
        rec.timestamp_s = j.at("t").get<double>();
        if (rec.frame_index != int64_t(records.size()))
            throw ValidationError(where + ": frame indices must be contiguous from 0");
        if (rec.timestamp_s < 0 || !std::isfinite(rec.timestamp_s))
            throw ValidationError(where + ": timestamp must be finite and >= 0");
        if (!records.empty() && rec.timestamp_s <= records.back().timestamp_s)
            throw ValidationError(where + ": timestamps must strictly increase");
        for (const auto& jb : j.at("boxes")) {
            BoundingBox box = parse_box(jb, where, true);
            if (box.confidence < config.min_confidence.at(box.category)) continue;
            if (!clip_box(box, meta.im_width, meta.im_height)) continue;
            rec.boxes.push_back(box);
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw ValidationError("detections file has no frames: " + path);
    return records;
}

std::vector<WindowScore> load_scores(const std::string& path, const Config& config) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scores file: " + path);
    std::vector<WindowScore> scores;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string where = "scores line " + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(where + ": " + e.what());
        }
        reject_unknown_keys(j, {"activity", "region", "stream", "t0", "logits"}, where);
        WindowScore s;
        s.activity = parse_activity(j.at("activity").get<std::string>());
        s.region = parse_region_source(j.at("region").get<std::string>());
        s.stream = parse_stream(j.at("stream").get<std::string>());
        s.window_start_s = j.at("t0").get<double>();
        const auto& jl = j.at("logits");
        if (!jl.is_array() || jl.size() != 2)
            throw ValidationError(where + ": logits must be a pair");
        s.logits = {jl[0].get<double>(), jl[1].get<double>()};
        if (!std::isfinite(s.logits[0]) || !std::isfinite(s.logits[1]))
            throw ValidationError(where + ": logits must be finite");
        if (s.window_start_s < 0) throw ValidationError(where + ": t0 must be >= 0");
        double grid_pos = s.window_start_s * config.target_fps;
        if (std::abs(grid_pos - std::round(grid_pos)) > 1e-6)
            throw ValidationError(where + ": t0 not aligned to the frame grid");
        if (!routing_allows(s.activity, s.region, s.stream))
            throw ValidationError(where + ": (" + to_string(s.activity) + ", " +
                                  to_string(s.region) + ", " + to_string(s.stream) +
                                  ") is not a valid routing tuple");
        scores.push_back(s);
    }
    std::stable_sort(scores.begin(), scores.end(), [](const WindowScore& a, const WindowScore& b) {
        if (a.activity != b.activity) return a.activity < b.activity;
        if (a.window_start_s != b.window_start_s) return a.window_start_s < b.window_start_s;
        if (a.region != b.region) return a.region < b.region;
        return a.stream < b.stream;
    });
    for (size_t i = 1; i < scores.size(); ++i) {
        const auto& a = scores[i - 1];
        const auto& b = scores[i];
        if (a.activity == b.activity && a.region == b.region && a.stream == b.stream &&
            a.window_start_s == b.window_start_s)
            throw ValidationError("scores: duplicate (activity, region, stream, t0) tuple at t0=" +
                                  std::to_string(b.window_start_s));
    }
    return scores;
}

GroundTruthAnnotation load_truth(const std::string& path, int64_t frame_count) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("truth " + path + ": " + e.what());
    }
    reject_unknown_keys(j, {"activities", "hcp", "boxes"}, "truth");
    GroundTruthAnnotation truth;
    if (j.contains("activities")) {
        for (auto it = j["activities"].begin(); it != j["activities"].end(); ++it) {
            Activity act = parse_activity(it.key());
            std::vector<Interval> intervals;
            for (const auto& ji : it.value()) {
                if (!ji.is_array() || ji.size() != 2)
                    throw ValidationError("truth: interval must be [start_s, end_s]");
                Interval iv{ji[0].get<double>(), ji[1].get<double>()};
                if (!(iv.start_s < iv.end_s))
                    throw ValidationError("truth: interval start must precede end for " +
                                          to_string(act));
                intervals.push_back(iv);
            }
            std::sort(intervals.begin(), intervals.end(),
                      [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; });
            for (size_t i = 1; i < intervals.size(); ++i)
                if (intervals[i].start_s < intervals[i - 1].end_s)
                    throw ValidationError("truth: overlapping intervals for " + to_string(act));
            truth.activities[act] = std::move(intervals);
        }
    }
    if (j.contains("hcp")) {
        for (const auto& v : j["hcp"]) {
            int c = v.get<int>();
            if (c < 0) throw ValidationError("truth: hcp counts must be >= 0");
            truth.hcp.push_back(c);
        }
        if (int64_t(truth.hcp.size()) != frame_count)
            throw ValidationError("truth: hcp series length " + std::to_string(truth.hcp.size()) +
                                  " does not match frame count " + std::to_string(frame_count));
    }
    if (j.contains("boxes")) {
        std::vector<std::vector<BoundingBox>> frames;
        for (const auto& jf : j["boxes"]) {
            std::vector<BoundingBox> boxes;
            for (const auto& jb : jf) boxes.push_back(parse_box(jb, "truth boxes", false));
            frames.push_back(std::move(boxes));
        }
        if (int64_t(frames.size()) != frame_count)
            throw ValidationError("truth: boxes series length does not match frame count");
        truth.boxes = std::move(frames);
    }
    return truth;
}

}  // namespace

EpisodePaths EpisodePaths::in_dir(const std::string& dir) {
    EpisodePaths p;
    p.meta = (fs::path(dir) / "meta.json").string();
    p.detections = (fs::path(dir) / "detections.jsonl").string();
    auto opt = [&](const char* name) {
        fs::path q = fs::path(dir) / name;
        return fs::exists(q) ? q.string() : std::string();
    };
    p.scores = opt("scores.jsonl");
    p.truth = opt("truth.json");
    p.frames_dir = opt("frames");
    return p;
}

Episode load_episode(const EpisodePaths& paths, const Config& config) {
    Episode ep;
    ep.meta = load_meta(paths.meta);
    ep.detections = load_detections(paths.detections, ep.meta, config);
    ep.meta.frame_count = int64_t(ep.detections.size());
    double span = ep.last_ts() - ep.first_ts();
    ep.meta.native_fps =
        (ep.meta.frame_count >= 2 && span > 0) ? double(ep.meta.frame_count - 1) / span : 0.0;
    if (!paths.scores.empty()) ep.scores = load_scores(paths.scores, config);
    if (!paths.truth.empty()) ep.truth = load_truth(paths.truth, ep.meta.frame_count);
    if (!paths.frames_dir.empty()) {
        FrameSequence seq = load_frames(paths.frames_dir);
        if (seq.width != ep.meta.im_width || seq.height != ep.meta.im_height)
            throw ValidationError("frames dimensions do not match episode meta");
        ep.frames = std::move(seq);
    }
    return ep;
}

bool admit_for_training(const EpisodeMeta& meta, double min_fps) {
    return meta.native_fps > min_fps;
}

void save_meta(const EpisodeMeta& meta, const std::string& path) {
    json m;
    m["episode_id"] = meta.episode_id;
    m["width"] = meta.im_width;
    m["height"] = meta.im_height;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write meta: " + path);
    out << m.dump(2) << "\n";
}

void save_detections(const std::vector<DetectionRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write detections: " + path);
    for (const auto& rec : records) {
        json j;
        j["frame"] = rec.frame_index;
        j["t"] = rec.timestamp_s;
        json boxes = json::array();
        for (const auto& b : rec.boxes) {
            json jb;
            jb["cat"] = to_string(b.category);
            jb["x"] = b.x;
            jb["y"] = b.y;
            jb["w"] = b.w;
            jb["h"] = b.h;
            jb["conf"] = b.confidence;
            boxes.push_back(std::move(jb));
        }
        j["boxes"] = std::move(boxes);
        out << j.dump() << "\n";
    }
}

void save_scores(const std::vector<WindowScore>& scores, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scores: " + path);
    for (const auto& s : scores) {
        json j;
        j["activity"] = to_string(s.activity);
        j["region"] = to_string(s.region);
        j["stream"] = to_string(s.stream);
        j["t0"] = s.window_start_s;
        j["logits"] = {s.logits[0], s.logits[1]};
        out << j.dump() << "\n";
    }
}

void save_truth(const GroundTruthAnnotation& truth, const std::string& path) {
    json j;
    json acts = json::object();
    for (const auto& [act, intervals] : truth.activities) {
        json list = json::array();
        for (const auto& iv : intervals) list.push_back({iv.start_s, iv.end_s});
        acts[to_string(act)] = std::move(list);
    }
    j["activities"] = std::move(acts);
    if (!truth.hcp.empty()) j["hcp"] = truth.hcp;
    if (truth.boxes) {
        json frames = json::array();
        for (const auto& fb : *truth.boxes) {
            json list = json::array();
            for (const auto& b : fb) {
                json jb;
                jb["cat"] = to_string(b.category);
                jb["x"] = b.x;
                jb["y"] = b.y;
                jb["w"] = b.w;
                jb["h"] = b.h;
                jb["conf"] = b.confidence;
                list.push_back(std::move(jb));
            }
            frames.push_back(std::move(list));
        }
        j["boxes"] = std::move(frames);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write truth: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace tlf
