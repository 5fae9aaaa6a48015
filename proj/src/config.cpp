#include "tlf/config.hpp"

#include <cctype>
#include <cstring>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace tlf {

namespace {

// shortest representation that parses back to the same double
std::string fmt_double(double v) {
    char buf[64];
    for (int prec : {15, 16, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string Config::dump() const {
    std::map<std::string, std::string> kv;
    kv["coverage_detected_fraction"] = fmt_double(coverage_detected_fraction);
    kv["detection_iou_thresh"] = fmt_double(detection_iou_thresh);
    kv["jump_px"] = fmt_double(jump_px);
    kv["kfcv_grid_step"] = fmt_double(kfcv_grid_step);
    kv["max_peak_frames"] = std::to_string(max_peak_frames);
    kv["min_fps_training"] = fmt_double(min_fps_training);
    kv["missing_score_policy"] =
        missing_score_policy == MissingScorePolicy::AvailableOnly ? "available-only" : "strict";
    kv["newborn_region_side_px"] = std::to_string(newborn_region_side_px);
    kv["object_region_side_px"] = std::to_string(object_region_side_px);
    kv["smoothing_window_frames"] = std::to_string(smoothing_window_frames);
    kv["target_fps"] = fmt_double(target_fps);
    kv["test_stride_frames"] = std::to_string(test_stride_frames);
    kv["train_stride_frames"] = std::to_string(train_stride_frames);
    kv["window_alignment"] = window_alignment == WindowAlignment::Start ? "start" : "center";
    kv["window_frames"] = std::to_string(window_frames);
    for (auto c : kAllCategories)
        kv["min_confidence." + to_string(c)] = fmt_double(min_confidence.at(c));
    for (auto a : kAllActivities) kv["t_act." + to_string(a)] = fmt_double(t_act.at(a));

    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

void Config::set_key(const std::string& key, const std::string& value) {
    if (key == "coverage_detected_fraction") coverage_detected_fraction = parse_double(key, value);
    else if (key == "detection_iou_thresh") detection_iou_thresh = parse_double(key, value);
    else if (key == "jump_px") jump_px = parse_double(key, value);
    else if (key == "kfcv_grid_step") kfcv_grid_step = parse_double(key, value);
    else if (key == "max_peak_frames") max_peak_frames = parse_int(key, value);
    else if (key == "min_fps_training") min_fps_training = parse_double(key, value);
    else if (key == "missing_score_policy") {
        if (value == "available-only") missing_score_policy = MissingScorePolicy::AvailableOnly;
        else if (value == "strict") missing_score_policy = MissingScorePolicy::Strict;
        else throw ConfigError("config key 'missing_score_policy': expected available-only|strict");
    }
    else if (key == "newborn_region_side_px") newborn_region_side_px = parse_int(key, value);
    else if (key == "object_region_side_px") object_region_side_px = parse_int(key, value);
    else if (key == "smoothing_window_frames") smoothing_window_frames = parse_int(key, value);
    else if (key == "target_fps") target_fps = parse_double(key, value);
    else if (key == "test_stride_frames") test_stride_frames = parse_int(key, value);
    else if (key == "train_stride_frames") train_stride_frames = parse_int(key, value);
    else if (key == "window_alignment") {
        if (value == "start") window_alignment = WindowAlignment::Start;
        else if (value == "center") window_alignment = WindowAlignment::Center;
        else throw ConfigError("config key 'window_alignment': expected start|center");
    }
    else if (key == "window_frames") window_frames = parse_int(key, value);
    else if (key.rfind("min_confidence.", 0) == 0) {
        ObjectCategory c = parse_category(key.substr(15));
        min_confidence[c] = parse_double(key, value);
    }
    else if (key.rfind("t_act.", 0) == 0) {
        Activity a = parse_activity(key.substr(6));
        t_act[a] = parse_double(key, value);
    }
    else throw ConfigError("unknown config key: '" + key + "'");
}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set_key(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::apply_env_overrides() {
    // Keys map to env names by uppercasing and replacing '.' and '-' with '_'.
    auto env_name = [](std::string key) {
        for (char& ch : key) {
            if (ch == '.' || ch == '-') ch = '_';
            else ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        }
        return "TLF_" + key;
    };
    std::vector<std::string> keys = {
        "coverage_detected_fraction", "detection_iou_thresh", "jump_px", "kfcv_grid_step",
        "max_peak_frames", "min_fps_training", "missing_score_policy", "newborn_region_side_px",
        "object_region_side_px", "smoothing_window_frames", "target_fps", "test_stride_frames",
        "train_stride_frames", "window_alignment", "window_frames"};
    for (auto c : kAllCategories) keys.push_back("min_confidence." + to_string(c));
    for (auto a : kAllActivities) keys.push_back("t_act." + to_string(a));
    for (const auto& key : keys) {
        const char* v = std::getenv(env_name(key).c_str());
        if (v) set_key(key, v);
    }
    validate();
}

void Config::validate() const {
    if (smoothing_window_frames < 1 || smoothing_window_frames % 2 == 0)
        throw ConfigError("smoothing_window_frames must be odd and >= 1");
    if (max_peak_frames < 1) throw ConfigError("max_peak_frames must be >= 1");
    if (jump_px <= 0) throw ConfigError("jump_px must be > 0");
    if (object_region_side_px < 1 || newborn_region_side_px < 1)
        throw ConfigError("region sides must be >= 1");
    if (target_fps <= 0) throw ConfigError("target_fps must be > 0");
    if (window_frames < 1 || test_stride_frames < 1 || train_stride_frames < 1)
        throw ConfigError("window length and strides must be >= 1");
    if (kfcv_grid_step <= 0 || kfcv_grid_step > 1)
        throw ConfigError("kfcv_grid_step must be in (0, 1]");
    for (auto& [c, v] : min_confidence)
        if (v < 0 || v > 1) throw ConfigError("min_confidence." + to_string(c) + " must be in [0,1]");
    for (auto& [a, v] : t_act)
        if (v < 0 || v > 1) throw ConfigError("t_act." + to_string(a) + " must be in [0,1]");
}

}  // namespace tlf
