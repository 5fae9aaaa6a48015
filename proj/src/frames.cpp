#include "tlf/frames.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

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

}  // namespace

FrameSequence load_frames(const std::string& dir) {
    fs::path manifest_path = fs::path(dir) / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open frame manifest: " + manifest_path.string());
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw ValidationError("frame manifest " + manifest_path.string() + ": " + e.what());
    }
    reject_unknown_keys(m, {"width", "height", "channels", "frames"}, "frame manifest");

    FrameSequence seq;
    seq.width = m.at("width").get<int>();
    seq.height = m.at("height").get<int>();
    seq.channels = m.value("channels", 1);
    if (seq.width <= 0 || seq.height <= 0)
        throw ValidationError("frame manifest: non-positive dimensions");
    if (seq.channels != 1 && seq.channels != 3)
        throw ValidationError("frame manifest: channels must be 1 or 3");

    for (const auto& f : m.at("frames")) {
        reject_unknown_keys(f, {"file", "t"}, "frame manifest entry");
        double t = f.at("t").get<double>();
        if (!seq.timestamps.empty() && t <= seq.timestamps.back())
            throw ValidationError("frame manifest: timestamps must strictly increase");
        fs::path fp = fs::path(dir) / f.at("file").get<std::string>();
        std::ifstream raw(fp, std::ios::binary);
        if (!raw) throw IoError("cannot open frame file: " + fp.string());
        std::vector<uint8_t> px(seq.frame_bytes());
        raw.read(reinterpret_cast<char*>(px.data()), std::streamsize(px.size()));
        if (size_t(raw.gcount()) != px.size())
            throw ValidationError("frame file truncated: " + fp.string());
        seq.timestamps.push_back(t);
        seq.frames.push_back(std::move(px));
    }
    return seq;
}

void save_frames(const FrameSequence& seq, const std::string& dir) {
    fs::create_directories(dir);
    json m;
    m["width"] = seq.width;
    m["height"] = seq.height;
    m["channels"] = seq.channels;
    json list = json::array();
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%06zu.raw", i);
        json entry;
        entry["file"] = name;
        entry["t"] = seq.timestamps[i];
        list.push_back(entry);
        std::ofstream raw(fs::path(dir) / name, std::ios::binary);
        if (!raw) throw IoError("cannot write frame file in " + dir);
        raw.write(reinterpret_cast<const char*>(seq.frames[i].data()),
                  std::streamsize(seq.frames[i].size()));
    }
    m["frames"] = std::move(list);
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw IoError("cannot write frame manifest in " + dir);
    out << m.dump(2) << "\n";
}

std::vector<uint8_t> crop_region(const std::vector<uint8_t>& frame, int width, int height,
                                 int channels, PixelPos top_left, int side) {
    if (top_left.x < 0 || top_left.y < 0 || top_left.x + side > width ||
        top_left.y + side > height)
        throw ValidationError("crop region outside frame bounds");
    std::vector<uint8_t> out(size_t(side) * side * channels);
    for (int r = 0; r < side; ++r) {
        const uint8_t* src =
            frame.data() + (size_t(top_left.y + r) * width + top_left.x) * channels;
        std::copy(src, src + size_t(side) * channels,
                  out.begin() + size_t(r) * side * channels);
    }
    return out;
}

std::vector<uint8_t> resize_nearest(const std::vector<uint8_t>& src, int src_w, int src_h,
                                    int channels, int dst_w, int dst_h) {
    std::vector<uint8_t> out(size_t(dst_w) * dst_h * channels);
    for (int y = 0; y < dst_h; ++y) {
        int sy = std::min(src_h - 1, y * src_h / dst_h);
        for (int x = 0; x < dst_w; ++x) {
            int sx = std::min(src_w - 1, x * src_w / dst_w);
            const uint8_t* s = src.data() + (size_t(sy) * src_w + sx) * channels;
            uint8_t* d = out.data() + (size_t(y) * dst_w + x) * channels;
            for (int c = 0; c < channels; ++c) d[c] = s[c];
        }
    }
    return out;
}

void write_pgm(const std::string& path, const std::vector<uint32_t>& grid, int width,
               int height) {
    if (grid.size() != size_t(width) * height)
        throw ValidationError("pgm dump: grid size does not match dimensions");
    uint32_t maxv = 0;
    for (uint32_t v : grid) maxv = std::max(maxv, v);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write pgm: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    std::vector<uint8_t> row(size_t(width), 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            uint32_t v = grid[size_t(y) * width + x];
            row[size_t(x)] = maxv == 0 ? 0 : uint8_t(uint64_t(v) * 255 / maxv);
        }
        out.write(reinterpret_cast<const char*>(row.data()), width);
    }
}

}  // namespace tlf
