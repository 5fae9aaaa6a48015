#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tlf/types.hpp"

namespace tlf {

// Pixel buffers for an episode's pre-extracted frames. Grayscale (1 channel)
// or RGB (3 channels, interleaved), row-major.
struct FrameSequence {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> timestamps;            // one per frame, strictly increasing
    std::vector<std::vector<uint8_t>> frames;  // each width*height*channels bytes

    size_t frame_bytes() const { return size_t(width) * height * channels; }
    bool empty() const { return frames.empty(); }
};

// Directory layout: manifest.json naming dimensions and per-frame files with
// timestamps, plus one raw file per frame (width*height*channels bytes).
FrameSequence load_frames(const std::string& dir);
void save_frames(const FrameSequence& seq, const std::string& dir);

// Square crop at top_left (caller guarantees containment), then nearest-
// neighbor resize to out_side x out_side.
std::vector<uint8_t> crop_region(const std::vector<uint8_t>& frame, int width, int height,
                                 int channels, PixelPos top_left, int side);
std::vector<uint8_t> resize_nearest(const std::vector<uint8_t>& src, int src_w, int src_h,
                                    int channels, int dst_w, int dst_h);

// Binary PGM (P5), values scaled so the max maps to 255.
void write_pgm(const std::string& path, const std::vector<uint32_t>& grid, int width, int height);

}  // namespace tlf
