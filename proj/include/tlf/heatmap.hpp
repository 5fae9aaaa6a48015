#pragma once

#include <cstdint>
#include <vector>

#include "tlf/ingest.hpp"
#include "tlf/types.hpp"

namespace tlf {

// Accumulated HCPH detection mass over the whole episode: each HCPH box,
// clipped to the frame, adds 1 to every pixel it covers. Confidence
// magnitudes do not enter; the ingest cutoff already decided membership.
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> values;  // row-major

    uint32_t at(int x, int y) const { return values[size_t(y) * width + x]; }
};

Heatmap accumulate_heatmap(const Episode& episode);

// Summed-area table over a heatmap; sat(x, y) holds the sum of all values
// with coordinates < (x, y), so window sums are four lookups.
struct SummedAreaTable {
    int width = 0;   // heatmap width + 1
    int height = 0;  // heatmap height + 1
    std::vector<uint64_t> values;

    explicit SummedAreaTable(const Heatmap& hm);

    uint64_t window_sum(int x, int y, int side) const {
        const auto* v = values.data();
        size_t w = size_t(width);
        return v[size_t(y + side) * w + (x + side)] - v[size_t(y) * w + (x + side)] -
               v[size_t(y + side) * w + x] + v[size_t(y) * w + x];
    }
};

// Top-left of the side x side window with the maximum heatmap sum; ties go
// to the smallest (y, x). side larger than a heatmap dimension is a
// configuration error.
PixelPos select_newborn_region(const Heatmap& hm, int side);

RegionSpec propose_newborn_region(const Episode& episode, int side = 700);

}  // namespace tlf
