#include "tlf/heatmap.hpp"

#include <algorithm>

#include "tlf/kernels.hpp"

namespace tlf {

Heatmap accumulate_heatmap(const Episode& episode) {
    const auto& ops = kernels::active_ops();
    Heatmap hm;
    hm.width = episode.meta.im_width;
    hm.height = episode.meta.im_height;
    hm.values.assign(size_t(hm.width) * hm.height, 0);
    for (const auto& rec : episode.detections) {
        for (const auto& box : rec.boxes) {
            if (box.category != ObjectCategory::HCPH) continue;
            // boxes arrive clipped from ingest
            for (int row = box.y; row < box.y + box.h; ++row)
                ops.add_span_u32(hm.values.data() + size_t(row) * hm.width + box.x,
                                 size_t(box.w), 1);
        }
    }
    return hm;
}

SummedAreaTable::SummedAreaTable(const Heatmap& hm)
    : width(hm.width + 1), height(hm.height + 1) {
    const auto& ops = kernels::active_ops();
    values.assign(size_t(width) * height, 0);
    // row prefix sums, then a vectorized column pass adding the row above
    for (int y = 0; y < hm.height; ++y) {
        uint64_t* dst = values.data() + size_t(y + 1) * width + 1;
        const uint32_t* src = hm.values.data() + size_t(y) * hm.width;
        uint64_t run = 0;
        for (int x = 0; x < hm.width; ++x) {
            run += src[x];
            dst[x] = run;
        }
    }
    for (int y = 2; y < height; ++y)
        ops.acc_u64(values.data() + size_t(y) * width, values.data() + size_t(y - 1) * width,
                    size_t(width));
}

PixelPos select_newborn_region(const Heatmap& hm, int side) {
    if (side > hm.width || side > hm.height)
        throw ConfigError("newborn region side " + std::to_string(side) +
                          " exceeds frame dimensions " + std::to_string(hm.width) + "x" +
                          std::to_string(hm.height));
    SummedAreaTable sat(hm);
    uint64_t best = 0;
    PixelPos best_tl{0, 0};
    bool have = false;
    for (int y = 0; y + side <= hm.height; ++y) {
        for (int x = 0; x + side <= hm.width; ++x) {
            uint64_t s = sat.window_sum(x, y, side);
            if (!have || s > best) {  // strict ">" keeps the smallest (y, x) on ties
                best = s;
                best_tl = {x, y};
                have = true;
            }
        }
    }
    return best_tl;
}

RegionSpec propose_newborn_region(const Episode& episode, int side) {
    Heatmap hm = accumulate_heatmap(episode);
    RegionSpec spec;
    spec.source = RegionSource::Newborn;
    spec.side_px = side;
    spec.episode_fixed = true;
    spec.top_left = {select_newborn_region(hm, side)};
    return spec;
}

}  // namespace tlf
