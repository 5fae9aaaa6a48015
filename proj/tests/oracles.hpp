#pragma once

// Naive reference implementations used by the unit and acceptance suites.
// These deliberately avoid the library's code paths: direct O(n^2) scans,
// no summed-area tables, no precision envelopes computed in place.

#include <algorithm>
#include <cmath>
#include <vector>

#include "tlf/evaluation.hpp"
#include "tlf/heatmap.hpp"
#include "tlf/types.hpp"

namespace tlf::oracles {

inline double iou_direct(const BoundingBox& a, const BoundingBox& b) {
    int ix0 = std::max(a.x, b.x), iy0 = std::max(a.y, b.y);
    int ix1 = std::min(a.x + a.w, b.x + b.w), iy1 = std::min(a.y + a.h, b.y + b.h);
    double inter = double(std::max(0, ix1 - ix0)) * double(std::max(0, iy1 - iy0));
    return inter / (double(a.w) * a.h + double(b.w) * b.h - inter);
}

struct DetectionOracleResult {
    double ap = 0.0;
    int tp = 0;
    int fp = 0;
};

inline DetectionOracleResult detection_eval_direct(
    const std::vector<DetectionRecord>& preds,
    const std::vector<std::vector<BoundingBox>>& truths, ObjectCategory cat, double thresh) {
    struct P {
        size_t frame;
        BoundingBox box;
        size_t order;
    };
    std::vector<P> flat;
    size_t order = 0;
    for (size_t f = 0; f < preds.size(); ++f)
        for (const auto& box : preds[f].boxes)
            if (box.category == cat) flat.push_back({f, box, order++});
    std::sort(flat.begin(), flat.end(), [](const P& a, const P& b) {
        if (a.box.confidence != b.box.confidence) return a.box.confidence > b.box.confidence;
        return a.order < b.order;
    });

    int n_truth = 0;
    std::vector<std::vector<bool>> used(truths.size());
    for (size_t f = 0; f < truths.size(); ++f) {
        for (const auto& t : truths[f])
            if (t.category == cat) ++n_truth;
        used[f].assign(truths[f].size(), false);
    }

    DetectionOracleResult result;
    std::vector<double> precisions, recalls;
    for (const auto& p : flat) {
        double best = 0.0;
        int best_idx = -1;
        for (size_t t = 0; t < truths[p.frame].size(); ++t) {
            if (truths[p.frame][t].category != cat) continue;
            double v = iou_direct(p.box, truths[p.frame][t]);
            if (v > best) {
                best = v;
                best_idx = int(t);
            }
        }
        if (best_idx >= 0 && best >= thresh && !used[p.frame][size_t(best_idx)]) {
            used[p.frame][size_t(best_idx)] = true;
            ++result.tp;
        } else {
            ++result.fp;
        }
        precisions.push_back(double(result.tp) / double(result.tp + result.fp));
        recalls.push_back(n_truth ? double(result.tp) / n_truth : 0.0);
    }

    // all-points area via forward max-scans over the raw point list
    if (n_truth > 0) {
        double prev_recall = 0.0;
        for (size_t k = 0; k < recalls.size(); ++k) {
            if (recalls[k] == prev_recall) continue;
            double max_prec = 0.0;
            for (size_t j = k; j < precisions.size(); ++j)
                max_prec = std::max(max_prec, precisions[j]);
            result.ap += (recalls[k] - prev_recall) * max_prec;
            prev_recall = recalls[k];
        }
    }
    return result;
}

inline TimelineEvalReport timeline_eval_direct(const std::vector<uint8_t>& pred,
                                               const std::vector<Interval>& truth) {
    TimelineEvalReport r;
    for (size_t k = 0; k < pred.size(); ++k) {
        double mid = double(k) + 0.5;
        bool pos = false;
        for (const auto& iv : truth) pos = pos || (mid >= iv.start_s && mid < iv.end_s);
        if (pred[k] && pos) ++r.tp;
        if (pred[k] && !pos) ++r.fp;
        if (!pred[k] && pos) ++r.fn;
        if (!pred[k] && !pos) ++r.tn;
    }
    r.precision = (r.tp + r.fp) ? double(r.tp) / double(r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) ? double(r.tp) / double(r.tp + r.fn) : 0.0;
    r.accuracy = pred.empty() ? 0.0 : double(r.tp + r.tn) / double(pred.size());
    r.f1 = (r.precision + r.recall) ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

inline double p_measure_direct(const std::vector<int>& a, const std::vector<int>& b) {
    int64_t hits = 0;
    for (size_t i = 0; i < a.size(); ++i) hits += a[i] == b[i];
    return 100.0 * double(hits) / double(a.size());
}

// O(W*H*side^2) window-sum argmax with the (y, x) tie-break.
inline PixelPos select_region_direct(const Heatmap& hm, int side) {
    uint64_t best = 0;
    PixelPos best_tl{0, 0};
    bool have = false;
    for (int y = 0; y + side <= hm.height; ++y) {
        for (int x = 0; x + side <= hm.width; ++x) {
            uint64_t sum = 0;
            for (int dy = 0; dy < side; ++dy)
                for (int dx = 0; dx < side; ++dx) sum += hm.at(x + dx, y + dy);
            if (!have || sum > best) {
                best = sum;
                best_tl = {x, y};
                have = true;
            }
        }
    }
    return best_tl;
}

}  // namespace tlf::oracles
