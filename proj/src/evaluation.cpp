#include "tlf/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace tlf {

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0)
        throw ValidationError("iou requires boxes with positive area");
    double x0 = std::max(a.x, b.x);
    double y0 = std::max(a.y, b.y);
    double x1 = std::min(a.x + a.w, b.x + b.w);
    double y1 = std::min(a.y + a.h, b.y + b.h);
    double inter = std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0);
    double uni = a.area() + b.area() - inter;
    return inter / uni;
}

namespace {

struct FlatPrediction {
    size_t frame = 0;
    BoundingBox box;
    size_t order = 0;  // input order, for deterministic confidence ties
};

// All-points interpolated area under the precision/recall point list.
double ap_all_points(std::vector<double> recall, std::vector<double> precision) {
    std::vector<double> mrec;
    mrec.push_back(0.0);
    mrec.insert(mrec.end(), recall.begin(), recall.end());
    mrec.push_back(1.0);
    std::vector<double> mpre;
    mpre.push_back(0.0);
    mpre.insert(mpre.end(), precision.begin(), precision.end());
    mpre.push_back(0.0);
    for (size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
    double ap = 0.0;
    for (size_t i = 0; i + 1 < mrec.size(); ++i)
        if (mrec[i + 1] != mrec[i]) ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1];
    return ap;
}

}  // namespace

DetectionEvalReport evaluate_detections(const std::vector<DetectionRecord>& predictions,
                                        const std::vector<std::vector<BoundingBox>>& truth_boxes,
                                        double iou_thresh) {
    DetectionEvalReport report;
    for (ObjectCategory cat : kAllCategories) {
        std::vector<FlatPrediction> preds;
        size_t order = 0;
        for (size_t f = 0; f < predictions.size(); ++f)
            for (const auto& box : predictions[f].boxes)
                if (box.category == cat) preds.push_back({f, box, order++});

        std::vector<std::vector<const BoundingBox*>> truths(truth_boxes.size());
        int truth_count = 0;
        for (size_t f = 0; f < truth_boxes.size(); ++f)
            for (const auto& box : truth_boxes[f])
                if (box.category == cat) {
                    truths[f].push_back(&box);
                    ++truth_count;
                }

        if (preds.empty() && truth_count == 0) continue;

        std::sort(preds.begin(), preds.end(), [](const FlatPrediction& a, const FlatPrediction& b) {
            if (a.box.confidence != b.box.confidence)
                return a.box.confidence > b.box.confidence;
            return a.order < b.order;
        });

        std::vector<std::vector<bool>> matched(truths.size());
        for (size_t f = 0; f < truths.size(); ++f) matched[f].assign(truths[f].size(), false);

        CategoryDetectionStats stats;
        stats.truth_count = truth_count;
        std::vector<double> rec, pre;
        for (const auto& p : preds) {
            int best_idx = -1;
            double best_iou = 0.0;
            if (p.frame < truths.size()) {
                for (size_t t = 0; t < truths[p.frame].size(); ++t) {
                    double v = iou(p.box, *truths[p.frame][t]);
                    if (v > best_iou) {
                        best_iou = v;
                        best_idx = int(t);
                    }
                }
            }
            if (best_idx >= 0 && best_iou >= iou_thresh && !matched[p.frame][size_t(best_idx)]) {
                matched[p.frame][size_t(best_idx)] = true;
                ++stats.tp;
            } else {
                ++stats.fp;  // miss or duplicate of an already-matched truth
            }
            rec.push_back(truth_count > 0 ? double(stats.tp) / truth_count : 0.0);
            pre.push_back(double(stats.tp) / double(stats.tp + stats.fp));
        }
        stats.ap = truth_count > 0 ? ap_all_points(rec, pre) : 0.0;
        stats.flagged_no_truth = truth_count == 0 && !preds.empty();
        report.per_category[cat] = stats;
    }
    double sum = 0.0;
    for (const auto& [cat, stats] : report.per_category) sum += stats.ap;
    report.map_50 =
        report.per_category.empty() ? 0.0 : sum / double(report.per_category.size());
    return report;
}

double p_measure(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw ValidationError("p_measure requires equal-length series");
    if (predicted.empty()) throw ValidationError("p_measure requires a non-empty series");
    int64_t correct = 0;
    for (size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return 100.0 * double(correct) / double(predicted.size());
}

bool activity_detected_during(const Interval& interval, const std::vector<double>& frame_ts,
                              const std::vector<uint8_t>& coverage, double min_fraction) {
    if (!(interval.start_s < interval.end_s))
        throw ValidationError("activity interval must have start < end");
    if (frame_ts.size() != coverage.size())
        throw ValidationError("coverage series length does not match timestamps");
    int64_t inside = 0, covered = 0;
    for (size_t i = 0; i < frame_ts.size(); ++i) {
        if (frame_ts[i] < interval.start_s || frame_ts[i] >= interval.end_s) continue;
        ++inside;
        if (coverage[i]) ++covered;
    }
    if (inside == 0) return false;  // nothing sampled the interval
    return double(covered) / double(inside) > min_fraction;
}

std::vector<uint8_t> rasterize_truth(const std::vector<Interval>& intervals, size_t n_seconds,
                                     double period_s) {
    std::vector<uint8_t> out(n_seconds, 0);
    for (size_t k = 0; k < n_seconds; ++k) {
        double midpoint = (double(k) + 0.5) * period_s;
        for (const auto& iv : intervals)
            if (iv.contains(midpoint)) {
                out[k] = 1;
                break;
            }
    }
    return out;
}

TimelineEvalReport confusion_metrics(const std::vector<uint8_t>& predicted,
                                     const std::vector<uint8_t>& truth) {
    if (predicted.size() != truth.size())
        throw ValidationError("confusion requires equal-length series");
    TimelineEvalReport r;
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && truth[i]) ++r.tp;
        else if (predicted[i] && !truth[i]) ++r.fp;
        else if (!predicted[i] && truth[i]) ++r.fn;
        else ++r.tn;
    }
    if (r.tp + r.fp > 0) r.precision = double(r.tp) / double(r.tp + r.fp);
    else r.precision_defined = false;
    if (r.tp + r.fn > 0) r.recall = double(r.tp) / double(r.tp + r.fn);
    else r.recall_defined = false;
    r.accuracy = r.total() > 0 ? double(r.tp + r.tn) / double(r.total()) : 0.0;
    if (r.precision + r.recall > 0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    else r.f1_defined = false;
    return r;
}

TimelineEvalReport evaluate_timeline(const ActivityTimeline& predicted,
                                     const std::vector<Interval>& truth) {
    auto truth_binary = rasterize_truth(truth, predicted.binary.size(), predicted.sample_period_s);
    return confusion_metrics(predicted.binary, truth_binary);
}

Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) throw ValidationError("quartiles of an empty set");
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        double h = (double(values.size()) - 1.0) * p;
        size_t lo = size_t(std::floor(h));
        size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
    };
    return {at(0.25), at(0.50), at(0.75)};
}

HcpEvalReport evaluate_hcp(const std::vector<HcpTimeline>& predictions,
                           const std::vector<std::vector<int>>& truth_counts) {
    if (predictions.size() != truth_counts.size() || predictions.empty())
        throw ValidationError("evaluate_hcp requires matching non-empty episode sets");
    HcpEvalReport report;
    for (size_t e = 0; e < predictions.size(); ++e) {
        const auto& pred = predictions[e].counts;
        const auto& truth = truth_counts[e];
        report.per_episode_p.push_back(p_measure(pred, truth));
        double abs_err = 0.0;
        for (size_t i = 0; i < pred.size(); ++i) abs_err += std::abs(pred[i] - truth[i]);
        report.per_episode_e.push_back(abs_err / double(pred.size()));
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / double(v.size());
    };
    report.p_mean = mean(report.per_episode_p);
    report.e_mean = mean(report.per_episode_e);
    report.p_q = quartiles(report.per_episode_p);
    report.e_q = quartiles(report.per_episode_e);
    return report;
}

namespace {

struct PooledSeconds {
    std::vector<double> probs;
    std::vector<uint8_t> truth;
    int64_t positives = 0;
};

PooledSeconds pool_videos(const std::vector<const VideoTimeline*>& videos) {
    PooledSeconds pool;
    for (const auto* v : videos) {
        auto truth = rasterize_truth(v->truth, v->probs.size());
        for (size_t i = 0; i < v->probs.size(); ++i) {
            pool.probs.push_back(v->probs[i]);
            pool.truth.push_back(truth[i]);
            pool.positives += truth[i];
        }
    }
    return pool;
}

double pooled_f1(const PooledSeconds& pool, double threshold) {
    int64_t tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pool.probs.size(); ++i) {
        bool pred = pool.probs[i] > threshold;
        if (pred && pool.truth[i]) ++tp;
        else if (pred && !pool.truth[i]) ++fp;
        else if (!pred && pool.truth[i]) ++fn;
    }
    double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

double best_threshold_pooled(const std::vector<const VideoTimeline*>& videos, double grid_step,
                             double* best_f1) {
    PooledSeconds pool = pool_videos(videos);
    double best_t = 0.0, best = -1.0;
    int64_t steps = int64_t(std::llround(1.0 / grid_step));
    for (int64_t s = 0; s <= steps; ++s) {
        double t = double(s) * grid_step;
        double f1 = pooled_f1(pool, t);
        if (f1 > best) {  // strict ">" keeps the lowest threshold on ties
            best = f1;
            best_t = t;
        }
    }
    if (best_f1) *best_f1 = best;
    return best_t;
}

KfcvReport kfcv_threshold(const std::vector<VideoTimeline>& videos, Activity activity,
                          double grid_step) {
    if (videos.size() < 2)
        throw ValidationError("kfcv_threshold requires at least 2 videos");
    KfcvReport report;
    report.activity = activity;
    report.grid_step = grid_step;

    std::vector<double> chosen;
    double sp = 0.0, sr = 0.0, sa = 0.0;
    int counted = 0;
    for (size_t heldout = 0; heldout < videos.size(); ++heldout) {
        KfcvFold fold;
        fold.heldout_id = videos[heldout].video_id;

        std::vector<const VideoTimeline*> train;
        for (size_t v = 0; v < videos.size(); ++v)
            if (v != heldout) train.push_back(&videos[v]);

        PooledSeconds pool = pool_videos(train);
        if (pool.positives == 0) {
            fold.skipped = true;
            ++report.skipped_folds;
            report.folds.push_back(std::move(fold));
            continue;
        }

        fold.threshold = best_threshold_pooled(train, grid_step);
        const auto& hv = videos[heldout];
        std::vector<uint8_t> pred(hv.probs.size());
        for (size_t i = 0; i < hv.probs.size(); ++i) pred[i] = hv.probs[i] > fold.threshold;
        fold.heldout = confusion_metrics(pred, rasterize_truth(hv.truth, hv.probs.size()));

        chosen.push_back(fold.threshold);
        sp += fold.heldout.precision;
        sr += fold.heldout.recall;
        sa += fold.heldout.accuracy;
        ++counted;
        report.folds.push_back(std::move(fold));
    }
    if (counted == 0)
        throw ValidationError("activity " + to_string(activity) +
                              " absent from every training fold");
    report.mean_precision = sp / counted;
    report.mean_recall = sr / counted;
    report.mean_accuracy = sa / counted;
    report.threshold_q = quartiles(chosen);
    return report;
}

}  // namespace tlf
