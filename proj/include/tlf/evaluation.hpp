#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tlf/types.hpp"

namespace tlf {

// Intersection over union of two boxes; zero-area boxes are rejected.
double iou(const BoundingBox& a, const BoundingBox& b);

struct CategoryDetectionStats {
    double ap = 0.0;
    int tp = 0;
    int fp = 0;
    int truth_count = 0;
    bool flagged_no_truth = false;  // predictions without any truth box
};

struct DetectionEvalReport {
    std::map<ObjectCategory, CategoryDetectionStats> per_category;
    double map_50 = 0.0;
};

// PASCAL VOC 2012-style evaluation at one IoU threshold: per category,
// predictions sorted by descending confidence greedily match the unmatched
// same-frame truth box of maximum IoU; rematches are false positives. AP is
// the all-points interpolated area under the precision-recall curve.
DetectionEvalReport evaluate_detections(const std::vector<DetectionRecord>& predictions,
                                        const std::vector<std::vector<BoundingBox>>& truth_boxes,
                                        double iou_thresh = 0.5);

// Percentage of indices where the two series agree exactly.
double p_measure(const std::vector<int>& predicted, const std::vector<int>& truth);

// True iff the covered fraction of the interval's frames is strictly above
// min_fraction. The coverage series is caller-defined (one flag per frame).
bool activity_detected_during(const Interval& interval, const std::vector<double>& frame_ts,
                              const std::vector<uint8_t>& coverage, double min_fraction = 0.8);

// Truth intervals on a 1 Hz grid: second k is positive iff its midpoint lies
// inside an interval.
std::vector<uint8_t> rasterize_truth(const std::vector<Interval>& intervals, size_t n_seconds,
                                     double period_s = 1.0);

struct TimelineEvalReport {
    int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, accuracy = 0.0, f1 = 0.0;
    // 0/0 cases resolve to 0 and clear these flags
    bool precision_defined = true, recall_defined = true, f1_defined = true;

    int64_t total() const { return tp + tn + fp + fn; }
};

TimelineEvalReport evaluate_timeline(const ActivityTimeline& predicted,
                                     const std::vector<Interval>& truth);

// Confusion over an explicit binary pair (used by the K-FCV pooled scoring).
TimelineEvalReport confusion_metrics(const std::vector<uint8_t>& predicted,
                                     const std::vector<uint8_t>& truth);

struct Quartiles {
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

// Linear interpolation between order statistics.
Quartiles quartiles(std::vector<double> values);

struct HcpEvalReport {
    std::vector<double> per_episode_p;  // exact-match percentage per episode
    std::vector<double> per_episode_e;  // mean absolute count error per episode
    double p_mean = 0.0;
    Quartiles p_q;
    double e_mean = 0.0;
    Quartiles e_q;
};

HcpEvalReport evaluate_hcp(const std::vector<HcpTimeline>& predictions,
                           const std::vector<std::vector<int>>& truth_counts);

// One video's fused probability series (1 Hz) plus its truth intervals.
struct VideoTimeline {
    std::string video_id;
    std::vector<double> probs;
    std::vector<Interval> truth;
};

struct KfcvFold {
    std::string heldout_id;
    double threshold = 0.0;
    TimelineEvalReport heldout;
    bool skipped = false;  // activity absent from every training video
};

struct KfcvReport {
    Activity activity = Activity::Uncovered;
    double grid_step = 0.01;
    std::vector<KfcvFold> folds;
    double mean_precision = 0.0, mean_recall = 0.0, mean_accuracy = 0.0;
    Quartiles threshold_q;
    int skipped_folds = 0;
};

// Leave-one-video-out: each fold picks the grid threshold maximizing pooled
// F1 over the training videos' seconds (ties to the lowest threshold) and
// scores the held-out video with it.
KfcvReport kfcv_threshold(const std::vector<VideoTimeline>& videos, Activity activity,
                          double grid_step = 0.01);

// Best threshold on a pooled set of videos, by the same rule (exposed for
// oracle tests against the per-fold search).
double best_threshold_pooled(const std::vector<const VideoTimeline*>& videos, double grid_step,
                             double* best_f1 = nullptr);

}  // namespace tlf
