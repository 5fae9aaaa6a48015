#include "tlf/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace tlf {

std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
    if (!std::isfinite(logits[0]) || !std::isfinite(logits[1]))
        throw ValidationError("softmax2 requires finite logits");
    double m = std::max(logits[0], logits[1]);
    double e0 = std::exp(logits[0] - m);
    double e1 = std::exp(logits[1] - m);
    double z = e0 + e1;
    return {e0 / z, e1 / z};
}

double fuse_streams(const std::vector<WindowScore>& scores) {
    if (scores.empty()) throw ValidationError("fuse_streams requires at least one score");
    double l0 = 0.0, l1 = 0.0;
    for (const auto& s : scores) {
        l0 += s.logits[0];
        l1 += s.logits[1];
    }
    double n = double(scores.size());
    return softmax2({l0 / n, l1 / n})[1];
}

double fuse_regions(const std::vector<double>& region_probs) {
    if (region_probs.empty()) throw ValidationError("fuse_regions requires at least one region");
    double sum = 0.0;
    for (double p : region_probs) sum += p;
    return sum / double(region_probs.size());
}

std::vector<FusedWindowProb> fuse_episode_windows(const Episode& episode, const Config& config) {
    const bool strict = config.missing_score_policy == MissingScorePolicy::Strict;

    // scores arrive sorted by (activity, window_start_s)
    std::vector<FusedWindowProb> out;
    size_t i = 0;
    const auto& scores = episode.scores;
    while (i < scores.size()) {
        Activity act = scores[i].activity;
        double t0 = scores[i].window_start_s;
        size_t j = i;
        while (j < scores.size() && scores[j].activity == act &&
               scores[j].window_start_s == t0)
            ++j;

        const Routing& routing = routing_for(act);
        FusedWindowProb fused;
        fused.activity = act;
        fused.window_start_s = t0;
        std::vector<double> region_probs;
        for (RegionSource region : routing.regions) {
            std::vector<WindowScore> region_scores;
            for (size_t k = i; k < j; ++k)
                if (scores[k].region == region) region_scores.push_back(scores[k]);
            if (region_scores.size() < routing.streams.size() && strict)
                throw ValidationError("missing stream score for " + to_string(act) + "/" +
                                      to_string(region) + " at t0=" + std::to_string(t0));
            if (region_scores.empty()) continue;
            region_probs.push_back(fuse_streams(region_scores));
            fused.regions_used.push_back(region);
            for (const auto& s : region_scores)
                if (std::find(fused.streams_used.begin(), fused.streams_used.end(), s.stream) ==
                    fused.streams_used.end())
                    fused.streams_used.push_back(s.stream);
        }
        if (region_probs.empty()) {
            if (strict)
                throw ValidationError("no region scores for " + to_string(act) +
                                      " at t0=" + std::to_string(t0));
            i = j;
            continue;  // window dropped; timeline assembly carries over it
        }
        fused.prob_activity = fuse_regions(region_probs);
        out.push_back(std::move(fused));
        i = j;
    }
    return out;
}

ActivityTimeline assemble_timeline(Activity activity, const std::vector<FusedWindowProb>& fused,
                                   double t_act, double duration_s, const Config& config) {
    ActivityTimeline tl;
    tl.activity = activity;
    tl.sample_period_s = 1.0;
    tl.threshold_used = t_act;
    const int64_t n = std::max<int64_t>(1, int64_t(std::ceil(duration_s - 1e-9)));

    // Window -> second assignment. Start alignment pins the window to its
    // start second; center alignment shifts it to the second under the
    // window midpoint.
    const double window_len_s = double(config.window_frames) / config.target_fps;
    const double shift = config.window_alignment == WindowAlignment::Center ? window_len_s / 2 : 0;

    std::vector<double> by_second(size_t(n), -1.0);
    bool any = false;
    for (const auto& f : fused) {
        if (f.activity != activity) continue;
        double pos = f.window_start_s;
        if (std::abs(pos - std::round(pos)) > 1e-6)
            throw ValidationError("fused window start " + std::to_string(pos) +
                                  " is not on the 1 s test grid");
        int64_t k = int64_t(std::llround(pos + shift));
        if (k < 0 || k >= n) continue;
        by_second[size_t(k)] = f.prob_activity;
        any = true;
    }
    if (!any)
        throw ValidationError("no fused windows for activity " + to_string(activity));

    // carry-forward over gaps, back-fill the leading edge
    double first = -1.0;
    for (double v : by_second)
        if (v >= 0) { first = v; break; }
    double last = first;
    tl.probs.resize(size_t(n));
    tl.binary.resize(size_t(n));
    for (int64_t k = 0; k < n; ++k) {
        if (by_second[size_t(k)] >= 0) last = by_second[size_t(k)];
        tl.probs[size_t(k)] = last;
        tl.binary[size_t(k)] = last > t_act ? 1 : 0;
    }
    return tl;
}

HcpTimeline estimate_hcp(const Episode& episode) {
    HcpTimeline tl;
    tl.counts.reserve(episode.detections.size());
    for (const auto& rec : episode.detections) {
        int count = 0;
        for (const auto& box : rec.boxes)
            if (box.category == ObjectCategory::HCPH) ++count;
        tl.counts.push_back(count);
    }
    return tl;
}

std::map<Activity, ActivityTimeline> fuse_episode(const Episode& episode, const Config& config) {
    auto fused = fuse_episode_windows(episode, config);
    std::map<Activity, ActivityTimeline> out;
    for (Activity act : kAllActivities) {
        bool present = std::any_of(fused.begin(), fused.end(),
                                   [&](const FusedWindowProb& f) { return f.activity == act; });
        if (!present) continue;
        out[act] = assemble_timeline(act, fused, config.t_act.at(act), episode.duration_s(),
                                     config);
    }
    return out;
}

}  // namespace tlf
