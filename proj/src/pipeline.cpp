#include "tlf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tlf/frames.hpp"
#include "tlf/svg.hpp"
#include "tlf/temporal.hpp"

namespace fs = std::filesystem;

namespace tlf {

namespace {

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

ObjectCategory activity_object(Activity a) {
    switch (a) {
        case Activity::Ventilation: return ObjectCategory::BMR;
        case Activity::Suction: return ObjectCategory::SD;
        case Activity::AttachAdjustHrs:
        case Activity::RemoveHrs: return ObjectCategory::HRS;
        default: throw ValidationError("activity has no object region: " + to_string(a));
    }
}

bool object_dependent(Activity a) {
    return a == Activity::Ventilation || a == Activity::Suction ||
           a == Activity::AttachAdjustHrs || a == Activity::RemoveHrs;
}

}  // namespace

TrackingResult run_tracking(const Episode& episode, const Config& config) {
    TrackingResult result;
    for (ObjectCategory cat : kTrackedCategories) {
        auto track = track_category(episode, cat, config);
        if (!track) {
            result.missing.push_back(cat);
            continue;
        }
        result.object_regions.push_back(
            propose_object_region(*track, config.object_region_side_px, episode.meta));
        result.tracks.push_back(std::move(*track));
    }
    return result;
}

void write_tracks_csv(const std::vector<Track>& tracks, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write tracks: " + path);
    out << "frame,category,cx,cy,prov\n";
    for (const auto& track : tracks)
        for (size_t f = 0; f < track.points.size(); ++f)
            out << f << "," << to_string(track.category) << "," << track.points[f].pos.x << ","
                << track.points[f].pos.y << "," << to_string(track.points[f].prov) << "\n";
}

void write_regions_csv(const std::vector<RegionSpec>& regions, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write regions: " + path);
    out << "frame,source,x,y,side\n";
    for (const auto& region : regions) {
        if (region.episode_fixed) {
            out << "*," << to_string(region.source) << "," << region.top_left[0].x << ","
                << region.top_left[0].y << "," << region.side_px << "\n";
            continue;
        }
        for (size_t f = 0; f < region.top_left.size(); ++f)
            out << f << "," << to_string(region.source) << "," << region.top_left[f].x << ","
                << region.top_left[f].y << "," << region.side_px << "\n";
    }
}

std::vector<Track> read_tracks_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tracks: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "frame,category,cx,cy,prov")
        throw ValidationError("tracks csv: bad header");
    std::map<ObjectCategory, Track> by_cat;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string frame_s, cat_s, cx_s, cy_s, prov_s;
        if (!std::getline(ss, frame_s, ',') || !std::getline(ss, cat_s, ',') ||
            !std::getline(ss, cx_s, ',') || !std::getline(ss, cy_s, ',') ||
            !std::getline(ss, prov_s))
            throw ValidationError("tracks csv line " + std::to_string(lineno) + ": bad row");
        ObjectCategory cat = parse_category(cat_s);
        auto& track = by_cat[cat];
        track.category = cat;
        if (std::stoull(frame_s) != track.points.size())
            throw ValidationError("tracks csv line " + std::to_string(lineno) +
                                  ": frames must be contiguous per category");
        track.points.push_back({{std::stoi(cx_s), std::stoi(cy_s)}, parse_provenance(prov_s)});
    }
    std::vector<Track> out;
    for (auto& [cat, track] : by_cat) out.push_back(std::move(track));
    return out;
}

NewbornResult run_newborn(const Episode& episode, const Config& config) {
    NewbornResult result{accumulate_heatmap(episode), {}};
    result.region.source = RegionSource::Newborn;
    result.region.side_px = config.newborn_region_side_px;
    result.region.episode_fixed = true;
    result.region.top_left = {
        select_newborn_region(result.heatmap, config.newborn_region_side_px)};
    return result;
}

ResampleResult run_resample(const Episode& episode, const TrackingResult& tracking,
                            const Config& config) {
    auto grid = ResampleGrid::covering(episode.first_ts(), episode.last_ts(), config.target_fps);
    std::vector<double> timestamps;
    timestamps.reserve(episode.detections.size());
    for (const auto& rec : episode.detections) timestamps.push_back(rec.timestamp_s);

    ResampleResult result;
    for (int64_t i = 0; i < grid.count; ++i) result.grid_times.push_back(grid.time_at(i));
    for (const auto& track : tracking.tracks)
        result.tracks.push_back(resample_track(track, timestamps, grid));
    for (const auto& region : tracking.object_regions)
        result.object_regions.push_back(resample_region(region, timestamps, grid));
    return result;
}

FuseResult run_fuse(const Episode& episode, const Config& config) {
    FuseResult result;
    result.timelines = fuse_episode(episode, config);
    result.hcp = estimate_hcp(episode);
    return result;
}

void write_timeline_csv(const ActivityTimeline& timeline, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write timeline: " + path);
    out << "second,prob,binary\n";
    for (size_t k = 0; k < timeline.probs.size(); ++k)
        out << k << "," << fmt(timeline.probs[k], 6) << "," << int(timeline.binary[k]) << "\n";
}

void write_hcp_csv(const HcpTimeline& hcp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write hcp counts: " + path);
    out << "frame,count\n";
    for (size_t f = 0; f < hcp.counts.size(); ++f) out << f << "," << hcp.counts[f] << "\n";
}

EpisodeEvaluation evaluate_episode(const Episode& episode, const FuseResult& fused,
                                   const TrackingResult& tracking, const Config& config) {
    EpisodeEvaluation ev;
    ev.episode_id = episode.meta.episode_id;
    if (!episode.truth) return ev;
    const auto& truth = *episode.truth;

    for (const auto& [act, timeline] : fused.timelines) {
        auto it = truth.activities.find(act);
        static const std::vector<Interval> kNone;
        ev.timeline_metrics[act] = evaluate_timeline(timeline, it == truth.activities.end()
                                                                   ? kNone
                                                                   : it->second);
    }

    if (!truth.hcp.empty()) {
        ev.hcp_p = p_measure(fused.hcp.counts, truth.hcp);
        double err = 0.0;
        for (size_t i = 0; i < truth.hcp.size(); ++i)
            err += std::abs(fused.hcp.counts[i] - truth.hcp[i]);
        ev.hcp_e = err / double(truth.hcp.size());
    }

    if (truth.boxes) {
        ev.detection = evaluate_detections(episode.detections, *truth.boxes,
                                           config.detection_iou_thresh);

        // Region-proposal coverage per object-dependent activity (the >80% rule).
        std::vector<double> frame_ts;
        for (const auto& rec : episode.detections) frame_ts.push_back(rec.timestamp_s);
        for (const auto& [act, intervals] : truth.activities) {
            if (!object_dependent(act) || intervals.empty()) continue;
            ObjectCategory object = activity_object(act);
            const RegionSpec* region = nullptr;
            for (size_t i = 0; i < tracking.tracks.size(); ++i)
                if (tracking.tracks[i].category == object) region = &tracking.object_regions[i];
            CoverageStats stats;
            stats.activity = act;
            stats.object = object;
            std::vector<uint8_t> coverage(frame_ts.size(), 0);
            if (region) {
                for (size_t f = 0; f < frame_ts.size(); ++f) {
                    for (const auto& tb : (*truth.boxes)[f]) {
                        if (tb.category != object) continue;
                        PixelPos c = tb.center();
                        PixelPos tl = region->top_left[f];
                        if (c.x >= tl.x && c.x < tl.x + region->side_px && c.y >= tl.y &&
                            c.y < tl.y + region->side_px) {
                            coverage[f] = 1;
                            break;
                        }
                    }
                }
            }
            for (const auto& iv : intervals) {
                ++stats.intervals_total;
                if (activity_detected_during(iv, frame_ts, coverage,
                                             config.coverage_detected_fraction))
                    ++stats.intervals_detected;
            }
            ev.coverage.push_back(stats);
        }
    }
    return ev;
}

AggregateEvaluation aggregate_evaluations(const std::vector<Episode>& episodes,
                                          const std::vector<EpisodeEvaluation>& per_episode) {
    AggregateEvaluation agg;
    agg.episodes = per_episode;

    // pooled per-second confusion across episodes
    std::map<Activity, TimelineEvalReport> pooled;
    for (const auto& ev : per_episode) {
        for (const auto& [act, r] : ev.timeline_metrics) {
            auto& p = pooled[act];
            p.tp += r.tp;
            p.tn += r.tn;
            p.fp += r.fp;
            p.fn += r.fn;
        }
    }
    for (auto& [act, p] : pooled) {
        TimelineEvalReport r;
        r.tp = p.tp;
        r.tn = p.tn;
        r.fp = p.fp;
        r.fn = p.fn;
        if (r.tp + r.fp > 0) r.precision = double(r.tp) / double(r.tp + r.fp);
        else r.precision_defined = false;
        if (r.tp + r.fn > 0) r.recall = double(r.tp) / double(r.tp + r.fn);
        else r.recall_defined = false;
        r.accuracy = r.total() > 0 ? double(r.tp + r.tn) / double(r.total()) : 0.0;
        if (r.precision + r.recall > 0)
            r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
        else r.f1_defined = false;
        agg.pooled_timeline[act] = r;
    }

    std::vector<HcpTimeline> hcp_preds;
    std::vector<std::vector<int>> hcp_truths;
    for (size_t e = 0; e < episodes.size(); ++e) {
        if (!episodes[e].truth || episodes[e].truth->hcp.empty()) continue;
        HcpTimeline pred = estimate_hcp(episodes[e]);
        hcp_preds.push_back(std::move(pred));
        hcp_truths.push_back(episodes[e].truth->hcp);
    }
    if (!hcp_preds.empty()) agg.hcp = evaluate_hcp(hcp_preds, hcp_truths);
    return agg;
}

std::string format_report(const AggregateEvaluation& agg) {
    std::ostringstream out;
    out << "== Activity timelines (per-second) ==\n";
    out << "activity            prec    rec     acc     f1      tp     fp     fn     tn\n";
    for (const auto& [act, r] : agg.pooled_timeline) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-18s %7.4f %7.4f %7.4f %7.4f %6lld %6lld %6lld %6lld%s\n",
                      to_string(act).c_str(), r.precision, r.recall, r.accuracy, r.f1,
                      (long long)r.tp, (long long)r.fp, (long long)r.fn, (long long)r.tn,
                      (!r.precision_defined || !r.recall_defined) ? "  [0/0 -> 0]" : "");
        out << line;
    }

    bool any_detection = false;
    for (const auto& ev : agg.episodes) any_detection |= ev.detection.has_value();
    if (any_detection) {
        out << "\n== Object detection (VOC2012, IoU 0.5) ==\n";
        out << "episode            category   AP      TP     FP\n";
        for (const auto& ev : agg.episodes) {
            if (!ev.detection) continue;
            for (const auto& [cat, s] : ev.detection->per_category) {
                char line[160];
                std::snprintf(line, sizeof(line), "%-18s %-8s %7.4f %6d %6d%s\n",
                              ev.episode_id.c_str(), to_string(cat).c_str(), s.ap, s.tp, s.fp,
                              s.flagged_no_truth ? "  [no truth boxes]" : "");
                out << line;
            }
            char line[160];
            std::snprintf(line, sizeof(line), "%-18s %-8s %7.4f\n", ev.episode_id.c_str(),
                          "mAP_50", ev.detection->map_50);
            out << line;
        }
    }

    bool any_coverage = false;
    for (const auto& ev : agg.episodes) any_coverage |= !ev.coverage.empty();
    if (any_coverage) {
        out << "\n== Region proposal during activities (>80% overlap rule) ==\n";
        out << "episode            object  activity            P        detected/true\n";
        for (const auto& ev : agg.episodes) {
            for (const auto& c : ev.coverage) {
                char line[160];
                std::snprintf(line, sizeof(line), "%-18s %-7s %-18s %7.2f%%  %d/%d\n",
                              ev.episode_id.c_str(), to_string(c.object).c_str(),
                              to_string(c.activity).c_str(), c.percent(), c.intervals_detected,
                              c.intervals_total);
                out << line;
            }
        }
    }

    if (agg.hcp) {
        const auto& h = *agg.hcp;
        out << "\n== HCP count estimation ==\n";
        char line[200];
        std::snprintf(line, sizeof(line),
                      "HCP correct pred.  P-bar %7.2f %%   Q(25,50,75) %.2f, %.2f, %.2f (%%)\n",
                      h.p_mean, h.p_q.q25, h.p_q.q50, h.p_q.q75);
        out << line;
        std::snprintf(line, sizeof(line),
                      "HCP pred. error    E-bar %7.2f     Q(25,50,75) %.2f, %.2f, %.2f\n",
                      h.e_mean, h.e_q.q25, h.e_q.q50, h.e_q.q75);
        out << line;
    }
    return out.str();
}

void write_metrics_csv(const AggregateEvaluation& agg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write metrics: " + path);
    out << "section,episode,key,value\n";
    for (const auto& [act, r] : agg.pooled_timeline) {
        out << "timeline,*," << to_string(act) << ".precision," << fmt(r.precision, 6) << "\n";
        out << "timeline,*," << to_string(act) << ".recall," << fmt(r.recall, 6) << "\n";
        out << "timeline,*," << to_string(act) << ".accuracy," << fmt(r.accuracy, 6) << "\n";
        out << "timeline,*," << to_string(act) << ".f1," << fmt(r.f1, 6) << "\n";
    }
    for (const auto& ev : agg.episodes) {
        if (ev.detection) {
            for (const auto& [cat, s] : ev.detection->per_category) {
                out << "detection," << ev.episode_id << "," << to_string(cat) << ".ap,"
                    << fmt(s.ap, 6) << "\n";
                out << "detection," << ev.episode_id << "," << to_string(cat) << ".tp," << s.tp
                    << "\n";
                out << "detection," << ev.episode_id << "," << to_string(cat) << ".fp," << s.fp
                    << "\n";
            }
            out << "detection," << ev.episode_id << ",mAP_50," << fmt(ev.detection->map_50, 6)
                << "\n";
        }
        for (const auto& c : ev.coverage)
            out << "coverage," << ev.episode_id << "," << to_string(c.activity) << ","
                << fmt(c.percent(), 2) << "\n";
        if (ev.hcp_p) out << "hcp," << ev.episode_id << ",P," << fmt(*ev.hcp_p, 4) << "\n";
        if (ev.hcp_e) out << "hcp," << ev.episode_id << ",E," << fmt(*ev.hcp_e, 4) << "\n";
    }
    if (agg.hcp) {
        out << "hcp,*,P_mean," << fmt(agg.hcp->p_mean, 4) << "\n";
        out << "hcp,*,P_q25," << fmt(agg.hcp->p_q.q25, 4) << "\n";
        out << "hcp,*,P_q50," << fmt(agg.hcp->p_q.q50, 4) << "\n";
        out << "hcp,*,P_q75," << fmt(agg.hcp->p_q.q75, 4) << "\n";
        out << "hcp,*,E_mean," << fmt(agg.hcp->e_mean, 4) << "\n";
        out << "hcp,*,E_q25," << fmt(agg.hcp->e_q.q25, 4) << "\n";
        out << "hcp,*,E_q50," << fmt(agg.hcp->e_q.q50, 4) << "\n";
        out << "hcp,*,E_q75," << fmt(agg.hcp->e_q.q75, 4) << "\n";
    }
}

std::string format_kfcv_report(const std::vector<KfcvReport>& reports) {
    std::ostringstream out;
    out << "== K-fold cross-validated threshold search ==\n";
    out << "activity            prec    rec     acc     thresh Q(25, 50, 75)\n";
    for (const auto& r : reports) {
        char line[200];
        std::snprintf(line, sizeof(line), "%-18s %7.2f %7.2f %7.2f  .%02d, .%02d, .%02d%s\n",
                      to_string(r.activity).c_str(), 100.0 * r.mean_precision,
                      100.0 * r.mean_recall, 100.0 * r.mean_accuracy,
                      int(std::lround(r.threshold_q.q25 * 100)),
                      int(std::lround(r.threshold_q.q50 * 100)),
                      int(std::lround(r.threshold_q.q75 * 100)),
                      r.skipped_folds ? "  [folds skipped]" : "");
        out << line;
    }
    return out.str();
}

void write_kfcv_csv(const std::vector<KfcvReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write kfcv report: " + path);
    out << "activity,fold,heldout,threshold,precision,recall,accuracy,skipped\n";
    for (const auto& r : reports) {
        for (size_t f = 0; f < r.folds.size(); ++f) {
            const auto& fold = r.folds[f];
            out << to_string(r.activity) << "," << f << "," << fold.heldout_id << ","
                << fmt(fold.threshold, 2) << "," << fmt(fold.heldout.precision, 6) << ","
                << fmt(fold.heldout.recall, 6) << "," << fmt(fold.heldout.accuracy, 6) << ","
                << (fold.skipped ? 1 : 0) << "\n";
        }
        out << to_string(r.activity) << ",mean,*,," << fmt(r.mean_precision, 6) << ","
            << fmt(r.mean_recall, 6) << "," << fmt(r.mean_accuracy, 6) << ",0\n";
        out << to_string(r.activity) << ",quartiles,*,\"" << fmt(r.threshold_q.q25, 2) << ", "
            << fmt(r.threshold_q.q50, 2) << ", " << fmt(r.threshold_q.q75, 2) << "\",,,,0\n";
    }
}

std::string episode_out_dir(const std::string& out_root, const Episode& episode) {
    fs::path dir = fs::path(out_root) / episode.meta.episode_id;
    fs::create_directories(dir);
    return dir.string();
}

TrackingResult stage_track(const Episode& episode, const Config& config,
                           const std::string& ep_out) {
    TrackingResult tracking = run_tracking(episode, config);
    write_tracks_csv(tracking.tracks, (fs::path(ep_out) / "tracks.csv").string());
    write_regions_csv(tracking.object_regions, (fs::path(ep_out) / "regions.csv").string());
    return tracking;
}

NewbornResult stage_newborn(const Episode& episode, const Config& config,
                            const std::string& ep_out) {
    NewbornResult newborn = run_newborn(episode, config);
    std::ofstream out(fs::path(ep_out) / "newborn_region.txt");
    if (!out) throw IoError("cannot write newborn region in " + ep_out);
    out << newborn.region.top_left[0].x << " " << newborn.region.top_left[0].y << " "
        << newborn.region.side_px << "\n";
    write_pgm((fs::path(ep_out) / "heatmap.pgm").string(), newborn.heatmap.values,
              newborn.heatmap.width, newborn.heatmap.height);
    return newborn;
}

ResampleResult stage_resample(const Episode& episode, const TrackingResult& tracking,
                              const NewbornResult& newborn, const Config& config,
                              const std::string& ep_out) {
    ResampleResult resampled = run_resample(episode, tracking, config);
    write_tracks_csv(resampled.tracks, (fs::path(ep_out) / "tracks_resampled.csv").string());
    auto regions = resampled.object_regions;
    regions.push_back(newborn.region);
    write_regions_csv(regions, (fs::path(ep_out) / "regions_resampled.csv").string());
    if (episode.frames) {
        auto grid = ResampleGrid::covering(episode.frames->timestamps.front(),
                                           episode.frames->timestamps.back(), config.target_fps);
        save_frames(resample_frames(*episode.frames, grid),
                    (fs::path(ep_out) / "frames_resampled").string());
    }
    return resampled;
}

FuseResult stage_fuse(const Episode& episode, const Config& config, const std::string& ep_out) {
    FuseResult fused = run_fuse(episode, config);
    for (const auto& [act, timeline] : fused.timelines) {
        write_timeline_csv(timeline,
                           (fs::path(ep_out) / ("timeline_" + to_string(act) + ".csv")).string());
        std::vector<uint8_t> ref;
        if (episode.truth) {
            auto it = episode.truth->activities.find(act);
            if (it != episode.truth->activities.end())
                ref = rasterize_truth(it->second, timeline.probs.size());
        }
        write_timeline_svg((fs::path(ep_out) / ("timeline_" + to_string(act) + ".svg")).string(),
                           to_string(act), timeline.probs, ref, timeline.threshold_used);
    }
    write_hcp_csv(fused.hcp, (fs::path(ep_out) / "hcp.csv").string());
    return fused;
}

EpisodeEvaluation run_pipeline_episode(Episode& episode, const std::string& out_root,
                                       const Config& config) {
    std::string ep_out = episode_out_dir(out_root, episode);
    TrackingResult tracking = stage_track(episode, config, ep_out);
    NewbornResult newborn = stage_newborn(episode, config, ep_out);
    stage_resample(episode, tracking, newborn, config, ep_out);
    FuseResult fused = stage_fuse(episode, config, ep_out);
    return evaluate_episode(episode, fused, tracking, config);
}

void write_aggregate_report(const AggregateEvaluation& agg, const std::string& out_root) {
    fs::create_directories(out_root);
    std::ofstream out(fs::path(out_root) / "report.txt");
    if (!out) throw IoError("cannot write report in " + out_root);
    out << format_report(agg);
    write_metrics_csv(agg, (fs::path(out_root) / "metrics.csv").string());
}

std::map<Activity, std::vector<VideoTimeline>> collect_video_timelines(
    const std::vector<Episode>& episodes, const Config& config) {
    std::map<Activity, std::vector<VideoTimeline>> out;
    for (const auto& episode : episodes) {
        if (!episode.truth) throw ValidationError("kfcv requires ground truth for every episode");
        auto timelines = fuse_episode(episode, config);
        for (const auto& [act, timeline] : timelines) {
            VideoTimeline vt;
            vt.video_id = episode.meta.episode_id;
            vt.probs = timeline.probs;
            auto it = episode.truth->activities.find(act);
            if (it != episode.truth->activities.end()) vt.truth = it->second;
            out[act].push_back(std::move(vt));
        }
    }
    return out;
}

}  // namespace tlf
