#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tlf/config.hpp"
#include "tlf/evaluation.hpp"
#include "tlf/fusion.hpp"
#include "tlf/heatmap.hpp"
#include "tlf/ingest.hpp"
#include "tlf/tracking.hpp"

namespace tlf {

// Stage outputs shared between the individual subcommands and `pipeline`,
// which chains them; both paths write identical bytes.

struct TrackingResult {
    std::vector<Track> tracks;                     // one per observed category
    std::vector<RegionSpec> object_regions;        // aligned with tracks
    std::vector<ObjectCategory> missing;           // categories never observed
};

TrackingResult run_tracking(const Episode& episode, const Config& config);

void write_tracks_csv(const std::vector<Track>& tracks, const std::string& path);
void write_regions_csv(const std::vector<RegionSpec>& regions, const std::string& path);
std::vector<Track> read_tracks_csv(const std::string& path);

struct NewbornResult {
    Heatmap heatmap;
    RegionSpec region;
};

NewbornResult run_newborn(const Episode& episode, const Config& config);

struct ResampleResult {
    std::vector<Track> tracks;
    std::vector<RegionSpec> object_regions;
    std::vector<double> grid_times;
};

ResampleResult run_resample(const Episode& episode, const TrackingResult& tracking,
                            const Config& config);

struct FuseResult {
    std::map<Activity, ActivityTimeline> timelines;
    HcpTimeline hcp;
};

FuseResult run_fuse(const Episode& episode, const Config& config);

void write_timeline_csv(const ActivityTimeline& timeline, const std::string& path);
void write_hcp_csv(const HcpTimeline& hcp, const std::string& path);

// Per-object-dependent-activity region-proposal score: the share of truth
// intervals where the proposed region covered the truth object center for
// more than the configured fraction of the interval.
struct CoverageStats {
    Activity activity = Activity::Ventilation;
    ObjectCategory object = ObjectCategory::BMR;
    int intervals_total = 0;
    int intervals_detected = 0;

    double percent() const {
        return intervals_total ? 100.0 * intervals_detected / intervals_total : 0.0;
    }
};

struct EpisodeEvaluation {
    std::string episode_id;
    std::map<Activity, TimelineEvalReport> timeline_metrics;
    std::optional<DetectionEvalReport> detection;
    std::vector<CoverageStats> coverage;
    std::optional<double> hcp_p;
    std::optional<double> hcp_e;
};

EpisodeEvaluation evaluate_episode(const Episode& episode, const FuseResult& fused,
                                   const TrackingResult& tracking, const Config& config);

struct AggregateEvaluation {
    std::vector<EpisodeEvaluation> episodes;
    std::map<Activity, TimelineEvalReport> pooled_timeline;  // pooled seconds
    std::optional<HcpEvalReport> hcp;
};

AggregateEvaluation aggregate_evaluations(const std::vector<Episode>& episodes,
                                          const std::vector<EpisodeEvaluation>& per_episode);

std::string format_report(const AggregateEvaluation& agg);
void write_metrics_csv(const AggregateEvaluation& agg, const std::string& path);

std::string format_kfcv_report(const std::vector<KfcvReport>& reports);
void write_kfcv_csv(const std::vector<KfcvReport>& reports, const std::string& path);

// Stage writers shared by the subcommands and `pipeline`; artifacts for one
// episode live under <out_root>/<episode_id>/.
std::string episode_out_dir(const std::string& out_root, const Episode& episode);
TrackingResult stage_track(const Episode& episode, const Config& config,
                           const std::string& ep_out);
NewbornResult stage_newborn(const Episode& episode, const Config& config,
                            const std::string& ep_out);
ResampleResult stage_resample(const Episode& episode, const TrackingResult& tracking,
                              const NewbornResult& newborn, const Config& config,
                              const std::string& ep_out);
FuseResult stage_fuse(const Episode& episode, const Config& config, const std::string& ep_out);

// Full chain for one episode: track, regions, resample, fuse; returns the
// evaluation inputs. The aggregate report is written separately.
EpisodeEvaluation run_pipeline_episode(Episode& episode, const std::string& out_root,
                                       const Config& config);

void write_aggregate_report(const AggregateEvaluation& agg, const std::string& out_root);

// One fused probability series per (episode, activity), for K-FCV.
std::map<Activity, std::vector<VideoTimeline>> collect_video_timelines(
    const std::vector<Episode>& episodes, const Config& config);

}  // namespace tlf
