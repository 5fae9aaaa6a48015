// tlf: object-track post-processing, region proposal, score fusion, and
// evaluation for per-frame detection streams plus per-window classifier
// logits. Subcommands mirror the pipeline stages; `pipeline` chains them.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tlf/config.hpp"
#include "tlf/evaluation.hpp"
#include "tlf/frames.hpp"
#include "tlf/ingest.hpp"
#include "tlf/parallel.hpp"
#include "tlf/pipeline.hpp"
#include "tlf/svg.hpp"
#include "tlf/synth.hpp"
#include "tlf/temporal.hpp"

namespace fs = std::filesystem;
using namespace tlf;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> episodes;
    std::vector<std::string> thresholds;  // activity=value
    double fps = -1.0;
    int jobs = 1;
};

// defaults -> config file -> TLF_* env -> explicit flags
Config resolve_config(const CommonOpts& opts) {
    Config cfg;
    if (!opts.config_path.empty()) cfg = Config::load_file(opts.config_path);
    cfg.apply_env_overrides();
    if (opts.fps > 0) cfg.target_fps = opts.fps;
    for (const auto& spec : opts.thresholds) {
        size_t eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--threshold expects activity=value, got '" + spec + "'");
        Activity act = parse_activity(spec.substr(0, eq));
        try {
            cfg.t_act[act] = std::stod(spec.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("--threshold value is not a number: '" + spec + "'");
        }
    }
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool episodes, bool out_required) {
    cmd->add_option("--config", opts.config_path, "flat key=value config file");
    cmd->add_option("--jobs", opts.jobs, "episode-level parallelism")->check(CLI::PositiveNumber);
    cmd->add_option("--fps", opts.fps, "override target_fps");
    cmd->add_option("--threshold", opts.thresholds,
                    "per-activity decision threshold, activity=value (repeatable)");
    auto* out = cmd->add_option("--out", opts.out_dir, "output directory");
    if (out_required) out->required();
    if (episodes)
        cmd->add_option("episodes", opts.episodes, "episode director(y/ies)")
            ->required()
            ->expected(-1);
}

std::vector<Episode> load_episodes(const CommonOpts& opts, const Config& cfg) {
    std::vector<Episode> episodes(opts.episodes.size());
    parallel_for(opts.episodes.size(), opts.jobs, [&](size_t i) {
        episodes[i] = load_episode(EpisodePaths::in_dir(opts.episodes[i]), cfg);
    });
    return episodes;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 int64_t seed_override) {
    synth::Scenario scenario = synth::load_scenario(scenario_path);
    if (seed_override >= 0) scenario.seed = uint64_t(seed_override);
    synth::GeneratedEpisode gen = synth::generate_episode(scenario);
    synth::write_episode_dir(gen, scenario, out_dir);
    std::cout << "wrote episode '" << gen.meta.episode_id << "' (" << gen.meta.frame_count
              << " frames, " << gen.scores.size() << " window scores) to " << out_dir << "\n";
    return 0;
}

int run_track_cmd(const CommonOpts& opts, const Config& cfg) {
    auto episodes = load_episodes(opts, cfg);
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        std::string ep_out = episode_out_dir(opts.out_dir, episodes[i]);
        auto tracking = stage_track(episodes[i], cfg, ep_out);
        for (ObjectCategory cat : tracking.missing)
            std::cerr << "note: no " << to_string(cat) << " detections in "
                      << episodes[i].meta.episode_id << "\n";
    });
    return 0;
}

int run_regions_cmd(const CommonOpts& opts, const Config& cfg, bool newborn) {
    auto episodes = load_episodes(opts, cfg);
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        std::string ep_out = episode_out_dir(opts.out_dir, episodes[i]);
        if (newborn) {
            auto result = stage_newborn(episodes[i], cfg, ep_out);
            std::cout << episodes[i].meta.episode_id << " newborn region top-left ("
                      << result.region.top_left[0].x << ", " << result.region.top_left[0].y
                      << ") side " << result.region.side_px << "\n";
        } else {
            stage_track(episodes[i], cfg, ep_out);
        }
    });
    return 0;
}

int run_resample_cmd(const CommonOpts& opts, const Config& cfg) {
    auto episodes = load_episodes(opts, cfg);
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        std::string ep_out = episode_out_dir(opts.out_dir, episodes[i]);
        auto tracking = run_tracking(episodes[i], cfg);
        auto newborn = run_newborn(episodes[i], cfg);
        stage_resample(episodes[i], tracking, newborn, cfg, ep_out);
    });
    return 0;
}

int run_fuse_cmd(const CommonOpts& opts, const Config& cfg) {
    auto episodes = load_episodes(opts, cfg);
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        stage_fuse(episodes[i], cfg, episode_out_dir(opts.out_dir, episodes[i]));
    });
    return 0;
}

int run_evaluate_cmd(const CommonOpts& opts, const Config& cfg) {
    auto episodes = load_episodes(opts, cfg);
    std::vector<EpisodeEvaluation> evals(episodes.size());
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        auto tracking = run_tracking(episodes[i], cfg);
        auto fused = run_fuse(episodes[i], cfg);
        evals[i] = evaluate_episode(episodes[i], fused, tracking, cfg);
    });
    AggregateEvaluation agg = aggregate_evaluations(episodes, evals);
    write_aggregate_report(agg, opts.out_dir);
    std::cout << format_report(agg);
    return 0;
}

int run_kfcv_cmd(const CommonOpts& opts, const Config& cfg, const std::string& k_spec,
                 double grid) {
    auto episodes = load_episodes(opts, cfg);
    if (k_spec != "auto") {
        long k = 0;
        try {
            k = std::stol(k_spec);
        } catch (const std::exception&) {
            throw ConfigError("--k expects 'auto' or the video count");
        }
        if (k != long(episodes.size()))
            throw ValidationError("--k " + k_spec + " does not match the " +
                                  std::to_string(episodes.size()) +
                                  " provided videos (folds are per-video)");
    }
    auto by_activity = collect_video_timelines(episodes, cfg);
    std::vector<Activity> activities;
    for (const auto& [act, videos] : by_activity) {
        if (videos.size() < 2) continue;
        bool any_truth = false;
        for (const auto& v : videos) any_truth |= !v.truth.empty();
        if (!any_truth) {
            std::cerr << "note: " << to_string(act)
                      << " has no ground-truth intervals in any video; skipped\n";
            continue;
        }
        activities.push_back(act);
    }
    std::vector<KfcvReport> reports(activities.size());
    parallel_for(activities.size(), opts.jobs, [&](size_t i) {
        reports[i] = kfcv_threshold(by_activity.at(activities[i]), activities[i], grid);
    });
    fs::create_directories(opts.out_dir);
    write_kfcv_csv(reports, (fs::path(opts.out_dir) / "kfcv.csv").string());
    std::string text = format_kfcv_report(reports);
    std::ofstream rpt(fs::path(opts.out_dir) / "kfcv_report.txt");
    rpt << text;
    std::cout << text;
    return 0;
}

int run_pipeline_cmd(const CommonOpts& opts, const Config& cfg) {
    auto episodes = load_episodes(opts, cfg);
    std::vector<EpisodeEvaluation> evals(episodes.size());
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        evals[i] = run_pipeline_episode(episodes[i], opts.out_dir, cfg);
    });
    AggregateEvaluation agg = aggregate_evaluations(episodes, evals);
    write_aggregate_report(agg, opts.out_dir);
    std::cout << format_report(agg);
    return 0;
}

int run_report_cmd(const CommonOpts& opts, const Config& cfg) {
    auto episodes = load_episodes(opts, cfg);
    std::vector<EpisodeEvaluation> evals(episodes.size());
    parallel_for(episodes.size(), opts.jobs, [&](size_t i) {
        std::string ep_out = episode_out_dir(opts.out_dir, episodes[i]);
        auto fused = stage_fuse(episodes[i], cfg, ep_out);
        if (episodes[i].truth && !episodes[i].truth->hcp.empty())
            write_count_svg((fs::path(ep_out) / "hcp_counts.svg").string(), "HCP count",
                            fused.hcp.counts, episodes[i].truth->hcp,
                            episodes[i].meta.native_fps);
        auto tracking = run_tracking(episodes[i], cfg);
        evals[i] = evaluate_episode(episodes[i], fused, tracking, cfg);
    });
    AggregateEvaluation agg = aggregate_evaluations(episodes, evals);
    write_aggregate_report(agg, opts.out_dir);
    std::cout << format_report(agg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-track post-processing, region proposal, activity-score fusion, "
                 "and evaluation for detection/classifier record streams"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic episode from a scenario");
    std::string scenario_path;
    int64_t seed_override = -1;
    sim->add_option("--scenario", scenario_path, "scenario json")->required();
    sim->add_option("--out", opts.out_dir, "output episode directory")->required();
    sim->add_option("--seed", seed_override, "override the scenario seed");

    auto* track = app.add_subcommand("track", "detections -> smoothed tracks + object regions");
    add_common(track, opts, true, true);

    auto* regions = app.add_subcommand("regions", "region proposal outputs");
    bool newborn_flag = false;
    regions->add_flag("--newborn", newborn_flag, "emit the fixed newborn region and heatmap");
    add_common(regions, opts, true, true);

    auto* resample = app.add_subcommand("resample", "resample tracks/regions/frames to target fps");
    add_common(resample, opts, true, true);

    auto* fuse = app.add_subcommand("fuse", "window scores -> per-activity timelines");
    add_common(fuse, opts, true, true);

    auto* evaluate = app.add_subcommand("evaluate", "metrics report against ground truth");
    add_common(evaluate, opts, true, true);

    auto* kfcv = app.add_subcommand("kfcv", "leave-one-video-out threshold search");
    std::string k_spec = "auto";
    double grid = 0.01;
    kfcv->add_option("--k", k_spec, "fold count; auto = one per video");
    kfcv->add_option("--grid", grid, "threshold grid step")->check(CLI::PositiveNumber);
    add_common(kfcv, opts, true, true);

    auto* pipeline = app.add_subcommand("pipeline", "track -> regions -> resample -> fuse -> evaluate");
    add_common(pipeline, opts, true, true);

    auto* report = app.add_subcommand("report", "timeline SVG panels and tabular summaries");
    add_common(report, opts, true, true);

    auto* config_cmd = app.add_subcommand("config", "configuration utilities");
    bool dump_flag = false;
    config_cmd->add_flag("--dump", dump_flag, "print the effective configuration");
    config_cmd->add_option("--config", opts.config_path, "flat key=value config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return run_simulate(scenario_path, opts.out_dir, seed_override);
        Config cfg = resolve_config(opts);
        if (track->parsed()) return run_track_cmd(opts, cfg);
        if (regions->parsed()) return run_regions_cmd(opts, cfg, newborn_flag);
        if (resample->parsed()) return run_resample_cmd(opts, cfg);
        if (fuse->parsed()) return run_fuse_cmd(opts, cfg);
        if (evaluate->parsed()) return run_evaluate_cmd(opts, cfg);
        if (kfcv->parsed()) return run_kfcv_cmd(opts, cfg, k_spec, grid);
        if (pipeline->parsed()) return run_pipeline_cmd(opts, cfg);
        if (report->parsed()) return run_report_cmd(opts, cfg);
        if (config_cmd->parsed()) {
            std::cout << cfg.dump();
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
