#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "tlf/fusion.hpp"
#include "tlf/ingest.hpp"
#include "tlf/kernels.hpp"
#include "tlf/synth.hpp"
#include "tlf/temporal.hpp"

using namespace tlf;
using synth::Scenario;

namespace {

Scenario base_scenario() {
    Scenario s;
    s.seed = 42;
    s.episode_id = "synth_test";
    s.duration_s = 30.0;
    s.fps = 15.0;
    s.im_width = 1920;
    s.im_height = 1080;
    s.script[Activity::Ventilation] = {{5.0, 20.0}};
    s.script[Activity::Uncovered] = {{0.0, 10.0}};
    synth::ObjectMotion bmr;
    bmr.category = ObjectCategory::BMR;
    bmr.waypoints = {{0.0, 600.0, 400.0}, {30.0, 800.0, 500.0}};
    s.objects.push_back(bmr);
    s.hcp_schedule = {{0.0, 2}, {15.0, 3}};
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("generation is deterministic under (seed, scenario)") {
    Scenario s = base_scenario();
    s.noise.dropout_rate = 0.3;
    s.noise.false_positive_rate = 0.05;
    s.noise.confidence_jitter = 0.1;
    s.noise.logit_noise_sigma = 1.0;
    auto a = synth::generate_episode(s);
    auto b = synth::generate_episode(s);
    CHECK(a.detections == b.detections);
    CHECK(a.scores == b.scores);
    CHECK(a.truth == b.truth);
    CHECK(a.meta == b.meta);

    s.seed = 43;
    auto c = synth::generate_episode(s);
    CHECK(a.detections != c.detections);
}

TEST_CASE("zero noise reproduces the true boxes in every frame") {
    Scenario s = base_scenario();
    auto gen = synth::generate_episode(s);
    REQUIRE(gen.truth.boxes.has_value());
    REQUIRE(gen.detections.size() == size_t(s.duration_s * s.fps) + 1);
    for (size_t f = 0; f < gen.detections.size(); ++f) {
        const auto& det = gen.detections[f];
        const auto& truth = (*gen.truth.boxes)[f];
        REQUIRE(det.boxes.size() == truth.size());
        for (size_t b = 0; b < det.boxes.size(); ++b) {
            CHECK(det.boxes[b].x == truth[b].x);
            CHECK(det.boxes[b].y == truth[b].y);
            CHECK(det.boxes[b].w == truth[b].w);
            CHECK(det.boxes[b].h == truth[b].h);
            CHECK(det.boxes[b].category == truth[b].category);
        }
    }
}

TEST_CASE("hcp truth follows the schedule") {
    Scenario s = base_scenario();
    auto gen = synth::generate_episode(s);
    CHECK(gen.truth.hcp[0] == 2);
    CHECK(gen.truth.hcp[size_t(14.9 * 15)] == 2);
    CHECK(gen.truth.hcp[size_t(15.1 * 15)] == 3);
    CHECK(gen.truth.hcp.back() == 3);
}

TEST_CASE("empirical dropout rate tracks the configured rate") {
    Scenario s = base_scenario();
    s.duration_s = 700.0;  // > 1e4 frames at 15 fps
    s.script.clear();
    s.objects[0].waypoints = {{0.0, 600.0, 400.0}, {700.0, 800.0, 500.0}};
    s.noise.dropout_rate = 0.3;
    auto gen = synth::generate_episode(s);
    int64_t missing = 0;
    for (const auto& rec : gen.detections) {
        bool has_bmr = false;
        for (const auto& b : rec.boxes) has_bmr |= b.category == ObjectCategory::BMR;
        if (!has_bmr) ++missing;
    }
    double rate = double(missing) / double(gen.detections.size());
    CHECK(rate == doctest::Approx(0.3).epsilon(0.02 / 0.3));  // within +-2 percentage points
}

TEST_CASE("noise sub-streams are independent") {
    Scenario s = base_scenario();
    s.noise.dropout_rate = 0.2;

    Scenario s_logit_noise = s;
    s_logit_noise.noise.logit_noise_sigma = 2.0;
    auto a = synth::generate_episode(s);
    auto b = synth::generate_episode(s_logit_noise);
    CHECK(a.detections == b.detections);  // logit noise never touches detections
    CHECK(a.scores != b.scores);

    Scenario s_more_dropout = s;
    s_more_dropout.noise.dropout_rate = 0.5;
    auto c = synth::generate_episode(s_more_dropout);
    CHECK(a.scores == c.scores);  // dropout never touches scores
}

TEST_CASE("false positives land at least the configured displacement away") {
    Scenario s = base_scenario();
    s.noise.false_positive_rate = 0.5;
    auto gen = synth::generate_episode(s);
    int fp_count = 0;
    for (size_t f = 0; f < gen.detections.size(); ++f) {
        double t = gen.detections[f].timestamp_s;
        PixelPos truth = synth::true_center(s, ObjectCategory::BMR, t);
        int seen = 0;
        for (const auto& b : gen.detections[f].boxes) {
            if (b.category != ObjectCategory::BMR) continue;
            ++seen;
            if (seen == 1) continue;  // first is the true detection (no dropout here)
            ++fp_count;
            double d = std::hypot(double(b.center().x - truth.x), double(b.center().y - truth.y));
            CHECK(d >= s.noise.fp_min_displacement_px - 65.0);  // box clipping can nudge centers
        }
    }
    CHECK(fp_count > 0);
}

TEST_CASE("scenario validation catches script and schedule errors") {
    Scenario s = base_scenario();
    s.script[Activity::Suction] = {{25.0, 40.0}};  // beyond duration
    CHECK_THROWS_AS(synth::generate_episode(s), ValidationError);

    Scenario s2 = base_scenario();
    s2.script[Activity::Suction] = {{5.0, 10.0}, {8.0, 12.0}};  // overlap
    CHECK_THROWS_AS(s2.validate(), ValidationError);

    Scenario s3 = base_scenario();
    s3.objects[0].waypoints = {{5.0, 1.0, 1.0}, {5.0, 2.0, 2.0}};
    CHECK_THROWS_AS(s3.validate(), ValidationError);
}

TEST_CASE("scenario file round trip generates identical episodes") {
    testutil::TempDir dir("scenario_rt");
    Scenario s = base_scenario();
    s.noise.dropout_rate = 0.25;
    s.noise.logit_noise_sigma = 0.5;
    synth::save_scenario(s, dir.file("scenario.json"));
    Scenario loaded = synth::load_scenario(dir.file("scenario.json"));
    auto a = synth::generate_episode(s);
    auto b = synth::generate_episode(loaded);
    CHECK(a.detections == b.detections);
    CHECK(a.scores == b.scores);
    CHECK(a.truth == b.truth);
}

TEST_CASE("written episode directories load back through ingest") {
    testutil::TempDir dir("synth_dir");
    Scenario s = base_scenario();
    auto gen = synth::generate_episode(s);
    synth::write_episode_dir(gen, s, dir.str());
    Config cfg;
    Episode ep = load_episode(EpisodePaths::in_dir(dir.str()), cfg);
    CHECK(ep.meta.frame_count == gen.meta.frame_count);
    CHECK(ep.scores.size() == gen.scores.size());
    REQUIRE(ep.truth.has_value());
    CHECK(ep.truth->hcp == gen.truth.hcp);
    CHECK(ep.detections == gen.detections);  // base conf 0.85 > cutoff; nothing refiltered
}

TEST_CASE("static scenes render identical frames; moving scenes do not") {
    Scenario s = base_scenario();
    s.script.clear();
    s.duration_s = 2.0;
    s.im_width = 128;
    s.im_height = 96;
    s.newborn_center = {64, 48};
    s.hcph_box_w = 16;
    s.hcph_box_h = 16;
    s.hcp_schedule = {};  // hands move; drop them for the static case
    s.objects[0].waypoints = {{0.0, 40.0, 40.0}};
    s.objects[0].box_w = 20;
    s.objects[0].box_h = 20;
    auto frames = synth::generate_frames(s);
    REQUIRE(frames.frames.size() == 31);
    for (const auto& f : frames.frames) CHECK(f == frames.frames[0]);

    s.objects[0].waypoints = {{0.0, 10.0, 40.0}, {2.0, 100.0, 40.0}};
    auto moving = synth::generate_frames(s);
    CHECK(moving.frames.front() != moving.frames.back());
}

TEST_CASE("a linearly moving rectangle blends like its neighbors at the midpoint") {
    Scenario s;
    s.episode_id = "blend";
    s.duration_s = 2.0;
    s.fps = 1.0;  // coarse source
    s.im_width = 64;
    s.im_height = 64;
    s.newborn_center = {32, 32};
    s.hcp_schedule = {};
    synth::ObjectMotion sd;
    sd.category = ObjectCategory::SD;
    sd.box_w = 10;
    sd.box_h = 10;
    sd.waypoints = {{0.0, 20.0, 30.0}, {2.0, 40.0, 30.0}};
    s.objects.push_back(sd);
    auto frames = synth::generate_frames(s);
    REQUIRE(frames.frames.size() == 3);

    auto grid = ResampleGrid::covering(0.0, 2.0, 1.0);  // aligned: pure pass-through
    auto out = resample_frames(frames, grid);
    CHECK(out.frames[1] == frames.frames[1]);

    // midpoint between source frames 0 and 1
    ResampleGrid half{2.0, 0.0, 2};  // t = 0, 0.5
    auto mid = resample_frames(frames, half);
    std::vector<uint8_t> expect(frames.frame_bytes());
    kernels::active_ops().blend_u8(expect.data(), frames.frames[0].data(),
                                   frames.frames[1].data(), 0.5f, 0.5f, expect.size());
    CHECK(mid.frames[1] == expect);
}

TEST_CASE("affine video values are exact at integer source times") {
    auto seq = synth::affine_video(8, 8, {0, 2, 5});
    for (size_t i = 0; i < seq.frames.size(); ++i)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                double v = synth::affine_value(x, y, seq.timestamps[i]);
                CHECK(double(seq.frames[i][size_t(y) * 8 + x]) == doctest::Approx(v));
            }
}

TEST_SUITE_END();
