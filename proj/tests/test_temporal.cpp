#include <doctest.h>

#include <cmath>
#include <random>

#include "tlf/synth.hpp"
#include "tlf/temporal.hpp"

using namespace tlf;

TEST_SUITE_BEGIN("temporal");

TEST_CASE("lfi weights: midpoint, endpoint limit, quarter point") {
    auto mid = lfi_weights(0.0, 1.0, 0.5);
    CHECK(mid.c1 == doctest::Approx(0.5));
    CHECK(mid.c2 == doctest::Approx(0.5));

    auto near1 = lfi_weights(2.0, 3.0, 2.0 + 1e-12);
    CHECK(near1.c1 == doctest::Approx(1.0));
    CHECK(near1.c2 == doctest::Approx(0.0));

    auto quarter = lfi_weights(0.0, 1.0, 0.25);
    CHECK(quarter.c1 == doctest::Approx(0.75));  // closer to t1 -> heavier t1 weight
    CHECK(quarter.c2 == doctest::Approx(0.25));

    CHECK_THROWS_AS(lfi_weights(1.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(lfi_weights(2.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("lfi weights are convex for random inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double t1 = unit(rng) * 10;
        double t2 = t1 + 0.01 + unit(rng) * 5;
        double ti = t1 + unit(rng) * (t2 - t1);
        auto w = lfi_weights(t1, t2, ti);
        CHECK(w.c1 >= 0.0);
        CHECK(w.c2 >= 0.0);
        CHECK(w.c1 + w.c2 == doctest::Approx(1.0));
    }
}

TEST_CASE("grid covers the source span") {
    auto grid = ResampleGrid::covering(0.0, 10.0, 15.0);
    CHECK(grid.count == 151);
    CHECK(grid.time_at(0) == 0.0);
    CHECK(grid.time_at(150) == doctest::Approx(10.0));
}

namespace {

FrameSequence tiny_video(std::vector<double> ts, std::vector<uint8_t> values, int side = 4) {
    FrameSequence seq;
    seq.width = side;
    seq.height = side;
    seq.channels = 1;
    seq.timestamps = std::move(ts);
    for (uint8_t v : values) seq.frames.push_back(std::vector<uint8_t>(size_t(side) * side, v));
    return seq;
}

}  // namespace

TEST_CASE("exact grid hits pass frames through bit-identically") {
    FrameSequence src = tiny_video({0.0, 1.0 / 15.0, 2.0 / 15.0}, {10, 200, 77});
    auto grid = ResampleGrid::covering(0.0, 2.0 / 15.0, 15.0);
    FrameSequence out = resample_frames(src, grid);
    REQUIRE(out.frames.size() == 3);
    CHECK(out.frames[0] == src.frames[0]);
    CHECK(out.frames[1] == src.frames[1]);
    CHECK(out.frames[2] == src.frames[2]);
}

TEST_CASE("midpoint of all-0 and all-90 frames is all-45") {
    FrameSequence src = tiny_video({0.0, 2.0}, {0, 90});
    ResampleGrid grid{1.0, 0.0, 3};  // times 0, 1, 2
    FrameSequence out = resample_frames(src, grid);
    for (uint8_t v : out.frames[1]) CHECK(v == 45);
}

TEST_CASE("constant video stays constant at any rate") {
    FrameSequence src = tiny_video({0.0, 0.7, 1.1, 3.0}, {128, 128, 128, 128});
    for (double fps : {3.0, 15.0, 24.0}) {
        auto grid = ResampleGrid::covering(0.0, 3.0, fps);
        FrameSequence out = resample_frames(src, grid);
        for (const auto& f : out.frames)
            for (uint8_t v : f) CHECK(v == 128);
    }
}

TEST_CASE("affine-in-time pixels are reconstructed within half a gray level") {
    // irregular integer source timestamps keep source values quantization-free
    std::vector<double> ts = {0, 1, 3, 4, 6, 9, 10, 12};
    FrameSequence src = synth::affine_video(16, 16, ts);
    auto grid = ResampleGrid::covering(0.0, 12.0, 15.0);
    FrameSequence out = resample_frames(src, grid);
    for (size_t i = 0; i < out.frames.size(); ++i) {
        double t = grid.time_at(int64_t(i));
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                double expect = synth::affine_value(x, y, t);
                double got = out.frames[i][size_t(y) * 16 + x];
                CHECK(std::abs(got - expect) <= 0.5);
            }
    }
}

TEST_CASE("resampling rejects bad inputs") {
    FrameSequence src = tiny_video({0.0}, {1});
    CHECK_THROWS_AS(resample_frames(src, ResampleGrid::covering(0, 1, 15)), ValidationError);

    FrameSequence mismatched = tiny_video({0.0, 1.0}, {1, 2});
    mismatched.frames[1].pop_back();
    CHECK_THROWS_AS(resample_frames(mismatched, ResampleGrid::covering(0, 1, 15)),
                    ValidationError);
}

TEST_CASE("track resampling follows a linear ramp") {
    std::vector<TrackPoint> pts = {{{0, 5}, Provenance::Observed},
                                   {{30, 5}, Provenance::Observed}};
    std::vector<double> ts = {0.0, 1.0};
    auto grid = ResampleGrid::covering(0.0, 1.0, 15.0);
    auto out = resample_points(pts, ts, grid);
    REQUIRE(out.size() == 16);
    for (int64_t i = 0; i < 16; ++i) {
        CHECK(out[size_t(i)].pos.x == round_half_up(30.0 * grid.time_at(i)));
        CHECK(out[size_t(i)].pos.y == 5);
    }
}

TEST_CASE("constant track stays constant and single-frame input is rejected") {
    std::vector<TrackPoint> constant(4, {{7, 9}, Provenance::GapFilled});
    std::vector<double> ts = {0.0, 0.3, 0.9, 1.4};
    auto out = resample_points(constant, ts, ResampleGrid::covering(0.0, 1.4, 15.0));
    for (const auto& tp : out) CHECK(tp.pos == PixelPos{7, 9});

    std::vector<TrackPoint> single = {{{1, 1}, Provenance::Observed}};
    CHECK_THROWS_AS(resample_points(single, {0.0}, ResampleGrid::covering(0.0, 1.0, 15.0)),
                    ValidationError);
    CHECK_THROWS_AS(resample_points({}, {}, ResampleGrid::covering(0.0, 1.0, 15.0)),
                    ValidationError);
}

TEST_CASE("provenance rides the nearer source frame") {
    std::vector<TrackPoint> pts = {{{0, 0}, Provenance::Observed},
                                   {{100, 0}, Provenance::GapFilled}};
    std::vector<double> ts = {0.0, 1.0};
    ResampleGrid grid{4.0, 0.0, 5};  // 0, 0.25, 0.5, 0.75, 1.0
    auto out = resample_points(pts, ts, grid);
    CHECK(out[1].prov == Provenance::Observed);   // closer to t1
    CHECK(out[2].prov == Provenance::Observed);   // tie -> earlier frame
    CHECK(out[3].prov == Provenance::GapFilled);  // closer to t2
}

TEST_CASE("test windows: 45 frames, one analysis per second") {
    Config cfg;
    SUBCASE("duration 10 s gives 8 windows starting at 0..7 s") {
        auto windows = make_windows(10.0, WindowMode::Test, cfg);
        REQUIRE(windows.size() == 8);
        for (size_t i = 0; i < windows.size(); ++i) {
            CHECK(windows[i].start_s == doctest::Approx(double(i)));
            CHECK(windows[i].length_frames == 45);
            CHECK(windows[i].stride_frames == 15);
        }
    }
    SUBCASE("duration 3 s gives exactly one window") {
        CHECK(make_windows(3.0, WindowMode::Test, cfg).size() == 1);
    }
    SUBCASE("duration 2.9 s gives none") {
        CHECK(make_windows(2.9, WindowMode::Test, cfg).empty());
    }
    SUBCASE("train stride is 22 frames") {
        auto windows = make_windows(10.0, WindowMode::Train, cfg);
        REQUIRE(windows.size() >= 2);
        CHECK(windows[1].start_s == doctest::Approx(22.0 / 15.0));
    }
}

TEST_CASE("consecutive test windows share exactly 30 frames") {
    Config cfg;
    for (double duration : {5.0, 17.0, 42.5, 100.0}) {
        auto windows = make_windows(duration, WindowMode::Test, cfg);
        for (size_t i = 1; i < windows.size(); ++i) {
            double stride_s = windows[i].start_s - windows[i - 1].start_s;
            CHECK(stride_s == doctest::Approx(1.0));
            int shared = windows[i].length_frames - windows[i].stride_frames;
            CHECK(shared == 30);
        }
    }
}

TEST_SUITE_END();
