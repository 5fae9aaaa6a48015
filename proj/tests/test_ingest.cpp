#include <doctest.h>

#include <string>

#include "test_util.hpp"
#include "tlf/ingest.hpp"

using namespace tlf;
using testutil::TempDir;
using testutil::write_file;

namespace {

const char* kMeta = R"({"episode_id": "ep1", "width": 1920, "height": 1080})";

std::string three_frame_detections() {
    return
        R"({"frame": 0, "t": 0.0, "boxes": [{"cat": "BMR", "x": 100, "y": 120, "w": 80, "h": 60, "conf": 0.9}]})"
        "\n"
        R"({"frame": 1, "t": 0.5, "boxes": [{"cat": "BMR", "x": 104, "y": 122, "w": 80, "h": 60, "conf": 0.8}]})"
        "\n"
        R"({"frame": 2, "t": 1.0, "boxes": [{"cat": "BMR", "x": 108, "y": 124, "w": 80, "h": 60, "conf": 0.85}]})"
        "\n";
}

Episode load_simple(TempDir& dir, const std::string& detections, const Config& cfg = Config{}) {
    write_file(dir.file("meta.json"), kMeta);
    write_file(dir.file("detections.jsonl"), detections);
    return load_episode(EpisodePaths::in_dir(dir.str()), cfg);
}

}  // namespace

TEST_SUITE_BEGIN("ingest");

TEST_CASE("well-formed three-frame file loads with frame_count 3") {
    TempDir dir("ingest_ok");
    Episode ep = load_simple(dir, three_frame_detections());
    CHECK(ep.meta.frame_count == 3);
    CHECK(ep.meta.episode_id == "ep1");
    CHECK(ep.detections.size() == 3);
    CHECK(ep.detections[1].boxes.size() == 1);
    CHECK(ep.meta.native_fps == doctest::Approx(2.0));  // 2 intervals over 1 s
}

TEST_CASE("sub-threshold boxes are dropped, frames kept") {
    TempDir dir("ingest_filter");
    std::string lines =
        R"({"frame": 0, "t": 0.0, "boxes": [{"cat": "BMR", "x": 1, "y": 1, "w": 5, "h": 5, "conf": 0.01}]})"
        "\n"
        R"({"frame": 1, "t": 0.5, "boxes": []})"
        "\n";
    Config cfg;
    cfg.min_confidence[ObjectCategory::BMR] = 0.05;
    Episode ep = load_simple(dir, lines, cfg);
    CHECK(ep.detections.size() == 2);
    CHECK(ep.detections[0].boxes.empty());
}

TEST_CASE("filter idempotence: a sub-threshold box is as if absent") {
    Config cfg;
    cfg.min_confidence[ObjectCategory::SD] = 0.5;
    TempDir dir_with("ingest_with");
    TempDir dir_without("ingest_without");
    std::string base =
        R"({"frame": 0, "t": 0.0, "boxes": [{"cat": "BMR", "x": 10, "y": 10, "w": 30, "h": 30, "conf": 0.9}%EXTRA%]})"
        "\n"
        R"({"frame": 1, "t": 0.4, "boxes": []})"
        "\n";
    std::string with_box = base;
    with_box.replace(with_box.find("%EXTRA%"), 7,
                     R"(, {"cat": "SD", "x": 5, "y": 5, "w": 9, "h": 9, "conf": 0.2})");
    std::string without_box = base;
    without_box.replace(without_box.find("%EXTRA%"), 7, "");
    Episode a = load_simple(dir_with, with_box, cfg);
    Episode b = load_simple(dir_without, without_box, cfg);
    CHECK(a.detections == b.detections);
    CHECK(a.meta == b.meta);
}

TEST_CASE("non-monotonic timestamps are rejected") {
    TempDir dir("ingest_mono");
    std::string lines =
        R"({"frame": 0, "t": 0.0, "boxes": []})" "\n"
        R"({"frame": 1, "t": 0.5, "boxes": []})" "\n"
        R"({"frame": 2, "t": 0.4, "boxes": []})" "\n";
    CHECK_THROWS_WITH_AS(load_simple(dir, lines), doctest::Contains("line 3"), ValidationError);
}

TEST_CASE("unknown tokens and keys are rejected") {
    TempDir dir("ingest_tok");
    CHECK_THROWS_AS(
        load_simple(dir,
                    R"({"frame": 0, "t": 0.0, "boxes": [{"cat": "CAT", "x": 1, "y": 1, "w": 2, "h": 2, "conf": 0.9}]})"
                    "\n"),
        ValidationError);
    CHECK_THROWS_AS(load_simple(dir, R"({"frame": 0, "t": 0.0, "boxes": [], "extra": 1})" "\n"),
                    ValidationError);
}

TEST_CASE("malformed json reports the line number") {
    TempDir dir("ingest_badjson");
    std::string lines = R"({"frame": 0, "t": 0.0, "boxes": []})" "\n" "{oops\n";
    CHECK_THROWS_WITH_AS(load_simple(dir, lines), doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("boxes are clipped to frame bounds") {
    TempDir dir("ingest_clip");
    std::string lines =
        R"({"frame": 0, "t": 0.0, "boxes": [{"cat": "BMR", "x": -10, "y": 1070, "w": 30, "h": 30, "conf": 0.9}]})"
        "\n"
        R"({"frame": 1, "t": 0.5, "boxes": [{"cat": "BMR", "x": 5000, "y": 0, "w": 30, "h": 30, "conf": 0.9}]})"
        "\n";
    Episode ep = load_simple(dir, lines);
    REQUIRE(ep.detections[0].boxes.size() == 1);
    const auto& b = ep.detections[0].boxes[0];
    CHECK(b.x == 0);
    CHECK(b.w == 20);
    CHECK(b.y == 1070);
    CHECK(b.h == 10);
    CHECK(ep.detections[1].boxes.empty());  // fully outside
}

TEST_CASE("scores: off-table tuples are rejected at ingest") {
    TempDir dir("ingest_scores");
    write_file(dir.file("meta.json"), kMeta);
    write_file(dir.file("detections.jsonl"), three_frame_detections());
    write_file(
        dir.file("scores.jsonl"),
        R"({"activity": "uncovered", "region": "newborn", "stream": "flow", "t0": 0.0, "logits": [0.0, 1.0]})"
        "\n");
    CHECK_THROWS_WITH_AS(load_episode(EpisodePaths::in_dir(dir.str()), Config{}),
                         doctest::Contains("routing"), ValidationError);
}

TEST_CASE("scores load sorted and reject duplicates") {
    TempDir dir("ingest_scores2");
    write_file(dir.file("meta.json"), kMeta);
    write_file(dir.file("detections.jsonl"), three_frame_detections());
    std::string ok =
        R"({"activity": "ventilation", "region": "BMR", "stream": "flow", "t0": 1.0, "logits": [0.0, 1.5]})"
        "\n"
        R"({"activity": "ventilation", "region": "BMR", "stream": "flow", "t0": 0.0, "logits": [0.5, -0.5]})"
        "\n";
    write_file(dir.file("scores.jsonl"), ok);
    Episode ep = load_episode(EpisodePaths::in_dir(dir.str()), Config{});
    REQUIRE(ep.scores.size() == 2);
    CHECK(ep.scores[0].window_start_s == 0.0);
    CHECK(ep.scores[1].window_start_s == 1.0);

    write_file(dir.file("scores.jsonl"), ok + ok.substr(0, ok.find('\n') + 1));
    CHECK_THROWS_WITH_AS(load_episode(EpisodePaths::in_dir(dir.str()), Config{}),
                         doctest::Contains("duplicate"), ValidationError);
}

TEST_CASE("truth validation") {
    TempDir dir("ingest_truth");
    write_file(dir.file("meta.json"), kMeta);
    write_file(dir.file("detections.jsonl"), three_frame_detections());

    SUBCASE("valid truth loads") {
        write_file(dir.file("truth.json"),
                   R"({"activities": {"ventilation": [[0.0, 0.7]]}, "hcp": [2, 2, 3]})");
        Episode ep = load_episode(EpisodePaths::in_dir(dir.str()), Config{});
        REQUIRE(ep.truth.has_value());
        CHECK(ep.truth->hcp == std::vector<int>{2, 2, 3});
        CHECK(ep.truth->activities.at(Activity::Ventilation).size() == 1);
    }
    SUBCASE("overlapping intervals are rejected") {
        write_file(dir.file("truth.json"),
                   R"({"activities": {"suction": [[0.0, 0.6], [0.5, 0.9]]}})");
        CHECK_THROWS_AS(load_episode(EpisodePaths::in_dir(dir.str()), Config{}), ValidationError);
    }
    SUBCASE("hcp length must match frame count") {
        write_file(dir.file("truth.json"), R"({"hcp": [1, 1]})");
        CHECK_THROWS_AS(load_episode(EpisodePaths::in_dir(dir.str()), Config{}), ValidationError);
    }
}

TEST_CASE("admission filter is strictly greater-than") {
    EpisodeMeta meta;
    meta.native_fps = 5.0;
    CHECK_FALSE(admit_for_training(meta));
    meta.native_fps = 15.0;
    CHECK(admit_for_training(meta));
    meta.native_fps = 2.0;
    CHECK_FALSE(admit_for_training(meta));
    meta.native_fps = 5.0001;
    CHECK(admit_for_training(meta));
}

TEST_CASE("load -> save -> load is structurally stable") {
    TempDir dir("ingest_idem");
    write_file(dir.file("meta.json"), kMeta);
    write_file(dir.file("detections.jsonl"), three_frame_detections());
    write_file(
        dir.file("scores.jsonl"),
        R"({"activity": "stimulation", "region": "newborn", "stream": "appearance", "t0": 0.0, "logits": [0.25, -1.5]})"
        "\n");
    write_file(dir.file("truth.json"),
               R"({"activities": {"stimulation": [[0.1, 0.9]]}, "hcp": [1, 2, 2]})");
    Episode first = load_episode(EpisodePaths::in_dir(dir.str()), Config{});

    TempDir dir2("ingest_idem2");
    save_meta(first.meta, dir2.file("meta.json"));
    save_detections(first.detections, dir2.file("detections.jsonl"));
    save_scores(first.scores, dir2.file("scores.jsonl"));
    save_truth(*first.truth, dir2.file("truth.json"));
    Episode second = load_episode(EpisodePaths::in_dir(dir2.str()), Config{});

    CHECK(first.meta == second.meta);
    CHECK(first.detections == second.detections);
    CHECK(first.scores == second.scores);
    CHECK(*first.truth == *second.truth);
}

TEST_SUITE_END();
