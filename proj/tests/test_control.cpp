// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <string>

#include <json.hpp>

#include "cinelens/control.hpp"
#include "cinelens/errors.hpp"
#include "cinelens/image_io.hpp"
#include "support/test_support.hpp"

using namespace cinelens;
using namespace cinelens::control;
using doctest::Approx;
using nlohmann::json;

namespace {

json base_scenario() {
    return json::parse(R"({
      "scene": {
        "objects": [
          {"id": 1, "plane": {"point": [0, 0, 0], "normal": [0, 0, 1]}, "material": {"checker_scale": 1.0}},
          {"id": 5, "sphere": {"center": [0, 0, 1.5], "radius": 0.5}, "material": {"albedo": [0.9, 0.1, 0.1]}}
        ],
        "light": {"position": [0, 0, 20], "intensity": 400},
        "focus_target": 5
      },
      "vehicle": {"track": [{"t": 0, "position": [-30, 0, 1.5]}, {"t": 1, "position": [-10, 0, 1.5]}]},
      "camera": {"lens": "Universal Zoom", "filmback": "16:9 DSLR", "focal_length_mm": 50,
                 "focus_distance_cm": 1500, "fstop": 2.8},
      "duration_s": 1,
      "frame_rate_hz": 10,
      "render": {"width": 32, "spp": 2},
      "seed": 3
    })");
}

Scenario parse(const json &doc) { return parse_scenario(doc.dump()); }

} // namespace

TEST_CASE("evaluate_track examples") {
    ScalarTrack track{TrackParameter::focus_distance_cm, {{0, 2000}, {10, 3400}}};
    CHECK(evaluate_track(track, 5) == 2700.0);
    CHECK(evaluate_track(track, -1) == 2000.0);
    CHECK(evaluate_track(track, 11) == 3400.0);
    CHECK(evaluate_track(track, 10) == 3400.0);

    ScalarTrack plateau{TrackParameter::fstop, {{0, 4}, {1, 8}, {3, 8}, {4, 2}}};
    for (double t = 1; t <= 3; t += 0.125) {
        CHECK(evaluate_track(plateau, t) == 8.0);
    }
    CHECK(evaluate_track(plateau, 3.5) == Approx(5.0));
    CHECK_THROWS_AS((void)evaluate_track(ScalarTrack{}, 0), EmptyTrackError);
}

TEST_CASE("track validation") {
    CHECK_THROWS_AS(ScalarTrack{}.validate(), EmptyTrackError);
    CHECK_THROWS_AS((ScalarTrack{TrackParameter::fstop, {{0, 4}, {0, 5}}}.validate()), ValidationError);
    CHECK_THROWS_AS((ScalarTrack{TrackParameter::fstop, {{0, -4}}}.validate()), ValidationError);
    CHECK(parse_track_parameter("focal_length_mm") == TrackParameter::focal_length_mm);
    CHECK(track_parameter_name(TrackParameter::fstop) == "fstop");
    CHECK_THROWS_AS((void)parse_track_parameter("iso"), ValidationError);
}

TEST_CASE("autofocus_step examples") {
    CHECK(autofocus_step(Pose{}, Vec3(3, 4, 0)) == Approx(500.0));
    CHECK(autofocus_step(Pose{Vec3(1, 1, 1), Quat::Identity()}, Vec3(1, 1, 1)) == 0.0);
    CHECK(autofocus_step(Pose{}, Vec3(10.5, 0, 0)) == Approx(1050.0));

    optics::CameraState requested = testing::camera("Universal Zoom", "16:9 DSLR", 50, 1000, 2);
    requested.focus_distance_cm = autofocus_step(Pose{}, Vec3::Zero());
    CHECK(optics::clamp_camera_state(requested.lens, requested).focus_distance_cm ==
          requested.lens.min_focus_distance_cm);
}

TEST_CASE("scenario parsing") {
    const Scenario s = parse(base_scenario());
    CHECK(s.frame_count() == 11);
    CHECK(s.render.width == 32);
    CHECK(s.render.height == 18);
    CHECK(s.render.rng_seed == 3);
    CHECK(s.scene.focus_target == 5u);
    CHECK(s.vehicle_track.size() == 2);

    json doc = base_scenario();
    doc["camera"]["filmback"] = {{"width_mm", 40}, {"height_mm", 10}};
    CHECK(parse(doc).render.height == 8);

    doc = base_scenario();
    doc["render"]["height"] = 20;
    CHECK(parse(doc).render.height == 20);

    doc = base_scenario();
    doc["vehicle"]["track"][0]["yaw_deg"] = 90;
    CHECK(parse(doc).vehicle_track[0].pose.orientation.isApprox(yaw_rotation(M_PI / 2)));
}

TEST_CASE("scenario validation failures") {
    const auto rejects = [](const json &doc) { CHECK_THROWS_AS((void)parse(doc), ValidationError); };
    json doc = base_scenario();
    doc["weather"] = "rain";
    rejects(doc);

    doc = base_scenario();
    doc["camera"]["iso"] = 100;
    rejects(doc);

    doc = base_scenario();
    doc["camera"]["lens"] = "Nope";
    rejects(doc);

    doc = base_scenario();
    doc["duration_s"] = 0;
    rejects(doc);

    doc = base_scenario();
    doc["frame_rate_hz"] = -5;
    rejects(doc);

    doc = base_scenario();
    doc["render"]["spp"] = 0;
    rejects(doc);

    doc = base_scenario();
    doc["vehicle"]["track"] = json::array();
    rejects(doc);

    doc = base_scenario();
    doc["tracks"] = json::parse(R"([{"parameter": "fstop", "keyframes": [{"t": 0, "value": 4}]},
                                    {"parameter": "fstop", "keyframes": [{"t": 0, "value": 5}]}])");
    rejects(doc);

    doc = base_scenario();
    doc["autofocus"] = {{"enabled", true}};
    doc["scene"].erase("focus_target");
    rejects(doc);

    CHECK_THROWS_AS((void)parse_scenario("{not json"), ValidationError);
    CHECK_THROWS_AS((void)load_scenario("/nonexistent/scenario.json"), ValidationError);
}

TEST_CASE("autofocus and a focus track are mutually exclusive") {
    json doc = base_scenario();
    doc["autofocus"] = {{"enabled", true}};
    doc["tracks"] = json::parse(R"([{"parameter": "focus_distance_cm", "keyframes": [{"t": 0, "value": 2000}]}])");
    try {
        (void)parse(doc);
        FAIL("expected a validation error");
    } catch (const ValidationError &e) {
        CHECK(std::string(e.what()).find("mutually exclusive") != std::string::npos);
    }
}

TEST_CASE("frame count includes both ends") {
    Scenario s;
    s.duration_s = 1;
    s.frame_rate_hz = 10;
    CHECK(s.frame_count() == 11);
    s.duration_s = 0.3;
    CHECK(s.frame_count() == 4);
    s.duration_s = 5;
    CHECK(s.frame_count() == 51);
}

TEST_CASE("run_scenario writes frames, log and manifest") {
    testing::TempDir dir("run");
    json doc = base_scenario();
    doc["tracks"] = json::parse(R"([{"parameter": "fstop", "keyframes": [{"t": 0, "value": 4}, {"t": 1, "value": 6}]}])");
    const Scenario s = parse(doc);
    const FrameLog log = run_scenario(s, dir.path());
    REQUIRE(log.frames.size() == 11);
    for (std::size_t k = 0; k < 11; ++k) {
        const auto &r = log.frames[k];
        CHECK(r.t == static_cast<double>(k) / 10.0);
        CHECK(r.fstop == Approx(4.0 + 2.0 * r.t).epsilon(1e-12));
        CHECK(std::filesystem::exists(dir.path() / r.images.at("rgb")));
        CHECK_FALSE(r.autofocus_distance_cm.has_value());
    }
    CHECK(log.frames[3].images.at("rgb") == "rgb_00003.png");

    std::ifstream csv_in(dir.path() / "frames.csv");
    const std::string csv((std::istreambuf_iterator<char>(csv_in)), std::istreambuf_iterator<char>());
    CHECK(csv.rfind(std::string(kFrameLogHeader) + "\n", 0) == 0);
    const FrameLog parsed = parse_framelog_csv(csv);
    REQUIRE(parsed.frames.size() == 11);
    for (std::size_t k = 0; k < 11; ++k) {
        CHECK(parsed.frames[k].t == log.frames[k].t);
        CHECK(parsed.frames[k].fstop == log.frames[k].fstop);
        CHECK(parsed.frames[k].vehicle_pose.position == log.frames[k].vehicle_pose.position);
    }

    std::ifstream manifest_in(dir.path() / "manifest.json");
    const json manifest = json::parse(manifest_in);
    CHECK(manifest["frame_count"] == 11);
    CHECK(manifest["frames"][10]["images"]["rgb"] == "rgb_00010.png");
}

TEST_CASE("run_scenario with a pass override") {
    testing::TempDir dir("passes");
    RunOptions options;
    options.passes = std::vector<render::Pass>{render::Pass::depth};
    const FrameLog log = run_scenario(parse(base_scenario()), dir.path(), options);
    int depth_files = 0, other = 0;
    for (const auto &entry : std::filesystem::directory_iterator(dir.path())) {
        const auto ext = entry.path().extension();
        (ext == ".depth" ? depth_files : other)++;
    }
    CHECK(depth_files == 11);
    CHECK(other == 2);
    CHECK(log.frames[0].images.count("rgb") == 0);
}

TEST_CASE("autofocus follows an approaching target") {
    json doc = base_scenario();
    doc["autofocus"] = {{"enabled", true}};
    const Scenario s = parse(doc);
    ScenarioPlayer player(s);
    double previous = 1e300;
    for (std::size_t k = 0; k < s.frame_count(); ++k) {
        const auto frame = player.frame(k);
        const double expected_cm = 100.0 * (30.0 - 20.0 * frame.t);
        REQUIRE(frame.autofocus_distance_cm.has_value());
        CHECK(*frame.autofocus_distance_cm == Approx(expected_cm).epsilon(1e-12));
        CHECK(frame.camera.focus_distance_cm == *frame.autofocus_distance_cm);
        CHECK(frame.camera.focus_distance_cm < previous);
        previous = frame.camera.focus_distance_cm;
    }
}

TEST_CASE("autofocus holds its value between updates") {
    json doc = base_scenario();
    doc["autofocus"] = {{"enabled", true}, {"update_period_s", 0.25}};
    const Scenario s = parse(doc);
    ScenarioPlayer player(s);
    std::vector<double> values;
    for (std::size_t k = 0; k < s.frame_count(); ++k) {
        values.push_back(player.frame(k).camera.focus_distance_cm);
    }
    // Updates at t = 0, 0.3, 0.5, 0.8, 1.0 (first frame of each 0.25 s period).
    CHECK(values[1] == values[0]);
    CHECK(values[2] == values[1]);
    CHECK(values[3] < values[2]);
    CHECK(values[4] == values[3]);
    CHECK(values[5] < values[4]);
    CHECK(values[3] == Approx(100.0 * (30.0 - 20.0 * 0.3)));
}

TEST_CASE("frame log CSV round trip is exact") {
    FrameLog log;
    for (int k = 0; k < 5; ++k) {
        FrameRecord r;
        r.frame = static_cast<std::size_t>(k);
        r.t = k / 3.0;
        r.vehicle_pose = {Vec3(0.1 * k, -1.0 / 7.0, 1e-17), yaw_rotation(0.3 * k)};
        r.focal_length_mm = 50.0 + k / 9.0;
        r.focus_distance_cm = 2000.0 + 1400.0 * r.t;
        r.fstop = 4.0 + 2.0 / 3.0;
        if (k % 2 == 1) {
            r.autofocus_distance_cm = 1234.5678901234567;
        }
        log.frames.push_back(r);
    }
    const FrameLog back = parse_framelog_csv(framelog_csv(log));
    REQUIRE(back.frames.size() == log.frames.size());
    for (std::size_t i = 0; i < log.frames.size(); ++i) {
        const auto &a = log.frames[i];
        const auto &b = back.frames[i];
        CHECK(a.frame == b.frame);
        CHECK(a.t == b.t);
        CHECK(a.vehicle_pose.position == b.vehicle_pose.position);
        CHECK(a.vehicle_pose.orientation.coeffs() == b.vehicle_pose.orientation.coeffs());
        CHECK(a.focal_length_mm == b.focal_length_mm);
        CHECK(a.focus_distance_cm == b.focus_distance_cm);
        CHECK(a.fstop == b.fstop);
        CHECK(a.autofocus_distance_cm == b.autofocus_distance_cm);
    }
    CHECK_THROWS_AS((void)parse_framelog_csv("frame,t\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_framelog_csv(std::string(kFrameLogHeader) + "\n1,2,3\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_framelog_csv(""), ValidationError);
}

TEST_CASE("replaying a frame log reproduces the images") {
    testing::TempDir first("replay_a");
    testing::TempDir second("replay_b");
    json doc = base_scenario();
    doc["autofocus"] = {{"enabled", true}};
    doc["tracks"] = json::parse(R"([{"parameter": "fstop", "keyframes": [{"t": 0, "value": 1.4}, {"t": 1, "value": 8}]}])");
    const Scenario s = parse(doc);
    const FrameLog log = run_scenario(s, first.path());
    const Scenario replay = replay_scenario(s, log);
    CHECK_NOTHROW(replay.validate());
    const FrameLog again = run_scenario(replay, second.path());
    REQUIRE(again.frames.size() == log.frames.size());
    for (std::size_t k = 0; k < log.frames.size(); ++k) {
        CHECK(again.frames[k].focus_distance_cm == log.frames[k].focus_distance_cm);
        CHECK(again.frames[k].fstop == log.frames[k].fstop);
        const auto name = log.frames[k].images.at("rgb");
        CHECK(render::read_file(first.path() / name) == render::read_file(second.path() / name));
    }
}

TEST_CASE("run_scenario reports unwritable output") {
    CHECK_THROWS_AS((void)run_scenario(parse(base_scenario()), "/proc/cinelens-cannot-write"), IoError);
}
