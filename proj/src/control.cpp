// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/control.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cinelens/errors.hpp"
#include "cinelens/json_io.hpp"

namespace cinelens::control {

namespace {

using json_io::json;

// Tolerance for deciding which update or frame index a time falls on.
constexpr double kIndexSlack = 1e-9;

std::string format_number(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(std::begin(buffer), std::end(buffer), value);
    return std::string(buffer, end);
}

double parse_number(std::string_view text, std::string_view context) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("cannot parse '" + std::string(text) + "' as " + std::string(context));
    }
    return value;
}

vehicle::PoseKeyframe keyframe_from_json(const json &value, std::string_view context) {
    json_io::require_keys_subset(value, {"t", "position", "orientation", "yaw_deg"}, context);
    vehicle::PoseKeyframe key;
    const std::string ctx(context);
    key.t = json_io::finite_number(json_io::require(value, "t", ctx), ctx + ".t");
    key.pose.position = json_io::vec3(json_io::require(value, "position", ctx), ctx + ".position");
    if (value.contains("orientation") && value.contains("yaw_deg")) {
        throw ValidationError(ctx + " takes either orientation or yaw_deg");
    }
    if (value.contains("orientation")) {
        key.pose.orientation = json_io::quaternion(value["orientation"], ctx + ".orientation");
    } else if (value.contains("yaw_deg")) {
        key.pose.orientation = yaw_rotation(json_io::finite_number(value["yaw_deg"], ctx + ".yaw_deg") * M_PI / 180.0);
    }
    return key;
}

CameraSetup camera_from_json(const json &value) {
    constexpr std::string_view ctx = "camera";
    json_io::require_keys_subset(
        value, {"lens", "filmback", "focal_length_mm", "focus_distance_cm", "fstop", "manual_focus", "focus_plane"}, ctx);
    CameraSetup camera;
    const json &lens = json_io::require(value, "lens", ctx);
    if (!lens.is_string()) {
        throw ValidationError("camera.lens must be a preset name");
    }
    camera.lens = lens.get<std::string>();

    const json &filmback = json_io::require(value, "filmback", ctx);
    if (filmback.is_string()) {
        camera.filmback.preset = filmback.get<std::string>();
    } else {
        json_io::require_keys_subset(filmback, {"width_mm", "height_mm"}, "camera.filmback");
        camera.filmback.preset.reset();
        camera.filmback.custom = {"Custom",
                                  json_io::finite_number(json_io::require(filmback, "width_mm", "camera.filmback"),
                                                         "camera.filmback.width_mm"),
                                  json_io::finite_number(json_io::require(filmback, "height_mm", "camera.filmback"),
                                                         "camera.filmback.height_mm")};
    }
    if (value.contains("focal_length_mm")) {
        camera.focal_length_mm = json_io::finite_number(value["focal_length_mm"], "camera.focal_length_mm");
    }
    if (value.contains("focus_distance_cm")) {
        camera.focus_distance_cm = json_io::finite_number(value["focus_distance_cm"], "camera.focus_distance_cm");
    }
    if (value.contains("fstop")) {
        camera.fstop = json_io::finite_number(value["fstop"], "camera.fstop");
    }
    const auto flag = [&](const char *key, bool &out) {
        if (value.contains(key)) {
            if (!value[key].is_boolean()) {
                throw ValidationError(std::string("camera.") + key + " must be a boolean");
            }
            out = value[key].get<bool>();
        }
    };
    flag("manual_focus", camera.manual_focus);
    flag("focus_plane", camera.focus_plane);
    return camera;
}

optics::Filmback resolve_filmback(const FilmbackSpec &spec, const Catalog &catalog) {
    if (spec.preset) {
        return catalog.filmback(*spec.preset);
    }
    return spec.custom;
}

template <class Fn> auto rethrow_as_validation(Fn &&fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NotFoundError &e) {
        throw ValidationError(e.what());
    } catch (const DomainError &e) {
        throw ValidationError(e.what());
    } catch (const EmptyTrackError &e) {
        throw ValidationError(e.what());
    }
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string frame_file_name(render::Pass pass, std::size_t frame, const std::string &extension) {
    char index[32];
    std::snprintf(index, sizeof index, "%05zu", frame);
    return std::string(render::pass_name(pass)) + "_" + index + "." + extension;
}

} // namespace

TrackParameter parse_track_parameter(std::string_view name) {
    if (name == "focus_distance_cm") {
        return TrackParameter::focus_distance_cm;
    }
    if (name == "focal_length_mm") {
        return TrackParameter::focal_length_mm;
    }
    if (name == "fstop") {
        return TrackParameter::fstop;
    }
    throw ValidationError("unknown track parameter '" + std::string(name) + "'");
}

std::string_view track_parameter_name(TrackParameter parameter) {
    switch (parameter) {
    case TrackParameter::focus_distance_cm:
        return "focus_distance_cm";
    case TrackParameter::focal_length_mm:
        return "focal_length_mm";
    case TrackParameter::fstop:
        return "fstop";
    }
    return "";
}

void ScalarTrack::validate() const {
    if (keyframes.empty()) {
        throw EmptyTrackError();
    }
    for (std::size_t i = 0; i < keyframes.size(); ++i) {
        const auto &key = keyframes[i];
        if (!std::isfinite(key.t) || key.t < 0.0 || (i > 0 && !(key.t > keyframes[i - 1].t))) {
            throw ValidationError(std::string(track_parameter_name(parameter)) +
                                  " track times must be non-negative and strictly increasing");
        }
        if (!std::isfinite(key.value) || key.value <= 0.0) {
            throw ValidationError(std::string(track_parameter_name(parameter)) + " track values must be positive");
        }
    }
}

double evaluate_track(const ScalarTrack &track, double t) {
    const auto &keys = track.keyframes;
    if (keys.empty()) {
        throw EmptyTrackError();
    }
    if (t <= keys.front().t) {
        return keys.front().value;
    }
    if (t >= keys.back().t) {
        return keys.back().value;
    }
    auto upper = std::ranges::upper_bound(keys, t, {}, &ScalarKeyframe::t);
    const ScalarKeyframe &b = *upper;
    const ScalarKeyframe &a = *(upper - 1);
    if (t == a.t || a.value == b.value) {
        return a.value;
    }
    const double s = (t - a.t) / (b.t - a.t);
    return a.value + s * (b.value - a.value);
}

double autofocus_step(const Pose &camera, const Vec3 &target) { return 100.0 * (target - camera.position).norm(); }

double target_axis_distance(const Pose &camera, const Vec3 &target) {
    return (target - camera.position).dot(camera.forward());
}

void Scenario::validate(const Catalog &catalog) const {
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw ValidationError("duration_s must be positive");
    }
    if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
        throw ValidationError("frame_rate_hz must be positive");
    }
    scene.validate();
    rethrow_as_validation([&] { vehicle::validate_track(vehicle_track); });
    if (std::abs(mount.rotation.norm() - 1.0) > 1e-9 || !mount.translation.allFinite()) {
        throw ValidationError("mount rotation must be a unit quaternion");
    }

    std::set<TrackParameter> seen;
    for (const ScalarTrack &track : tracks) {
        rethrow_as_validation([&] { track.validate(); });
        if (!seen.insert(track.parameter).second) {
            throw ValidationError("more than one track for " + std::string(track_parameter_name(track.parameter)));
        }
    }
    if (autofocus.enabled) {
        if (seen.contains(TrackParameter::focus_distance_cm)) {
            throw ValidationError("autofocus and a focus_distance_cm track are mutually exclusive");
        }
        if (!scene.focus_target) {
            throw ValidationError("autofocus requires scene.focus_target");
        }
    }
    if (autofocus.update_period_s && !(*autofocus.update_period_s > 0.0)) {
        throw ValidationError("autofocus update_period_s must be positive");
    }
    if (!(output.focus_plane_band_m >= 0.0)) {
        throw ValidationError("focus_plane_band_m must be non-negative");
    }
    rethrow_as_validation([&] { render.validate(); });

    const optics::CameraState initial = initial_camera_state(catalog);
    rethrow_as_validation([&] { optics::validate(initial); });
}

optics::CameraState Scenario::initial_camera_state(const Catalog &catalog) const {
    return rethrow_as_validation([&] {
        optics::CameraState requested;
        requested.filmback = resolve_filmback(camera.filmback, catalog);
        optics::validate(requested.filmback);
        requested.focal_length_mm = camera.focal_length_mm;
        requested.focus_distance_cm = camera.focus_distance_cm;
        requested.fstop = camera.fstop;
        requested.manual_focus_enabled = camera.manual_focus;
        requested.focus_plane_debug = camera.focus_plane;
        return optics::clamp_camera_state(catalog.lens(camera.lens), requested);
    });
}

std::size_t Scenario::frame_count() const {
    return static_cast<std::size_t>(std::floor(duration_s * frame_rate_hz + kIndexSlack)) + 1;
}

int default_height(const optics::Filmback &filmback, int width) {
    optics::validate(filmback);
    return std::max(1, static_cast<int>(std::lround(width / filmback.aspect_ratio())));
}

Scenario parse_scenario(std::string_view json_text, const Catalog &catalog) {
    const json document = json::parse(json_text.begin(), json_text.end(), nullptr, false);
    if (document.is_discarded() || !document.is_object()) {
        throw ValidationError("scenario must be a JSON object");
    }
    json_io::require_keys_subset(document,
                                 {"scene", "vehicle", "camera", "tracks", "autofocus", "duration_s", "frame_rate_hz",
                                  "render", "seed"},
                                 "scenario");

    Scenario scenario;
    scenario.scene = json_io::scene_from_json(json_io::require(document, "scene", "scenario"));

    const json &vehicle = json_io::require(document, "vehicle", "scenario");
    json_io::require_keys_subset(vehicle, {"track", "mount"}, "vehicle");
    const json &track = json_io::require(vehicle, "track", "vehicle");
    if (!track.is_array()) {
        throw ValidationError("vehicle.track must be an array");
    }
    for (std::size_t i = 0; i < track.size(); ++i) {
        scenario.vehicle_track.push_back(keyframe_from_json(track[i], "vehicle.track[" + std::to_string(i) + "]"));
    }
    if (vehicle.contains("mount")) {
        const json &mount = vehicle["mount"];
        json_io::require_keys_subset(mount, {"translation", "rotation"}, "vehicle.mount");
        if (mount.contains("translation")) {
            scenario.mount.translation = json_io::vec3(mount["translation"], "vehicle.mount.translation");
        }
        if (mount.contains("rotation")) {
            scenario.mount.rotation = json_io::quaternion(mount["rotation"], "vehicle.mount.rotation");
        }
    }

    scenario.camera = camera_from_json(json_io::require(document, "camera", "scenario"));

    if (document.contains("tracks")) {
        const json &tracks = document["tracks"];
        if (!tracks.is_array()) {
            throw ValidationError("tracks must be an array");
        }
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            const std::string ctx = "tracks[" + std::to_string(i) + "]";
            json_io::require_keys_subset(tracks[i], {"parameter", "keyframes"}, ctx);
            const json &parameter = json_io::require(tracks[i], "parameter", ctx);
            if (!parameter.is_string()) {
                throw ValidationError(ctx + ".parameter must be a string");
            }
            ScalarTrack scalar;
            scalar.parameter = parse_track_parameter(parameter.get<std::string>());
            const json &keys = json_io::require(tracks[i], "keyframes", ctx);
            if (!keys.is_array()) {
                throw ValidationError(ctx + ".keyframes must be an array");
            }
            for (const json &key : keys) {
                json_io::require_keys_subset(key, {"t", "value"}, ctx + ".keyframes");
                scalar.keyframes.push_back({json_io::finite_number(json_io::require(key, "t", ctx), ctx + ".t"),
                                            json_io::finite_number(json_io::require(key, "value", ctx), ctx + ".value")});
            }
            scenario.tracks.push_back(std::move(scalar));
        }
    }

    if (document.contains("autofocus")) {
        const json &af = document["autofocus"];
        if (af.is_boolean()) {
            scenario.autofocus.enabled = af.get<bool>();
        } else {
            json_io::require_keys_subset(af, {"enabled", "update_period_s"}, "autofocus");
            const json &enabled = json_io::require(af, "enabled", "autofocus");
            if (!enabled.is_boolean()) {
                throw ValidationError("autofocus.enabled must be a boolean");
            }
            scenario.autofocus.enabled = enabled.get<bool>();
            if (af.contains("update_period_s") && !af["update_period_s"].is_null()) {
                scenario.autofocus.update_period_s = json_io::finite_number(af["update_period_s"], "autofocus.update_period_s");
            }
        }
    }

    scenario.duration_s = json_io::finite_number(json_io::require(document, "duration_s", "scenario"), "duration_s");
    scenario.frame_rate_hz = json_io::finite_number(json_io::require(document, "frame_rate_hz", "scenario"), "frame_rate_hz");

    std::optional<int> height;
    if (document.contains("render")) {
        const json &r = document["render"];
        json_io::require_keys_subset(r, {"width", "height", "spp", "mode", "passes", "format", "threads", "focus_plane_band_m"},
                                     "render");
        const auto integer = [&](const char *key) {
            if (!r[key].is_number_integer()) {
                throw ValidationError(std::string("render.") + key + " must be an integer");
            }
            return r[key].get<int>();
        };
        if (r.contains("width")) {
            scenario.render.width = integer("width");
        }
        if (r.contains("height")) {
            height = integer("height");
        }
        if (r.contains("spp")) {
            scenario.render.samples_per_pixel = integer("spp");
        }
        if (r.contains("threads")) {
            scenario.render.threads = integer("threads");
        }
        if (r.contains("mode")) {
            const std::string mode = r["mode"].is_string() ? r["mode"].get<std::string>() : "";
            if (mode == "thin_lens") {
                scenario.render.mode = render::ProjectionMode::thin_lens;
            } else if (mode == "pinhole") {
                scenario.render.mode = render::ProjectionMode::pinhole;
            } else {
                throw ValidationError("render.mode must be 'thin_lens' or 'pinhole'");
            }
        }
        if (r.contains("passes")) {
            if (!r["passes"].is_array() || r["passes"].empty()) {
                throw ValidationError("render.passes must be a non-empty array");
            }
            scenario.output.passes.clear();
            for (const json &pass : r["passes"]) {
                if (!pass.is_string()) {
                    throw ValidationError("render.passes entries must be strings");
                }
                scenario.output.passes.push_back(render::parse_pass(pass.get<std::string>()));
            }
        }
        if (r.contains("format")) {
            if (!r["format"].is_string()) {
                throw ValidationError("render.format must be a string");
            }
            scenario.output.rgb_format = render::parse_image_format(r["format"].get<std::string>());
        }
        if (r.contains("focus_plane_band_m")) {
            scenario.output.focus_plane_band_m = json_io::finite_number(r["focus_plane_band_m"], "render.focus_plane_band_m");
        }
    }
    if (document.contains("seed")) {
        if (!document["seed"].is_number_unsigned()) {
            throw ValidationError("seed must be a non-negative integer");
        }
        scenario.render.rng_seed = document["seed"].get<std::uint64_t>();
    }

    // Without an explicit height the frame follows the filmback aspect ratio.
    scenario.render.height = height ? *height
                                    : rethrow_as_validation([&] {
                                          return default_height(resolve_filmback(scenario.camera.filmback, catalog),
                                                                scenario.render.width);
                                      });

    scenario.validate(catalog);
    return scenario;
}

Scenario load_scenario(const std::filesystem::path &path, const Catalog &catalog) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read scenario file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), catalog);
}

std::string framelog_csv(const FrameLog &log) {
    std::string out(kFrameLogHeader);
    out += '\n';
    for (const FrameRecord &r : log.frames) {
        const Vec3 &p = r.vehicle_pose.position;
        const Quat &q = r.vehicle_pose.orientation;
        out += std::to_string(r.frame);
        for (double v : {r.t, p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z(), r.focal_length_mm, r.focus_distance_cm,
                         r.fstop}) {
            out += ',';
            out += format_number(v);
        }
        out += ',';
        if (r.autofocus_distance_cm) {
            out += format_number(*r.autofocus_distance_cm);
        }
        out += '\n';
    }
    return out;
}

FrameLog parse_framelog_csv(std::string_view csv) {
    FrameLog log;
    std::size_t line_start = 0;
    bool header = true;
    while (line_start < csv.size()) {
        std::size_t line_end = csv.find('\n', line_start);
        if (line_end == std::string_view::npos) {
            line_end = csv.size();
        }
        std::string_view line = csv.substr(line_start, line_end - line_start);
        line_start = line_end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (header) {
            if (line != kFrameLogHeader) {
                throw ValidationError("frame log header mismatch");
            }
            header = false;
            continue;
        }

        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (cells.size() != 13) {
            throw ValidationError("frame log row must have 13 columns");
        }
        FrameRecord r;
        r.frame = static_cast<std::size_t>(parse_number(cells[0], "frame"));
        r.t = parse_number(cells[1], "t");
        r.vehicle_pose.position = {parse_number(cells[2], "px"), parse_number(cells[3], "py"), parse_number(cells[4], "pz")};
        r.vehicle_pose.orientation = Quat(parse_number(cells[5], "qw"), parse_number(cells[6], "qx"),
                                          parse_number(cells[7], "qy"), parse_number(cells[8], "qz"));
        r.focal_length_mm = parse_number(cells[9], "focal_mm");
        r.focus_distance_cm = parse_number(cells[10], "focus_cm");
        r.fstop = parse_number(cells[11], "fstop");
        if (!cells[12].empty()) {
            r.autofocus_distance_cm = parse_number(cells[12], "af_dist_cm");
        }
        log.frames.push_back(std::move(r));
    }
    if (header) {
        throw ValidationError("frame log is empty");
    }
    return log;
}

std::string framelog_manifest(const FrameLog &log) {
    json frames = json::array();
    for (const FrameRecord &r : log.frames) {
        frames.push_back({{"frame", r.frame}, {"t", r.t}, {"images", r.images}});
    }
    return json{{"frame_count", log.frames.size()}, {"frames", frames}}.dump(2) + "\n";
}

ScenarioPlayer::ScenarioPlayer(const Scenario &scenario, const Catalog &catalog)
    : scenario_(scenario), base_(scenario.initial_camera_state(catalog)) {}

ScenarioPlayer::Frame ScenarioPlayer::frame(std::size_t index) {
    Frame frame;
    frame.t = static_cast<double>(index) / scenario_.frame_rate_hz;
    frame.vehicle_pose = vehicle::interpolate_pose(scenario_.vehicle_track, frame.t);
    frame.camera_pose = vehicle::camera_world_pose(frame.vehicle_pose, scenario_.mount);

    optics::CameraState requested = base_;
    for (const ScalarTrack &track : scenario_.tracks) {
        const double value = evaluate_track(track, frame.t);
        switch (track.parameter) {
        case TrackParameter::focus_distance_cm:
            requested.focus_distance_cm = value;
            break;
        case TrackParameter::focal_length_mm:
            requested.focal_length_mm = value;
            break;
        case TrackParameter::fstop:
            requested.fstop = value;
            break;
        }
    }

    if (scenario_.autofocus.enabled) {
        const double period = scenario_.autofocus.update_period_s.value_or(1.0 / scenario_.frame_rate_hz);
        const auto update = static_cast<std::int64_t>(std::floor(frame.t / period + kIndexSlack));
        if (!last_update_ || update != *last_update_) {
            held_autofocus_cm_ = autofocus_step(frame.camera_pose, scene::target_position(scenario_.scene));
            last_update_ = update;
        }
        requested.focus_distance_cm = *held_autofocus_cm_;
        frame.autofocus_distance_cm = held_autofocus_cm_;
    }

    frame.camera = optics::clamp_camera_state(base_.lens, requested);
    if (!optics::has_real_image(frame.camera)) {
        throw DomainError("frame " + std::to_string(index) + ": focus distance does not exceed the focal length");
    }
    return frame;
}

FrameLog run_scenario(const Scenario &scenario, const std::filesystem::path &output_dir, const RunOptions &options,
                      const Catalog &catalog) {
    scenario.validate(catalog);
    const std::vector<render::Pass> passes = options.passes.value_or(scenario.output.passes);

    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec || !std::filesystem::is_directory(output_dir)) {
        throw IoError("cannot create output directory " + output_dir.string());
    }

    ScenarioPlayer player(scenario, catalog);
    FrameLog log;
    const std::size_t count = scenario.frame_count();
    for (std::size_t k = 0; k < count; ++k) {
        const ScenarioPlayer::Frame frame = player.frame(k);
        FrameRecord record;
        record.frame = k;
        record.t = frame.t;
        record.vehicle_pose = frame.vehicle_pose;
        record.focal_length_mm = frame.camera.focal_length_mm;
        record.focus_distance_cm = frame.camera.focus_distance_cm;
        record.fstop = frame.camera.fstop;
        record.autofocus_distance_cm = frame.autofocus_distance_cm;

        for (render::Pass pass : passes) {
            const render::ImageBuffer image = render::render_camera_output(
                scenario.scene, frame.camera_pose, frame.camera, scenario.render, pass, scenario.output.focus_plane_band_m);
            const std::string name = frame_file_name(pass, k, render::file_extension(image, scenario.output.rgb_format));
            render::export_image(image, output_dir / name, scenario.output.rgb_format);
            record.images[std::string(render::pass_name(pass))] = name;
        }
        log.frames.push_back(std::move(record));
    }

    write_text(output_dir / "frames.csv", framelog_csv(log));
    write_text(output_dir / "manifest.json", framelog_manifest(log));
    return log;
}

Scenario replay_scenario(const Scenario &base, const FrameLog &log) {
    if (log.frames.empty()) {
        throw ValidationError("cannot replay an empty frame log");
    }
    Scenario replay = base;
    replay.autofocus = {};
    replay.vehicle_track.clear();
    replay.tracks = {ScalarTrack{TrackParameter::focal_length_mm, {}}, ScalarTrack{TrackParameter::focus_distance_cm, {}},
                     ScalarTrack{TrackParameter::fstop, {}}};
    for (const FrameRecord &r : log.frames) {
        replay.vehicle_track.push_back({r.t, r.vehicle_pose});
        replay.tracks[0].keyframes.push_back({r.t, r.focal_length_mm});
        replay.tracks[1].keyframes.push_back({r.t, r.focus_distance_cm});
        replay.tracks[2].keyframes.push_back({r.t, r.fstop});
    }
    return replay;
}

} // namespace cinelens::control
