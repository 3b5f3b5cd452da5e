// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cinelens/catalog.hpp"
#include "cinelens/image_io.hpp"
#include "cinelens/optics.hpp"
#include "cinelens/render.hpp"
#include "cinelens/scene.hpp"
#include "cinelens/vehicle.hpp"

namespace cinelens::control {

enum class TrackParameter { focus_distance_cm, focal_length_mm, fstop };

[[nodiscard]] TrackParameter parse_track_parameter(std::string_view name);
[[nodiscard]] std::string_view track_parameter_name(TrackParameter parameter);

struct ScalarKeyframe {
    double t = 0.0;
    double value = 0.0;
};

/// Piecewise-linear trajectory of one lens parameter.
struct ScalarTrack {
    TrackParameter parameter = TrackParameter::focus_distance_cm;
    std::vector<ScalarKeyframe> keyframes;

    /// Throws EmptyTrackError, or ValidationError for non-increasing times / non-positive values.
    void validate() const;
};

/// Clamped-endpoint linear interpolation; exact at keyframe times.
[[nodiscard]] double evaluate_track(const ScalarTrack &track, double t);

/// Focus distance in centimeters that puts the target in focus: the camera-to-target
/// Euclidean distance. Callers clamp the result to the lens.
[[nodiscard]] double autofocus_step(const Pose &camera, const Vec3 &target);

/// Which distance the optical axis sees the target at, in meters (for diagnostics and tests).
[[nodiscard]] double target_axis_distance(const Pose &camera, const Vec3 &target);

struct AutofocusSettings {
    bool enabled = false;
    std::optional<double> update_period_s; ///< Defaults to one frame interval.
};

/// Filmback given by preset name or as custom dimensions.
struct FilmbackSpec {
    std::optional<std::string> preset;
    optics::Filmback custom;
};

struct CameraSetup {
    std::string lens = "Universal Zoom";
    FilmbackSpec filmback{std::string("16:9 DSLR"), {}};
    double focal_length_mm = 50.0;
    double focus_distance_cm = 1000.0;
    double fstop = 2.8;
    bool manual_focus = true;
    bool focus_plane = false;
};

struct OutputSettings {
    std::vector<render::Pass> passes{render::Pass::rgb};
    render::ImageFormat rgb_format = render::ImageFormat::png;
    double focus_plane_band_m = render::kDefaultFocusPlaneBand;
};

struct Scenario {
    scene::Scene scene;
    std::vector<vehicle::PoseKeyframe> vehicle_track;
    vehicle::CameraMount mount;
    CameraSetup camera;
    std::vector<ScalarTrack> tracks;
    AutofocusSettings autofocus;
    double duration_s = 1.0;
    double frame_rate_hz = 10.0;
    render::RenderSettings render;
    OutputSettings output;

    /// Throws ValidationError on any broken scenario invariant, including an autofocus flag
    /// combined with a focus_distance track.
    void validate(const Catalog &catalog = Catalog::builtin()) const;

    /// Camera state before any track is applied, clamped to the lens.
    [[nodiscard]] optics::CameraState initial_camera_state(const Catalog &catalog = Catalog::builtin()) const;

    /// Number of frames: all k with k / frame_rate <= duration.
    [[nodiscard]] std::size_t frame_count() const;
};

/// Resolution height matching the filmback aspect for a given width.
[[nodiscard]] int default_height(const optics::Filmback &filmback, int width);

/// Parses scenario JSON with top-level keys scene, vehicle, camera, tracks, autofocus,
/// duration_s, frame_rate_hz, render, seed. Unknown keys are rejected with ValidationError.
[[nodiscard]] Scenario parse_scenario(std::string_view json_text, const Catalog &catalog = Catalog::builtin());
[[nodiscard]] Scenario load_scenario(const std::filesystem::path &path, const Catalog &catalog = Catalog::builtin());

struct FrameRecord {
    std::size_t frame = 0;
    double t = 0.0;
    Pose vehicle_pose;
    double focal_length_mm = 0.0;
    double focus_distance_cm = 0.0;
    double fstop = 0.0;
    std::optional<double> autofocus_distance_cm;
    std::map<std::string, std::string> images; ///< Pass name -> path relative to the output dir.
};

struct FrameLog {
    std::vector<FrameRecord> frames;
};

inline constexpr std::string_view kFrameLogHeader = "frame,t,px,py,pz,qw,qx,qy,qz,focal_mm,focus_cm,fstop,af_dist_cm";

/// CSV text with kFrameLogHeader; numbers use the shortest round-trip representation.
[[nodiscard]] std::string framelog_csv(const FrameLog &log);
[[nodiscard]] FrameLog parse_framelog_csv(std::string_view csv);
/// JSON manifest listing each frame's image paths.
[[nodiscard]] std::string framelog_manifest(const FrameLog &log);

/// The camera state applied at each frame, before rendering. Shared by run_scenario and tests.
class ScenarioPlayer {
  public:
    explicit ScenarioPlayer(const Scenario &scenario, const Catalog &catalog = Catalog::builtin());

    struct Frame {
        double t = 0.0;
        Pose vehicle_pose;
        Pose camera_pose;
        optics::CameraState camera;
        std::optional<double> autofocus_distance_cm;
    };

    /// Frame `index`; frames must be requested in increasing order for autofocus to hold values.
    [[nodiscard]] Frame frame(std::size_t index);

  private:
    const Scenario &scenario_;
    optics::CameraState base_;
    std::optional<std::int64_t> last_update_;
    std::optional<double> held_autofocus_cm_;
};

struct RunOptions {
    std::optional<std::vector<render::Pass>> passes; ///< Overrides the scenario's passes.
};

/// Plays the scenario frame by frame, writes images, frames.csv and manifest.json into
/// `output_dir`, and returns the log. Throws ValidationError, DomainError or IoError.
FrameLog run_scenario(const Scenario &scenario, const std::filesystem::path &output_dir, const RunOptions &options = {},
                      const Catalog &catalog = Catalog::builtin());

/// Open-loop scenario whose pose and parameter tracks reproduce `log` at its frame times.
[[nodiscard]] Scenario replay_scenario(const Scenario &base, const FrameLog &log);

} // namespace cinelens::control
