// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cinelens/geometry.hpp"
#include "cinelens/image.hpp"
#include "cinelens/optics.hpp"
#include "cinelens/scene.hpp"

namespace cinelens::render {

enum class ProjectionMode { thin_lens, pinhole };
enum class Pass { rgb, depth, segmentation };

[[nodiscard]] Pass parse_pass(std::string_view name); ///< "rgb", "depth", "seg"/"segmentation".
[[nodiscard]] std::string_view pass_name(Pass pass);

struct RenderSettings {
    int width = 160;
    int height = 90;
    int samples_per_pixel = 16;
    std::uint64_t rng_seed = 0;
    ProjectionMode mode = ProjectionMode::thin_lens;
    int threads = 0; ///< 0 selects std::thread::hardware_concurrency(). Never affects pixel values.

    /// Throws DomainError unless width, height >= 8 (and <= 65535) and spp >= 1.
    void validate() const;
};

/// Default half-width of the debug focus plane band, in meters.
inline constexpr double kDefaultFocusPlaneBand = 0.1;

/// Maps (u, v) in [0,1)^2 to a point of the unit-radius pupil.
///
/// blade_count 0 gives a uniform point in the unit disc (u selects the radius ring, v the angle,
/// so u == 0 maps to the center); blade_count k >= 3 gives a uniform point of the regular k-gon
/// inscribed in the unit circle, with a vertex on +v. Throws DomainError for 1 or 2 blades.
[[nodiscard]] Vec2 sample_aperture_point(int blade_count, double u, double v);

/// Ray through the lens center for the raster position `raster` (pixels, origin top-left).
[[nodiscard]] Ray pinhole_ray(const Pose &camera, const optics::CameraState &state, int width, int height,
                              const Vec2 &raster);

/// Thin-lens ray: leaves the lens at `aperture_sample` * (aperture diameter / 2) and passes
/// through the point where the pinhole ray meets the focus plane (perpendicular to the optical
/// axis at the focus distance). A zero aperture sample reproduces pinhole_ray exactly.
[[nodiscard]] Ray generate_ray(const Pose &camera, const optics::CameraState &state, int width, int height,
                               const Vec2 &raster, const Vec2 &aperture_sample);

/// Linear (pre-gamma) radiance image, row-major.
struct LinearImage {
    int width = 0;
    int height = 0;
    std::vector<Eigen::Vector3d> pixels;

    [[nodiscard]] const Eigen::Vector3d &at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-pixel mean of spp radiance samples; the lens is sampled unless the mode is pinhole or
/// manual focus is disabled.
[[nodiscard]] LinearImage render_linear(const scene::Scene &scene, const Pose &camera,
                                        const optics::CameraState &state, const RenderSettings &settings);

/// Clamp to [0, 1], gamma 2.2 encode and quantize to 8 bits.
[[nodiscard]] ImageBuffer encode_rgb(const LinearImage &image);

[[nodiscard]] ImageBuffer render_pass(const scene::Scene &scene, const Pose &camera,
                                      const optics::CameraState &state, const RenderSettings &settings, Pass pass);

/// Blends pixels whose depth lies within `band_m` of `focus_m` 50% with magenta.
[[nodiscard]] ImageBuffer overlay_focus_plane(const ImageBuffer &rgb, const ImageBuffer &depth, double focus_m,
                                              double band_m);

/// The image a camera delivers for `pass`: render_pass plus, for rgb with the focus plane
/// debug flag set, the focus plane overlay.
[[nodiscard]] ImageBuffer render_camera_output(const scene::Scene &scene, const Pose &camera,
                                               const optics::CameraState &state, const RenderSettings &settings,
                                               Pass pass, double focus_plane_band_m = kDefaultFocusPlaneBand);

} // namespace cinelens::render
