// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cinelens::optics {

// Explicit sentinel for "focused at infinity" and "far limit at infinity".
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline constexpr double kMillimetersPerCentimeter = 10.0;
inline constexpr double kMillimetersPerMeter = 1000.0;

[[nodiscard]] inline bool is_infinite(double distance) { return std::isinf(distance) && distance > 0.0; }

// Acceptable circle of confusion expressed as a fraction of the sensor width.
inline constexpr double kCocFractionOfSensorWidth = 1.0 / 1500.0;

struct Filmback {
    std::string name;
    double sensor_width_mm = 0.0;
    double sensor_height_mm = 0.0;

    [[nodiscard]] double aspect_ratio() const { return sensor_width_mm / sensor_height_mm; }

    friend bool operator==(const Filmback &, const Filmback &) = default;
};

// Physical limits of a commercial lens. A prime lens has min_focal_length == max_focal_length.
struct Lens {
    std::string name;
    double min_focal_length_mm = 0.0;
    double max_focal_length_mm = 0.0;
    double min_fstop = 0.0;
    double max_fstop = 0.0;
    double min_focus_distance_cm = 0.0;
    int diaphragm_blade_count = 0; ///< 0 for a perfectly circular aperture, otherwise >= 3.

    [[nodiscard]] bool is_prime() const { return min_focal_length_mm == max_focal_length_mm; }

    friend bool operator==(const Lens &, const Lens &) = default;
};

/// Live settings of the mounted cinematic camera.
///
/// Focal length is in millimeters, focus distance in centimeters (the units the control API
/// speaks). The image distance is derived on demand by image_distance().
struct CameraState {
    Lens lens;
    Filmback filmback;
    double focal_length_mm = 0.0;
    double focus_distance_cm = 0.0;
    double fstop = 0.0;
    bool manual_focus_enabled = true;
    bool focus_plane_debug = false;

    [[nodiscard]] double focus_distance_mm() const { return focus_distance_cm * kMillimetersPerCentimeter; }
    [[nodiscard]] double focus_distance_m() const { return focus_distance_cm / 100.0; }

    friend bool operator==(const CameraState &, const CameraState &) = default;
};

/// Throws DomainError unless the filmback has positive finite dimensions.
void validate(const Filmback &filmback);

/// Throws DomainError unless the lens limits are ordered, positive and the blade count is 0 or >= 3.
void validate(const Lens &lens);

/// Throws DomainError unless every field lies inside the lens limits and the focus plane lies
/// beyond the focal point.
void validate(const CameraState &state);

/// Distance from the lens to the sharp image of a plane at distance `focus_mm`.
///
/// `focus_mm` may be kInfinity. Throws DomainError when focus_mm <= focal_mm.
[[nodiscard]] double image_distance(double focal_mm, double focus_mm);

[[nodiscard]] double aperture_diameter(double focal_mm, double fstop);

/// Blur-spot diameter on the sensor (mm) of a point at `object_mm` when focused at `focus_mm`.
///
/// c = (f^2 / N) * |Z - Zf| / (Z * (Zf - f)). `object_mm` may be kInfinity.
[[nodiscard]] double coc_diameter(double focal_mm, double fstop, double focus_mm, double object_mm);

[[nodiscard]] double horizontal_fov_deg(const Filmback &filmback, double focal_mm);
[[nodiscard]] double vertical_fov_deg(const Filmback &filmback, double focal_mm);

/// H = f^2 / (N c) + f.
[[nodiscard]] double hyperfocal_distance(double focal_mm, double fstop, double coc_limit_mm);

struct DofLimits {
    double near_mm = 0.0;
    double far_mm = 0.0; ///< kInfinity when focused at or beyond the hyperfocal distance.
};

/// Nearest and farthest object distances whose blur stays within `coc_limit_mm`.
[[nodiscard]] DofLimits dof_limits(double focal_mm, double fstop, double focus_mm, double coc_limit_mm);

[[nodiscard]] double default_coc_limit(const Filmback &filmback);

/// Clamps focal length, f-stop and focus distance of `requested` into the limits of `lens`.
///
/// The returned state carries `lens`; the remaining fields are copied. Total and idempotent.
[[nodiscard]] CameraState clamp_camera_state(const Lens &lens, const CameraState &requested);

/// True when the focus plane lies beyond the focal point (image_distance is defined).
[[nodiscard]] bool has_real_image(const CameraState &state);

/// Lens focal lengths offered by a DOF table: the usual cine focal lengths inside the lens
/// range plus both range ends. A prime gives exactly one value.
[[nodiscard]] std::vector<double> focal_length_stops(const Lens &lens);

/// Full f-stops (1, 1.4, 2, ..., 32) inside the lens range plus both range ends.
[[nodiscard]] std::vector<double> fstop_stops(const Lens &lens);

struct DofRow {
    double focal_length_mm = 0.0;
    double fstop = 0.0;
    double focus_distance_cm = 0.0;
    double near_cm = 0.0;
    double far_cm = 0.0; ///< kInfinity beyond the hyperfocal distance.
    double hyperfocal_cm = 0.0;
};

/// One row per focal stop, f-stop and focus distance, with the default circle of confusion of
/// `filmback`. Throws DomainError when a focus distance does not exceed a focal length.
[[nodiscard]] std::vector<DofRow> dof_table(const Lens &lens, const Filmback &filmback,
                                            std::span<const double> focus_distances_cm);

} // namespace cinelens::optics
