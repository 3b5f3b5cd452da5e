// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/optics.hpp"

#include <algorithm>
#include <numbers>

#include "cinelens/errors.hpp"

namespace cinelens::optics {

namespace {

bool positive_finite(double value) { return std::isfinite(value) && value > 0.0; }

void require_positive(double value, const char *what) {
    if (!positive_finite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

} // namespace

void validate(const Filmback &filmback) {
    if (!positive_finite(filmback.sensor_width_mm) || !positive_finite(filmback.sensor_height_mm)) {
        throw DomainError("filmback '" + filmback.name + "' must have positive sensor dimensions");
    }
}

void validate(const Lens &lens) {
    const auto fail = [&](const char *why) { throw DomainError("lens '" + lens.name + "': " + why); };
    if (!positive_finite(lens.min_focal_length_mm) || !std::isfinite(lens.max_focal_length_mm) ||
        lens.min_focal_length_mm > lens.max_focal_length_mm) {
        fail("requires 0 < min_focal_length <= max_focal_length");
    }
    if (!positive_finite(lens.min_fstop) || !std::isfinite(lens.max_fstop) || lens.min_fstop > lens.max_fstop) {
        fail("requires 0 < min_fstop <= max_fstop");
    }
    if (!positive_finite(lens.min_focus_distance_cm)) {
        fail("requires min_focus_distance > 0");
    }
    if (lens.diaphragm_blade_count < 0 || lens.diaphragm_blade_count == 1 || lens.diaphragm_blade_count == 2) {
        fail("diaphragm_blade_count must be 0 or at least 3");
    }
}

void validate(const CameraState &state) {
    validate(state.lens);
    validate(state.filmback);
    const Lens &lens = state.lens;
    if (!(state.focal_length_mm >= lens.min_focal_length_mm && state.focal_length_mm <= lens.max_focal_length_mm)) {
        throw DomainError("focal length outside lens limits");
    }
    if (!(state.fstop >= lens.min_fstop && state.fstop <= lens.max_fstop)) {
        throw DomainError("f-stop outside lens limits");
    }
    if (!(state.focus_distance_cm >= lens.min_focus_distance_cm)) {
        throw DomainError("focus distance below lens minimum");
    }
    if (!has_real_image(state)) {
        throw DomainError("focus distance must exceed the focal length");
    }
}

double image_distance(double focal_mm, double focus_mm) {
    require_positive(focal_mm, "focal length");
    if (!(focus_mm > focal_mm)) {
        throw DomainError("focus distance must exceed the focal length");
    }
    if (is_infinite(focus_mm)) {
        return focal_mm;
    }
    // Same as 1 / (1/f - 1/Z) without the cancellation for Z >> f.
    return focal_mm * focus_mm / (focus_mm - focal_mm);
}

double aperture_diameter(double focal_mm, double fstop) {
    require_positive(focal_mm, "focal length");
    require_positive(fstop, "f-stop");
    return focal_mm / fstop;
}

double coc_diameter(double focal_mm, double fstop, double focus_mm, double object_mm) {
    require_positive(focal_mm, "focal length");
    require_positive(fstop, "f-stop");
    if (!(focus_mm > focal_mm) || is_infinite(focus_mm)) {
        throw DomainError("focus distance must be finite and exceed the focal length");
    }
    if (!(object_mm > 0.0)) {
        throw DomainError("object distance must be positive");
    }
    const double scale = focal_mm * focal_mm / fstop;
    const double focus_offset = focus_mm - focal_mm;
    if (is_infinite(object_mm)) {
        return scale / focus_offset;
    }
    if (object_mm == focus_mm) {
        return 0.0;
    }
    return scale * std::abs(object_mm - focus_mm) / (object_mm * focus_offset);
}

double horizontal_fov_deg(const Filmback &filmback, double focal_mm) {
    validate(filmback);
    require_positive(focal_mm, "focal length");
    return rad_to_deg(2.0 * std::atan(filmback.sensor_width_mm / (2.0 * focal_mm)));
}

double vertical_fov_deg(const Filmback &filmback, double focal_mm) {
    validate(filmback);
    require_positive(focal_mm, "focal length");
    return rad_to_deg(2.0 * std::atan(filmback.sensor_height_mm / (2.0 * focal_mm)));
}

double hyperfocal_distance(double focal_mm, double fstop, double coc_limit_mm) {
    require_positive(focal_mm, "focal length");
    require_positive(fstop, "f-stop");
    if (is_infinite(coc_limit_mm)) {
        return focal_mm;
    }
    require_positive(coc_limit_mm, "circle of confusion limit");
    return focal_mm * focal_mm / (fstop * coc_limit_mm) + focal_mm;
}

DofLimits dof_limits(double focal_mm, double fstop, double focus_mm, double coc_limit_mm) {
    require_positive(focal_mm, "focal length");
    require_positive(fstop, "f-stop");
    if (!(focus_mm > focal_mm)) {
        throw DomainError("focus distance must exceed the focal length");
    }
    if (!(coc_limit_mm >= 0.0) || std::isnan(coc_limit_mm)) {
        throw DomainError("circle of confusion limit must be non-negative");
    }
    if (is_infinite(focus_mm)) {
        // Everything beyond the hyperfocal distance is acceptably sharp.
        const double near = coc_limit_mm == 0.0 ? kInfinity : hyperfocal_distance(focal_mm, fstop, coc_limit_mm) - focal_mm;
        return {near, kInfinity};
    }
    if (coc_limit_mm == 0.0) {
        return {focus_mm, focus_mm};
    }

    // Solve (f^2/N) |Z - Zf| = c Z (Zf - f) on either side of Zf.
    const double scale = focal_mm * focal_mm / fstop;
    const double spread = coc_limit_mm * (focus_mm - focal_mm);
    DofLimits limits;
    limits.near_mm = scale * focus_mm / (scale + spread);
    const double far_denominator = scale - spread;
    limits.far_mm = far_denominator > 0.0 ? scale * focus_mm / far_denominator : kInfinity;
    return limits;
}

double default_coc_limit(const Filmback &filmback) {
    validate(filmback);
    return filmback.sensor_width_mm * kCocFractionOfSensorWidth;
}

CameraState clamp_camera_state(const Lens &lens, const CameraState &requested) {
    CameraState applied = requested;
    applied.lens = lens;
    applied.focal_length_mm = std::clamp(requested.focal_length_mm, lens.min_focal_length_mm, lens.max_focal_length_mm);
    applied.fstop = std::clamp(requested.fstop, lens.min_fstop, lens.max_fstop);
    applied.focus_distance_cm = std::max(requested.focus_distance_cm, lens.min_focus_distance_cm);
    return applied;
}

bool has_real_image(const CameraState &state) { return state.focus_distance_mm() > state.focal_length_mm; }

namespace {

// Both ends of [lo, hi] plus every entry of `stops` strictly inside it.
std::vector<double> stops_within(std::span<const double> stops, double lo, double hi) {
    std::vector<double> out{lo};
    for (double s : stops) {
        if (s > lo && s < hi) {
            out.push_back(s);
        }
    }
    if (hi > lo) {
        out.push_back(hi);
    }
    return out;
}

} // namespace

std::vector<double> focal_length_stops(const Lens &lens) {
    static constexpr double kFocals[] = {8, 10, 12, 14, 18, 24, 35, 50, 85, 100, 135, 200, 300, 400, 500, 600, 800, 1000};
    return stops_within(kFocals, lens.min_focal_length_mm, lens.max_focal_length_mm);
}

std::vector<double> fstop_stops(const Lens &lens) {
    static constexpr double kStops[] = {1.0, 1.4, 2.0, 2.8, 4.0, 5.6, 8.0, 11.0, 16.0, 22.0, 32.0};
    return stops_within(kStops, lens.min_fstop, lens.max_fstop);
}

std::vector<DofRow> dof_table(const Lens &lens, const Filmback &filmback, std::span<const double> focus_distances_cm) {
    validate(lens);
    const double coc = default_coc_limit(filmback);
    std::vector<DofRow> rows;
    for (double f : focal_length_stops(lens)) {
        for (double n : fstop_stops(lens)) {
            for (double focus_cm : focus_distances_cm) {
                const DofLimits dof = dof_limits(f, n, focus_cm * kMillimetersPerCentimeter, coc);
                rows.push_back({f, n, focus_cm, dof.near_mm / kMillimetersPerCentimeter,
                                dof.far_mm / kMillimetersPerCentimeter,
                                hyperfocal_distance(f, n, coc) / kMillimetersPerCentimeter});
            }
        }
    }
    return rows;
}

} // namespace cinelens::optics
