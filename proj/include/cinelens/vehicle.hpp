// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "cinelens/geometry.hpp"

namespace cinelens::vehicle {

struct PoseKeyframe {
    double t = 0.0; ///< Seconds, >= 0, strictly increasing within a track.
    Pose pose;
};

/// Rigid offset of the camera relative to the vehicle body.
struct CameraMount {
    Vec3 translation = Vec3::Zero();
    Quat rotation = Quat::Identity();
};

/// Throws EmptyTrackError or ValidationError (non-increasing times, negative times,
/// non-unit quaternions).
void validate_track(std::span<const PoseKeyframe> track);

/// Position is interpolated linearly, orientation along the shortest arc. Times outside the
/// track clamp to its end poses; keyframe times return the keyframe pose exactly.
[[nodiscard]] Pose interpolate_pose(std::span<const PoseKeyframe> track, double t);

[[nodiscard]] Pose camera_world_pose(const Pose &vehicle, const CameraMount &mount);

/// The mount that undoes `mount`: camera_world_pose(camera_world_pose(p, m), inverse(m)) == p.
[[nodiscard]] CameraMount inverse(const CameraMount &mount);

} // namespace cinelens::vehicle
