// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cinelens/errors.hpp"

namespace cinelens::vehicle {

namespace {

constexpr double kUnitTolerance = 1e-9;

} // namespace

void validate_track(std::span<const PoseKeyframe> track) {
    if (track.empty()) {
        throw EmptyTrackError();
    }
    for (std::size_t i = 0; i < track.size(); ++i) {
        const PoseKeyframe &key = track[i];
        if (!std::isfinite(key.t) || key.t < 0.0) {
            throw ValidationError("pose keyframe " + std::to_string(i) + " has an invalid time");
        }
        if (i > 0 && !(key.t > track[i - 1].t)) {
            throw ValidationError("pose keyframe times must be strictly increasing");
        }
        if (!key.pose.position.allFinite()) {
            throw ValidationError("pose keyframe " + std::to_string(i) + " has a non-finite position");
        }
        if (std::abs(key.pose.orientation.norm() - 1.0) > kUnitTolerance) {
            throw ValidationError("pose keyframe " + std::to_string(i) + " orientation is not a unit quaternion");
        }
    }
}

Pose interpolate_pose(std::span<const PoseKeyframe> track, double t) {
    if (track.empty()) {
        throw EmptyTrackError();
    }
    if (t <= track.front().t) {
        return track.front().pose;
    }
    if (t >= track.back().t) {
        return track.back().pose;
    }

    // First keyframe strictly after t; its predecessor is at or before t.
    auto upper = std::ranges::upper_bound(track, t, {}, &PoseKeyframe::t);
    const PoseKeyframe &b = *upper;
    const PoseKeyframe &a = *(upper - 1);
    if (t == a.t) {
        return a.pose;
    }

    const double s = (t - a.t) / (b.t - a.t);
    Pose pose;
    pose.position = a.pose.position + s * (b.pose.position - a.pose.position);
    // Eigen's slerp negates one endpoint when their dot product is negative (shortest arc).
    pose.orientation = a.pose.orientation.slerp(s, b.pose.orientation).normalized();
    return pose;
}

Pose camera_world_pose(const Pose &vehicle, const CameraMount &mount) {
    Pose camera;
    camera.position = vehicle.position + vehicle.orientation * mount.translation;
    camera.orientation = (vehicle.orientation * mount.rotation).normalized();
    return camera;
}

CameraMount inverse(const CameraMount &mount) {
    CameraMount inv;
    inv.rotation = mount.rotation.conjugate();
    inv.translation = -(inv.rotation * mount.translation);
    return inv;
}

} // namespace cinelens::vehicle
