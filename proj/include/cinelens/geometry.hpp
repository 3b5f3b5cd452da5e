// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cinelens {

// World frame: right-handed, x forward, y left, z up. A camera with identity orientation
// looks along +x with +z up; image columns grow toward -y.
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitX(); ///< Unit length.
};

struct Pose {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity(); ///< Unit quaternion.

    [[nodiscard]] Vec3 forward() const { return orientation * Vec3::UnitX(); }
    [[nodiscard]] Vec3 left() const { return orientation * Vec3::UnitY(); }
    [[nodiscard]] Vec3 up() const { return orientation * Vec3::UnitZ(); }
};

/// Rotation of `yaw_rad` about +z (counter-clockwise seen from above).
[[nodiscard]] inline Quat yaw_rotation(double yaw_rad) { return Quat(Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ())); }

} // namespace cinelens
