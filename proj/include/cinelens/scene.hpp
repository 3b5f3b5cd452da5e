// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "cinelens/geometry.hpp"

namespace cinelens::scene {

/// Minimum accepted hit distance in meters; also the offset used for secondary rays.
inline constexpr double kRayEpsilon = 1e-4;

struct Sphere {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

/// Infinite plane through `point` with unit `normal`.
struct Plane {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
};

/// Parallelogram spanned by `edge_u` and `edge_v` from `corner`.
struct Quad {
    Vec3 corner = Vec3::Zero();
    Vec3 edge_u = Vec3::UnitX();
    Vec3 edge_v = Vec3::UnitY();
};

using Shape = std::variant<Sphere, Plane, Quad>;

struct Material {
    Vec3 albedo = Vec3::Constant(0.8);
    std::optional<double> checker_scale; ///< Square size in meters of a procedural checkerboard.
    Vec3 emission = Vec3::Zero();
};

struct SceneObject {
    std::uint32_t id = 1; ///< Segmentation id, unique per scene, in [1, 65535].
    Shape shape;
    Material material;
};

struct PointLight {
    Vec3 position = Vec3(0.0, 0.0, 10.0);
    double intensity = 100.0;
};

struct Scene {
    std::vector<SceneObject> objects;
    PointLight light;
    double ambient = 0.2;
    Vec3 background = Vec3(0.55, 0.7, 0.9);
    std::optional<std::uint32_t> focus_target;

    /// Throws ValidationError when any object or scene invariant is broken.
    void validate() const;

    [[nodiscard]] const SceneObject *find(std::uint32_t id) const;
};

struct Hit {
    double t = 0.0;
    std::uint32_t object_id = 0;
    std::size_t object_index = 0;
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ(); ///< Geometric normal, facing against the incoming ray.
};

/// Nearest hit along `ray` with t >= kRayEpsilon. `ray.direction` must be unit length.
[[nodiscard]] std::optional<Hit> intersect(const Scene &scene, const Ray &ray);

/// True when any surface lies along `ray` within (kRayEpsilon, max_t).
[[nodiscard]] bool occluded(const Scene &scene, const Ray &ray, double max_t);

/// Sphere center, quad centroid, or the anchor point of a plane.
[[nodiscard]] Vec3 reference_point(const Shape &shape);

/// Reference point of the scene's focus target; throws NoTargetError when unset.
[[nodiscard]] Vec3 target_position(const Scene &scene);

/// Surface albedo at `point`, including the procedural checkerboard when enabled.
[[nodiscard]] Vec3 albedo_at(const SceneObject &object, const Vec3 &point);

} // namespace cinelens::scene
