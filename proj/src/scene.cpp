// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/scene.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "cinelens/errors.hpp"

namespace cinelens::scene {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kCheckerDark = 0.15;

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

// Distance along the ray or +inf, plus the outward normal at the hit.
struct ShapeHit {
    double t = std::numeric_limits<double>::infinity();
    Vec3 normal = Vec3::Zero();
};

ShapeHit hit_sphere(const Sphere &sphere, const Ray &ray) {
    const Vec3 oc = ray.origin - sphere.center;
    const double half_b = oc.dot(ray.direction);
    const double c = oc.squaredNorm() - sphere.radius * sphere.radius;
    const double discriminant = half_b * half_b - c;
    if (discriminant < 0.0) {
        return {};
    }
    const double root = std::sqrt(discriminant);
    double t = -half_b - root;
    if (t < kRayEpsilon) {
        t = -half_b + root;
    }
    if (t < kRayEpsilon) {
        return {};
    }
    return {t, (ray.origin + t * ray.direction - sphere.center) / sphere.radius};
}

ShapeHit hit_plane(const Plane &plane, const Ray &ray) {
    const double denom = plane.normal.dot(ray.direction);
    if (std::abs(denom) < 1e-14) {
        return {};
    }
    const double t = plane.normal.dot(plane.point - ray.origin) / denom;
    if (!(t >= kRayEpsilon)) {
        return {};
    }
    return {t, plane.normal};
}

// Parallelogram coordinates (a, b) of `w` = point - corner, with `n` = edge_u x edge_v.
Vec2 quad_coordinates(const Quad &quad, const Vec3 &w, const Vec3 &n) {
    const double inv = 1.0 / n.squaredNorm();
    return {w.cross(quad.edge_v).dot(n) * inv, quad.edge_u.cross(w).dot(n) * inv};
}

ShapeHit hit_quad(const Quad &quad, const Ray &ray) {
    const Vec3 n = quad.edge_u.cross(quad.edge_v);
    const double denom = n.dot(ray.direction);
    if (std::abs(denom) < 1e-14) {
        return {};
    }
    const double t = n.dot(quad.corner - ray.origin) / denom;
    if (!(t >= kRayEpsilon)) {
        return {};
    }
    const Vec2 ab = quad_coordinates(quad, ray.origin + t * ray.direction - quad.corner, n);
    if (ab.x() < 0.0 || ab.x() > 1.0 || ab.y() < 0.0 || ab.y() > 1.0) {
        return {};
    }
    return {t, n.normalized()};
}

ShapeHit hit_shape(const Shape &shape, const Ray &ray) {
    return std::visit(overloaded{
                          [&](const Sphere &s) { return hit_sphere(s, ray); },
                          [&](const Plane &p) { return hit_plane(p, ray); },
                          [&](const Quad &q) { return hit_quad(q, ray); },
                      },
                      shape);
}

bool checker_parity(double a, double b, double c = 0.0) {
    const auto cell = static_cast<long long>(std::floor(a)) + static_cast<long long>(std::floor(b)) +
                      static_cast<long long>(std::floor(c));
    return (cell & 1LL) != 0;
}

// Deterministic tangent basis for a unit normal.
std::pair<Vec3, Vec3> tangent_basis(const Vec3 &n) {
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 t1 = n.cross(helper).normalized();
    return {t1, n.cross(t1)};
}

} // namespace

void Scene::validate() const {
    std::set<std::uint32_t> ids;
    for (const SceneObject &object : objects) {
        const std::string label = "object " + std::to_string(object.id);
        if (object.id == 0 || object.id > 65535) {
            throw ValidationError(label + ": id must be in [1, 65535]");
        }
        if (!ids.insert(object.id).second) {
            throw ValidationError(label + ": duplicate id");
        }
        std::visit(overloaded{
                       [&](const Sphere &s) {
                           if (!s.center.allFinite() || !(s.radius > 0.0) || !std::isfinite(s.radius)) {
                               throw ValidationError(label + ": sphere radius must be positive");
                           }
                       },
                       [&](const Plane &p) {
                           if (!p.point.allFinite() || std::abs(p.normal.norm() - 1.0) > kUnitTolerance) {
                               throw ValidationError(label + ": plane normal must be unit length");
                           }
                       },
                       [&](const Quad &q) {
                           const double area = q.edge_u.cross(q.edge_v).norm();
                           if (!q.corner.allFinite() || !(area > 1e-12 * q.edge_u.norm() * q.edge_v.norm()) ||
                               !std::isfinite(area)) {
                               throw ValidationError(label + ": quad edges must be non-parallel");
                           }
                       },
                   },
                   object.shape);
        const Material &m = object.material;
        if ((m.albedo.array() < 0.0).any() || (m.albedo.array() > 1.0).any() || !m.albedo.allFinite()) {
            throw ValidationError(label + ": albedo must lie in [0, 1]");
        }
        if (m.checker_scale && !(*m.checker_scale > 0.0)) {
            throw ValidationError(label + ": checker_scale must be positive");
        }
        if ((m.emission.array() < 0.0).any() || !m.emission.allFinite()) {
            throw ValidationError(label + ": emission must be non-negative");
        }
    }
    if (!(light.intensity >= 0.0) || !light.position.allFinite()) {
        throw ValidationError("light intensity must be non-negative");
    }
    if (!(ambient >= 0.0 && ambient <= 1.0)) {
        throw ValidationError("ambient must lie in [0, 1]");
    }
    if (focus_target && !ids.contains(*focus_target)) {
        throw ValidationError("focus_target " + std::to_string(*focus_target) + " does not name an object");
    }
}

const SceneObject *Scene::find(std::uint32_t id) const {
    for (const SceneObject &object : objects) {
        if (object.id == id) {
            return &object;
        }
    }
    return nullptr;
}

std::optional<Hit> intersect(const Scene &scene, const Ray &ray) {
    std::optional<Hit> nearest;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const ShapeHit candidate = hit_shape(scene.objects[i].shape, ray);
        if (candidate.t < (nearest ? nearest->t : std::numeric_limits<double>::infinity())) {
            Hit hit;
            hit.t = candidate.t;
            hit.object_id = scene.objects[i].id;
            hit.object_index = i;
            hit.point = ray.origin + candidate.t * ray.direction;
            hit.normal = candidate.normal.dot(ray.direction) > 0.0 ? Vec3(-candidate.normal) : candidate.normal;
            nearest = hit;
        }
    }
    return nearest;
}

bool occluded(const Scene &scene, const Ray &ray, double max_t) {
    for (const SceneObject &object : scene.objects) {
        if (hit_shape(object.shape, ray).t < max_t) {
            return true;
        }
    }
    return false;
}

Vec3 reference_point(const Shape &shape) {
    return std::visit(overloaded{
                          [](const Sphere &s) -> Vec3 { return s.center; },
                          [](const Plane &p) -> Vec3 { return p.point; },
                          [](const Quad &q) -> Vec3 { return q.corner + 0.5 * (q.edge_u + q.edge_v); },
                      },
                      shape);
}

Vec3 target_position(const Scene &scene) {
    if (!scene.focus_target) {
        throw NoTargetError();
    }
    const SceneObject *target = scene.find(*scene.focus_target);
    if (target == nullptr) {
        throw NoTargetError("focus target " + std::to_string(*scene.focus_target) + " is not in the scene");
    }
    return reference_point(target->shape);
}

Vec3 albedo_at(const SceneObject &object, const Vec3 &point) {
    const Material &m = object.material;
    if (!m.checker_scale) {
        return m.albedo;
    }
    const double s = *m.checker_scale;
    // Surface-local coordinates keep the pattern stable on axis-aligned surfaces.
    const bool dark = std::visit(overloaded{
                                     [&](const Sphere &sphere) {
                                         const Vec3 p = (point - sphere.center) / s;
                                         return checker_parity(p.x(), p.y(), p.z());
                                     },
                                     [&](const Plane &plane) {
                                         const auto [t1, t2] = tangent_basis(plane.normal);
                                         const Vec3 w = point - plane.point;
                                         return checker_parity(w.dot(t1) / s, w.dot(t2) / s);
                                     },
                                     [&](const Quad &quad) {
                                         const Vec3 n = quad.edge_u.cross(quad.edge_v);
                                         const Vec2 ab = quad_coordinates(quad, point - quad.corner, n);
                                         return checker_parity(ab.x() * quad.edge_u.norm() / s,
                                                               ab.y() * quad.edge_v.norm() / s);
                                     },
                                 },
                                 object.shape);
    return dark ? Vec3(m.albedo * kCheckerDark) : m.albedo;
}

} // namespace cinelens::scene
