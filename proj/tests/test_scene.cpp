// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "cinelens/errors.hpp"
#include "cinelens/scene.hpp"
#include "support/test_support.hpp"

using namespace cinelens;
using namespace cinelens::scene;
using doctest::Approx;

TEST_CASE("intersect examples") {
    Scene s;
    s.objects.push_back(testing::sphere(4, Vec3(5, 0, 0), 1));
    const auto hit = intersect(s, Ray{Vec3::Zero(), Vec3::UnitX()});
    REQUIRE(hit);
    CHECK(hit->t == Approx(4.0));
    CHECK(hit->object_id == 4);
    CHECK(hit->normal.isApprox(-Vec3::UnitX()));

    CHECK_FALSE(intersect(s, Ray{Vec3::Zero(), -Vec3::UnitX()}));

    s.objects.push_back(testing::sphere(9, Vec3(3, 0, 0), 0.5));
    CHECK(intersect(s, Ray{Vec3::Zero(), Vec3::UnitX()})->object_id == 9);
}

TEST_CASE("plane and quad intersections") {
    Scene s;
    SceneObject ground;
    ground.id = 1;
    ground.shape = Plane{Vec3::Zero(), Vec3::UnitZ()};
    s.objects.push_back(ground);
    const auto down = intersect(s, Ray{Vec3(0, 0, 2), Vec3(1, 0, -1).normalized()});
    REQUIRE(down);
    CHECK(down->point.isApprox(Vec3(2, 0, 0)));
    CHECK(down->normal.isApprox(Vec3::UnitZ()));
    // From below the normal flips toward the ray.
    CHECK(intersect(s, Ray{Vec3(0, 0, -1), Vec3::UnitZ()})->normal.isApprox(-Vec3::UnitZ()));

    Scene q;
    q.objects.push_back(testing::wall(2, Vec3(10, 0, 0), 2, 2));
    CHECK(intersect(q, Ray{Vec3::Zero(), Vec3::UnitX()})->t == Approx(10.0));
    CHECK_FALSE(intersect(q, Ray{Vec3::Zero(), Vec3(10, 1.5, 0).normalized()}));
}

TEST_CASE("target_position examples") {
    Scene s;
    s.objects.push_back(testing::sphere(1, Vec3(3, 4, 0), 1));
    SceneObject quad;
    quad.id = 2;
    quad.shape = Quad{Vec3::Zero(), Vec3(2, 0, 0), Vec3(0, 2, 0)};
    s.objects.push_back(quad);
    CHECK_THROWS_AS((void)target_position(s), NoTargetError);
    s.focus_target = 1;
    CHECK(target_position(s) == Vec3(3, 4, 0));
    s.focus_target = 2;
    CHECK(target_position(s) == Vec3(1, 1, 0));
}

TEST_CASE("scene validation") {
    Scene s;
    s.objects.push_back(testing::sphere(1, Vec3(3, 0, 0), 1));
    CHECK_NOTHROW(s.validate());
    s.objects.push_back(testing::sphere(1, Vec3(6, 0, 0), 1));
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.objects.back().id = 2;
    s.focus_target = 7;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.focus_target.reset();
    s.objects.back().shape = Sphere{Vec3::Zero(), -1};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.objects.back().shape = Plane{Vec3::Zero(), Vec3(0, 0, 2)};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.objects.back().shape = Quad{Vec3::Zero(), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("re-intersecting past a hit never returns the same point") {
    Scene s;
    s.objects.push_back(testing::sphere(1, Vec3(6, 0.3, 0.1), 2));
    s.objects.push_back(testing::wall(2, Vec3(12, 0, 0), 6, 6));
    SceneObject ground;
    ground.id = 3;
    ground.shape = Plane{Vec3(0, 0, -3), Vec3::UnitZ()};
    s.objects.push_back(ground);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 2000; ++i) {
        Vec3 d(std::abs(gauss(rng)) + 1.0, 0.4 * gauss(rng), 0.4 * gauss(rng));
        Ray ray{Vec3::Zero(), d.normalized()};
        const auto hit = intersect(s, ray);
        if (!hit) {
            continue;
        }
        CHECK(s.find(hit->object_id) != nullptr);
        const Ray next{hit->point + kRayEpsilon * ray.direction, ray.direction};
        if (const auto again = intersect(s, next)) {
            CHECK((again->point - hit->point).norm() > 0.5 * kRayEpsilon);
        }
    }
}

TEST_CASE("checker albedo alternates") {
    SceneObject ground;
    ground.id = 1;
    ground.shape = Plane{Vec3::Zero(), Vec3::UnitZ()};
    ground.material.checker_scale = 1.0;
    const Vec3 a = albedo_at(ground, Vec3(0.5, 0.5, 0));
    const Vec3 b = albedo_at(ground, Vec3(1.5, 0.5, 0));
    CHECK_FALSE(a.isApprox(b));
    CHECK(albedo_at(ground, Vec3(2.5, 0.5, 0)).isApprox(a));
}
