// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/json_io.hpp"

#include <algorithm>
#include <cmath>

#include "cinelens/errors.hpp"

namespace cinelens::json_io {

namespace {

std::string in(std::string_view context, std::string_view key) {
    return std::string(context) + "." + std::string(key);
}

scene::Material material_from_json(const json &value, std::string_view context) {
    if (!value.is_object()) {
        throw ValidationError(std::string(context) + " must be an object");
    }
    require_keys_subset(value, {"albedo", "checker_scale", "emission"}, context);
    scene::Material material;
    if (value.contains("albedo")) {
        material.albedo = vec3(value["albedo"], in(context, "albedo"));
    }
    if (value.contains("checker_scale") && !value["checker_scale"].is_null()) {
        material.checker_scale = finite_number(value["checker_scale"], in(context, "checker_scale"));
    }
    if (value.contains("emission")) {
        material.emission = vec3(value["emission"], in(context, "emission"));
    }
    return material;
}

scene::SceneObject object_from_json(const json &value, std::string_view context) {
    if (!value.is_object()) {
        throw ValidationError(std::string(context) + " must be an object");
    }
    require_keys_subset(value, {"id", "sphere", "plane", "quad", "material"}, context);
    const json &id = require(value, "id", context);
    if (!id.is_number_unsigned()) {
        throw ValidationError(in(context, "id") + " must be a positive integer");
    }

    scene::SceneObject object;
    object.id = id.get<std::uint32_t>();
    const int shapes = static_cast<int>(value.contains("sphere")) + static_cast<int>(value.contains("plane")) +
                       static_cast<int>(value.contains("quad"));
    if (shapes != 1) {
        throw ValidationError(std::string(context) + " needs exactly one of sphere, plane, quad");
    }
    if (value.contains("sphere")) {
        const json &s = value["sphere"];
        const std::string ctx = in(context, "sphere");
        require_keys_subset(s, {"center", "radius"}, ctx);
        object.shape = scene::Sphere{vec3(require(s, "center", ctx), in(ctx, "center")),
                                     finite_number(require(s, "radius", ctx), in(ctx, "radius"))};
    } else if (value.contains("plane")) {
        const json &p = value["plane"];
        const std::string ctx = in(context, "plane");
        require_keys_subset(p, {"point", "normal"}, ctx);
        const Vec3 normal = vec3(require(p, "normal", ctx), in(ctx, "normal"));
        if (normal.norm() == 0.0) {
            throw ValidationError(in(ctx, "normal") + " must be non-zero");
        }
        object.shape = scene::Plane{vec3(require(p, "point", ctx), in(ctx, "point")), normal.normalized()};
    } else {
        const json &q = value["quad"];
        const std::string ctx = in(context, "quad");
        require_keys_subset(q, {"corner", "edge_u", "edge_v"}, ctx);
        object.shape = scene::Quad{vec3(require(q, "corner", ctx), in(ctx, "corner")),
                                   vec3(require(q, "edge_u", ctx), in(ctx, "edge_u")),
                                   vec3(require(q, "edge_v", ctx), in(ctx, "edge_v"))};
    }
    if (value.contains("material")) {
        object.material = material_from_json(value["material"], in(context, "material"));
    }
    return object;
}

} // namespace

void require_keys_subset(const json &object, std::initializer_list<std::string_view> allowed, std::string_view context) {
    if (!object.is_object()) {
        throw ValidationError(std::string(context) + " must be an object");
    }
    for (const auto &[key, value] : object.items()) {
        if (std::ranges::find(allowed, std::string_view(key)) == allowed.end()) {
            throw ValidationError("unknown key '" + key + "' in " + std::string(context));
        }
    }
}

const json &require(const json &object, std::string_view key, std::string_view context) {
    if (!object.is_object() || !object.contains(key)) {
        throw ValidationError("missing key '" + std::string(key) + "' in " + std::string(context));
    }
    return object[std::string(key)];
}

double number(const json &value, std::string_view context) {
    if (!value.is_number()) {
        throw ValidationError(std::string(context) + " must be a number");
    }
    return value.get<double>();
}

double finite_number(const json &value, std::string_view context) {
    const double x = number(value, context);
    if (!std::isfinite(x)) {
        throw ValidationError(std::string(context) + " must be finite");
    }
    return x;
}

Vec3 vec3(const json &value, std::string_view context) {
    if (!value.is_array() || value.size() != 3) {
        throw ValidationError(std::string(context) + " must be an array of 3 numbers");
    }
    return {finite_number(value[0], context), finite_number(value[1], context), finite_number(value[2], context)};
}

Quat quaternion(const json &value, std::string_view context) {
    if (!value.is_array() || value.size() != 4) {
        throw ValidationError(std::string(context) + " must be an array [w, x, y, z]");
    }
    Quat q(finite_number(value[0], context), finite_number(value[1], context), finite_number(value[2], context),
           finite_number(value[3], context));
    if (q.norm() == 0.0) {
        throw ValidationError(std::string(context) + " must be a non-zero quaternion");
    }
    return q.normalized();
}

json to_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Quat &q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

json to_json(const Pose &pose) {
    return {{"position", to_json(pose.position)}, {"quaternion", to_json(pose.orientation)}};
}

json to_json(const optics::Lens &lens) {
    return {{"name", lens.name},
            {"min_focal_length", lens.min_focal_length_mm},
            {"max_focal_length", lens.max_focal_length_mm},
            {"min_fstop", lens.min_fstop},
            {"max_fstop", lens.max_fstop},
            {"min_focus_distance", lens.min_focus_distance_cm},
            {"diaphragm_blade_count", lens.diaphragm_blade_count}};
}

json to_json(const optics::Filmback &filmback) {
    return {{"name", filmback.name}, {"sensor_width", filmback.sensor_width_mm}, {"sensor_height", filmback.sensor_height_mm}};
}

scene::Scene scene_from_json(const json &value) {
    constexpr std::string_view ctx = "scene";
    require_keys_subset(value, {"objects", "light", "ambient", "background", "focus_target"}, ctx);
    scene::Scene scene;
    if (value.contains("objects")) {
        const json &objects = value["objects"];
        if (!objects.is_array()) {
            throw ValidationError("scene.objects must be an array");
        }
        for (std::size_t i = 0; i < objects.size(); ++i) {
            scene.objects.push_back(object_from_json(objects[i], "scene.objects[" + std::to_string(i) + "]"));
        }
    }
    if (value.contains("light")) {
        const json &light = value["light"];
        require_keys_subset(light, {"position", "intensity"}, "scene.light");
        if (light.contains("position")) {
            scene.light.position = vec3(light["position"], "scene.light.position");
        }
        if (light.contains("intensity")) {
            scene.light.intensity = finite_number(light["intensity"], "scene.light.intensity");
        }
    }
    if (value.contains("ambient")) {
        scene.ambient = finite_number(value["ambient"], "scene.ambient");
    }
    if (value.contains("background")) {
        scene.background = vec3(value["background"], "scene.background");
    }
    if (value.contains("focus_target") && !value["focus_target"].is_null()) {
        const json &target = value["focus_target"];
        if (!target.is_number_unsigned()) {
            throw ValidationError("scene.focus_target must be an object id");
        }
        scene.focus_target = target.get<std::uint32_t>();
    }
    scene.validate();
    return scene;
}

} // namespace cinelens::json_io
