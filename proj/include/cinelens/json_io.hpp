// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cinelens/geometry.hpp"
#include "cinelens/optics.hpp"
#include "cinelens/scene.hpp"

// JSON mapping shared by the scenario loader and the control server. Every reader throws
// ValidationError naming `context` when the document does not fit.
namespace cinelens::json_io {

using nlohmann::json;

/// Rejects keys of `object` outside `allowed`.
void require_keys_subset(const json &object, std::initializer_list<std::string_view> allowed, std::string_view context);

[[nodiscard]] const json &require(const json &object, std::string_view key, std::string_view context);
[[nodiscard]] double number(const json &value, std::string_view context);
[[nodiscard]] double finite_number(const json &value, std::string_view context);

[[nodiscard]] Vec3 vec3(const json &value, std::string_view context);
/// [w, x, y, z], normalized; a zero quaternion is rejected.
[[nodiscard]] Quat quaternion(const json &value, std::string_view context);

[[nodiscard]] json to_json(const Vec3 &v);
[[nodiscard]] json to_json(const Quat &q);
[[nodiscard]] json to_json(const Pose &pose);
[[nodiscard]] json to_json(const optics::Lens &lens);
[[nodiscard]] json to_json(const optics::Filmback &filmback);

[[nodiscard]] scene::Scene scene_from_json(const json &value);

} // namespace cinelens::json_io
