// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "cinelens/optics.hpp"

namespace cinelens {

/// Named filmback and lens presets.
///
/// The on-disk form is a JSON array; each record carries exactly the fields of either a
/// filmback (`name`, `sensor_width`, `sensor_height`) or a lens (`name`, `min_focal_length`,
/// `max_focal_length`, `min_fstop`, `max_fstop`, `min_focus_distance`, `diaphragm_blade_count`).
class Catalog {
  public:
    Catalog() = default;

    /// Throws ValidationError on malformed text, unknown fields or duplicate names.
    static Catalog parse(std::string_view json_text);
    static Catalog load(const std::filesystem::path &path);

    /// The catalog shipped in data/presets.json, compiled into the library.
    static const Catalog &builtin();

    [[nodiscard]] const optics::Filmback &filmback(std::string_view name) const;
    [[nodiscard]] const optics::Lens &lens(std::string_view name) const;

    [[nodiscard]] const std::vector<optics::Filmback> &filmbacks() const { return filmbacks_; }
    [[nodiscard]] const std::vector<optics::Lens> &lenses() const { return lenses_; }

  private:
    std::vector<optics::Filmback> filmbacks_;
    std::vector<optics::Lens> lenses_;
};

namespace optics {

/// Looks `name` up in the builtin catalog; throws NotFoundError.
[[nodiscard]] Filmback filmback_preset(std::string_view name);
[[nodiscard]] Lens lens_preset(std::string_view name);

} // namespace optics

} // namespace cinelens
