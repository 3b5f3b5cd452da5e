// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cinelens/errors.hpp"
#include "presets_data.hpp"

namespace cinelens {

namespace {

using nlohmann::json;

const std::set<std::string> kFilmbackFields = {"name", "sensor_width", "sensor_height"};
const std::set<std::string> kLensFields = {"name",      "min_focal_length", "max_focal_length",     "min_fstop",
                                           "max_fstop", "min_focus_distance", "diaphragm_blade_count"};

std::set<std::string> keys_of(const json &record) {
    std::set<std::string> keys;
    for (const auto &[key, value] : record.items()) {
        keys.insert(key);
    }
    return keys;
}

double number_field(const json &record, const char *key) {
    const json &value = record.at(key);
    if (!value.is_number()) {
        throw ValidationError(std::string("catalog field '") + key + "' must be a number");
    }
    return value.get<double>();
}

} // namespace

Catalog Catalog::parse(std::string_view json_text) {
    json document = json::parse(json_text.begin(), json_text.end(), nullptr, false);
    if (document.is_discarded() || !document.is_array()) {
        throw ValidationError("preset catalog must be a JSON array");
    }

    Catalog catalog;
    std::set<std::string> seen;
    for (const json &record : document) {
        if (!record.is_object() || !record.contains("name") || !record["name"].is_string()) {
            throw ValidationError("every catalog record must be an object with a string 'name'");
        }
        const std::string name = record["name"].get<std::string>();
        if (!seen.insert(name).second) {
            throw ValidationError("duplicate catalog entry '" + name + "'");
        }

        const auto keys = keys_of(record);
        try {
            if (keys == kFilmbackFields) {
                optics::Filmback filmback{name, number_field(record, "sensor_width"),
                                          number_field(record, "sensor_height")};
                optics::validate(filmback);
                catalog.filmbacks_.push_back(std::move(filmback));
            } else if (keys == kLensFields) {
                const json &blades = record["diaphragm_blade_count"];
                if (!blades.is_number_integer()) {
                    throw ValidationError("diaphragm_blade_count must be an integer");
                }
                optics::Lens lens{name,
                                  number_field(record, "min_focal_length"),
                                  number_field(record, "max_focal_length"),
                                  number_field(record, "min_fstop"),
                                  number_field(record, "max_fstop"),
                                  number_field(record, "min_focus_distance"),
                                  blades.get<int>()};
                optics::validate(lens);
                catalog.lenses_.push_back(std::move(lens));
            } else {
                throw ValidationError("catalog record '" + name + "' has unknown or missing fields");
            }
        } catch (const DomainError &e) {
            throw ValidationError(e.what());
        }
    }
    return catalog;
}

Catalog Catalog::load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open preset catalog " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

const Catalog &Catalog::builtin() {
    static const Catalog catalog = parse(detail::kBuiltinPresetsJson);
    return catalog;
}

const optics::Filmback &Catalog::filmback(std::string_view name) const {
    auto it = std::ranges::find(filmbacks_, name, &optics::Filmback::name);
    if (it == filmbacks_.end()) {
        throw NotFoundError("unknown filmback preset '" + std::string(name) + "'");
    }
    return *it;
}

const optics::Lens &Catalog::lens(std::string_view name) const {
    auto it = std::ranges::find(lenses_, name, &optics::Lens::name);
    if (it == lenses_.end()) {
        throw NotFoundError("unknown lens preset '" + std::string(name) + "'");
    }
    return *it;
}

namespace optics {

Filmback filmback_preset(std::string_view name) { return Catalog::builtin().filmback(name); }

Lens lens_preset(std::string_view name) { return Catalog::builtin().lens(name); }

} // namespace optics

} // namespace cinelens
