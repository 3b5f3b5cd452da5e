// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "cinelens/catalog.hpp"
#include "cinelens/control.hpp"
#include "cinelens/errors.hpp"
#include "cinelens/optics.hpp"
#include "cinelens/render.hpp"
#include "cinelens/server.hpp"

namespace py = pybind11;
using namespace cinelens;

namespace {

py::array to_numpy(const render::ImageBuffer &image) {
    const auto h = static_cast<py::ssize_t>(image.height());
    const auto w = static_cast<py::ssize_t>(image.width());
    switch (image.format()) {
    case render::PixelFormat::rgb8: {
        py::array_t<std::uint8_t> out({h, w, py::ssize_t{3}});
        std::ranges::copy(image.rgb_data(), out.mutable_data());
        return out;
    }
    case render::PixelFormat::depth_f32: {
        py::array_t<float> out({h, w});
        std::ranges::copy(image.depth_data(), out.mutable_data());
        return out;
    }
    case render::PixelFormat::seg_u16: {
        py::array_t<std::uint16_t> out({h, w});
        std::ranges::copy(image.segment_data(), out.mutable_data());
        return out;
    }
    }
    throw std::logic_error("unknown pixel format");
}

py::dict record_to_dict(const control::FrameRecord &r) {
    py::dict d;
    d["frame"] = r.frame;
    d["t"] = r.t;
    const auto &p = r.vehicle_pose.position;
    const auto &q = r.vehicle_pose.orientation;
    d["position"] = py::make_tuple(p.x(), p.y(), p.z());
    d["quaternion"] = py::make_tuple(q.w(), q.x(), q.y(), q.z());
    d["focal_length_mm"] = r.focal_length_mm;
    d["focus_distance_cm"] = r.focus_distance_cm;
    d["fstop"] = r.fstop;
    d["autofocus_distance_cm"] = r.autofocus_distance_cm;
    d["images"] = r.images;
    return d;
}

py::list log_to_list(const control::FrameLog &log) {
    py::list out;
    for (const auto &r : log.frames) {
        out.append(record_to_dict(r));
    }
    return out;
}

// Autofocus holds state across frames, so every earlier frame is played.
control::ScenarioPlayer::Frame frame_at(const control::Scenario &scenario, std::size_t index) {
    if (index >= scenario.frame_count()) {
        throw py::index_error("frame index out of range");
    }
    control::ScenarioPlayer player(scenario);
    control::ScenarioPlayer::Frame frame;
    for (std::size_t k = 0; k <= index; ++k) {
        frame = player.frame(k);
    }
    return frame;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CineLens camera simulation core";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
    py::register_exception<NoTargetError>(m, "NoTargetError", base.ptr());
    py::register_exception<EmptyTrackError>(m, "EmptyTrackError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<BindError>(m, "BindError", base.ptr());
    py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", base.ptr());

    py::class_<optics::Filmback>(m, "Filmback")
        .def(py::init<>())
        .def(py::init([](std::string name, double w, double h) { return optics::Filmback{std::move(name), w, h}; }),
             py::arg("name"), py::arg("sensor_width_mm"), py::arg("sensor_height_mm"))
        .def_readwrite("name", &optics::Filmback::name)
        .def_readwrite("sensor_width_mm", &optics::Filmback::sensor_width_mm)
        .def_readwrite("sensor_height_mm", &optics::Filmback::sensor_height_mm)
        .def_property_readonly("aspect_ratio", &optics::Filmback::aspect_ratio)
        .def("__eq__", [](const optics::Filmback &a, const optics::Filmback &b) { return a == b; })
        .def("__repr__", [](const optics::Filmback &f) { return "<Filmback '" + f.name + "'>"; });

    py::class_<optics::Lens>(m, "Lens")
        .def(py::init<>())
        .def_readwrite("name", &optics::Lens::name)
        .def_readwrite("min_focal_length_mm", &optics::Lens::min_focal_length_mm)
        .def_readwrite("max_focal_length_mm", &optics::Lens::max_focal_length_mm)
        .def_readwrite("min_fstop", &optics::Lens::min_fstop)
        .def_readwrite("max_fstop", &optics::Lens::max_fstop)
        .def_readwrite("min_focus_distance_cm", &optics::Lens::min_focus_distance_cm)
        .def_readwrite("diaphragm_blade_count", &optics::Lens::diaphragm_blade_count)
        .def_property_readonly("is_prime", &optics::Lens::is_prime)
        .def("__eq__", [](const optics::Lens &a, const optics::Lens &b) { return a == b; })
        .def("__repr__", [](const optics::Lens &l) { return "<Lens '" + l.name + "'>"; });

    py::class_<optics::CameraState>(m, "CameraState")
        .def(py::init<>())
        .def_readwrite("lens", &optics::CameraState::lens)
        .def_readwrite("filmback", &optics::CameraState::filmback)
        .def_readwrite("focal_length_mm", &optics::CameraState::focal_length_mm)
        .def_readwrite("focus_distance_cm", &optics::CameraState::focus_distance_cm)
        .def_readwrite("fstop", &optics::CameraState::fstop)
        .def_readwrite("manual_focus_enabled", &optics::CameraState::manual_focus_enabled)
        .def_readwrite("focus_plane_debug", &optics::CameraState::focus_plane_debug);

    m.def("filmback_preset", &optics::filmback_preset, py::arg("name"));
    m.def("lens_preset", &optics::lens_preset, py::arg("name"));
    m.def("filmback_presets", [] { return Catalog::builtin().filmbacks(); });
    m.def("lens_presets", [] { return Catalog::builtin().lenses(); });

    m.def("image_distance", &optics::image_distance, py::arg("focal_mm"), py::arg("focus_mm"));
    m.def("coc_diameter", &optics::coc_diameter, py::arg("focal_mm"), py::arg("fstop"), py::arg("focus_mm"),
          py::arg("object_mm"));
    m.def("hyperfocal_distance", &optics::hyperfocal_distance, py::arg("focal_mm"), py::arg("fstop"),
          py::arg("coc_limit_mm"));
    m.def(
        "dof_limits",
        [](double f, double n, double focus, double c) {
            const auto dof = optics::dof_limits(f, n, focus, c);
            return py::make_tuple(dof.near_mm, dof.far_mm);
        },
        py::arg("focal_mm"), py::arg("fstop"), py::arg("focus_mm"), py::arg("coc_limit_mm"),
        "(near_mm, far_mm); far is inf beyond the hyperfocal distance.");
    m.def("horizontal_fov_deg", &optics::horizontal_fov_deg, py::arg("filmback"), py::arg("focal_mm"));
    m.def("vertical_fov_deg", &optics::vertical_fov_deg, py::arg("filmback"), py::arg("focal_mm"));
    m.def("default_coc_limit", &optics::default_coc_limit, py::arg("filmback"));
    m.def("clamp_camera_state", &optics::clamp_camera_state, py::arg("lens"), py::arg("requested"));

    m.def(
        "evaluate_track",
        [](const std::vector<std::pair<double, double>> &keyframes, double t) {
            control::ScalarTrack track;
            for (const auto &[kt, value] : keyframes) {
                track.keyframes.push_back({kt, value});
            }
            return control::evaluate_track(track, t);
        },
        py::arg("keyframes"), py::arg("t"), "Piecewise-linear value of [(t, value), ...] at t.");

    py::class_<control::Scenario>(m, "Scenario")
        .def_static(
            "parse", [](const std::string &text) { return control::parse_scenario(text); }, py::arg("json_text"))
        .def_static(
            "load", [](const std::filesystem::path &path) { return control::load_scenario(path); }, py::arg("path"))
        .def_property_readonly("frame_count", &control::Scenario::frame_count)
        .def_property_readonly("width", [](const control::Scenario &s) { return s.render.width; })
        .def_property_readonly("height", [](const control::Scenario &s) { return s.render.height; })
        .def(
            "camera_state", [](const control::Scenario &s, std::size_t index) {
                return frame_at(s, index).camera;
            },
            py::arg("frame"));

    m.def(
        "render_frame",
        [](const control::Scenario &s, std::size_t index, const std::string &pass) {
            const auto frame = frame_at(s, index);
            render::ImageBuffer image;
            {
                py::gil_scoped_release release;
                image = render::render_camera_output(s.scene, frame.camera_pose, frame.camera, s.render,
                                                     render::parse_pass(pass), s.output.focus_plane_band_m);
            }
            return to_numpy(image);
        },
        py::arg("scenario"), py::arg("frame") = 0, py::arg("pass") = "rgb",
        "Image of one scenario frame: uint8 HxWx3 for rgb, float32 meters for depth, uint16 ids for seg.");

    m.def(
        "run_scenario",
        [](const control::Scenario &s, const std::filesystem::path &out_dir,
           std::optional<std::vector<std::string>> passes) {
            control::RunOptions options;
            if (passes) {
                options.passes.emplace();
                for (const auto &p : *passes) {
                    options.passes->push_back(render::parse_pass(p));
                }
            }
            control::FrameLog log;
            {
                py::gil_scoped_release release;
                log = control::run_scenario(s, out_dir, options);
            }
            return log_to_list(log);
        },
        py::arg("scenario"), py::arg("out_dir"), py::arg("passes") = py::none());

    m.def(
        "parse_framelog_csv", [](const std::string &text) { return log_to_list(control::parse_framelog_csv(text)); },
        py::arg("text"));

    py::class_<server::SimSession>(m, "Session")
        .def(py::init([](const control::Scenario *scenario) {
                 return std::make_unique<server::SimSession>(scenario ? server::session_from_scenario(*scenario)
                                                                      : server::default_session());
             }),
             py::arg("scenario") = nullptr)
        .def(
            "handle_line",
            [](server::SimSession &session, const std::string &line) {
                py::gil_scoped_release release;
                return session.handle_line(line);
            },
            py::arg("line"), "Answers one protocol line (without its newline).");

    m.attr("DEFAULT_PORT") = server::kDefaultPort;
}
