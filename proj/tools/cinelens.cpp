// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cinelens/catalog.hpp"
#include "cinelens/control.hpp"
#include "cinelens/errors.hpp"
#include "cinelens/json_io.hpp"
#include "cinelens/optics.hpp"
#include "cinelens/server.hpp"

namespace {

using namespace cinelens;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kInvalid = 2, kBind = 3, kIo = 4 };

std::string format_distance(double cm) {
    if (optics::is_infinite(cm)) {
        return "inf";
    }
    std::ostringstream out;
    out.precision(1);
    out << std::fixed << cm;
    return out.str();
}

std::vector<render::Pass> parse_passes(const std::string &list) {
    std::vector<render::Pass> passes;
    std::stringstream in(list);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) {
            passes.push_back(render::parse_pass(item));
        }
    }
    if (passes.empty()) {
        throw ValidationError("--passes needs at least one pass");
    }
    return passes;
}

std::uint16_t default_port() {
    if (const char *env = std::getenv("CINELENS_PORT"); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (*end == '\0' && value >= 0 && value <= 65535) {
            return static_cast<std::uint16_t>(value);
        }
        std::cerr << "ignoring invalid CINELENS_PORT '" << env << "'\n";
    }
    return server::kDefaultPort;
}

int cmd_serve(const Catalog &catalog, const std::string &scenario_path, const std::string &host, std::uint16_t port) {
    server::SessionState state;
    try {
        state = scenario_path.empty() ? server::default_session(catalog)
                                      : server::session_from_scenario(control::load_scenario(scenario_path, catalog), catalog);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }

    // Block the stop signals before any thread starts so only the waiter below sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    server::SimSession session(std::move(state), catalog);
    std::optional<server::Server> srv;
    try {
        srv.emplace(session, host, port);
    } catch (const BindError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBind;
    }
    std::cout << "listening on " << host << ":" << srv->port() << std::endl;

    std::jthread waiter([&] {
        int received = 0;
        sigwait(&signals, &received);
        srv->shutdown();
    });
    srv->run();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
    }
    return kOk;
}

int cmd_render(const Catalog &catalog, const std::string &scenario_path, const std::string &out_dir,
               const std::string &passes) {
    try {
        const control::Scenario scenario = control::load_scenario(scenario_path, catalog);
        control::RunOptions options;
        if (!passes.empty()) {
            options.passes = parse_passes(passes);
        }
        const control::FrameLog log = control::run_scenario(scenario, out_dir, options, catalog);
        std::cout << log.frames.size() << " frames written to " << out_dir << '\n';
        return kOk;
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
}

int cmd_dof_table(const Catalog &catalog, const std::string &lens_name, const std::string &filmback_name,
                  const std::vector<double> &focus_cm, bool as_json) {
    std::vector<optics::DofRow> rows;
    try {
        rows = optics::dof_table(catalog.lens(lens_name), catalog.filmback(filmback_name), focus_cm);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    if (as_json) {
        json out = json::array();
        for (const auto &r : rows) {
            const auto distance = [](double cm) { return optics::is_infinite(cm) ? json("inf") : json(cm); };
            out.push_back({{"focal_length_mm", r.focal_length_mm},
                           {"fstop", r.fstop},
                           {"focus_distance_cm", r.focus_distance_cm},
                           {"near_cm", distance(r.near_cm)},
                           {"far_cm", distance(r.far_cm)},
                           {"hyperfocal_cm", r.hyperfocal_cm}});
        }
        std::cout << out.dump(2) << '\n';
        return kOk;
    }
    std::cout << "focal_mm\tfstop\tfocus_cm\tnear_cm\tfar_cm\thyperfocal_cm\n";
    for (const auto &r : rows) {
        std::cout << r.focal_length_mm << '\t' << r.fstop << '\t' << r.focus_distance_cm << '\t'
                  << format_distance(r.near_cm) << '\t' << format_distance(r.far_cm) << '\t'
                  << format_distance(r.hyperfocal_cm) << '\n';
    }
    return kOk;
}

int cmd_presets(const Catalog &catalog, bool as_json) {
    if (as_json) {
        json out{{"filmbacks", json::array()}, {"lenses", json::array()}};
        for (const auto &f : catalog.filmbacks()) {
            out["filmbacks"].push_back(json_io::to_json(f));
        }
        for (const auto &l : catalog.lenses()) {
            out["lenses"].push_back(json_io::to_json(l));
        }
        std::cout << out.dump(2) << '\n';
        return kOk;
    }
    std::cout << "Filmbacks:\n";
    for (const auto &f : catalog.filmbacks()) {
        std::cout << "  " << f.name << "  " << f.sensor_width_mm << " x " << f.sensor_height_mm << " mm\n";
    }
    std::cout << "Lenses:\n";
    for (const auto &l : catalog.lenses()) {
        std::cout << "  " << l.name << "  " << l.min_focal_length_mm;
        if (!l.is_prime()) {
            std::cout << "-" << l.max_focal_length_mm;
        }
        std::cout << " mm  f/" << l.min_fstop << "-f/" << l.max_fstop << "  min focus " << l.min_focus_distance_cm
                  << " cm  " << l.diaphragm_blade_count << " blades\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"CineLens: cinematic camera simulation"};
    app.require_subcommand(1);
    std::string catalog_path;
    app.add_option("--catalog", catalog_path, "Preset catalog JSON replacing the builtin presets")->check(CLI::ExistingFile);

    auto *serve = app.add_subcommand("serve", "Serve the camera control protocol");
    std::string serve_scenario;
    std::string host = "127.0.0.1";
    int port = default_port();
    serve->add_option("--scenario", serve_scenario, "Scenario providing the initial session");
    serve->add_option("--host", host, "Address to bind");
    serve->add_option("--port", port, "TCP port (0 for any free port; default from CINELENS_PORT or 41451)")
        ->check(CLI::Range(0, 65535));

    auto *render = app.add_subcommand("render", "Render a scenario to a frame sequence");
    std::string render_scenario;
    std::string out_dir;
    std::string passes;
    render->add_option("--scenario", render_scenario, "Scenario JSON")->required();
    render->add_option("--out", out_dir, "Output directory")->required();
    render->add_option("--passes", passes, "Comma-separated passes: rgb,depth,seg");

    auto *dof = app.add_subcommand("dof-table", "Print depth of field limits");
    std::string lens;
    std::string filmback = "16:9 DSLR";
    std::vector<double> focus_cm;
    bool dof_json = false;
    dof->add_option("--lens", lens, "Lens preset name")->required();
    dof->add_option("--filmback", filmback, "Filmback preset name");
    dof->add_option("--focus", focus_cm, "Focus distances in cm")->required()->delimiter(',');
    dof->add_flag("--json", dof_json, "Machine-readable output");

    auto *presets = app.add_subcommand("presets", "List filmback and lens presets");
    bool presets_json = false;
    presets->add_flag("--json", presets_json, "Machine-readable output");

    CLI11_PARSE(app, argc, argv);

    std::optional<Catalog> loaded;
    if (!catalog_path.empty()) {
        try {
            loaded = Catalog::load(catalog_path);
        } catch (const Error &e) {
            std::cerr << "error: " << e.what() << '\n';
            return kInvalid;
        }
    }
    const Catalog &catalog = loaded ? *loaded : Catalog::builtin();

    if (*serve) {
        return cmd_serve(catalog, serve_scenario, host, static_cast<std::uint16_t>(port));
    }
    if (*render) {
        return cmd_render(catalog, render_scenario, out_dir, passes);
    }
    if (*dof) {
        return cmd_dof_table(catalog, lens, filmback, focus_cm, dof_json);
    }
    return cmd_presets(catalog, presets_json);
}
