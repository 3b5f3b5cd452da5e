// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "cinelens/errors.hpp"
#include "cinelens/json_io.hpp"

namespace cinelens::server {

namespace {

constexpr char kBase64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

struct RpcError {
    int code;
    std::string message;
};

json error_response(std::int64_t id, int code, const std::string &message) {
    return {{"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

const json &param(const json &params, const char *key) {
    if (!params.contains(key)) {
        throw RpcError{kMalformed, std::string("missing parameter '") + key + "'"};
    }
    return params[key];
}

double number_param(const json &params, const char *key) {
    const json &value = param(params, key);
    if (!value.is_number()) {
        throw RpcError{kMalformed, std::string("parameter '") + key + "' must be a number"};
    }
    return value.get<double>();
}

bool bool_param(const json &params, const char *key) {
    const json &value = param(params, key);
    if (!value.is_boolean()) {
        throw RpcError{kMalformed, std::string("parameter '") + key + "' must be a boolean"};
    }
    return value.get<bool>();
}

std::string string_param(const json &params, const char *key) {
    const json &value = param(params, key);
    if (!value.is_string()) {
        throw RpcError{kMalformed, std::string("parameter '") + key + "' must be a string"};
    }
    return value.get<std::string>();
}

int int_param(const json &params, const char *key, int fallback) {
    if (!params.contains(key)) {
        return fallback;
    }
    const json &value = params[key];
    if (!value.is_number_integer()) {
        throw RpcError{kMalformed, std::string("parameter '") + key + "' must be an integer"};
    }
    const auto wide = value.get<std::int64_t>();
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
        throw RpcError{kDomain, std::string("parameter '") + key + "' is out of range"};
    }
    return static_cast<int>(wide);
}

void allow_only(const json &params, std::initializer_list<std::string_view> keys) {
    for (const auto &[key, value] : params.items()) {
        if (std::ranges::find(keys, std::string_view(key)) == keys.end()) {
            throw RpcError{kMalformed, "unexpected parameter '" + key + "'"};
        }
    }
}

json distance_or_null(double mm) {
    if (optics::is_infinite(mm)) {
        return nullptr;
    }
    return mm / optics::kMillimetersPerCentimeter;
}

// Applies `requested` after clamping; a state without a real image leaves the session as is.
optics::CameraState checked_clamp(const optics::CameraState &requested) {
    optics::CameraState applied = optics::clamp_camera_state(requested.lens, requested);
    if (!optics::has_real_image(applied)) {
        throw RpcError{kDomain, "focus distance must exceed the focal length"};
    }
    return applied;
}

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t sent = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (sent < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(sent));
    }
    return true;
}

} // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += kBase64Alphabet[(n >> 6) & 63];
        out += kBase64Alphabet[n & 63];
    }
    if (i + 1 == bytes.size()) {
        const std::uint32_t n = bytes[i] << 16;
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += kBase64Alphabet[(n >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) {
        throw ValidationError("base64 length must be a multiple of 4");
    }
    const auto value = [](char c) -> int {
        const char *pos = std::strchr(kBase64Alphabet, c);
        return c != '\0' && pos != nullptr ? static_cast<int>(pos - kBase64Alphabet) : -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        const bool last = i + 4 == text.size();
        const int pad = last ? (text[i + 3] == '=') + (text[i + 2] == '=') : 0;
        std::uint32_t n = 0;
        for (int k = 0; k < 4; ++k) {
            const int v = k >= 4 - pad ? 0 : value(text[i + k]);
            if (v < 0) {
                throw ValidationError("invalid base64 character");
            }
            n = (n << 6) | static_cast<std::uint32_t>(v);
        }
        out.push_back(static_cast<std::uint8_t>(n >> 16));
        if (pad < 2) {
            out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
        }
        if (pad < 1) {
            out.push_back(static_cast<std::uint8_t>(n & 0xff));
        }
    }
    return out;
}

SessionState session_from_scenario(const control::Scenario &scenario, const Catalog &catalog) {
    scenario.validate(catalog);
    control::ScenarioPlayer player(scenario, catalog);
    const control::ScenarioPlayer::Frame first = player.frame(0);
    SessionState state;
    state.scene = scenario.scene;
    state.vehicle_pose = first.vehicle_pose;
    state.mount = scenario.mount;
    state.camera = first.camera;
    state.render = scenario.render;
    state.focus_plane_band_m = scenario.output.focus_plane_band_m;
    state.rgb_format = scenario.output.rgb_format;
    return state;
}

SessionState default_session(const Catalog &catalog) {
    control::Scenario scenario;
    scenario.vehicle_track.push_back({0.0, Pose{}});
    scenario.render.height = control::default_height(catalog.filmback(*scenario.camera.filmback.preset),
                                                     scenario.render.width);
    return session_from_scenario(scenario, catalog);
}

SimSession::SimSession(SessionState state, const Catalog &catalog) : state_(std::move(state)), catalog_(catalog) {}

SessionState SimSession::snapshot() const {
    std::shared_lock lock(mutex_);
    return state_;
}

json SimSession::camera_info() const {
    const optics::CameraState &c = state_.camera;
    const double coc = optics::default_coc_limit(c.filmback);
    const optics::DofLimits dof = optics::dof_limits(c.focal_length_mm, c.fstop, c.focus_distance_mm(), coc);
    return {{"lens", json_io::to_json(c.lens)},
            {"filmback", json_io::to_json(c.filmback)},
            {"focal_length_mm", c.focal_length_mm},
            {"focus_distance_cm", c.focus_distance_cm},
            {"fstop", c.fstop},
            {"manual_focus", c.manual_focus_enabled},
            {"focus_plane", c.focus_plane_debug},
            {"hfov_deg", optics::horizontal_fov_deg(c.filmback, c.focal_length_mm)},
            {"vfov_deg", optics::vertical_fov_deg(c.filmback, c.focal_length_mm)},
            {"dof_near_cm", distance_or_null(dof.near_mm)},
            {"dof_far_cm", distance_or_null(dof.far_mm)},
            {"hyperfocal_cm", optics::hyperfocal_distance(c.focal_length_mm, c.fstop, coc) /
                                  optics::kMillimetersPerCentimeter},
            {"coc_limit_mm", coc},
            {"clock_s", state_.clock_s}};
}

json SimSession::dispatch(const std::string &method, const json &params) {
    if (method == "getCameraInfo") {
        allow_only(params, {});
        std::shared_lock lock(mutex_);
        return camera_info();
    }
    if (method == "setFocalLength" || method == "setFocusDistance" || method == "setFocusAperture") {
        const char *key = method == "setFocalLength" ? "value_mm" : method == "setFocusDistance" ? "value_cm" : "fstop";
        allow_only(params, {key});
        const double value = number_param(params, key);
        std::unique_lock lock(mutex_);
        optics::CameraState requested = state_.camera;
        double optics::CameraState::*field = method == "setFocalLength"     ? &optics::CameraState::focal_length_mm
                                             : method == "setFocusDistance" ? &optics::CameraState::focus_distance_cm
                                                                            : &optics::CameraState::fstop;
        requested.*field = value;
        state_.camera = checked_clamp(requested);
        return state_.camera.*field;
    }
    if (method == "setFilmback") {
        optics::Filmback filmback;
        if (params.contains("name")) {
            allow_only(params, {"name"});
            try {
                filmback = catalog_.filmback(string_param(params, "name"));
            } catch (const NotFoundError &e) {
                throw RpcError{kMalformed, e.what()};
            }
        } else {
            allow_only(params, {"width_mm", "height_mm"});
            filmback = {"Custom", number_param(params, "width_mm"), number_param(params, "height_mm")};
            optics::validate(filmback);
        }
        std::unique_lock lock(mutex_);
        state_.camera.filmback = filmback;
        return json_io::to_json(filmback);
    }
    if (method == "setLensPreset") {
        allow_only(params, {"name"});
        optics::Lens lens;
        try {
            lens = catalog_.lens(string_param(params, "name"));
        } catch (const NotFoundError &e) {
            throw RpcError{kMalformed, e.what()};
        }
        std::unique_lock lock(mutex_);
        optics::CameraState requested = state_.camera;
        requested.lens = lens;
        state_.camera = checked_clamp(requested);
        return json_io::to_json(lens);
    }
    if (method == "enableManualFocus" || method == "setFocusPlane") {
        allow_only(params, {"enabled"});
        const bool enabled = bool_param(params, "enabled");
        std::unique_lock lock(mutex_);
        (method == "enableManualFocus" ? state_.camera.manual_focus_enabled : state_.camera.focus_plane_debug) = enabled;
        return enabled;
    }
    if (method == "getImage") {
        allow_only(params, {"pass", "width", "height", "spp", "format", "seed"});
        const render::Pass pass = [&] {
            try {
                return render::parse_pass(string_param(params, "pass"));
            } catch (const Error &e) {
                throw RpcError{kMalformed, e.what()};
            }
        }();
        SessionState snap = snapshot();
        snap.render.width = int_param(params, "width", snap.render.width);
        snap.render.height = int_param(params, "height", snap.render.height);
        snap.render.samples_per_pixel = int_param(params, "spp", snap.render.samples_per_pixel);
        if (params.contains("seed")) {
            if (!params["seed"].is_number_unsigned()) {
                throw RpcError{kMalformed, "parameter 'seed' must be a non-negative integer"};
            }
            snap.render.rng_seed = params["seed"].get<std::uint64_t>();
        }
        if (params.contains("format")) {
            try {
                snap.rgb_format = render::parse_image_format(string_param(params, "format"));
            } catch (const ValidationError &e) {
                throw RpcError{kMalformed, e.what()};
            }
        }
        const render::ImageBuffer image = render::render_camera_output(snap.scene, snap.camera_pose(), snap.camera,
                                                                       snap.render, pass, snap.focus_plane_band_m);
        return base64_encode(render::encode_image(image, snap.rgb_format));
    }
    if (method == "setVehiclePose") {
        allow_only(params, {"position", "quaternion"});
        Pose pose;
        try {
            pose.position = json_io::vec3(param(params, "position"), "position");
            pose.orientation = json_io::quaternion(param(params, "quaternion"), "quaternion");
        } catch (const ValidationError &e) {
            throw RpcError{kMalformed, e.what()};
        }
        std::unique_lock lock(mutex_);
        state_.vehicle_pose = pose;
        return json_io::to_json(pose);
    }
    if (method == "getDistanceToTarget") {
        allow_only(params, {});
        std::shared_lock lock(mutex_);
        const Vec3 target = scene::target_position(state_.scene);
        return (target - state_.camera_pose().position).norm();
    }
    if (method == "simTick") {
        allow_only(params, {"dt_s"});
        const double dt = number_param(params, "dt_s");
        if (!(dt >= 0.0)) {
            throw RpcError{kDomain, "dt_s must be non-negative"};
        }
        std::unique_lock lock(mutex_);
        state_.clock_s += dt;
        return state_.clock_s;
    }
    throw RpcError{kUnknownMethod, "unknown method '" + method + "'"};
}

json SimSession::handle_request(const json &request) {
    if (!request.is_object()) {
        return error_response(0, kMalformed, "request must be a JSON object");
    }
    std::int64_t id = 0;
    if (!request.contains("id") || !request["id"].is_number_integer()) {
        return error_response(0, kMalformed, "request needs an integer id");
    }
    id = request["id"].get<std::int64_t>();
    for (const auto &[key, value] : request.items()) {
        if (key != "id" && key != "method" && key != "params") {
            return error_response(id, kMalformed, "unexpected request field '" + key + "'");
        }
    }
    if (!request.contains("method") || !request["method"].is_string()) {
        return error_response(id, kMalformed, "request needs a string method");
    }
    json params = json::object();
    if (request.contains("params")) {
        if (!request["params"].is_object()) {
            return error_response(id, kMalformed, "params must be a JSON object");
        }
        params = request["params"];
    }

    try {
        return {{"id", id}, {"result", dispatch(request["method"].get<std::string>(), params)}};
    } catch (const RpcError &e) {
        return error_response(id, e.code, e.message);
    } catch (const NoTargetError &e) {
        return error_response(id, kNoTarget, e.what());
    } catch (const DomainError &e) {
        return error_response(id, kDomain, e.what());
    } catch (const std::exception &e) {
        return error_response(id, kMalformed, e.what());
    }
}

std::string SimSession::handle_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    const json request = json::parse(line.begin(), line.end(), nullptr, false);
    if (request.is_discarded()) {
        return error_response(0, kMalformed, "unparseable request").dump();
    }
    // Invalid UTF-8 in strings would make dump() throw; replace it instead.
    return handle_request(request).dump(-1, ' ', false, json::error_handler_t::replace);
}

Server::Server(SimSession &session, const std::string &host, std::uint16_t port) : session_(session) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo *found = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &found); rc != 0) {
        throw BindError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, ::freeaddrinfo);

    listen_fd_ = ::socket(found->ai_family, found->ai_socktype | SOCK_CLOEXEC, found->ai_protocol);
    if (listen_fd_ < 0) {
        throw BindError(std::string("socket: ") + std::strerror(errno));
    }
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, found->ai_addr, found->ai_addrlen) != 0 || ::listen(listen_fd_, SOMAXCONN) != 0) {
        const std::string reason = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw BindError("cannot listen on " + host + ":" + service + ": " + reason);
    }
    sockaddr_in bound{};
    socklen_t length = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr *>(&bound), &length);
    port_ = ntohs(bound.sin_port);
}

Server::~Server() {
    shutdown();
    workers_.clear();
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
    }
}

void Server::run() {
    while (!stopping_) {
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED) {
                continue;
            }
            break;
        }
        {
            std::lock_guard lock(clients_mutex_);
            if (stopping_) {
                ::close(fd);
                break;
            }
            clients_.insert(fd);
        }
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
    workers_.clear(); // joins
}

void Server::shutdown() {
    if (stopping_.exchange(true)) {
        return;
    }
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
    }
    std::lock_guard lock(clients_mutex_);
    for (int fd : clients_) {
        // Stop reading; a response being written still goes out.
        ::shutdown(fd, SHUT_RD);
    }
}

void Server::serve_connection(int fd) {
    std::string buffer;
    bool discarding = false;
    char chunk[4096];
    bool open = true;
    while (open && !stopping_) {
        const ssize_t got = ::recv(fd, chunk, sizeof chunk, 0);
        if (got < 0 && errno == EINTR) {
            continue;
        }
        if (got <= 0) {
            break;
        }
        buffer.append(chunk, static_cast<std::size_t>(got));
        std::size_t start = 0;
        for (std::size_t nl; open && (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
            if (discarding) {
                discarding = false;
                continue;
            }
            open = send_all(fd, session_.handle_line(std::string_view(buffer).substr(start, nl - start)) + "\n");
        }
        buffer.erase(0, start);
        if (buffer.size() > kMaxLineBytes) {
            if (!discarding) {
                open = send_all(fd, error_response(0, kMalformed, "request line too long").dump() + "\n");
            }
            discarding = true;
            buffer.clear();
        }
    }
    if (open && !buffer.empty() && !discarding) {
        // Bytes without a terminating newline are not a request.
        send_all(fd, error_response(0, kMalformed, "incomplete request line").dump() + "\n");
    }
    {
        std::lock_guard lock(clients_mutex_);
        clients_.erase(fd);
    }
    ::close(fd);
}

} // namespace cinelens::server
