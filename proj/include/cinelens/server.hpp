// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cinelens/catalog.hpp"
#include "cinelens/control.hpp"
#include "cinelens/geometry.hpp"
#include "cinelens/image_io.hpp"
#include "cinelens/optics.hpp"
#include "cinelens/render.hpp"
#include "cinelens/scene.hpp"
#include "cinelens/vehicle.hpp"

namespace cinelens::server {

using nlohmann::json;

inline constexpr std::uint16_t kDefaultPort = 41451;

enum ErrorCode : int {
    kUnknownMethod = -1,
    kMalformed = -2,
    kDomain = -3,
    kNoTarget = -4,
};

struct SessionState {
    scene::Scene scene;
    Pose vehicle_pose;
    vehicle::CameraMount mount;
    optics::CameraState camera;
    double clock_s = 0.0;
    render::RenderSettings render;
    double focus_plane_band_m = render::kDefaultFocusPlaneBand;
    render::ImageFormat rgb_format = render::ImageFormat::png;

    [[nodiscard]] Pose camera_pose() const { return vehicle::camera_world_pose(vehicle_pose, mount); }
};

/// Session at frame 0 of `scenario`, tracks and autofocus applied.
[[nodiscard]] SessionState session_from_scenario(const control::Scenario &scenario,
                                                 const Catalog &catalog = Catalog::builtin());

/// Empty scene, identity pose and the default camera setup.
[[nodiscard]] SessionState default_session(const Catalog &catalog = Catalog::builtin());

/// Standard alphabet, padded.
[[nodiscard]] std::string base64_encode(std::span<const std::uint8_t> bytes);
[[nodiscard]] std::vector<std::uint8_t> base64_decode(std::string_view text);

/// The single simulated camera shared by every connection.
class SimSession {
  public:
    explicit SimSession(SessionState state, const Catalog &catalog = Catalog::builtin());

    /// Dispatches one decoded request and returns the response object.
    [[nodiscard]] json handle_request(const json &request);

    /// One wire line without its trailing newline; returns the response line without newline.
    [[nodiscard]] std::string handle_line(std::string_view line);

    [[nodiscard]] SessionState snapshot() const;

  private:
    json dispatch(const std::string &method, const json &params);
    json camera_info() const;

    mutable std::shared_mutex mutex_;
    SessionState state_;
    const Catalog &catalog_;
};

/// Newline-delimited JSON over TCP. One thread per connection.
class Server {
  public:
    /// Binds and listens immediately; port 0 picks an ephemeral port. Throws BindError.
    Server(SimSession &session, const std::string &host = "127.0.0.1", std::uint16_t port = kDefaultPort);
    ~Server();
    Server(const Server &) = delete;
    Server &operator=(const Server &) = delete;

    [[nodiscard]] std::uint16_t port() const { return port_; }

    /// Accepts connections until shutdown(), then waits for open connections to finish.
    void run();

    /// Stops accepting and closes every connection once its in-flight response is sent.
    /// Safe to call from any thread, more than once.
    void shutdown();

    /// Lines longer than this are answered with a malformed error and discarded.
    static constexpr std::size_t kMaxLineBytes = 1 << 20;

  private:
    void serve_connection(int fd);

    SimSession &session_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex clients_mutex_;
    std::set<int> clients_;
    std::vector<std::jthread> workers_;
};

} // namespace cinelens::server
