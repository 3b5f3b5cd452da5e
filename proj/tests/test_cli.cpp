// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/line_client.hpp"
#include "support/test_support.hpp"

extern char **environ;

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Child process running the CLI with stdout and stderr merged into one pipe.
class CliProcess {
  public:
    explicit CliProcess(const std::vector<std::string> &args) {
        int fds[2];
        REQUIRE(::pipe(fds) == 0);
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDERR_FILENO);
        posix_spawn_file_actions_addclose(&actions, fds[0]);
        std::vector<std::string> argv_store{CINELENS_CLI_PATH};
        argv_store.insert(argv_store.end(), args.begin(), args.end());
        std::vector<char *> argv;
        for (auto &a : argv_store) {
            argv.push_back(a.data());
        }
        argv.push_back(nullptr);
        const int rc = posix_spawn(&pid_, CINELENS_CLI_PATH, &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        out_fd_ = fds[0];
        REQUIRE(rc == 0);
    }
    ~CliProcess() {
        if (pid_ > 0) {
            ::kill(pid_, SIGKILL);
            (void)wait();
        }
        if (out_fd_ >= 0) {
            ::close(out_fd_);
        }
    }
    CliProcess(const CliProcess &) = delete;
    CliProcess &operator=(const CliProcess &) = delete;

    /// Reads until a newline or EOF; returns the line without the newline.
    std::string read_line() {
        std::string line;
        char c = 0;
        while (::read(out_fd_, &c, 1) == 1 && c != '\n') {
            line.push_back(c);
        }
        output_ += line + "\n";
        return line;
    }

    /// Drains the output and returns the exit status.
    int wait() {
        char chunk[4096];
        ssize_t n = 0;
        while ((n = ::read(out_fd_, chunk, sizeof chunk)) > 0) {
            output_.append(chunk, static_cast<std::size_t>(n));
        }
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    }

    void signal(int sig) const { ::kill(pid_, sig); }
    [[nodiscard]] const std::string &output() const { return output_; }

  private:
    pid_t pid_ = -1;
    int out_fd_ = -1;
    std::string output_;
};

struct Result {
    int code;
    std::string output;
};

Result run(const std::vector<std::string> &args) {
    CliProcess process(args);
    const int code = process.wait();
    return {code, process.output()};
}

bool contains(const std::string &haystack, const std::string &needle) {
    return haystack.find(needle) != std::string::npos;
}

json small_scenario() {
    return json::parse(R"({
      "scene": {
        "objects": [{"id": 2, "sphere": {"center": [0, 0, 1.5], "radius": 0.5}}],
        "light": {"position": [0, 0, 20], "intensity": 400},
        "focus_target": 2
      },
      "vehicle": {"track": [{"t": 0, "position": [-10, 0, 1.5]}, {"t": 1, "position": [-5, 0, 1.5]}]},
      "camera": {"lens": "Universal Zoom", "filmback": "16:9 DSLR", "focal_length_mm": 35,
                 "focus_distance_cm": 1000, "fstop": 4},
      "duration_s": 1,
      "frame_rate_hz": 10,
      "render": {"width": 24, "spp": 1},
      "seed": 1
    })");
}

fs::path write_json(const fs::path &dir, const std::string &name, const json &doc) {
    const fs::path path = dir / name;
    std::ofstream(path) << doc.dump(2);
    return path;
}

std::size_t count_extension(const fs::path &dir, const std::string &ext) {
    std::size_t n = 0;
    for (const auto &entry : fs::directory_iterator(dir)) {
        n += entry.path().extension() == ext ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("cli render writes one image per frame and a frame log") {
    cinelens::testing::TempDir dir("cli_render");
    const auto scenario = write_json(dir.path(), "s.json", small_scenario());
    const auto out = dir.path() / "out";
    const Result r = run({"render", "--scenario", scenario.string(), "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(contains(r.output, "11 frames written"));
    CHECK(count_extension(out, ".png") == 11);
    CHECK(fs::exists(out / "frames.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    std::ifstream csv(out / "frames.csv");
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) {
        ++lines;
    }
    CHECK(lines == 12);
}

TEST_CASE("cli render honors --passes") {
    cinelens::testing::TempDir dir("cli_passes");
    const auto scenario = write_json(dir.path(), "s.json", small_scenario());
    const auto out = dir.path() / "out";
    const Result r = run({"render", "--scenario", scenario.string(), "--out", out.string(), "--passes", "depth,seg"});
    CHECK(r.code == 0);
    CHECK(count_extension(out, ".png") == 11);
    CHECK(count_extension(out, ".depth") == 11);
    CHECK_FALSE(fs::exists(out / "rgb_00000.png"));
    CHECK(fs::exists(out / "seg_00010.png"));

    const auto depth_only = dir.path() / "depth_only";
    CHECK(run({"render", "--scenario", scenario.string(), "--out", depth_only.string(), "--passes", "depth"}).code == 0);
    CHECK(count_extension(depth_only, ".depth") == 11);
    CHECK(count_extension(depth_only, ".png") == 0);

    CHECK(run({"render", "--scenario", scenario.string(), "--out", out.string(), "--passes", "normals"}).code != 0);
}

TEST_CASE("cli render rejects autofocus combined with a focus track") {
    cinelens::testing::TempDir dir("cli_exclusive");
    json doc = small_scenario();
    doc["autofocus"] = true;
    doc["tracks"] = json::parse(R"([{"parameter": "focus_distance_cm", "keyframes": [{"t": 0, "value": 900}]}])");
    const auto scenario = write_json(dir.path(), "s.json", doc);
    const Result r = run({"render", "--scenario", scenario.string(), "--out", (dir.path() / "out").string()});
    CHECK(r.code == 2);
    CHECK(contains(r.output, "mutually exclusive"));
    CHECK_FALSE(fs::exists(dir.path() / "out" / "frames.csv"));
}

TEST_CASE("cli render reports unwritable output") {
    cinelens::testing::TempDir dir("cli_io");
    const auto scenario = write_json(dir.path(), "s.json", small_scenario());
    const Result r = run({"render", "--scenario", scenario.string(), "--out", "/proc/cinelens-no"});
    CHECK(r.code == 4);
}

TEST_CASE("cli dof-table") {
    const Result prime = run({"dof-table", "--lens", "85mm Prime f/1.8", "--focus", "300,3000"});
    REQUIRE(prime.code == 0);
    std::istringstream lines(prime.output);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "focal_mm\tfstop\tfocus_cm\tnear_cm\tfar_cm\thyperfocal_cm");
    int rows = 0;
    bool saw_inf = false;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.rfind("85\t", 0) == 0);
        saw_inf = saw_inf || contains(line, "\tinf\t");
    }
    // Stops 1.8, 2, 2.8, 4, 5.6, 8, 11, 16, 22 at two distances.
    CHECK(rows == 18);
    CHECK(saw_inf);

    const Result as_json = run({"dof-table", "--lens", "12mm Prime f/2.8", "--focus", "100", "--json"});
    REQUIRE(as_json.code == 0);
    const json table = json::parse(as_json.output);
    CHECK(table.size() == 7);
    CHECK(table[0]["focal_length_mm"] == 12.0);

    const Result unknown = run({"dof-table", "--lens", "Nope", "--focus", "100"});
    CHECK(unknown.code == 2);
    CHECK(contains(unknown.output, "Nope"));
}

TEST_CASE("cli presets") {
    const Result text = run({"presets"});
    CHECK(text.code == 0);
    CHECK(contains(text.output, "IMAX 70mm"));
    const Result as_json = run({"presets", "--json"});
    REQUIRE(as_json.code == 0);
    const json doc = json::parse(as_json.output);
    CHECK(doc["filmbacks"].size() >= 8);
    CHECK(doc["lenses"].size() >= 8);
}

TEST_CASE("cli custom catalog") {
    cinelens::testing::TempDir dir("cli_catalog");
    const auto catalog = write_json(dir.path(), "c.json", json::parse(R"([
      {"name": "Tiny", "sensor_width": 10, "sensor_height": 5},
      {"name": "Only Lens", "min_focal_length": 20, "max_focal_length": 20, "min_fstop": 2,
       "max_fstop": 2, "min_focus_distance": 10, "diaphragm_blade_count": 5}])"));
    const Result r = run({"--catalog", catalog.string(), "presets", "--json"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.output)["lenses"][0]["name"] == "Only Lens");
    CHECK(run({"--catalog", "/nonexistent.json", "presets"}).code != 0);
}

TEST_CASE("cli serve failures") {
    const Result missing = run({"serve", "--scenario", "/nonexistent/scene.json", "--port", "0"});
    CHECK(missing.code == 2);
    CHECK(contains(missing.output, "/nonexistent/scene.json"));

    CliProcess holder({"serve", "--port", "0"});
    const std::string banner = holder.read_line();
    REQUIRE(banner.rfind("listening on 127.0.0.1:", 0) == 0);
    const std::string port = banner.substr(banner.rfind(':') + 1);
    const Result busy = run({"serve", "--port", port});
    CHECK(busy.code == 3);
    holder.signal(SIGTERM);
    CHECK(holder.wait() == 0);
}

TEST_CASE("cli serve answers requests and stops on SIGINT") {
    cinelens::testing::TempDir dir("cli_serve");
    const auto scenario = write_json(dir.path(), "s.json", small_scenario());
    CliProcess server({"serve", "--scenario", scenario.string(), "--port", "0"});
    const std::string banner = server.read_line();
    REQUIRE(banner.rfind("listening on", 0) == 0);
    const auto port = static_cast<std::uint16_t>(std::stoi(banner.substr(banner.rfind(':') + 1)));
    {
        cinelens::testing::LineClient client(port);
        const json info = client.call("getCameraInfo");
        CHECK(info["result"]["focal_length_mm"] == 35.0);
        CHECK(client.call("getDistanceToTarget")["result"].get<double>() == doctest::Approx(10.0));
    }
    server.signal(SIGINT);
    CHECK(server.wait() == 0);
}
