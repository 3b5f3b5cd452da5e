// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "cinelens/errors.hpp"
#include "sampling.hpp"

namespace cinelens::render {

namespace {

using optics::CameraState;

constexpr double kGamma = 2.2;
const Eigen::Vector3d kHighlight(255.0, 0.0, 255.0);

struct CameraFrame {
    Vec3 origin;
    Vec3 forward;
    Vec3 left;
    Vec3 up;
};

CameraFrame frame_of(const Pose &camera) {
    return {camera.position, camera.forward(), camera.left(), camera.up()};
}

// Direction in the camera frame (forward, left, up) of the chief ray through `raster`.
Vec3 chief_direction(const CameraFrame &frame, const CameraState &state, int width, int height, const Vec2 &raster) {
    const double sensor_right = (raster.x() / width - 0.5) * state.filmback.sensor_width_mm;
    const double sensor_up = (0.5 - raster.y() / height) * state.filmback.sensor_height_mm;
    return (state.focal_length_mm * frame.forward - sensor_right * frame.left + sensor_up * frame.up).normalized();
}

Eigen::Vector3d shade(const scene::Scene &scene, const Ray &ray) {
    const auto hit = scene::intersect(scene, ray);
    if (!hit) {
        return scene.background;
    }
    const scene::SceneObject &object = scene.objects[hit->object_index];
    const Vec3 albedo = scene::albedo_at(object, hit->point);

    double direct = 0.0;
    const Vec3 to_light = scene.light.position - hit->point;
    const double distance = to_light.norm();
    if (scene.light.intensity > 0.0 && distance > 0.0) {
        const Vec3 l = to_light / distance;
        const double cosine = hit->normal.dot(l);
        if (cosine > 0.0) {
            const Ray shadow{hit->point + scene::kRayEpsilon * hit->normal, l};
            if (!scene::occluded(scene, shadow, distance)) {
                direct = scene.light.intensity * cosine / (distance * distance);
            }
        }
    }
    return albedo * (scene.ambient + direct) + object.material.emission;
}

std::uint8_t encode_channel(double linear) {
    const double clamped = std::clamp(linear, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(std::pow(clamped, 1.0 / kGamma) * 255.0));
}

// Runs `row_fn(y)` for every row, spreading rows over worker threads.
template <class RowFn> void for_each_row(int height, int threads, RowFn &&row_fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, height);
    if (workers == 1) {
        for (int y = 0; y < height; ++y) {
            row_fn(y);
        }
        return;
    }
    std::atomic<int> next_row{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int y = next_row++; y < height; y = next_row++) {
                row_fn(y);
            }
        });
    }
}

void validate_inputs(const scene::Scene &scene, const CameraState &state, const RenderSettings &settings) {
    settings.validate();
    optics::validate(state);
    scene.validate();
}

} // namespace

Pass parse_pass(std::string_view name) {
    if (name == "rgb") {
        return Pass::rgb;
    }
    if (name == "depth") {
        return Pass::depth;
    }
    if (name == "seg" || name == "segmentation") {
        return Pass::segmentation;
    }
    throw ValidationError("unknown pass '" + std::string(name) + "'");
}

std::string_view pass_name(Pass pass) {
    switch (pass) {
    case Pass::rgb:
        return "rgb";
    case Pass::depth:
        return "depth";
    case Pass::segmentation:
        return "seg";
    }
    return "rgb";
}

void RenderSettings::validate() const {
    if (width < 8 || height < 8 || width > 65535 || height > 65535) {
        throw DomainError("render resolution must be between 8 and 65535 pixels per side");
    }
    if (samples_per_pixel < 1) {
        throw DomainError("samples_per_pixel must be at least 1");
    }
}

Vec2 sample_aperture_point(int blade_count, double u, double v) {
    if (blade_count < 0 || blade_count == 1 || blade_count == 2) {
        throw DomainError("blade count must be 0 or at least 3");
    }
    const double radius = std::sqrt(std::clamp(u, 0.0, 1.0));
    v = std::clamp(v, 0.0, 1.0);
    if (blade_count == 0) {
        const double phi = 2.0 * std::numbers::pi * v;
        return {radius * std::cos(phi), radius * std::sin(phi)};
    }

    // The k-gon is k congruent triangles fanning out from the center. v picks the triangle and a
    // point along its outer edge; scaling that edge point by sqrt(u) is uniform in the triangle
    // because the fan's area element is proportional to the scale.
    const double scaled = v * blade_count;
    const int sector = std::min(static_cast<int>(scaled), blade_count - 1);
    const double along = scaled - sector;
    const double step = 2.0 * std::numbers::pi / blade_count;
    const double a0 = 0.5 * std::numbers::pi + sector * step;
    const Vec2 v0(std::cos(a0), std::sin(a0));
    const Vec2 v1(std::cos(a0 + step), std::sin(a0 + step));
    return radius * ((1.0 - along) * v0 + along * v1);
}

Ray pinhole_ray(const Pose &camera, const CameraState &state, int width, int height, const Vec2 &raster) {
    const CameraFrame frame = frame_of(camera);
    return {frame.origin, chief_direction(frame, state, width, height, raster)};
}

Ray generate_ray(const Pose &camera, const CameraState &state, int width, int height, const Vec2 &raster,
                 const Vec2 &aperture_sample) {
    const double focal_mm = state.focal_length_mm;
    const double focus_mm = state.focus_distance_mm();
    // Rejects focus planes at or inside the focal point.
    (void)optics::image_distance(focal_mm, focus_mm);

    const CameraFrame frame = frame_of(camera);
    const Vec3 chief = chief_direction(frame, state, width, height, raster);
    if (aperture_sample.isZero(0.0)) {
        return {frame.origin, chief};
    }

    const double lens_radius_m = 0.5 * optics::aperture_diameter(focal_mm, state.fstop) / optics::kMillimetersPerMeter;
    const double focus_m = focus_mm / optics::kMillimetersPerMeter;
    const Vec3 focus_point = frame.origin + chief * (focus_m / chief.dot(frame.forward));
    const Vec3 lens_point = frame.origin + lens_radius_m * (-aperture_sample.x() * frame.left + aperture_sample.y() * frame.up);
    return {lens_point, (focus_point - lens_point).normalized()};
}

LinearImage render_linear(const scene::Scene &scene, const Pose &camera, const CameraState &state,
                          const RenderSettings &settings) {
    validate_inputs(scene, state, settings);
    const bool use_lens = settings.mode == ProjectionMode::thin_lens && state.manual_focus_enabled;
    const int spp = settings.samples_per_pixel;
    const int width = settings.width;
    const int height = settings.height;

    LinearImage image{width, height, std::vector<Eigen::Vector3d>(static_cast<std::size_t>(width) * height)};
    for_each_row(height, settings.threads, [&](int y) {
        std::vector<Vec2> jitter(spp);
        for (int x = 0; x < width; ++x) {
            detail::PixelSampler sampler(settings.rng_seed, static_cast<std::uint64_t>(y) * width + x);
            sampler.stratified_jitter(jitter);
            const Vec2 rotation = sampler.next_2d();

            Eigen::Vector3d sum = Eigen::Vector3d::Zero();
            for (int i = 0; i < spp; ++i) {
                const Vec2 raster(x + jitter[i].x(), y + jitter[i].y());
                Ray ray;
                if (use_lens) {
                    const Vec2 uv = detail::rotated_halton(i, rotation);
                    ray = generate_ray(camera, state, width, height, raster,
                                       sample_aperture_point(state.lens.diaphragm_blade_count, uv.x(), uv.y()));
                } else {
                    ray = pinhole_ray(camera, state, width, height, raster);
                }
                sum += shade(scene, ray);
            }
            image.pixels[static_cast<std::size_t>(y) * width + x] = sum / spp;
        }
    });
    return image;
}

ImageBuffer encode_rgb(const LinearImage &image) {
    ImageBuffer out = ImageBuffer::rgb8(image.width, image.height);
    auto data = out.rgb_data();
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            data[3 * i + c] = encode_channel(image.pixels[i][c]);
        }
    }
    return out;
}

ImageBuffer render_pass(const scene::Scene &scene, const Pose &camera, const CameraState &state,
                        const RenderSettings &settings, Pass pass) {
    if (pass == Pass::rgb) {
        return encode_rgb(render_linear(scene, camera, state, settings));
    }

    validate_inputs(scene, state, settings);
    const int width = settings.width;
    const int height = settings.height;
    ImageBuffer out = pass == Pass::depth ? ImageBuffer::depth(width, height) : ImageBuffer::segmentation(width, height);
    const Vec3 forward = camera.forward();
    for_each_row(height, settings.threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const Ray ray = pinhole_ray(camera, state, width, height, Vec2(x + 0.5, y + 0.5));
            const auto hit = scene::intersect(scene, ray);
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            if (pass == Pass::depth) {
                out.depth_data()[i] = hit ? static_cast<float>(hit->t * ray.direction.dot(forward))
                                          : std::numeric_limits<float>::infinity();
            } else {
                out.segment_data()[i] = hit ? static_cast<std::uint16_t>(hit->object_id) : 0;
            }
        }
    });
    return out;
}

ImageBuffer overlay_focus_plane(const ImageBuffer &rgb, const ImageBuffer &depth, double focus_m, double band_m) {
    if (rgb.width() != depth.width() || rgb.height() != depth.height()) {
        throw DimensionMismatchError("rgb and depth buffers differ in size");
    }
    if (!(band_m >= 0.0)) {
        throw DomainError("focus plane band must be non-negative");
    }
    ImageBuffer out = rgb;
    auto pixels = out.rgb_data();
    const auto depths = depth.depth_data();
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (std::abs(static_cast<double>(depths[i]) - focus_m) <= band_m) {
            for (int c = 0; c < 3; ++c) {
                pixels[3 * i + c] = static_cast<std::uint8_t>(std::lround(0.5 * pixels[3 * i + c] + 0.5 * kHighlight[c]));
            }
        }
    }
    return out;
}

ImageBuffer render_camera_output(const scene::Scene &scene, const Pose &camera, const CameraState &state,
                                 const RenderSettings &settings, Pass pass, double focus_plane_band_m) {
    ImageBuffer image = render_pass(scene, camera, state, settings, pass);
    if (pass == Pass::rgb && state.focus_plane_debug) {
        const ImageBuffer depth = render_pass(scene, camera, state, settings, Pass::depth);
        image = overlay_focus_plane(image, depth, state.focus_distance_m(), focus_plane_band_m);
    }
    return image;
}

} // namespace cinelens::render
