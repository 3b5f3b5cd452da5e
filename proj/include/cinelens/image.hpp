// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace cinelens::render {

enum class PixelFormat { rgb8, depth_f32, seg_u16 };

/// Row-major image with one of three pixel layouts.
class ImageBuffer {
  public:
    ImageBuffer() = default;

    [[nodiscard]] static ImageBuffer rgb8(int width, int height);
    [[nodiscard]] static ImageBuffer depth(int width, int height);
    [[nodiscard]] static ImageBuffer segmentation(int width, int height);

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] PixelFormat format() const;
    [[nodiscard]] std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    [[nodiscard]] std::size_t byte_size() const;

    // Typed views; each throws DimensionMismatchError on the wrong format.
    [[nodiscard]] std::span<std::uint8_t> rgb_data();
    [[nodiscard]] std::span<const std::uint8_t> rgb_data() const;
    [[nodiscard]] std::span<float> depth_data();
    [[nodiscard]] std::span<const float> depth_data() const;
    [[nodiscard]] std::span<std::uint16_t> segment_data();
    [[nodiscard]] std::span<const std::uint16_t> segment_data() const;

    [[nodiscard]] std::array<std::uint8_t, 3> rgb_at(int x, int y) const;
    [[nodiscard]] float depth_at(int x, int y) const { return depth_data()[index(x, y)]; }
    [[nodiscard]] std::uint16_t segment_at(int x, int y) const { return segment_data()[index(x, y)]; }

    friend bool operator==(const ImageBuffer &, const ImageBuffer &) = default;

  private:
    using Storage = std::variant<std::vector<std::uint8_t>, std::vector<float>, std::vector<std::uint16_t>>;

    ImageBuffer(int width, int height, Storage storage);
    [[nodiscard]] std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    Storage pixels_;
};

} // namespace cinelens::render
