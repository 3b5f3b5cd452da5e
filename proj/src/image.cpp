// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/image.hpp"

#include <limits>

#include "cinelens/errors.hpp"

namespace cinelens::render {

namespace {

std::size_t checked_count(int width, int height, int channels) {
    if (width <= 0 || height <= 0) {
        throw DomainError("image dimensions must be positive");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
}

template <class T> std::span<T> view(auto &storage) {
    using Vector = std::vector<std::remove_const_t<T>>;
    auto *data = std::get_if<Vector>(&storage);
    if (data == nullptr) {
        throw DimensionMismatchError("image buffer has a different pixel format");
    }
    return {data->data(), data->size()};
}

} // namespace

ImageBuffer::ImageBuffer(int width, int height, Storage storage)
    : width_(width), height_(height), pixels_(std::move(storage)) {}

ImageBuffer ImageBuffer::rgb8(int width, int height) {
    return {width, height, std::vector<std::uint8_t>(checked_count(width, height, 3))};
}

ImageBuffer ImageBuffer::depth(int width, int height) {
    return {width, height,
            std::vector<float>(checked_count(width, height, 1), std::numeric_limits<float>::infinity())};
}

ImageBuffer ImageBuffer::segmentation(int width, int height) {
    return {width, height, std::vector<std::uint16_t>(checked_count(width, height, 1))};
}

PixelFormat ImageBuffer::format() const {
    switch (pixels_.index()) {
    case 0:
        return PixelFormat::rgb8;
    case 1:
        return PixelFormat::depth_f32;
    default:
        return PixelFormat::seg_u16;
    }
}

std::size_t ImageBuffer::byte_size() const {
    return std::visit([](const auto &v) { return v.size() * sizeof(v[0]); }, pixels_);
}

std::span<std::uint8_t> ImageBuffer::rgb_data() { return view<std::uint8_t>(pixels_); }
std::span<const std::uint8_t> ImageBuffer::rgb_data() const { return view<const std::uint8_t>(pixels_); }
std::span<float> ImageBuffer::depth_data() { return view<float>(pixels_); }
std::span<const float> ImageBuffer::depth_data() const { return view<const float>(pixels_); }
std::span<std::uint16_t> ImageBuffer::segment_data() { return view<std::uint16_t>(pixels_); }
std::span<const std::uint16_t> ImageBuffer::segment_data() const { return view<const std::uint16_t>(pixels_); }

std::array<std::uint8_t, 3> ImageBuffer::rgb_at(int x, int y) const {
    const auto data = rgb_data();
    const std::size_t i = 3 * index(x, y);
    return {data[i], data[i + 1], data[i + 2]};
}

} // namespace cinelens::render
