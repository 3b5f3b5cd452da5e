// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cinelens/image.hpp"

namespace cinelens::render {

/// Container for rgb8 buffers. Depth buffers are always written as raw DPTH and segmentation
/// buffers as 16-bit grayscale PNG, whatever this says.
enum class ImageFormat { ppm, png };

[[nodiscard]] ImageFormat parse_image_format(std::string_view name);

/// File extension (without dot) used for `buffer` when written with `format`.
[[nodiscard]] std::string file_extension(const ImageBuffer &buffer, ImageFormat format);

/// Serialized bytes of `buffer`:
///   rgb8      -> binary PPM (P6, maxval 255) or 8-bit RGB PNG
///   depth_f32 -> "DPTH", width u16 LE, height u16 LE, then little-endian f32 pixels
///   seg_u16   -> 16-bit grayscale PNG
[[nodiscard]] std::vector<std::uint8_t> encode_image(const ImageBuffer &buffer, ImageFormat format);

/// Writes encode_image(buffer, format) to `path`; throws IoError.
void export_image(const ImageBuffer &buffer, const std::filesystem::path &path, ImageFormat format);

// Readers for the formats above. Each throws IoError on malformed input.
[[nodiscard]] ImageBuffer decode_ppm(std::span<const std::uint8_t> bytes);
[[nodiscard]] ImageBuffer decode_png(std::span<const std::uint8_t> bytes);
[[nodiscard]] ImageBuffer decode_depth(std::span<const std::uint8_t> bytes);
[[nodiscard]] ImageBuffer import_image(const std::filesystem::path &path);

[[nodiscard]] std::vector<std::uint8_t> read_file(const std::filesystem::path &path);

} // namespace cinelens::render
