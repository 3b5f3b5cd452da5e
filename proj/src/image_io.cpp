// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include "cinelens/image_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include <png.h>

#include "cinelens/errors.hpp"

namespace cinelens::render {

namespace {

constexpr char kDepthMagic[4] = {'D', 'P', 'T', 'H'};

static_assert(std::endian::native == std::endian::little, "raw depth I/O assumes a little-endian host");

void put_u16_le(std::vector<std::uint8_t> &out, std::uint16_t value) {
    out.push_back(static_cast<std::uint8_t>(value & 0xff));
    out.push_back(static_cast<std::uint8_t>(value >> 8));
}

std::uint16_t get_u16_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return static_cast<std::uint16_t>(bytes[offset] | (bytes[offset + 1] << 8));
}

std::vector<std::uint8_t> encode_ppm(const ImageBuffer &buffer) {
    const std::string header = "P6\n" + std::to_string(buffer.width()) + " " + std::to_string(buffer.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const auto pixels = buffer.rgb_data();
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

std::vector<std::uint8_t> encode_depth(const ImageBuffer &buffer) {
    std::vector<std::uint8_t> out(std::begin(kDepthMagic), std::end(kDepthMagic));
    put_u16_le(out, static_cast<std::uint16_t>(buffer.width()));
    put_u16_le(out, static_cast<std::uint16_t>(buffer.height()));
    const auto pixels = buffer.depth_data();
    const auto *raw = reinterpret_cast<const std::uint8_t *>(pixels.data());
    out.insert(out.end(), raw, raw + pixels.size_bytes());
    return out;
}

std::vector<std::uint8_t> encode_png(const ImageBuffer &buffer) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(buffer.width());
    image.height = static_cast<png_uint_32>(buffer.height());
    const void *pixels = nullptr;
    if (buffer.format() == PixelFormat::rgb8) {
        image.format = PNG_FORMAT_RGB;
        pixels = buffer.rgb_data().data();
    } else {
        // Linear 16-bit samples are stored unchanged.
        image.format = PNG_FORMAT_LINEAR_Y;
        pixels = buffer.segment_data().data();
    }

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
        throw IoError(std::string("PNG encoding failed: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        throw IoError(std::string("PNG encoding failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

int parse_ppm_int(std::span<const std::uint8_t> bytes, std::size_t &pos) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') {
                ++pos;
            }
        } else if (std::isspace(bytes[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    int value = 0;
    const char *begin = reinterpret_cast<const char *>(bytes.data()) + pos;
    const char *end = reinterpret_cast<const char *>(bytes.data()) + bytes.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || value <= 0) {
        throw IoError("malformed PPM header");
    }
    pos += static_cast<std::size_t>(ptr - begin);
    return value;
}

} // namespace

ImageFormat parse_image_format(std::string_view name) {
    if (name == "ppm") {
        return ImageFormat::ppm;
    }
    if (name == "png") {
        return ImageFormat::png;
    }
    throw ValidationError("unknown image format '" + std::string(name) + "'");
}

std::string file_extension(const ImageBuffer &buffer, ImageFormat format) {
    switch (buffer.format()) {
    case PixelFormat::rgb8:
        return format == ImageFormat::ppm ? "ppm" : "png";
    case PixelFormat::depth_f32:
        return "depth";
    case PixelFormat::seg_u16:
        return "png";
    }
    return "bin";
}

std::vector<std::uint8_t> encode_image(const ImageBuffer &buffer, ImageFormat format) {
    switch (buffer.format()) {
    case PixelFormat::rgb8:
        return format == ImageFormat::ppm ? encode_ppm(buffer) : encode_png(buffer);
    case PixelFormat::depth_f32:
        return encode_depth(buffer);
    case PixelFormat::seg_u16:
        return encode_png(buffer);
    }
    return {};
}

void export_image(const ImageBuffer &buffer, const std::filesystem::path &path, ImageFormat format) {
    const auto bytes = encode_image(buffer, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

ImageBuffer decode_ppm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw IoError("not a binary PPM");
    }
    std::size_t pos = 2;
    const int width = parse_ppm_int(bytes, pos);
    const int height = parse_ppm_int(bytes, pos);
    const int maxval = parse_ppm_int(bytes, pos);
    if (maxval != 255 || pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw IoError("unsupported PPM header");
    }
    ++pos;
    ImageBuffer image = ImageBuffer::rgb8(width, height);
    auto pixels = image.rgb_data();
    if (bytes.size() - pos != pixels.size()) {
        throw IoError("PPM payload size does not match its header");
    }
    std::memcpy(pixels.data(), bytes.data() + pos, pixels.size());
    return image;
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw IoError(std::string("PNG decoding failed: ") + image.message);
    }
    const bool sixteen_bit = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
    ImageBuffer out;
    void *pixels = nullptr;
    if (sixteen_bit) {
        image.format = PNG_FORMAT_LINEAR_Y;
        out = ImageBuffer::segmentation(static_cast<int>(image.width), static_cast<int>(image.height));
        pixels = out.segment_data().data();
    } else {
        image.format = PNG_FORMAT_RGB;
        out = ImageBuffer::rgb8(static_cast<int>(image.width), static_cast<int>(image.height));
        pixels = out.rgb_data().data();
    }
    if (!png_image_finish_read(&image, nullptr, pixels, 0, nullptr)) {
        png_image_free(&image);
        throw IoError(std::string("PNG decoding failed: ") + image.message);
    }
    return out;
}

ImageBuffer decode_depth(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kDepthMagic, 4) != 0) {
        throw IoError("not a DPTH depth file");
    }
    const int width = get_u16_le(bytes, 4);
    const int height = get_u16_le(bytes, 6);
    ImageBuffer image = ImageBuffer::depth(width, height);
    auto pixels = image.depth_data();
    if (bytes.size() - 8 != pixels.size_bytes()) {
        throw IoError("depth payload size does not match its header");
    }
    std::memcpy(pixels.data(), bytes.data() + 8, pixels.size_bytes());
    return image;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImageBuffer import_image(const std::filesystem::path &path) {
    const auto bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return decode_ppm(bytes);
    }
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kDepthMagic, 4) == 0) {
        return decode_depth(bytes);
    }
    return decode_png(bytes);
}

} // namespace cinelens::render
