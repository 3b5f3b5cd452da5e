// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstring>
#include <limits>

#include "cinelens/errors.hpp"
#include "cinelens/image_io.hpp"
#include "support/test_support.hpp"

using namespace cinelens;
using namespace cinelens::render;

namespace {

ImageBuffer pattern_rgb(int w, int h) {
    ImageBuffer img = ImageBuffer::rgb8(w, h);
    auto data = img.rgb_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = static_cast<std::uint8_t>((i * 37 + 11) % 256);
    }
    return img;
}

} // namespace

TEST_CASE("image buffer layout") {
    CHECK(ImageBuffer::rgb8(4, 3).byte_size() == 36);
    CHECK(ImageBuffer::depth(4, 3).byte_size() == 48);
    CHECK(ImageBuffer::segmentation(4, 3).byte_size() == 24);
    CHECK(std::isinf(ImageBuffer::depth(2, 2).depth_at(1, 1)));
    CHECK_THROWS_AS((void)ImageBuffer::rgb8(2, 2).depth_data(), DimensionMismatchError);
    CHECK_THROWS_AS((void)ImageBuffer::depth(2, 2).segment_data(), DimensionMismatchError);
    CHECK_THROWS_AS((void)ImageBuffer::rgb8(0, 2), DomainError);
}

TEST_CASE("2x2 PPM has the canonical header and payload") {
    const ImageBuffer img = pattern_rgb(2, 2);
    const auto bytes = encode_image(img, ImageFormat::ppm);
    const std::string header = "P6\n2 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 12);
    CHECK(header.size() == 11);
    CHECK(std::memcmp(bytes.data(), header.data(), header.size()) == 0);
    CHECK(std::memcmp(bytes.data() + header.size(), img.rgb_data().data(), 12) == 0);
}

TEST_CASE("round trips through files") {
    testing::TempDir dir("image_io");
    const ImageBuffer rgb = pattern_rgb(17, 9);

    export_image(rgb, dir.path() / "a.ppm", ImageFormat::ppm);
    CHECK(import_image(dir.path() / "a.ppm") == rgb);
    export_image(rgb, dir.path() / "a.png", ImageFormat::png);
    CHECK(import_image(dir.path() / "a.png") == rgb);

    ImageBuffer seg = ImageBuffer::segmentation(13, 7);
    for (std::size_t i = 0; i < seg.pixel_count(); ++i) {
        seg.segment_data()[i] = static_cast<std::uint16_t>(i * 811 % 65536);
    }
    export_image(seg, dir.path() / "s.png", ImageFormat::ppm);
    CHECK(import_image(dir.path() / "s.png") == seg);

    ImageBuffer depth = ImageBuffer::depth(5, 4);
    for (std::size_t i = 0; i + 1 < depth.pixel_count(); ++i) {
        depth.depth_data()[i] = 0.25f * static_cast<float>(i);
    }
    export_image(depth, dir.path() / "d.depth", ImageFormat::png);
    const auto raw = read_file(dir.path() / "d.depth");
    REQUIRE(raw.size() == 8 + 4 * 20);
    CHECK(std::memcmp(raw.data(), "DPTH", 4) == 0);
    CHECK(raw[4] == 5);
    CHECK(raw[5] == 0);
    CHECK(raw[6] == 4);
    CHECK(raw[7] == 0);
    const ImageBuffer back = import_image(dir.path() / "d.depth");
    CHECK(back == depth);
    CHECK(std::isinf(back.depth_at(4, 3)));
}

TEST_CASE("file extensions") {
    CHECK(file_extension(ImageBuffer::rgb8(1, 1), ImageFormat::ppm) == "ppm");
    CHECK(file_extension(ImageBuffer::rgb8(1, 1), ImageFormat::png) == "png");
    CHECK(file_extension(ImageBuffer::depth(1, 1), ImageFormat::ppm) == "depth");
    CHECK(file_extension(ImageBuffer::segmentation(1, 1), ImageFormat::ppm) == "png");
    CHECK(parse_image_format("ppm") == ImageFormat::ppm);
    CHECK_THROWS_AS((void)parse_image_format("tiff"), ValidationError);
}

TEST_CASE("I/O errors") {
    CHECK_THROWS_AS(export_image(pattern_rgb(2, 2), "/nonexistent-dir/x/y.ppm", ImageFormat::ppm), IoError);
    CHECK_THROWS_AS((void)import_image("/nonexistent-dir/y.ppm"), IoError);
    const std::vector<std::uint8_t> short_ppm{'P', '6', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n', 1, 2};
    CHECK_THROWS_AS((void)decode_ppm(short_ppm), IoError);
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
    CHECK_THROWS_AS((void)decode_png(junk), IoError);
    CHECK_THROWS_AS((void)decode_depth(junk), IoError);
}
