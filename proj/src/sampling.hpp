// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "cinelens/geometry.hpp"

namespace cinelens::render::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
    const double inv_base = 1.0 / static_cast<double>(base);
    double inv = inv_base;
    double result = 0.0;
    while (index > 0) {
        result += static_cast<double>(index % base) * inv;
        index /= base;
        inv *= inv_base;
    }
    return result;
}

inline double wrap_unit(double x) { return x >= 1.0 ? x - 1.0 : x; }

/// Halton point (bases 2, 3) with a Cranley-Patterson rotation.
inline Vec2 rotated_halton(int index, const Vec2 &rotation) {
    return {wrap_unit(radical_inverse(static_cast<std::uint64_t>(index), 2) + rotation.x()),
            wrap_unit(radical_inverse(static_cast<std::uint64_t>(index), 3) + rotation.y())};
}

/// Random stream owned by one pixel. Every value depends only on (seed, pixel index), so the
/// image does not depend on how pixels are scheduled across threads.
class PixelSampler {
  public:
    PixelSampler(std::uint64_t seed, std::uint64_t pixel) : engine_(splitmix64(seed ^ splitmix64(pixel))) {}

    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    Vec2 next_2d() {
        const double a = next();
        return {a, next()};
    }

    std::size_t next_below(std::size_t n) { return std::min(static_cast<std::size_t>(next() * n), n - 1); }

    /// Sub-pixel offsets stratified along both axes (Latin hypercube with shuffled pairing).
    void stratified_jitter(std::span<Vec2> out) {
        const std::size_t n = out.size();
        std::vector<std::size_t> xs(n);
        std::vector<std::size_t> ys(n);
        std::iota(xs.begin(), xs.end(), 0);
        std::iota(ys.begin(), ys.end(), 0);
        shuffle(xs);
        shuffle(ys);
        for (std::size_t i = 0; i < n; ++i) {
            const double jx = next();
            const double jy = next();
            out[i] = {(static_cast<double>(xs[i]) + jx) / static_cast<double>(n),
                      (static_cast<double>(ys[i]) + jy) / static_cast<double>(n)};
        }
    }

  private:
    // Fisher-Yates written out because std::shuffle's draw sequence is implementation-defined.
    void shuffle(std::vector<std::size_t> &values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[next_below(i)]);
        }
    }

    std::mt19937_64 engine_;
};

} // namespace cinelens::render::detail
