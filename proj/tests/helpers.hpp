#pragma once
// Shared helpers for the test binaries: deterministic synthetic images and
// scratch-directory management.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "fdg/image.hpp"
#include "fdg/rng.hpp"

namespace testutil {

// Smooth multi-band scene with texture; deterministic in (seed). Values in
// [0,1] with realistic mid-band AC energy.
inline fdg::ImageF32 synthetic_scene(int w, int h, std::uint64_t seed, double texture = 0.25) {
    fdg::ImageF32 img(w, h, 3);
    double fx = 0.05 + 0.1 * fdg::counter_uniform(seed, 1, 0);
    double fy = 0.05 + 0.1 * fdg::counter_uniform(seed, 1, 1);
    double ph = 6.28318530717958647692 * fdg::counter_uniform(seed, 1, 2);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double base = 0.5 + 0.25 * std::sin(fx * x + ph) * std::cos(fy * y)
                          + 0.1 * std::sin(0.31 * x + 0.17 * y);
            for (int c = 0; c < 3; ++c) {
                double n = fdg::counter_uniform(seed, 100 + c, static_cast<std::uint64_t>(y) * w + x) - 0.5;
                double v = base + texture * n + 0.05 * c;
                img.at(y, x, c) = static_cast<float>(std::min(1.0, std::max(0.0, v)));
            }
        }
    }
    return img;
}

inline fdg::ImageF32 random_image(int w, int h, int ch, std::uint64_t seed) {
    fdg::ImageF32 img(w, h, ch);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<float>(fdg::counter_uniform(seed, 7, i));
    return img;
}

// Unique-per-test scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("fdg_test_" + name);
    std::filesystem::create_directories(p);
    return p.string();
}

}  // namespace testutil
