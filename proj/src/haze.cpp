#include "fdg/haze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fdg {

ImageF32 apply_asm(const ImageF32& clear, const TransmissionMap& t, const Airlight& a) {
    if (t.width != clear.width || t.height != clear.height || t.channels != 1)
        throw std::invalid_argument("apply_asm: transmission map must be single-channel with matching size");
    ImageF32 out(clear.width, clear.height, clear.channels);
    for (int y = 0; y < clear.height; ++y)
        for (int x = 0; x < clear.width; ++x) {
            float tv = t.at(y, x, 0);
            for (int c = 0; c < clear.channels; ++c) {
                float v = clear.at(y, x, c) * tv + a.channel(c) * (1.0f - tv);
                out.at(y, x, c) = std::clamp(v, 0.0f, 1.0f);
            }
        }
    return out;
}

ImageF32 dark_channel(const ImageF32& img, int window) {
    if (img.channels != 3) throw std::invalid_argument("dark_channel: 3-channel image required");
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("dark_channel: window must be odd");
    const int w = img.width, h = img.height, half = window / 2;

    // per-pixel channel minimum, then a separable min filter (clipped windows)
    std::vector<float> chan_min(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            chan_min[static_cast<std::size_t>(y) * w + x] =
                std::min({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});

    std::vector<float> row_min(chan_min.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float m = chan_min[static_cast<std::size_t>(y) * w + std::max(0, x - half)];
            for (int i = std::max(0, x - half) + 1; i <= std::min(w - 1, x + half); ++i)
                m = std::min(m, chan_min[static_cast<std::size_t>(y) * w + i]);
            row_min[static_cast<std::size_t>(y) * w + x] = m;
        }

    ImageF32 out(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float m = row_min[static_cast<std::size_t>(std::max(0, y - half)) * w + x];
            for (int j = std::max(0, y - half) + 1; j <= std::min(h - 1, y + half); ++j)
                m = std::min(m, row_min[static_cast<std::size_t>(j) * w + x]);
            out.at(y, x, 0) = m;
        }
    return out;
}

Airlight estimate_airlight(const ImageF32& img, int window) {
    if (img.width == 0 || img.height == 0) throw std::invalid_argument("estimate_airlight: empty image");
    ImageF32 dark = dark_channel(img, window);
    const std::size_t n = dark.data.size();
    std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.001 * static_cast<double>(n))));

    std::vector<float> sorted = dark.data;
    std::nth_element(sorted.begin(), sorted.begin() + (n - k), sorted.end());
    float cutoff = sorted[n - k];

    double sum[3] = {0, 0, 0};
    std::size_t count = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (dark.at(y, x, 0) >= cutoff) {
                for (int c = 0; c < 3; ++c) sum[c] += img.at(y, x, c);
                ++count;
            }
    Airlight a;
    a.r = static_cast<float>(sum[0] / count);
    a.g = static_cast<float>(sum[1] / count);
    a.b = static_cast<float>(sum[2] / count);
    return a;
}

TransmissionMap estimate_transmission(const ImageF32& img, const Airlight& a, const HazeParams& p) {
    if (a.r <= 0.0f || a.g <= 0.0f || a.b <= 0.0f)
        throw std::invalid_argument("estimate_transmission: airlight channels must be positive");
    ImageF32 ratio(img.width, img.height, 3);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                ratio.at(y, x, c) = img.at(y, x, c) / a.channel(c);
    ImageF32 dark = dark_channel(ratio, p.window);
    TransmissionMap t(img.width, img.height, 1);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        double v = 1.0 - p.omega * dark.data[i];
        t.data[i] = static_cast<float>(std::clamp(v, p.t_min, 1.0));
    }
    return t;
}

TransmissionMap transmission_from_depth(const ImageF32& depth, double beta) {
    if (depth.channels != 1) throw std::invalid_argument("transmission_from_depth: single-channel depth required");
    if (beta < 0.0) throw std::invalid_argument("transmission_from_depth: beta must be non-negative");
    TransmissionMap t(depth.width, depth.height, 1);
    for (std::size_t i = 0; i < t.data.size(); ++i)
        t.data[i] = static_cast<float>(std::min(1.0, std::exp(-beta * depth.data[i])));
    return t;
}

}  // namespace fdg
