#include "fdg/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdg {

namespace {

LogDctTensor blockwise_dct(const std::vector<std::vector<double>>& planes, int width, int height,
                           int pw, int ph) {
    LogDctTensor t;
    t.width = width;
    t.height = height;
    t.channels = static_cast<int>(planes.size());
    t.blocks_w = pw / 8;
    t.blocks_h = ph / 8;
    t.delta = kLogDelta;
    t.offset = std::log(kLogDelta);
    t.scale = std::log(1.0 + kLogDelta) - std::log(kLogDelta);
    t.blocks.resize(static_cast<std::size_t>(t.channels) * t.blocks_h * t.blocks_w);
    for (int c = 0; c < t.channels; ++c)
        for (int by = 0; by < t.blocks_h; ++by)
            for (int bx = 0; bx < t.blocks_w; ++bx) {
                Block8 b{};
                for (int m = 0; m < 8; ++m)
                    for (int n = 0; n < 8; ++n)
                        b[m * 8 + n] = planes[c][static_cast<std::size_t>(by * 8 + m) * pw + bx * 8 + n];
                t.at(c, by, bx) = dct2d(b);
            }
    return t;
}

// replicate-pad one channel to multiples of 8 applying `f` per sample
template <typename F>
std::vector<double> padded_plane(const ImageF32& img, int ch, int pw, int ph, F f) {
    std::vector<double> p(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y) {
        int sy = std::min(y, img.height - 1);
        for (int x = 0; x < pw; ++x) {
            int sx = std::min(x, img.width - 1);
            p[static_cast<std::size_t>(y) * pw + x] = f(img.at(sy, sx, ch));
        }
    }
    return p;
}

}  // namespace

LogDctTensor to_log_dct(const ImageF32& img) {
    for (float v : img.data)
        if (v < 0.0f) throw std::invalid_argument("to_log_dct: negative sample");
    const int pw = (img.width + 7) / 8 * 8;
    const int ph = (img.height + 7) / 8 * 8;
    const double o = std::log(kLogDelta);
    const double s = std::log(1.0 + kLogDelta) - o;
    std::vector<std::vector<double>> planes;
    for (int c = 0; c < img.channels; ++c)
        planes.push_back(padded_plane(img, c, pw, ph, [o, s](float v) {
            return (std::log(static_cast<double>(v) + kLogDelta) - o) / s;
        }));
    return blockwise_dct(planes, img.width, img.height, pw, ph);
}

ImageF32 from_log_dct(const LogDctTensor& t) {
    ImageF32 out(t.width, t.height, t.channels);
    for (int c = 0; c < t.channels; ++c)
        for (int by = 0; by < t.blocks_h; ++by)
            for (int bx = 0; bx < t.blocks_w; ++bx) {
                Block8 b = idct2d(t.at(c, by, bx));
                for (int m = 0; m < 8; ++m) {
                    int y = by * 8 + m;
                    if (y >= t.height) break;
                    for (int n = 0; n < 8; ++n) {
                        int x = bx * 8 + n;
                        if (x >= t.width) break;
                        double v = std::exp(b[m * 8 + n] * t.scale + t.offset) - t.delta;
                        out.at(y, x, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
                    }
                }
            }
    return out;
}

CompressionSpectrum factor_log_dct(const ImageF32& factor, int /*channels_like*/) {
    const int pw = (factor.width + 7) / 8 * 8;
    const int ph = (factor.height + 7) / 8 * 8;
    const double s = std::log(1.0 + kLogDelta) - std::log(kLogDelta);
    std::vector<std::vector<double>> planes;
    for (int c = 0; c < factor.channels; ++c)
        planes.push_back(padded_plane(factor, c, pw, ph, [s](float v) {
            return std::log(static_cast<double>(v)) / s;
        }));
    return blockwise_dct(planes, factor.width, factor.height, pw, ph);
}

GroundTruthPair ground_truth_pair(const ImageF32& hazy_uncompressed, int qf) {
    GroundTruthPair gt;
    JpegSimResult sim = simulate_jpeg(to_u8(hazy_uncompressed), qf);
    gt.compressed = to_f32(sim.image);
    gt.d3 = to_log_dct(hazy_uncompressed);
    ImageF32 phi(hazy_uncompressed.width, hazy_uncompressed.height, hazy_uncompressed.channels);
    for (std::size_t i = 0; i < phi.data.size(); ++i) {
        double r = (static_cast<double>(gt.compressed.data[i]) + kLogDelta) /
                   (static_cast<double>(hazy_uncompressed.data[i]) + kLogDelta);
        phi.data[i] = static_cast<float>(std::clamp(r, 1.0 / 64.0, 64.0));
    }
    gt.d2 = factor_log_dct(phi, hazy_uncompressed.channels);
    return gt;
}

double charbonnier_loss(const LogDctTensor& d2_pred, const LogDctTensor& d2_gt,
                        const LogDctTensor& d3_pred, const LogDctTensor& d3_gt) {
    auto compatible = [](const LogDctTensor& a, const LogDctTensor& b) {
        return a.blocks.size() == b.blocks.size() && a.blocks_w == b.blocks_w &&
               a.blocks_h == b.blocks_h && a.channels == b.channels;
    };
    if (!compatible(d2_pred, d2_gt) || !compatible(d3_pred, d3_gt))
        throw std::invalid_argument("charbonnier_loss: shape mismatch");
    constexpr double eps2 = 1e-3 * 1e-3;
    auto term = [](const LogDctTensor& p, const LogDctTensor& g) {
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < p.blocks.size(); ++i)
            for (int k = 0; k < 64; ++k) {
                double d = p.blocks[i][k] - g.blocks[i][k];
                acc += std::sqrt(d * d + eps2);
                ++n;
            }
        return acc / static_cast<double>(n);
    };
    return term(d2_pred, d2_gt) + term(d3_pred, d3_gt);
}

OracleDecomposer::OracleDecomposer(ImageF32 reference) : reference_(std::move(reference)) {
    if (reference_.width == 0) throw std::invalid_argument("OracleDecomposer: empty reference");
}

DecompositionResult OracleDecomposer::run(const ImageF32& compressed_hazy) const {
    if (!compressed_hazy.same_shape(reference_))
        throw std::invalid_argument("OracleDecomposer: reference shape does not match input");
    ImageF32 phi(compressed_hazy.width, compressed_hazy.height, compressed_hazy.channels);
    for (std::size_t i = 0; i < phi.data.size(); ++i) {
        double r = (static_cast<double>(compressed_hazy.data[i]) + kLogDelta) /
                   (static_cast<double>(reference_.data[i]) + kLogDelta);
        phi.data[i] = static_cast<float>(std::clamp(r, 1.0 / 64.0, 64.0));
    }
    DecompositionResult res;
    res.spectrum = factor_log_dct(phi, compressed_hazy.channels);
    res.corrected = from_log_dct(to_log_dct(reference_));
    return res;
}

DecompositionResult PassthroughDecomposer::run(const ImageF32& compressed_hazy) const {
    DecompositionResult res;
    LogDctTensor zero = to_log_dct(compressed_hazy);
    for (auto& b : zero.blocks) b.fill(0.0);
    res.spectrum = std::move(zero);
    res.corrected = compressed_hazy;
    return res;
}

double additive_residual_off_dc(const ImageF32& input, const DecompositionResult& result) {
    LogDctTensor d1 = to_log_dct(input);
    LogDctTensor d3 = to_log_dct(result.corrected);
    if (!d1.same_shape(result.spectrum) || !d1.same_shape(d3))
        throw std::invalid_argument("additive_residual_off_dc: shape mismatch");
    double max_res = 0.0;
    for (std::size_t i = 0; i < d1.blocks.size(); ++i)
        for (int k = 1; k < 64; ++k) {  // k==0 is the DC slot
            double r = std::abs(d1.blocks[i][k] - (result.spectrum.blocks[i][k] + d3.blocks[i][k]));
            max_res = std::max(max_res, r);
        }
    return max_res;
}

}  // namespace fdg
