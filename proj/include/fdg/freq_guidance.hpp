#pragma once
// High-frequency compensation: single-level orthonormal Haar transform at
// skip connections plus multi-head cross-attention of spatial features
// against wavelet high frequencies (keys) and the compression-effect
// spectrum (values).

#include <cstdint>
#include <string>
#include <vector>

#include "fdg/decomposition.hpp"

namespace fdg {

struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;  // [channel][row][col]

    FeatureMap() = default;
    FeatureMap(int c, int h, int w)
        : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, 0.0) {}

    double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    int tokens() const { return height * width; }
};

struct WaveletSubbands {
    int width = 0;   // subband size (ceil of half input)
    int height = 0;
    std::vector<double> ll, lh, hl, hh;
};

// Orthonormal single-level 2-D Haar; odd inputs are replicate-padded by one.
WaveletSubbands haar_dwt2(const std::vector<double>& plane, int width, int height);
std::vector<double> haar_idwt2(const WaveletSubbands& sb);

// Per-channel Haar DWT; LH, HL, HH concatenated along channels: 3C channels
// at half resolution (channel 3c+0/1/2 = LH/HL/HH of source channel c).
FeatureMap extract_high_freq(const FeatureMap& x);

// Per-head projection matrices, each C x (C/h) row-major.
struct AttentionWeights {
    int channels = 0;
    int heads = 0;
    std::vector<std::vector<double>> w_q, w_k, w_v;  // [head][C*(C/h)]
};

AttentionWeights random_attention_weights(int channels, int heads, std::uint64_t seed);
void save_attention_weights(const AttentionWeights& w, const std::string& tensor_path,
                            const std::string& manifest_path);
AttentionWeights load_attention_weights(const std::string& tensor_path);

// q = x W_q, k = x_H W_k, v = x_D W_v per head; A = row-softmax(q k^T /
// sqrt(C/h)); output = A v with heads concatenated. All inputs must share
// channel count and token count.
FeatureMap cross_attention(const FeatureMap& x, const FeatureMap& x_h, const FeatureMap& x_d,
                           const AttentionWeights& w);

// Full HFCM block: wavelet high frequencies (nearest-upsampled, subbands
// averaged back to C channels) as keys, per-block mean AC magnitude of the
// spectrum (nearest-resampled, channels cycled to C) as values; residual
// output x + CA(x) unless residual=false.
FeatureMap hfcm_forward(const FeatureMap& x, const CompressionSpectrum& spectrum,
                        const AttentionWeights& w, bool residual = true);

}  // namespace fdg
