#pragma once
// Spectrum decomposition data path: blockwise DCT of the normalized log
// image, ground-truth compression-spectrum generation, Charbonnier loss and
// the pluggable decomposer interface (oracle / passthrough stand-ins for the
// learned network).

#include <memory>
#include <vector>

#include "fdg/jpeg.hpp"

namespace fdg {

// Blockwise DCT of a normalized log image. The affine normalization
// constants are fixed: offset = ln(delta), scale = ln(1+delta) - ln(delta),
// delta = 1/255; the map sends [ln delta, ln(1+delta)] to [0,1] so the log
// identity stays additive (the offset only contributes to the DC band).
struct LogDctTensor {
    int width = 0;        // original (unpadded) image size
    int height = 0;
    int channels = 0;
    int blocks_w = 0;     // grid over the replicate-padded image
    int blocks_h = 0;
    std::vector<Block8> blocks;  // [channel][block row][block col]
    double scale = 0.0;
    double offset = 0.0;
    double delta = 0.0;

    const Block8& at(int c, int by, int bx) const {
        return blocks[(static_cast<std::size_t>(c) * blocks_h + by) * blocks_w + bx];
    }
    Block8& at(int c, int by, int bx) {
        return blocks[(static_cast<std::size_t>(c) * blocks_h + by) * blocks_w + bx];
    }
    bool same_shape(const LogDctTensor& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// CompressionSpectrum is a LogDctTensor of the multiplicative compression
// factor phi; all-zero means no compression effect (phi == 1).
using CompressionSpectrum = LogDctTensor;

constexpr double kLogDelta = 1.0 / 255.0;

LogDctTensor to_log_dct(const ImageF32& img);
ImageF32 from_log_dct(const LogDctTensor& t);

// DCT of ln(factor)/scale without the offset term; this is the transform
// under which d2 + d3 reproduces D1 of the compressed image exactly.
CompressionSpectrum factor_log_dct(const ImageF32& factor, int channels_like);

struct GroundTruthPair {
    CompressionSpectrum d2;  // compression effect
    LogDctTensor d3;         // uncompressed hazy content
    ImageF32 compressed;     // I^c produced by the codec simulation
};

// Compress with simulate_jpeg at the given qf and derive (d2, d3) from the
// elementwise factor phi = (I^c + delta) / (I + delta), ratios clamped to
// [1/64, 64].
GroundTruthPair ground_truth_pair(const ImageF32& hazy_uncompressed, int qf);

// mean sqrt(delta2^2 + eps^2) + mean sqrt(delta3^2 + eps^2),
// eps = 1e-3, mean reduction per tensor.
double charbonnier_loss(const LogDctTensor& d2_pred, const LogDctTensor& d2_gt,
                        const LogDctTensor& d3_pred, const LogDctTensor& d3_gt);

struct DecompositionResult {
    CompressionSpectrum spectrum;
    ImageF32 corrected;
};

class Decomposer {
public:
    virtual ~Decomposer() = default;
    virtual DecompositionResult run(const ImageF32& compressed_hazy) const = 0;
};

// Returns ground truth derived from the uncompressed hazy reference;
// intended for end-to-end testing.
class OracleDecomposer : public Decomposer {
public:
    explicit OracleDecomposer(ImageF32 reference);
    DecompositionResult run(const ImageF32& compressed_hazy) const override;

private:
    ImageF32 reference_;
};

// Ablation baseline: zero spectrum, corrected = input.
class PassthroughDecomposer : public Decomposer {
public:
    DecompositionResult run(const ImageF32& compressed_hazy) const override;
};

// max over non-DC coefficients of |D1(input) - (spectrum + D1(corrected))|;
// the interface's additive-consistency residual.
double additive_residual_off_dc(const ImageF32& input, const DecompositionResult& result);

}  // namespace fdg
