#pragma once
// Empirical machinery for the haze/quantization interaction: AC attenuation
// under uniform-transmission haze and annihilation-probability statistics
// over block corpora.

#include <vector>

#include "fdg/jpeg.hpp"

namespace fdg {

// Per zigzag band nu in 1..63: how many coefficients quantize to zero.
struct BandStats {
    std::array<std::uint64_t, 64> count{};
    std::array<std::uint64_t, 64> annihilated{};

    double frequency(int band) const {
        return count[band] == 0 ? 0.0 : static_cast<double>(annihilated[band]) / count[band];
    }
};

struct AnnihilationReport {
    int qf = 0;
    double transmission = 1.0;
    BandStats bands;
    double aggregate = 0.0;       // total annihilated / total count over AC bands
    std::size_t block_count = 0;
    std::size_t zero_ac_blocks = 0;  // blocks with no AC energy, reported separately
};

struct AttenuationResult {
    Block8 hazy_coeffs;
    double max_ac_residual;  // max over AC bands of |hazy - t*clear|
};

// DCT(t*y + a_y*(1-t)) against t*DCT(y); the DC band is excluded from the
// residual (it also absorbs the airlight term).
AttenuationResult ac_attenuation(const Block8& block, double t, double a_y);

// Hazy AC coefficients are formed as t * f (exact scaling, justified by the
// attenuation linearity above) so the threshold-set identity against
// |f| < q/(2t) holds bit-for-bit. Blocks with zero AC energy annihilate
// trivially and are counted separately.
AnnihilationReport annihilation_stats(const std::vector<Block8>& corpus, double t, int qf);

struct InequalityVerdict {
    std::array<bool, 64> band_ok{};  // bands 1..63
    bool aggregate_ok = false;
    bool pass = false;
};

// Pass iff every band whose clear frequency is below 1 has hazy frequency >=
// clear frequency, with a strict aggregate increase required whenever the
// clear aggregate lies strictly inside (0,1).
InequalityVerdict verify_inequality(const AnnihilationReport& hazy, const AnnihilationReport& clear);

// Non-overlapping 8x8 luma blocks (0..255 scale, no level shift).
std::vector<Block8> blocks_from_image(const ImageF32& img);

}  // namespace fdg
