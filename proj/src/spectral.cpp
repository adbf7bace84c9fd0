#include "fdg/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fdg {

AttenuationResult ac_attenuation(const Block8& block, double t, double a_y) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("ac_attenuation: t must be in (0,1]");
    Block8 hazy_spatial{};
    for (int i = 0; i < 64; ++i) hazy_spatial[i] = block[i] * t + a_y * (1.0 - t);
    AttenuationResult res;
    res.hazy_coeffs = dct2d(hazy_spatial);
    Block8 clear = dct2d(block);
    double max_res = 0.0;
    for (int zz = 1; zz < 64; ++zz) {
        auto [u, v] = zigzag_to_uv(zz);
        max_res = std::max(max_res, std::abs(res.hazy_coeffs[u * 8 + v] - t * clear[u * 8 + v]));
    }
    res.max_ac_residual = max_res;
    return res;
}

AnnihilationReport annihilation_stats(const std::vector<Block8>& corpus, double t, int qf) {
    if (corpus.empty()) throw std::invalid_argument("annihilation_stats: empty corpus");
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("annihilation_stats: t must be in (0,1]");
    QuantTable q = quant_table_for_qf(qf, Plane::Luma);
    AnnihilationReport rep;
    rep.qf = qf;
    rep.transmission = t;
    rep.block_count = corpus.size();
    std::uint64_t total = 0, annihilated = 0;
    for (const auto& b : corpus) {
        Block8 f = dct2d(b);
        bool zero_ac = true;
        for (int zz = 1; zz < 64; ++zz) {
            auto [u, v] = zigzag_to_uv(zz);
            double coeff = f[u * 8 + v];
            if (coeff != 0.0) zero_ac = false;
            double hazy = t * coeff;
            rep.bands.count[zz] += 1;
            bool gone = std::abs(hazy) < q.zig[zz] / 2.0;  // strict, boundary survives
            if (gone) rep.bands.annihilated[zz] += 1;
            ++total;
            if (gone) ++annihilated;
        }
        if (zero_ac) ++rep.zero_ac_blocks;
    }
    rep.aggregate = static_cast<double>(annihilated) / static_cast<double>(total);
    return rep;
}

InequalityVerdict verify_inequality(const AnnihilationReport& hazy, const AnnihilationReport& clear) {
    if (hazy.block_count != clear.block_count || hazy.qf != clear.qf)
        throw std::invalid_argument("verify_inequality: reports must share corpus and qf");
    InequalityVerdict v;
    bool all_bands = true;
    for (int zz = 1; zz < 64; ++zz) {
        double fc = clear.bands.frequency(zz);
        double fh = hazy.bands.frequency(zz);
        v.band_ok[zz] = (fc >= 1.0) || (fh >= fc);
        all_bands = all_bands && v.band_ok[zz];
    }
    bool strict_required =
        clear.aggregate > 0.0 && clear.aggregate < 1.0 && hazy.transmission < clear.transmission;
    v.aggregate_ok = strict_required ? hazy.aggregate > clear.aggregate
                                     : hazy.aggregate >= clear.aggregate;
    v.pass = all_bands && v.aggregate_ok;
    return v;
}

std::vector<Block8> blocks_from_image(const ImageF32& img) {
    std::vector<double> luma(static_cast<std::size_t>(img.width) * img.height);
    if (img.channels == 1) {
        for (std::size_t i = 0; i < luma.size(); ++i) luma[i] = img.data[i] * 255.0;
    } else if (img.channels == 3) {
        ImageF32 ycc = rgb_to_ycbcr(img);
        for (std::size_t i = 0; i < luma.size(); ++i) luma[i] = ycc.data[3 * i] * 255.0;
    } else {
        throw std::invalid_argument("blocks_from_image: 1 or 3 channels required");
    }
    std::vector<Block8> blocks;
    for (int by = 0; by + 8 <= img.height; by += 8)
        for (int bx = 0; bx + 8 <= img.width; bx += 8) {
            Block8 b{};
            for (int m = 0; m < 8; ++m)
                for (int n = 0; n < 8; ++n)
                    b[m * 8 + n] = luma[static_cast<std::size_t>(by + m) * img.width + bx + n];
            blocks.push_back(b);
        }
    return blocks;
}

}  // namespace fdg
