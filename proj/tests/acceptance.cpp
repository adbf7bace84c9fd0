// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. An independent system JPEG decoder
// (libjpeg) serves as the external reference for the bitstream criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include <jpeglib.h>

#include "fdg/decomposition.hpp"
#include "fdg/diffusion.hpp"
#include "fdg/freq_guidance.hpp"
#include "fdg/haze.hpp"
#include "fdg/image.hpp"
#include "fdg/jfif.hpp"
#include "fdg/jpeg.hpp"
#include "fdg/rng.hpp"
#include "fdg/spectral.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;

static int g_failures = 0;

static void report(int criterion, const std::string& label, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << ": criterion " << criterion << " - " << label;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. Annihilation inequality on a natural-image block corpus at qf=80.
static void criterion1() {
    auto start = std::chrono::steady_clock::now();
    std::vector<fdg::Block8> corpus;
    for (std::uint64_t s = 0; s < 6; ++s) {
        fdg::ImageF32 img = testutil::synthetic_scene(128, 96, 500 + s);
        auto blocks = fdg::blocks_from_image(img);
        corpus.insert(corpus.end(), blocks.begin(), blocks.end());
    }
    bool enough = corpus.size() >= 1000;
    auto clear = fdg::annihilation_stats(corpus, 1.0, 80);
    auto hazy = fdg::annihilation_stats(corpus, 0.5, 80);
    bool aggregate_strict = hazy.aggregate > clear.aggregate;
    // per-block threshold-set inclusion, exact: annihilated at t=1 implies
    // annihilated at t=0.5 for every coefficient of every block
    fdg::QuantTable q = fdg::quant_table_for_qf(80, fdg::Plane::Luma);
    long violations = 0;
    for (const auto& blk : corpus) {
        fdg::Block8 f = fdg::dct2d(blk);
        for (int zz = 1; zz < 64; ++zz) {
            auto [u, v] = fdg::zigzag_to_uv(zz);
            double half = q.zig[zz] / 2.0;
            bool ann_clear = std::abs(1.0 * f[u * 8 + v]) < half;
            bool ann_hazy = std::abs(0.5 * f[u * 8 + v]) < half;
            if (ann_clear && !ann_hazy) ++violations;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream d;
    d << corpus.size() << " blocks, aggregate " << clear.aggregate << " -> " << hazy.aggregate
      << ", violations " << violations << ", " << secs << " s";
    report(1, "haze strictly increases AC annihilation at qf=80",
           enough && aggregate_strict && violations == 0 && secs < 30.0, d.str());
}

// ---------------------------------------------------------------------------
// 2. AC attenuation linearity.
static void criterion2() {
    auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        fdg::Block8 b{};
        for (int i = 0; i < 64; ++i) b[i] = 255.0 * fdg::counter_uniform(s, 77, i);
        for (double t : {0.2, 0.5, 0.8})
            worst = std::max(worst, fdg::ac_attenuation(b, t, 180.0).max_ac_residual);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream d;
    d << "max residual " << worst << ", " << secs << " s";
    report(2, "AC coefficients attenuate exactly by t", worst < 1e-6 && secs < 5.0, d.str());
}

// ---------------------------------------------------------------------------
// 3. Codec fidelity.
static void criterion3() {
    bool ok = true;
    std::ostringstream d;
    double worst_rt = 0.0, worst_parseval = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        fdg::Block8 b{};
        for (int i = 0; i < 64; ++i) b[i] = 255.0 * fdg::counter_uniform(s, 78, i);
        fdg::Block8 f = fdg::dct2d(b);
        fdg::Block8 rt = fdg::idct2d(f);
        double ex = 0, ef = 0;
        for (int i = 0; i < 64; ++i) {
            worst_rt = std::max(worst_rt, std::abs(rt[i] - b[i]));
            ex += b[i] * b[i];
            ef += f[i] * f[i];
        }
        worst_parseval = std::max(worst_parseval, std::abs(ex - ef) / ex);
    }
    ok = ok && worst_rt < 1e-6 && worst_parseval < 1e-5;

    for (int zz = 0; zz < 64; ++zz) {
        auto [u, v] = fdg::zigzag_to_uv(zz);
        if (fdg::uv_to_zigzag(u, v) != zz) ok = false;
    }
    ok = ok && fdg::quant_table_for_qf(80, fdg::Plane::Luma).at_uv(0, 0) == 6;
    fdg::QuantTable q100 = fdg::quant_table_for_qf(100, fdg::Plane::Luma);
    for (int i = 0; i < 64; ++i) ok = ok && q100.zig[i] == 1;

    fdg::ImageU8 grad(40, 40, 1);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) grad.at(y, x, 0) = static_cast<std::uint8_t>(3 * x + 2 * y);
    fdg::JpegSimResult sim = fdg::simulate_jpeg(grad, 100);
    int worst_dev = 0;
    for (std::size_t i = 0; i < grad.data.size(); ++i)
        worst_dev = std::max(worst_dev, std::abs(static_cast<int>(sim.image.data[i]) -
                                                 static_cast<int>(grad.data[i])));
    ok = ok && worst_dev <= 1;
    d << "DCT rt " << worst_rt << ", Parseval " << worst_parseval << ", qf100 dev " << worst_dev;
    report(3, "DCT, zigzag and quantization-table fidelity", ok, d.str());
}

// ---------------------------------------------------------------------------
// 4. Parser round-trip plus independent reference decoder.
static fdg::ImageU8 libjpeg_decode(const std::vector<std::uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.dct_method = JDCT_FLOAT;
    jpeg_start_decompress(&cinfo);
    fdg::ImageU8 out(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height),
                     static_cast<int>(cinfo.output_components));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data.data() +
                       static_cast<std::size_t>(cinfo.output_scanline) * out.width * out.channels;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

static void criterion4() {
    bool tables_ok = true, coeffs_ok = true;
    int worst_ref = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        int w = 24 + 8 * static_cast<int>(s % 4);
        int h = 16 + 8 * static_cast<int>(s % 3);
        // grayscale keeps the reference comparison free of the decoder's
        // integer color-conversion rounding, isolating the bitstream itself
        fdg::ImageF32 scene = testutil::synthetic_scene(w, h, 700 + s);
        fdg::ImageU8 img(w, h, 1);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                img.at(y, x, 0) = static_cast<std::uint8_t>(
                    std::lround(std::clamp(scene.at(y, x, 0), 0.0f, 1.0f) * 255.0f));
        fdg::ParsedJpeg p = fdg::to_parsed(fdg::simulate_jpeg(img, 80), w, h);
        std::vector<std::uint8_t> bytes = fdg::write_jfif(p);
        fdg::ParsedJpeg back = fdg::parse_jpeg(bytes);
        for (int id = 0; id < 4; ++id) {
            if (p.quant_tables[id].has_value() != back.quant_tables[id].has_value()) tables_ok = false;
            else if (p.quant_tables[id] && p.quant_tables[id]->zig != back.quant_tables[id]->zig)
                tables_ok = false;
        }
        if (back.coeff_grids.size() != p.coeff_grids.size()) coeffs_ok = false;
        for (std::size_t c = 0; c < p.coeff_grids.size() && coeffs_ok; ++c)
            if (back.coeff_grids[c].blocks != p.coeff_grids[c].blocks) coeffs_ok = false;

        fdg::ImageU8 ours = fdg::decode_to_image(back);
        fdg::ImageU8 ref = libjpeg_decode(bytes);
        if (ref.width != ours.width || ref.height != ours.height || ref.channels != ours.channels) {
            worst_ref = 255;
        } else {
            for (std::size_t i = 0; i < ref.data.size(); ++i)
                worst_ref = std::max(worst_ref, std::abs(static_cast<int>(ref.data[i]) -
                                                         static_cast<int>(ours.data[i])));
        }
    }
    std::ostringstream d;
    d << "10 images, max reference-decoder deviation " << worst_ref;
    report(4, "bitstream round-trip exact and reference decoder agrees within 1 level",
           tables_ok && coeffs_ok && worst_ref <= 1, d.str());
}

// ---------------------------------------------------------------------------
// 5. Decomposition consistency.
static void criterion5() {
    bool ok = true;
    std::ostringstream d;
    double worst_res = 0.0, worst_corr = 0.0;
    for (int qf : {50, 80, 95}) {
        fdg::ImageF32 hazy = testutil::synthetic_scene(48, 32, 800 + qf);
        fdg::GroundTruthPair gt = fdg::ground_truth_pair(hazy, qf);
        fdg::LogDctTensor d1 = fdg::to_log_dct(gt.compressed);
        for (std::size_t b = 0; b < d1.blocks.size(); ++b)
            for (int k = 1; k < 64; ++k)
                worst_res = std::max(worst_res, std::abs(d1.blocks[b][k] -
                                                         (gt.d2.blocks[b][k] + gt.d3.blocks[b][k])));
        fdg::OracleDecomposer dec(hazy);
        fdg::ImageF32 corrected = dec.run(gt.compressed).corrected;
        for (std::size_t i = 0; i < hazy.data.size(); ++i)
            worst_corr = std::max(worst_corr,
                                  std::abs(static_cast<double>(corrected.data[i]) - hazy.data[i]));
    }
    ok = ok && worst_res < 1e-5 && worst_corr < 1e-4;
    fdg::ImageF32 img = testutil::synthetic_scene(16, 16, 801);
    fdg::GroundTruthPair gt = fdg::ground_truth_pair(img, 80);
    double zero_loss = fdg::charbonnier_loss(gt.d2, gt.d2, gt.d3, gt.d3);
    ok = ok && std::abs(zero_loss - 2e-3) < 1e-9;
    d << "max off-DC residual " << worst_res << ", max oracle error " << worst_corr
      << ", zero loss " << zero_loss;
    report(5, "spectrum decomposition additive consistency", ok, d.str());
}

// ---------------------------------------------------------------------------
// 6. HFCM attention and Haar properties.
static void criterion6() {
    bool ok = true;
    // rows sum to 1 and convex hull over 100 random cases via the public API:
    // single-token outputs must equal the value projection; multi-token
    // outputs must stay inside per-column value bounds.
    for (std::uint64_t s = 0; s < 100 && ok; ++s) {
        int C = 4, H = 2, D = C / H, T = 4;
        fdg::FeatureMap x(C, 2, 2), xh(C, 2, 2), xd(C, 2, 2);
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            x.data[i] = fdg::counter_uniform(s, 91, i) - 0.5;
            xh.data[i] = fdg::counter_uniform(s, 92, i) - 0.5;
            xd.data[i] = fdg::counter_uniform(s, 93, i) - 0.5;
        }
        fdg::AttentionWeights w = fdg::random_attention_weights(C, H, 900 + s);
        fdg::FeatureMap out = fdg::cross_attention(x, xh, xd, w);
        for (int h = 0; h < H && ok; ++h)
            for (int dd = 0; dd < D && ok; ++dd) {
                double lo = 1e300, hi = -1e300;
                for (int t = 0; t < T; ++t) {
                    double sv = 0;
                    for (int c = 0; c < C; ++c)
                        sv += xd.data[static_cast<std::size_t>(c) * T + t] *
                              w.w_v[h][static_cast<std::size_t>(c) * D + dd];
                    lo = std::min(lo, sv);
                    hi = std::max(hi, sv);
                }
                for (int t = 0; t < T; ++t) {
                    double o = out.data[(static_cast<std::size_t>(h) * D + dd) * T + t];
                    if (o < lo - 1e-9 || o > hi + 1e-9) ok = false;
                }
            }
        // row-sum property: with constant value projections the output must
        // equal that constant exactly when rows sum to 1
        fdg::FeatureMap ones(C, 2, 2);
        for (auto& v : ones.data) v = 1.0;
        fdg::FeatureMap out1 = fdg::cross_attention(x, xh, ones, w);
        for (int h = 0; h < H && ok; ++h)
            for (int dd = 0; dd < D && ok; ++dd) {
                double col = 0;
                for (int c = 0; c < C; ++c) col += w.w_v[h][static_cast<std::size_t>(c) * D + dd];
                for (int t = 0; t < T; ++t) {
                    double o = out1.data[(static_cast<std::size_t>(h) * D + dd) * T + t];
                    if (std::abs(o - col) > 1e-6) ok = false;  // sum_u A[t][u] * col == col
                }
            }
    }
    // brute-force equivalence is covered again here on one case
    {
        int C = 4, H = 2;
        fdg::FeatureMap x(C, 2, 2), xh(C, 2, 2), xd(C, 2, 2);
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            x.data[i] = fdg::counter_uniform(5, 94, i) - 0.5;
            xh.data[i] = fdg::counter_uniform(5, 95, i) - 0.5;
            xd.data[i] = fdg::counter_uniform(5, 96, i) - 0.5;
        }
        fdg::AttentionWeights w = fdg::random_attention_weights(C, H, 31);
        fdg::FeatureMap out = fdg::cross_attention(x, xh, xd, w);
        // scalar loop
        int T = 4, D = C / H;
        for (int h = 0; h < H; ++h) {
            std::vector<double> q(T * D), k(T * D), v(T * D);
            for (int t = 0; t < T; ++t)
                for (int dd = 0; dd < D; ++dd) {
                    double sq = 0, sk = 0, sv = 0;
                    for (int c = 0; c < C; ++c) {
                        sq += x.data[static_cast<std::size_t>(c) * T + t] * w.w_q[h][c * D + dd];
                        sk += xh.data[static_cast<std::size_t>(c) * T + t] * w.w_k[h][c * D + dd];
                        sv += xd.data[static_cast<std::size_t>(c) * T + t] * w.w_v[h][c * D + dd];
                    }
                    q[t * D + dd] = sq;
                    k[t * D + dd] = sk;
                    v[t * D + dd] = sv;
                }
            for (int t = 0; t < T; ++t) {
                std::vector<double> logits(T);
                double mx = -1e300;
                for (int u = 0; u < T; ++u) {
                    double dot = 0;
                    for (int dd = 0; dd < D; ++dd) dot += q[t * D + dd] * k[u * D + dd];
                    logits[u] = dot / std::sqrt(static_cast<double>(D));
                    mx = std::max(mx, logits[u]);
                }
                double z = 0;
                for (double& l : logits) {
                    l = std::exp(l - mx);
                    z += l;
                }
                for (int dd = 0; dd < D; ++dd) {
                    double acc = 0;
                    for (int u = 0; u < T; ++u) acc += logits[u] / z * v[u * D + dd];
                    double got = out.data[(static_cast<std::size_t>(h) * D + dd) * T + t];
                    if (std::abs(got - acc) >= 1e-6) ok = false;
                }
            }
        }
    }
    // Haar: perfect reconstruction and zero high-pass on constants
    std::vector<double> plane(14 * 12);
    for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = fdg::counter_uniform(8, 97, i);
    fdg::WaveletSubbands sb = fdg::haar_dwt2(plane, 14, 12);
    auto back = fdg::haar_idwt2(sb);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        std::size_t y = i / 14, x = i % 14;
        if (std::abs(back[y * 14 + x] - plane[i]) >= 1e-6) ok = false;
    }
    std::vector<double> flat(16, 2.0);
    fdg::WaveletSubbands fc = fdg::haar_dwt2(flat, 4, 4);
    for (double v : fc.lh) ok = ok && std::abs(v) < 1e-12;
    for (double v : fc.hl) ok = ok && std::abs(v) < 1e-12;
    for (double v : fc.hh) ok = ok && std::abs(v) < 1e-12;
    report(6, "cross-attention and Haar wavelet properties", ok);
}

// ---------------------------------------------------------------------------
// 7. Full reverse diffusion recovers the Gaussian data distribution.
static void criterion7() {
    auto start = std::chrono::steady_clock::now();
    const double mu = 0.3, sigma = 0.1;
    fdg::NoiseSchedule s = fdg::make_schedule(1000, 1e-4, 0.02);
    fdg::AnalyticGaussianDenoiser den(mu, sigma);
    // 10^4 independent scalar trajectories batched as one 100x100 field
    const int W = 100, H = 100;
    fdg::ImageF32 j = fdg::gaussian_field(W, H, 1, 2024, 1001);
    fdg::ImageF32 cond(W, H, 1, 0.0f);
    for (int t = 1000; t >= 1; --t) {
        fdg::ImageF32 eps = den.estimate(cond, j, s.gamma_at(t), nullptr);
        if (t > 1) {
            fdg::ImageF32 noise = fdg::gaussian_field(W, H, 1, 2024, static_cast<std::uint64_t>(t));
            j = fdg::reverse_step(j, eps, t, s, &noise);
        } else {
            j = fdg::reverse_step(j, eps, t, s, nullptr);
        }
    }
    double acc = 0, acc2 = 0;
    for (float v : j.data) {
        acc += v;
        acc2 += static_cast<double>(v) * v;
    }
    double mean = acc / j.data.size();
    double sd = std::sqrt(acc2 / j.data.size() - mean * mean);

    // single-step inversion identity
    fdg::NoiseSchedule one = fdg::make_schedule(1, 0.3, 0.3);
    fdg::ImageF32 j0 = testutil::random_image(10, 10, 1, 70);
    fdg::ImageF32 eps = testutil::random_image(10, 10, 1, 71);
    fdg::ImageF32 rec = fdg::reverse_step(fdg::forward_sample(j0, 1, eps, one), eps, 1, one, nullptr);
    double worst = 0.0;
    for (std::size_t i = 0; i < j0.data.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(rec.data[i]) - j0.data[i]));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream d;
    d << "mean " << mean << " (target 0.3 +/- 3%), std " << sd << " (target 0.1 +/- 5%), inversion "
      << worst << ", " << secs << " s";
    report(7, "reverse sampler recovers N(0.3, 0.1^2)",
           std::abs(mean - mu) / mu < 0.03 && std::abs(sd - sigma) / sigma < 0.05 && worst < 1e-5 &&
               secs < 300.0,
           d.str());
}

// ---------------------------------------------------------------------------
// 8. Zero-denoiser training loss.
static void criterion8() {
    struct Zero : fdg::Denoiser {
        fdg::ImageF32 estimate(const fdg::ImageF32&, const fdg::ImageF32& noisy, double,
                               const fdg::CompressionSpectrum*) const override {
            return fdg::ImageF32(noisy.width, noisy.height, noisy.channels, 0.0f);
        }
    } zero;
    fdg::NoiseSchedule s = fdg::make_schedule(100, 1e-4, 0.02);
    fdg::ImageF32 j0(1000, 1000, 1, 0.5f);
    fdg::ImageF32 eps(1000, 1000, 1);
    for (std::size_t i = 0; i < eps.data.size(); ++i)
        eps.data[i] = static_cast<float>(fdg::counter_normal(88, 1, i));
    double loss = fdg::training_loss(zero, j0, j0, 50, eps, s);
    double target = std::sqrt(2.0 / std::numbers::pi);
    std::ostringstream d;
    d << "loss " << loss << " vs sqrt(2/pi) " << target;
    report(8, "zero-denoiser loss equals the standard-normal absolute moment",
           std::abs(loss - target) / target < 0.02, d.str());
}

// ---------------------------------------------------------------------------
// 9. Patching and fusion.
static void criterion9() {
    bool ok = true;
    ok = ok && fdg::extract_patches(96, 96, 64, 16).count() == 9;
    fdg::PatchGrid g100 = fdg::extract_patches(100, 100, 64, 16);
    ok = ok && g100.count() == 16;
    std::vector<int> cols;
    for (int i = 0; i < 4; ++i) cols.push_back(g100.anchors[i].second);
    ok = ok && cols == std::vector<int>{0, 16, 32, 36};

    fdg::PatchGrid g = fdg::extract_patches(30, 22, 8, 5);
    std::vector<fdg::ImageF32> est;
    for (int i = 0; i < g.count(); ++i) est.push_back(testutil::random_image(8, 8, 1, 9000 + i));
    fdg::ImageF32 fused = fdg::fuse_noise_estimates(est, g, 30, 22, 1);
    for (int y = 0; y < 22 && ok; ++y)
        for (int x = 0; x < 30 && ok; ++x) {
            float acc = 0.0f;
            int n = 0;
            for (int i = 0; i < g.count(); ++i) {
                auto [ar, ac] = g.anchors[i];
                if (y >= ar && y < ar + 8 && x >= ac && x < ac + 8) {
                    acc += est[i].at(y - ar, x - ac, 0);
                    ++n;
                }
            }
            if (fused.at(y, x, 0) != acc / static_cast<float>(n)) ok = false;
        }

    // reduction: whole-image patch + zero-offset predictor == vanilla sampler
    const int W = 24, H = 24;
    fdg::ImageF32 input = testutil::synthetic_scene(W, H, 95);
    fdg::PassthroughDecomposer dec;
    fdg::AnalyticGaussianDenoiser den(0.3, 0.1);
    fdg::ZeroOffsetPredictor pred;
    fdg::SamplerConfig cfg;
    cfg.steps = 30;
    cfg.patch = W;
    cfg.stride = 8;
    cfg.seed = 2718;
    fdg::ImageF32 out = fdg::restore(input, dec, den, pred, cfg);
    fdg::NoiseSchedule s = fdg::make_schedule(cfg.steps, cfg.beta_min, cfg.beta_max);
    fdg::ImageF32 j = fdg::gaussian_field(W, H, 3, cfg.seed, static_cast<std::uint64_t>(cfg.steps) + 1);
    for (int t = cfg.steps; t >= 1; --t) {
        fdg::ImageF32 eps = den.estimate(input, j, s.gamma_at(t), nullptr);
        if (t > 1) {
            fdg::ImageF32 noise = fdg::gaussian_field(W, H, 3, cfg.seed, static_cast<std::uint64_t>(t));
            j = fdg::reverse_step(j, eps, t, s, &noise);
        } else {
            j = fdg::reverse_step(j, eps, t, s, nullptr);
        }
    }
    for (auto& v : j.data) v = std::clamp(v, 0.0f, 1.0f);
    ok = ok && out.data == j.data;
    report(9, "patch grid, fusion and whole-image reduction", ok);
}

// ---------------------------------------------------------------------------
// 10. CLI determinism across runs and FDG_THREADS.
static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

static void criterion10() {
    std::string dir = testutil::scratch_dir("acceptance_cli");
    std::string scene = dir + "/scene.ppm";
    fdg::save_ppm(fdg::to_u8(testutil::synthetic_scene(80, 80, 321)), scene);
    auto run = [&](const std::string& out, const std::string& threads) {
        std::string cmd;
        if (!threads.empty()) cmd += "FDG_THREADS=" + threads + " ";
        cmd += std::string(FDG_CLI_PATH) + " restore --input " + scene +
               " --steps 6 --patch 64 --stride 16 --seed 13 --predictor heuristic --out " + out +
               " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    bool ran = run(dir + "/r1", "") && run(dir + "/r2", "") && run(dir + "/t1", "1") &&
               run(dir + "/t4", "4");
    std::string a = slurp(dir + "/r1/restored.ppm");
    bool ok = ran && !a.empty() && a == slurp(dir + "/r2/restored.ppm") &&
              a == slurp(dir + "/t1/restored.ppm") && a == slurp(dir + "/t4/restored.ppm");
    report(10, "CLI restore byte-identical across runs and thread settings", ok);
}

// ---------------------------------------------------------------------------
// 11. Loss maps show more compression damage where haze is denser.
static void criterion11() {
    int wins = 0;
    const int scenes = 10;
    // Scene texture is built block-aligned with one dominant AC coefficient
    // whose magnitude equals the qf=80 quantizer step for its band: in the
    // nearly clear region (t=0.95) it quantizes to the adjacent step with a
    // small error, while attenuation in the dense region (t=0.45) pushes it
    // under the annihilation threshold so the detail is wiped entirely.
    fdg::QuantTable q = fdg::quant_table_for_qf(80, fdg::Plane::Luma);
    for (int sidx = 0; sidx < scenes; ++sidx) {
        const int W = 128, H = 64;
        std::uint64_t seed = 4000 + sidx;
        fdg::ImageF32 clear(W, H, 3);
        for (int by = 0; by < H / 8; ++by)
            for (int bx = 0; bx < W / 8; ++bx) {
                std::uint64_t bidx = static_cast<std::uint64_t>(by) * (W / 8) + bx;
                int u = 2 + static_cast<int>(4.0 * fdg::counter_uniform(seed, 2, 2 * bidx));
                int v = 2 + static_cast<int>(4.0 * fdg::counter_uniform(seed, 2, 2 * bidx + 1));
                fdg::Block8 f{};
                f[u * 8 + v] = q.at_uv(u, v);
                fdg::Block8 px = fdg::idct2d(f);
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x)
                        for (int c = 0; c < 3; ++c)
                            clear.at(by * 8 + y, bx * 8 + x, c) = static_cast<float>(
                                std::clamp(0.5 + px[y * 8 + x] / 255.0, 0.0, 1.0));
            }
        // spatially varying transmission: dense haze on the left half, nearly
        // clear on the right
        fdg::TransmissionMap t(W, H, 1);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                t.at(y, x, 0) = x < W / 2 ? 0.45f : 0.95f;
        fdg::ImageF32 hazy = fdg::apply_asm(clear, t, fdg::Airlight{0.8f, 0.8f, 0.8f});
        fdg::ImageU8 hazy_u8 = fdg::to_u8(hazy);
        fdg::JpegSimResult sim = fdg::simulate_jpeg(hazy_u8, 80);
        fdg::ImageF32 lm = fdg::loss_map(hazy_u8, sim.image);
        double lo = 0, hi = 0;
        long nlo = 0, nhi = 0;
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                for (int c = 0; c < 3; ++c) {
                    if (t.at(y, x, 0) < 0.5f) {
                        lo += lm.at(y, x, c);
                        ++nlo;
                    } else if (t.at(y, x, 0) > 0.9f) {
                        hi += lm.at(y, x, c);
                        ++nhi;
                    }
                }
        if (lo / nlo > hi / nhi) ++wins;
    }
    std::ostringstream d;
    d << wins << "/" << scenes << " scenes";
    report(11, "denser haze regions lose strictly more to compression", wins == scenes, d.str());
}

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    if (g_failures) {
        std::cout << g_failures << " criteria failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
