#pragma once
// Diffusion sampling machinery: noise schedules, forward/reverse processes,
// the analytic Gaussian denoiser oracle, per-patch timestep adjustment and
// sliding-window overlap fusion.

#include <cstdint>
#include <memory>
#include <vector>

#include "fdg/decomposition.hpp"
#include "fdg/haze.hpp"
#include "fdg/image.hpp"

namespace fdg {

struct NoiseSchedule {
    std::vector<double> alpha;  // alpha_t, index t-1
    std::vector<double> gamma;  // cumulative product up to t

    int steps() const { return static_cast<int>(alpha.size()); }
    double alpha_at(int t) const { return alpha[t - 1]; }
    double gamma_at(int t) const { return gamma[t - 1]; }
};

// alpha_t = 1 - beta_t with beta linearly spaced over [beta_min, beta_max].
NoiseSchedule make_schedule(int steps, double beta_min, double beta_max);

// J_t = sqrt(gamma_t) J_0 + sqrt(1 - gamma_t) eps
ImageF32 forward_sample(const ImageF32& j0, int t, const ImageF32& eps, const NoiseSchedule& s);

// J_{t-1} = (J_t - (1-alpha_t)/sqrt(1-gamma_t) eps_hat) / sqrt(alpha_t)
//           + sqrt(1-alpha_t) * noise        (noise forced to zero at t=1)
ImageF32 reverse_step(const ImageF32& j, const ImageF32& eps_hat, int t_hat,
                      const NoiseSchedule& s, const ImageF32* noise);

class Denoiser {
public:
    virtual ~Denoiser() = default;
    // Predicts the noise field given the conditional image, the noisy state
    // and the cumulative noise level; spectrum is optional side information
    // that oracle implementations may ignore.
    virtual ImageF32 estimate(const ImageF32& cond, const ImageF32& noisy, double gamma,
                              const CompressionSpectrum* spectrum) const = 0;
};

// Exact posterior-mean epsilon prediction for i.i.d. J0 ~ N(mu, sigma^2).
class AnalyticGaussianDenoiser : public Denoiser {
public:
    AnalyticGaussianDenoiser(double mu, double sigma);
    ImageF32 estimate(const ImageF32& cond, const ImageF32& noisy, double gamma,
                      const CompressionSpectrum* spectrum) const override;

private:
    double mu_;
    double sigma_;
};

// L1 between the denoiser's prediction on forward_sample(j0,t,eps) and eps.
double training_loss(const Denoiser& d, const ImageF32& cond, const ImageF32& j0, int t,
                     const ImageF32& eps, const NoiseSchedule& s);

struct PatchGrid {
    int patch = 0;   // p
    int stride = 0;  // r
    std::vector<std::pair<int, int>> anchors;  // (row, col), ascending
    std::vector<int> overlap;                  // per-pixel cover count, H*W

    int count() const { return static_cast<int>(anchors.size()); }
};

// Anchors at 0, r, 2r, ... plus a final flush anchor at dim-p per axis.
PatchGrid extract_patches(int width, int height, int p, int r);

// Per pixel: mean of the estimates of all covering patches, accumulated in
// ascending patch-index order.
ImageF32 fuse_noise_estimates(const std::vector<ImageF32>& patch_eps, const PatchGrid& g,
                              int width, int height, int channels);

struct DadtpConfig {
    double kappa = 20.0;
    int delta_max = 50;
};

// delta = round(kappa * (1 - mean_t)) clamped to [0, delta_max];
// t_hat = min(t + delta, T).
int dadtp_heuristic(double mean_transmission, int t, int total_steps, const DadtpConfig& cfg);

class TimestepPredictor {
public:
    virtual ~TimestepPredictor() = default;
    virtual int adjust(double mean_transmission, int t, int total_steps) const = 0;
};

class ZeroOffsetPredictor : public TimestepPredictor {
public:
    int adjust(double, int t, int) const override { return t; }
};

class HeuristicPredictor : public TimestepPredictor {
public:
    explicit HeuristicPredictor(DadtpConfig cfg = {}) : cfg_(cfg) {}
    int adjust(double mean_transmission, int t, int total_steps) const override {
        return dadtp_heuristic(mean_transmission, t, total_steps, cfg_);
    }

private:
    DadtpConfig cfg_;
};

struct SamplerConfig {
    int steps = 1000;
    double beta_min = 1e-4;
    double beta_max = 0.02;
    int patch = 64;
    int stride = 16;
    std::uint64_t seed = 0;
    bool transmission_on_corrected = true;  // DADTP stats from corrected image
    HazeParams haze;                        // DCP parameters for the transmission map
    int snapshot_every = 0;                 // dump J_t as FDGT every k steps when > 0
    std::string snapshot_dir;
};

// Full patch-based reverse process. Deterministic given (inputs, seed,
// config) regardless of worker-thread count.
ImageF32 restore(const ImageF32& compressed_hazy, const Decomposer& decomposer,
                 const Denoiser& denoiser, const TimestepPredictor& predictor,
                 const SamplerConfig& cfg);

// Deterministic standard-normal field; `stream` keys the sampling step.
ImageF32 gaussian_field(int width, int height, int channels, std::uint64_t seed, std::uint64_t stream);

}  // namespace fdg
