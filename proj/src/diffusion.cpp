#include "fdg/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "fdg/rng.hpp"

namespace fdg {

NoiseSchedule make_schedule(int steps, double beta_min, double beta_max) {
    if (steps < 1) throw std::invalid_argument("make_schedule: need at least one step");
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
        throw std::invalid_argument("make_schedule: require 0 < beta_min <= beta_max < 1");
    NoiseSchedule s;
    s.alpha.resize(steps);
    s.gamma.resize(steps);
    double g = 1.0;
    for (int t = 0; t < steps; ++t) {
        double beta = (steps == 1) ? beta_min
                                   : beta_min + (beta_max - beta_min) * t / static_cast<double>(steps - 1);
        s.alpha[t] = 1.0 - beta;
        g *= s.alpha[t];
        s.gamma[t] = g;
    }
    return s;
}

ImageF32 forward_sample(const ImageF32& j0, int t, const ImageF32& eps, const NoiseSchedule& s) {
    if (!j0.same_shape(eps)) throw std::invalid_argument("forward_sample: shape mismatch");
    if (t < 1 || t > s.steps()) throw std::invalid_argument("forward_sample: t out of range");
    const double g = s.gamma_at(t);
    const double a = std::sqrt(g), b = std::sqrt(1.0 - g);
    ImageF32 out(j0.width, j0.height, j0.channels);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = static_cast<float>(a * j0.data[i] + b * eps.data[i]);
    return out;
}

ImageF32 reverse_step(const ImageF32& j, const ImageF32& eps_hat, int t_hat,
                      const NoiseSchedule& s, const ImageF32* noise) {
    if (!j.same_shape(eps_hat)) throw std::invalid_argument("reverse_step: shape mismatch");
    if (t_hat < 1 || t_hat > s.steps()) throw std::invalid_argument("reverse_step: t out of range");
    const double alpha = s.alpha_at(t_hat);
    const double gamma = s.gamma_at(t_hat);
    if (gamma >= 1.0) throw std::invalid_argument("reverse_step: degenerate schedule (gamma = 1)");
    // single-precision update, matching the patched sampler's fused-field
    // arithmetic so the whole-image reduction case is bit-exact
    const float inv_sqrt_alpha = static_cast<float>(1.0 / std::sqrt(alpha));
    const float coef = static_cast<float>((1.0 - alpha) / std::sqrt(1.0 - gamma));
    const float sigma = (t_hat == 1) ? 0.0f : static_cast<float>(std::sqrt(1.0 - alpha));
    ImageF32 out(j.width, j.height, j.channels);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        float v = inv_sqrt_alpha * (j.data[i] - coef * eps_hat.data[i]);
        if (noise && sigma != 0.0f) v += sigma * noise->data[i];
        out.data[i] = v;
    }
    return out;
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (sigma < 0.0) throw std::invalid_argument("analytic denoiser: sigma must be non-negative");
}

ImageF32 AnalyticGaussianDenoiser::estimate(const ImageF32&, const ImageF32& noisy, double gamma,
                                            const CompressionSpectrum*) const {
    if (gamma >= 1.0) throw std::invalid_argument("analytic denoiser: gamma = 1 is degenerate");
    const double sg = std::sqrt(gamma);
    const double var = sigma_ * sigma_;
    const double shrink = sg * var / (gamma * var + 1.0 - gamma);
    const double inv = 1.0 / std::sqrt(1.0 - gamma);
    ImageF32 out(noisy.width, noisy.height, noisy.channels);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        double jt = noisy.data[i];
        double post_mean = mu_ + shrink * (jt - sg * mu_);
        out.data[i] = static_cast<float>((jt - sg * post_mean) * inv);
    }
    return out;
}

double training_loss(const Denoiser& d, const ImageF32& cond, const ImageF32& j0, int t,
                     const ImageF32& eps, const NoiseSchedule& s) {
    ImageF32 jt = forward_sample(j0, t, eps, s);
    ImageF32 pred = d.estimate(cond, jt, s.gamma_at(t), nullptr);
    double acc = 0.0;
    for (std::size_t i = 0; i < eps.data.size(); ++i)
        acc += std::abs(static_cast<double>(pred.data[i]) - eps.data[i]);
    return acc / static_cast<double>(eps.data.size());
}

PatchGrid extract_patches(int width, int height, int p, int r) {
    if (p < 1 || r < 1) throw std::invalid_argument("extract_patches: p and r must be positive");
    if (width < p || height < p) throw std::invalid_argument("extract_patches: image smaller than patch");
    auto axis_anchors = [&](int dim) {
        std::vector<int> a;
        for (int pos = 0; pos + p <= dim; pos += r) a.push_back(pos);
        if (a.back() != dim - p) a.push_back(dim - p);
        return a;
    };
    PatchGrid g;
    g.patch = p;
    g.stride = r;
    auto rows = axis_anchors(height);
    auto cols = axis_anchors(width);
    for (int ar : rows)
        for (int ac : cols) g.anchors.emplace_back(ar, ac);
    g.overlap.assign(static_cast<std::size_t>(width) * height, 0);
    for (auto [ar, ac] : g.anchors)
        for (int y = ar; y < ar + p; ++y)
            for (int x = ac; x < ac + p; ++x) g.overlap[static_cast<std::size_t>(y) * width + x] += 1;
    return g;
}

ImageF32 fuse_noise_estimates(const std::vector<ImageF32>& patch_eps, const PatchGrid& g,
                              int width, int height, int channels) {
    if (patch_eps.size() != g.anchors.size())
        throw std::invalid_argument("fuse_noise_estimates: one estimate per patch required");
    ImageF32 acc(width, height, channels);
    for (std::size_t i = 0; i < g.anchors.size(); ++i) {
        const auto& [ar, ac] = g.anchors[i];
        const ImageF32& e = patch_eps[i];
        if (e.width != g.patch || e.height != g.patch || e.channels != channels)
            throw std::invalid_argument("fuse_noise_estimates: patch estimate has wrong shape");
        for (int y = 0; y < g.patch; ++y)
            for (int x = 0; x < g.patch; ++x)
                for (int c = 0; c < channels; ++c)
                    acc.at(ar + y, ac + x, c) += e.at(y, x, c);
    }
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            float n = static_cast<float>(g.overlap[static_cast<std::size_t>(y) * width + x]);
            for (int c = 0; c < channels; ++c) acc.at(y, x, c) /= n;
        }
    return acc;
}

int dadtp_heuristic(double mean_transmission, int t, int total_steps, const DadtpConfig& cfg) {
    int delta = static_cast<int>(std::lround(cfg.kappa * (1.0 - mean_transmission)));
    delta = std::clamp(delta, 0, cfg.delta_max);
    return std::min(t + delta, total_steps);
}

ImageF32 gaussian_field(int width, int height, int channels, std::uint64_t seed, std::uint64_t stream) {
    ImageF32 out(width, height, channels);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = static_cast<float>(counter_normal(seed, stream, i));
    return out;
}

namespace {

int worker_threads() {
    if (const char* env = std::getenv("FDG_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// static split over [0, n); results land in preallocated slots so thread
// count cannot affect the outcome
template <typename Fn>
void parallel_for(int n, const Fn& fn) {
    int workers = std::min(worker_threads(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += workers) fn(i);
        });
    for (auto& th : pool) th.join();
}

ImageF32 crop(const ImageF32& img, int top, int left, int size) {
    ImageF32 out(size, size, img.channels);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = img.at(top + y, left + x, c);
    return out;
}

}  // namespace

ImageF32 restore(const ImageF32& compressed_hazy, const Decomposer& decomposer,
                 const Denoiser& denoiser, const TimestepPredictor& predictor,
                 const SamplerConfig& cfg) {
    const int w = compressed_hazy.width, h = compressed_hazy.height, ch = compressed_hazy.channels;
    NoiseSchedule schedule = make_schedule(cfg.steps, cfg.beta_min, cfg.beta_max);

    DecompositionResult dec = decomposer.run(compressed_hazy);
    const ImageF32& cond = dec.corrected;

    // per-patch mean transmission for the timestep predictor
    TransmissionMap tmap(w, h, 1, 1.0f);
    if (ch == 3) {
        const ImageF32& basis = cfg.transmission_on_corrected ? cond : compressed_hazy;
        tmap = estimate_transmission(basis, estimate_airlight(basis, cfg.haze.window), cfg.haze);
    }
    PatchGrid grid = extract_patches(w, h, cfg.patch, cfg.stride);
    const int np = grid.count();
    std::vector<double> patch_mean_t(np);
    for (int i = 0; i < np; ++i) {
        auto [ar, ac] = grid.anchors[i];
        double acc = 0.0;
        for (int y = 0; y < cfg.patch; ++y)
            for (int x = 0; x < cfg.patch; ++x) acc += tmap.at(ar + y, ac + x, 0);
        patch_mean_t[i] = acc / (static_cast<double>(cfg.patch) * cfg.patch);
    }

    ImageF32 j = gaussian_field(w, h, ch, cfg.seed, static_cast<std::uint64_t>(cfg.steps) + 1);

    std::vector<ImageF32> eps_patches(np);
    std::vector<ImageF32> a1_patches(np), a2_patches(np), sg_patches(np);
    for (int t = cfg.steps; t >= 1; --t) {
        parallel_for(np, [&](int i) {
            auto [ar, ac] = grid.anchors[i];
            int t_hat = predictor.adjust(patch_mean_t[i], t, cfg.steps);
            double alpha = schedule.alpha_at(t_hat);
            double gamma = schedule.gamma_at(t_hat);
            ImageF32 cond_patch = crop(cond, ar, ac, cfg.patch);
            ImageF32 j_patch = crop(j, ar, ac, cfg.patch);
            eps_patches[i] = denoiser.estimate(cond_patch, j_patch, gamma, &dec.spectrum);
            // scalar per-patch coefficients, written through the same fusion
            a1_patches[i] = ImageF32(cfg.patch, cfg.patch, ch, static_cast<float>(1.0 / std::sqrt(alpha)));
            a2_patches[i] = ImageF32(cfg.patch, cfg.patch, ch,
                                     static_cast<float>((1.0 - alpha) / std::sqrt(1.0 - gamma)));
            sg_patches[i] = ImageF32(cfg.patch, cfg.patch, ch, static_cast<float>(std::sqrt(1.0 - alpha)));
        });
        ImageF32 eps_bar = fuse_noise_estimates(eps_patches, grid, w, h, ch);
        ImageF32 a1 = fuse_noise_estimates(a1_patches, grid, w, h, ch);
        ImageF32 a2 = fuse_noise_estimates(a2_patches, grid, w, h, ch);
        ImageF32 sg = fuse_noise_estimates(sg_patches, grid, w, h, ch);
        if (t > 1) {
            ImageF32 noise = gaussian_field(w, h, ch, cfg.seed, static_cast<std::uint64_t>(t));
            for (std::size_t i = 0; i < j.data.size(); ++i)
                j.data[i] = a1.data[i] * (j.data[i] - a2.data[i] * eps_bar.data[i]) +
                            sg.data[i] * noise.data[i];
        } else {
            for (std::size_t i = 0; i < j.data.size(); ++i)
                j.data[i] = a1.data[i] * (j.data[i] - a2.data[i] * eps_bar.data[i]);
        }
        if (cfg.snapshot_every > 0 && t % cfg.snapshot_every == 0 && !cfg.snapshot_dir.empty())
            save_tensor(image_to_tensor(j), cfg.snapshot_dir + "/state_t" + std::to_string(t) + ".fdgt");
    }
    for (auto& v : j.data) v = std::clamp(v, 0.0f, 1.0f);
    return j;
}

}  // namespace fdg
