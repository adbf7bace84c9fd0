#include "fdg/freq_guidance.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fdg {

WaveletSubbands haar_dwt2(const std::vector<double>& plane, int width, int height) {
    if (width <= 0 || height <= 0 || plane.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("haar_dwt2: empty or inconsistent plane");
    const int pw = (width + 1) / 2 * 2;
    const int ph = (height + 1) / 2 * 2;
    auto sample = [&](int y, int x) {
        if (y >= height) y = height - 1;
        if (x >= width) x = width - 1;
        return plane[static_cast<std::size_t>(y) * width + x];
    };
    WaveletSubbands sb;
    sb.width = pw / 2;
    sb.height = ph / 2;
    const std::size_t n = static_cast<std::size_t>(sb.width) * sb.height;
    sb.ll.resize(n);
    sb.lh.resize(n);
    sb.hl.resize(n);
    sb.hh.resize(n);
    for (int j = 0; j < sb.height; ++j)
        for (int i = 0; i < sb.width; ++i) {
            double a = sample(2 * j, 2 * i);
            double b = sample(2 * j, 2 * i + 1);
            double c = sample(2 * j + 1, 2 * i);
            double d = sample(2 * j + 1, 2 * i + 1);
            std::size_t k = static_cast<std::size_t>(j) * sb.width + i;
            sb.ll[k] = (a + b + c + d) / 2.0;
            sb.lh[k] = (a - b + c - d) / 2.0;
            sb.hl[k] = (a + b - c - d) / 2.0;
            sb.hh[k] = (a - b - c + d) / 2.0;
        }
    return sb;
}

std::vector<double> haar_idwt2(const WaveletSubbands& sb) {
    const int w = sb.width * 2, h = sb.height * 2;
    std::vector<double> plane(static_cast<std::size_t>(w) * h);
    for (int j = 0; j < sb.height; ++j)
        for (int i = 0; i < sb.width; ++i) {
            std::size_t k = static_cast<std::size_t>(j) * sb.width + i;
            double ll = sb.ll[k], lh = sb.lh[k], hl = sb.hl[k], hh = sb.hh[k];
            plane[static_cast<std::size_t>(2 * j) * w + 2 * i] = (ll + lh + hl + hh) / 2.0;
            plane[static_cast<std::size_t>(2 * j) * w + 2 * i + 1] = (ll - lh + hl - hh) / 2.0;
            plane[static_cast<std::size_t>(2 * j + 1) * w + 2 * i] = (ll + lh - hl - hh) / 2.0;
            plane[static_cast<std::size_t>(2 * j + 1) * w + 2 * i + 1] = (ll - lh - hl + hh) / 2.0;
        }
    return plane;
}

FeatureMap extract_high_freq(const FeatureMap& x) {
    const int hw = (x.width + 1) / 2;
    const int hh = (x.height + 1) / 2;
    FeatureMap out(3 * x.channels, hh, hw);
    for (int c = 0; c < x.channels; ++c) {
        std::vector<double> plane(static_cast<std::size_t>(x.width) * x.height);
        for (int y = 0; y < x.height; ++y)
            for (int xx = 0; xx < x.width; ++xx)
                plane[static_cast<std::size_t>(y) * x.width + xx] = x.at(c, y, xx);
        WaveletSubbands sb = haar_dwt2(plane, x.width, x.height);
        for (int y = 0; y < hh; ++y)
            for (int xx = 0; xx < hw; ++xx) {
                std::size_t k = static_cast<std::size_t>(y) * sb.width + xx;
                out.at(3 * c + 0, y, xx) = sb.lh[k];
                out.at(3 * c + 1, y, xx) = sb.hl[k];
                out.at(3 * c + 2, y, xx) = sb.hh[k];
            }
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_double(std::uint64_t h) { return static_cast<double>(h >> 11) / 9007199254740992.0; }

}  // namespace

AttentionWeights random_attention_weights(int channels, int heads, std::uint64_t seed) {
    if (heads < 1 || channels % heads != 0)
        throw std::invalid_argument("attention weights: head count must divide channels");
    AttentionWeights w;
    w.channels = channels;
    w.heads = heads;
    const int dh = channels / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(channels));
    std::uint64_t ctr = seed;
    auto fill = [&](std::vector<std::vector<double>>& mats) {
        mats.resize(heads);
        for (auto& m : mats) {
            m.resize(static_cast<std::size_t>(channels) * dh);
            for (auto& v : m) v = (2.0 * unit_double(splitmix64(ctr++)) - 1.0) * scale;
        }
    };
    fill(w.w_q);
    fill(w.w_k);
    fill(w.w_v);
    return w;
}

void save_attention_weights(const AttentionWeights& w, const std::string& tensor_path,
                            const std::string& manifest_path) {
    const int dh = w.channels / w.heads;
    TensorF32 t;
    t.dims = {static_cast<std::uint32_t>(w.heads), 3, static_cast<std::uint32_t>(w.channels),
              static_cast<std::uint32_t>(dh)};
    for (int h = 0; h < w.heads; ++h)
        for (const auto* mat : {&w.w_q[h], &w.w_k[h], &w.w_v[h]})
            for (double v : *mat) t.data.push_back(static_cast<float>(v));
    save_tensor(t, tensor_path);
    nlohmann::json manifest = {{"channels", w.channels}, {"heads", w.heads},
                               {"head_dim", dh}, {"layout", "heads x (Wq,Wk,Wv) x C x C/h"}};
    std::ofstream out(manifest_path);
    out << manifest.dump(2) << "\n";
}

AttentionWeights load_attention_weights(const std::string& tensor_path) {
    TensorF32 t = load_tensor(tensor_path);
    if (t.dims.size() != 4 || t.dims[1] != 3)
        throw std::runtime_error("attention weights: expected rank-4 tensor (heads,3,C,C/h)");
    AttentionWeights w;
    w.heads = static_cast<int>(t.dims[0]);
    w.channels = static_cast<int>(t.dims[2]);
    const int dh = static_cast<int>(t.dims[3]);
    if (w.channels != dh * w.heads)
        throw std::runtime_error("attention weights: head_dim * heads must equal channels");
    std::size_t pos = 0;
    auto read_mat = [&]() {
        std::vector<double> m(static_cast<std::size_t>(w.channels) * dh);
        for (auto& v : m) v = t.data[pos++];
        return m;
    };
    for (int h = 0; h < w.heads; ++h) {
        w.w_q.push_back(read_mat());
        w.w_k.push_back(read_mat());
        w.w_v.push_back(read_mat());
    }
    return w;
}

FeatureMap cross_attention(const FeatureMap& x, const FeatureMap& x_h, const FeatureMap& x_d,
                           const AttentionWeights& w) {
    const int c = x.channels;
    const int t = x.tokens();
    if (x_h.channels != c || x_d.channels != c || x_h.tokens() != t || x_d.tokens() != t)
        throw std::invalid_argument("cross_attention: inputs must share channel and token counts");
    if (w.channels != c || w.heads < 1 || c % w.heads != 0)
        throw std::invalid_argument("cross_attention: weight shape mismatch");
    const int heads = w.heads;
    const int dh = c / heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

    // tokens are spatial positions in row-major order; token matrix is T x C
    auto token = [](const FeatureMap& f, int tok, int ch) {
        return f.data[(static_cast<std::size_t>(ch) * f.height + tok / f.width) * f.width + tok % f.width];
    };
    auto project = [&](const FeatureMap& f, const std::vector<double>& mat) {
        std::vector<double> out(static_cast<std::size_t>(t) * dh, 0.0);
        for (int i = 0; i < t; ++i)
            for (int ch = 0; ch < c; ++ch) {
                double v = token(f, i, ch);
                if (v == 0.0) continue;
                const double* row = &mat[static_cast<std::size_t>(ch) * dh];
                double* o = &out[static_cast<std::size_t>(i) * dh];
                for (int j = 0; j < dh; ++j) o[j] += v * row[j];
            }
        return out;
    };

    FeatureMap out(c, x.height, x.width);
    std::vector<double> logits(t), attn(t);
    for (int h = 0; h < heads; ++h) {
        auto q = project(x, w.w_q[h]);
        auto k = project(x_h, w.w_k[h]);
        auto v = project(x_d, w.w_v[h]);
        for (int i = 0; i < t; ++i) {
            double maxl = -1e300;
            for (int j = 0; j < t; ++j) {
                double dot = 0.0;
                for (int d = 0; d < dh; ++d)
                    dot += q[static_cast<std::size_t>(i) * dh + d] * k[static_cast<std::size_t>(j) * dh + d];
                logits[j] = dot * inv_sqrt;
                maxl = std::max(maxl, logits[j]);
            }
            double denom = 0.0;
            for (int j = 0; j < t; ++j) {
                attn[j] = std::exp(logits[j] - maxl);
                denom += attn[j];
            }
            for (int d = 0; d < dh; ++d) {
                double acc = 0.0;
                for (int j = 0; j < t; ++j) acc += attn[j] * v[static_cast<std::size_t>(j) * dh + d];
                out.data[(static_cast<std::size_t>(h * dh + d) * x.height + i / x.width) * x.width + i % x.width] =
                    acc / denom;
            }
        }
    }
    return out;
}

namespace {

// nearest-neighbor resample of one channel plane
FeatureMap nearest_resample(const FeatureMap& f, int oh, int ow) {
    FeatureMap out(f.channels, oh, ow);
    for (int c = 0; c < f.channels; ++c)
        for (int y = 0; y < oh; ++y) {
            int sy = std::min(f.height - 1, y * f.height / oh);
            for (int x = 0; x < ow; ++x) {
                int sx = std::min(f.width - 1, x * f.width / ow);
                out.at(c, y, x) = f.at(c, sy, sx);
            }
        }
    return out;
}

}  // namespace

FeatureMap hfcm_forward(const FeatureMap& x, const CompressionSpectrum& spectrum,
                        const AttentionWeights& w, bool residual) {
    const int c = x.channels;

    // keys: wavelet high frequencies, subbands averaged back to C channels,
    // nearest-upsampled to x's token grid
    FeatureMap hf = extract_high_freq(x);
    FeatureMap hf_c(c, hf.height, hf.width);
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < hf.height; ++y)
            for (int xx = 0; xx < hf.width; ++xx)
                hf_c.at(ch, y, xx) =
                    (hf.at(3 * ch, y, xx) + hf.at(3 * ch + 1, y, xx) + hf.at(3 * ch + 2, y, xx)) / 3.0;
    FeatureMap x_h = nearest_resample(hf_c, x.height, x.width);

    // values: per-block mean AC magnitude of the spectrum, block grid
    // resampled to x's grid, channels cycled up to C
    FeatureMap pooled(spectrum.channels, spectrum.blocks_h, spectrum.blocks_w);
    for (int sc = 0; sc < spectrum.channels; ++sc)
        for (int by = 0; by < spectrum.blocks_h; ++by)
            for (int bx = 0; bx < spectrum.blocks_w; ++bx) {
                const Block8& b = spectrum.at(sc, by, bx);
                double acc = 0.0;
                for (int k = 1; k < 64; ++k) acc += std::abs(b[k]);
                pooled.at(sc, by, bx) = acc / 63.0;
            }
    FeatureMap pooled_up = nearest_resample(pooled, x.height, x.width);
    FeatureMap x_d(c, x.height, x.width);
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < x.height; ++y)
            for (int xx = 0; xx < x.width; ++xx)
                x_d.at(ch, y, xx) = pooled_up.at(ch % spectrum.channels, y, xx);

    FeatureMap ca = cross_attention(x, x_h, x_d, w);
    if (!residual) return ca;
    FeatureMap out = x;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += ca.data[i];
    return out;
}

}  // namespace fdg
