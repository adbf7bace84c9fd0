#include "fdg/jpeg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdg {

namespace {

// basis[u][m] = alpha(u) * cos((2m+1) u pi / 16)
struct DctBasis {
    double m[8][8];
    DctBasis() {
        for (int u = 0; u < 8; ++u) {
            double a = (u == 0) ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int k = 0; k < 8; ++k)
                m[u][k] = a * std::cos((2 * k + 1) * u * std::numbers::pi / 16.0);
        }
    }
};
const DctBasis kBasis;

// standard zigzag walk over the 8x8 grid, (u,v) = (row, col)
struct ZigzagTables {
    std::array<std::pair<int, int>, 64> to_uv;
    int to_zz[8][8];
    ZigzagTables() {
        int u = 0, v = 0;
        for (int zz = 0; zz < 64; ++zz) {
            to_uv[zz] = {u, v};
            to_zz[u][v] = zz;
            if ((u + v) % 2 == 0) {  // moving up-right
                if (v == 7) ++u;
                else if (u == 0) ++v;
                else { --u; ++v; }
            } else {  // moving down-left
                if (u == 7) ++v;
                else if (v == 0) ++u;
                else { ++u; --v; }
            }
        }
    }
};
const ZigzagTables kZigzag;

// ITU-T T.81 Annex K base quantization tables (natural order)
constexpr std::uint16_t kBaseLuma[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,
    12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,
    14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,
    24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::uint16_t kBaseChroma[64] = {
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99};

}  // namespace

std::uint16_t QuantTable::at_uv(int u, int v) const { return zig[uv_to_zigzag(u, v)]; }

Block8 dct2d(const Block8& x) {
    // F = M X M^T via temp = M X
    double tmp[8][8];
    for (int u = 0; u < 8; ++u)
        for (int n = 0; n < 8; ++n) {
            double s = 0.0;
            for (int m = 0; m < 8; ++m) s += kBasis.m[u][m] * x[m * 8 + n];
            tmp[u][n] = s;
        }
    Block8 f{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int n = 0; n < 8; ++n) s += tmp[u][n] * kBasis.m[v][n];
            f[u * 8 + v] = s;
        }
    return f;
}

Block8 idct2d(const Block8& f) {
    // X = M^T F M
    double tmp[8][8];
    for (int m = 0; m < 8; ++m)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u) s += kBasis.m[u][m] * f[u * 8 + v];
            tmp[m][v] = s;
        }
    Block8 x{};
    for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 8; ++n) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v) s += tmp[m][v] * kBasis.m[v][n];
            x[m * 8 + n] = s;
        }
    return x;
}

std::pair<int, int> zigzag_to_uv(int zz) {
    if (zz < 0 || zz > 63) throw std::invalid_argument("zigzag_to_uv: index out of range");
    return kZigzag.to_uv[zz];
}

int uv_to_zigzag(int u, int v) {
    if (u < 0 || u > 7 || v < 0 || v > 7) throw std::invalid_argument("uv_to_zigzag: index out of range");
    return kZigzag.to_zz[u][v];
}

QuantTable quant_table_for_qf(int qf, Plane plane) {
    if (qf < 1 || qf > 100) throw std::invalid_argument("quant_table_for_qf: qf must be in [1,100]");
    const std::uint16_t* base = (plane == Plane::Luma) ? kBaseLuma : kBaseChroma;
    int scale = (qf < 50) ? 5000 / qf : 200 - 2 * qf;
    QuantTable q;
    for (int zz = 0; zz < 64; ++zz) {
        auto [u, v] = kZigzag.to_uv[zz];
        int e = (base[u * 8 + v] * scale + 50) / 100;
        if (e < 1) e = 1;
        if (e > 255) e = 255;
        q.zig[zz] = static_cast<std::uint16_t>(e);
    }
    return q;
}

CoeffBlock quantize(const Block8& f, const QuantTable& q, RoundingMode mode) {
    CoeffBlock c{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double ratio = f[u * 8 + v] / q.at_uv(u, v);
            double r;
            if (mode == RoundingMode::PlusHalfFloor) {
                r = std::floor(ratio + 0.5);
            } else {
                r = ratio >= 0.0 ? std::floor(ratio + 0.5) : std::ceil(ratio - 0.5);
            }
            c[u * 8 + v] = static_cast<int>(r);
        }
    return c;
}

Block8 dequantize(const CoeffBlock& c, const QuantTable& q) {
    Block8 f{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v)
            f[u * 8 + v] = static_cast<double>(c[u * 8 + v]) * q.at_uv(u, v);
    return f;
}

namespace {

// replicate-pad a single channel plane (0..255 scale, level-shifted later)
std::vector<double> pad_plane(const ImageF32& img, int ch, int pw, int ph) {
    std::vector<double> p(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y) {
        int sy = y < img.height ? y : img.height - 1;
        for (int x = 0; x < pw; ++x) {
            int sx = x < img.width ? x : img.width - 1;
            p[static_cast<std::size_t>(y) * pw + x] = img.at(sy, sx, ch);
        }
    }
    return p;
}

}  // namespace

JpegSimResult simulate_jpeg(const ImageU8& img, int qf, RoundingMode mode) {
    if (img.width == 0 || img.height == 0) throw std::invalid_argument("simulate_jpeg: empty image");
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("simulate_jpeg: channels must be 1 or 3");

    JpegSimResult res;
    res.qf = qf;
    res.luma = quant_table_for_qf(qf, Plane::Luma);
    res.chroma = quant_table_for_qf(qf, Plane::Chroma);

    ImageF32 f = to_f32(img);
    ImageF32 planes = (img.channels == 3) ? rgb_to_ycbcr(f) : f;

    const int pw = (img.width + 7) / 8 * 8;
    const int ph = (img.height + 7) / 8 * 8;
    const int bw = pw / 8, bh = ph / 8;

    ImageF32 recon(img.width, img.height, img.channels);
    res.components.resize(img.channels);
    for (int ch = 0; ch < img.channels; ++ch) {
        const QuantTable& q = (ch == 0) ? res.luma : res.chroma;
        auto plane = pad_plane(planes, ch, pw, ph);
        CoeffGrid grid;
        grid.blocks_w = bw;
        grid.blocks_h = bh;
        grid.blocks.resize(static_cast<std::size_t>(bw) * bh);
        std::vector<double> rplane(plane.size());
        for (int by = 0; by < bh; ++by)
            for (int bx = 0; bx < bw; ++bx) {
                Block8 b{};
                for (int m = 0; m < 8; ++m)
                    for (int n = 0; n < 8; ++n)
                        b[m * 8 + n] = plane[static_cast<std::size_t>(by * 8 + m) * pw + bx * 8 + n] * 255.0 - 128.0;
                CoeffBlock c = quantize(dct2d(b), q, mode);
                grid.at(by, bx) = c;
                Block8 r = idct2d(dequantize(c, q));
                for (int m = 0; m < 8; ++m)
                    for (int n = 0; n < 8; ++n)
                        rplane[static_cast<std::size_t>(by * 8 + m) * pw + bx * 8 + n] = (r[m * 8 + n] + 128.0) / 255.0;
            }
        res.components[ch] = std::move(grid);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                recon.at(y, x, ch) = static_cast<float>(rplane[static_cast<std::size_t>(y) * pw + x]);
    }

    ImageF32 rgb = (img.channels == 3) ? ycbcr_to_rgb(recon) : recon;
    for (auto& v : rgb.data) {
        if (v < 0.0f) v = 0.0f;
        if (v > 1.0f) v = 1.0f;
    }
    res.image = to_u8(rgb);
    return res;
}

ImageF32 loss_map(const ImageU8& orig, const ImageU8& compressed) {
    if (orig.width != compressed.width || orig.height != compressed.height ||
        orig.channels != compressed.channels)
        throw std::invalid_argument("loss_map: dimension mismatch");
    ImageF32 out(orig.width, orig.height, orig.channels);
    for (std::size_t i = 0; i < orig.data.size(); ++i)
        out.data[i] = std::abs(static_cast<int>(orig.data[i]) - static_cast<int>(compressed.data[i])) / 255.0f;
    return out;
}

}  // namespace fdg
