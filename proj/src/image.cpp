#include "fdg/image.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fdg {

namespace {

std::uint8_t quantize_u8(float v) {
    double scaled = static_cast<double>(v) * 255.0;
    double rounded = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
    if (rounded < 0.0) return 0;
    if (rounded > 255.0) return 255;
    return static_cast<std::uint8_t>(rounded);
}

}  // namespace

ImageF32 to_f32(const ImageU8& img) {
    ImageF32 out(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = static_cast<float>(img.data[i]) / 255.0f;
    return out;
}

ImageU8 to_u8(const ImageF32& img) {
    ImageU8 out(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = quantize_u8(img.data[i]);
    return out;
}

ImageF32 rgb_to_ycbcr(const ImageF32& img) {
    if (img.channels != 3)
        throw std::invalid_argument("rgb_to_ycbcr: input must have 3 channels");
    ImageF32 out(img.width, img.height, 3);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        double r = img.data[3 * i + 0];
        double g = img.data[3 * i + 1];
        double b = img.data[3 * i + 2];
        double y = 0.299 * r + 0.587 * g + 0.114 * b;
        double cb = -0.168735891647416 * r - 0.331264108352584 * g + 0.5 * b + 0.5;
        double cr = 0.5 * r - 0.418687589158345 * g - 0.081312410841655 * b + 0.5;
        out.data[3 * i + 0] = static_cast<float>(y);
        out.data[3 * i + 1] = static_cast<float>(cb);
        out.data[3 * i + 2] = static_cast<float>(cr);
    }
    return out;
}

ImageF32 ycbcr_to_rgb(const ImageF32& img) {
    if (img.channels != 3)
        throw std::invalid_argument("ycbcr_to_rgb: input must have 3 channels");
    ImageF32 out(img.width, img.height, 3);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        double y = img.data[3 * i + 0];
        double cb = static_cast<double>(img.data[3 * i + 1]) - 0.5;
        double cr = static_cast<double>(img.data[3 * i + 2]) - 0.5;
        double r = y + 1.402 * cr;
        double g = y - 0.344136286201022 * cb - 0.714136286201022 * cr;
        double b = y + 1.772 * cb;
        out.data[3 * i + 0] = static_cast<float>(r);
        out.data[3 * i + 1] = static_cast<float>(g);
        out.data[3 * i + 2] = static_cast<float>(b);
    }
    return out;
}

double psnr(const ImageF32& a, const ImageF32& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("psnr: dimension mismatch");
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = static_cast<double>(a.data[i]) - b.data[i];
        se += d * d;
    }
    double mse = se / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

std::vector<double> luma_plane(const ImageF32& img) {
    std::vector<double> out(static_cast<std::size_t>(img.width) * img.height);
    if (img.channels == 1) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.data[i];
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = 0.299 * img.data[3 * i + 0] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
        }
    }
    return out;
}

// separable Gaussian filter, valid region only
std::vector<double> gauss_valid(const std::vector<double>& p, int w, int h,
                                const std::vector<double>& kernel) {
    const int k = static_cast<int>(kernel.size());
    const int ow = w - k + 1;
    const int oh = h - k + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += kernel[i] * p[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += kernel[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

}  // namespace

double ssim(const ImageF32& a, const ImageF32& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("ssim: dimension mismatch");
    constexpr int kWindow = 11;
    if (a.width < kWindow || a.height < kWindow)
        throw std::invalid_argument("ssim: image smaller than 11x11 window");

    std::vector<double> kernel(kWindow);
    double ksum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        double d = i - (kWindow - 1) / 2.0;
        kernel[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        ksum += kernel[i];
    }
    for (auto& v : kernel) v /= ksum;

    const auto pa = luma_plane(a);
    const auto pb = luma_plane(b);
    const int w = a.width, h = a.height;
    std::vector<double> paa(pa.size()), pbb(pa.size()), pab(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        paa[i] = pa[i] * pa[i];
        pbb[i] = pb[i] * pb[i];
        pab[i] = pa[i] * pb[i];
    }
    const auto mu_a = gauss_valid(pa, w, h, kernel);
    const auto mu_b = gauss_valid(pb, w, h, kernel);
    const auto s_aa = gauss_valid(paa, w, h, kernel);
    const auto s_bb = gauss_valid(pbb, w, h, kernel);
    const auto s_ab = gauss_valid(pab, w, h, kernel);

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        double ma = mu_a[i], mb = mu_b[i];
        double va = s_aa[i] - ma * ma;
        double vb = s_bb[i] - mb * mb;
        double cov = s_ab[i] - ma * mb;
        acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return acc / static_cast<double>(mu_a.size());
}

namespace {

// reads one whitespace/comment-delimited token from a PNM header
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw std::runtime_error("ppm: malformed header (unexpected end of file)");
    return tok;
}

}  // namespace

ImageU8 load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ppm: cannot open " + path);
    std::string magic = pnm_token(in);
    int channels;
    if (magic == "P6") channels = 3;
    else if (magic == "P5") channels = 1;
    else throw std::runtime_error("ppm: unsupported magic '" + magic + "' in " + path);
    int w = std::stoi(pnm_token(in));
    int h = std::stoi(pnm_token(in));
    int maxval = std::stoi(pnm_token(in));
    if (w <= 0 || h <= 0) throw std::runtime_error("ppm: bad dimensions in " + path);
    if (maxval != 255) throw std::runtime_error("ppm: unsupported maxval (only 255) in " + path);
    ImageU8 img(w, h, channels);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.data.size())
        throw std::runtime_error("ppm: truncated payload in " + path);
    return img;
}

void save_ppm(const ImageU8& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("ppm: channels must be 1 or 3");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("ppm: cannot write " + path);
    out << (img.channels == 3 ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!out) throw std::runtime_error("ppm: write failed for " + path);
}

TensorF32 load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("tensor: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "FDGT", 4) != 0)
        throw std::runtime_error("tensor: bad magic in " + path);
    auto read_u32 = [&in, &path]() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (in.gcount() != 4) throw std::runtime_error("tensor: truncated header in " + path);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    };
    std::uint32_t ndim = read_u32();
    if (ndim == 0 || ndim > 8) throw std::runtime_error("tensor: implausible ndim in " + path);
    TensorF32 t;
    t.dims.resize(ndim);
    for (auto& d : t.dims) d = read_u32();
    t.data.resize(t.element_count());
    static_assert(sizeof(float) == 4);
    in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * 4));
    if (static_cast<std::size_t>(in.gcount()) != t.data.size() * 4)
        throw std::runtime_error("tensor: truncated payload in " + path);
    return t;
}

void save_tensor(const TensorF32& t, const std::string& path) {
    if (t.data.size() != t.element_count())
        throw std::invalid_argument("tensor: payload size does not match dims");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("tensor: cannot write " + path);
    out.write("FDGT", 4);
    auto write_u32 = [&out](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    write_u32(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) write_u32(d);
    out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * 4));
    if (!out) throw std::runtime_error("tensor: write failed for " + path);
}

TensorF32 image_to_tensor(const ImageF32& img) {
    TensorF32 t;
    t.dims = {static_cast<std::uint32_t>(img.height), static_cast<std::uint32_t>(img.width),
              static_cast<std::uint32_t>(img.channels)};
    t.data = img.data;
    return t;
}

ImageF32 tensor_to_image(const TensorF32& t) {
    if (t.dims.size() != 3)
        throw std::invalid_argument("tensor_to_image: expected rank-3 tensor (H,W,C)");
    ImageF32 img(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]), static_cast<int>(t.dims[2]));
    img.data = t.data;
    return img;
}

}  // namespace fdg
