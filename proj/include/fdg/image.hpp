#pragma once
// Image containers, color transforms, quality metrics and file I/O shared
// by the rest of the pipeline. All float images use a nominal [0,1] range.

#include <cstdint>
#include <string>
#include <vector>

namespace fdg {

struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    std::vector<std::uint8_t> data;  // row-major, interleaved

    ImageU8() = default;
    ImageU8(int w, int h, int c) : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0) {}

    std::uint8_t& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    std::uint8_t at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

struct ImageF32 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    ImageF32() = default;
    ImageF32(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

    float& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    float at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    bool same_shape(const ImageF32& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

struct MetricReport {
    double psnr = 0.0;  // dB, +inf when images identical
    double ssim = 0.0;  // in [-1, 1]
};

// 8-bit <-> unit-range float. Quantization rounds half away from zero.
ImageF32 to_f32(const ImageU8& img);
ImageU8 to_u8(const ImageF32& img);

// Full-range JFIF YCbCr with chroma offset 0.5. Throws std::invalid_argument
// unless the input has 3 channels.
ImageF32 rgb_to_ycbcr(const ImageF32& img);
ImageF32 ycbcr_to_rgb(const ImageF32& img);

// 10*log10(1/MSE) over all samples; +inf when MSE is zero.
double psnr(const ImageF32& a, const ImageF32& b);

// Mean local SSIM, 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03.
// 3-channel inputs are converted to luma first.
double ssim(const ImageF32& a, const ImageF32& b);

// Binary PPM (P6) / PGM (P5), maxval 255.
ImageU8 load_ppm(const std::string& path);
void save_ppm(const ImageU8& img, const std::string& path);

// Raw tensor container: magic "FDGT", u32 LE ndim, ndim u32 LE dims,
// float32 LE payload in row-major order.
struct TensorF32 {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

TensorF32 load_tensor(const std::string& path);
void save_tensor(const TensorF32& t, const std::string& path);

// Images serialize as rank-3 tensors with dims {height, width, channels}.
TensorF32 image_to_tensor(const ImageF32& img);
ImageF32 tensor_to_image(const TensorF32& t);

}  // namespace fdg
