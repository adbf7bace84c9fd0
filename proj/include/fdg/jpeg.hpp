#pragma once
// Forward JPEG transform chain: 8x8 orthonormal DCT, zigzag scan,
// quality-factor quantization tables and a full compress/decompress
// simulation (4:4:4, no entropy coding -- serialization lives in jfif.hpp).

#include <array>
#include <cstdint>
#include <vector>

#include "fdg/image.hpp"

namespace fdg {

// 8x8 block of samples, row-major, index u*8+v (u = vertical frequency /
// row, v = horizontal frequency / column).
using Block8 = std::array<double, 64>;

// 8x8 quantized coefficient indices, natural (u,v) layout.
using CoeffBlock = std::array<int, 64>;

// 64 entries stored in zigzag order, each in [1, 255].
struct QuantTable {
    std::array<std::uint16_t, 64> zig{};

    std::uint16_t at_uv(int u, int v) const;
};

enum class Plane { Luma, Chroma };

// How quantize() rounds. PlusHalfFloor is the literal floor(x/q + 1/2),
// which differs from codec practice at negative half-integers; Symmetric is
// round-half-away-from-zero as real encoders do.
enum class RoundingMode { PlusHalfFloor, Symmetric };

// Orthonormal type-II 2-D DCT: alpha(0)=sqrt(1/8), alpha(s!=0)=sqrt(2/8).
Block8 dct2d(const Block8& spatial);
Block8 idct2d(const Block8& freq);

// Standard JPEG zigzag scan. zigzag_to_uv(0) = (0,0), zigzag_to_uv(63) = (7,7).
std::pair<int, int> zigzag_to_uv(int zz);
int uv_to_zigzag(int u, int v);

// ITU-T T.81 Annex K base tables scaled by the conventional quality-factor
// rule; entries clamped to [1, 255].
QuantTable quant_table_for_qf(int qf, Plane plane);

CoeffBlock quantize(const Block8& freq, const QuantTable& q,
                    RoundingMode mode = RoundingMode::PlusHalfFloor);
Block8 dequantize(const CoeffBlock& c, const QuantTable& q);

// Grid of quantized coefficient blocks for one image component.
struct CoeffGrid {
    int blocks_w = 0;
    int blocks_h = 0;
    std::vector<CoeffBlock> blocks;  // row-major by block position

    const CoeffBlock& at(int by, int bx) const { return blocks[static_cast<std::size_t>(by) * blocks_w + bx]; }
    CoeffBlock& at(int by, int bx) { return blocks[static_cast<std::size_t>(by) * blocks_w + bx]; }
};

struct JpegSimResult {
    ImageU8 image;                      // decompressed simulation output
    std::vector<CoeffGrid> components;  // quantized coefficients (Y or Y,Cb,Cr)
    QuantTable luma;
    QuantTable chroma;
    int qf = 0;
};

// Full round trip: color transform -> level shift -> blockwise DCT ->
// quantize -> dequantize -> IDCT -> inverse transform -> clamp. Dimensions
// are padded internally to multiples of 8 by edge replication; coefficients
// are returned on the padded grid.
JpegSimResult simulate_jpeg(const ImageU8& img, int qf,
                            RoundingMode mode = RoundingMode::PlusHalfFloor);

// Per-channel |orig - compressed| normalized to [0,1].
ImageF32 loss_map(const ImageU8& orig, const ImageU8& compressed);

}  // namespace fdg
