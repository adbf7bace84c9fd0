#pragma once
// Baseline JFIF bitstream parsing and emission (ITU-T T.81, SOF0, 8-bit,
// 4:4:4). Lets the compression analysis run on real JPEG files and lets
// simulate_jpeg output be serialized and round-tripped coefficient-exactly.

#include <cstdint>
#include <optional>
#include <vector>

#include "fdg/jpeg.hpp"

namespace fdg {

struct MarkerSegment {
    std::uint16_t marker = 0;          // e.g. 0xFFD8
    std::size_t offset = 0;            // file position of the 0xFF byte
    std::vector<std::uint8_t> payload; // segment body, without the length field
    std::vector<std::uint8_t> scan;    // entropy-coded data following an SOS
};

namespace markers {
constexpr std::uint16_t SOI = 0xFFD8;
constexpr std::uint16_t EOI = 0xFFD9;
constexpr std::uint16_t SOF0 = 0xFFC0;
constexpr std::uint16_t DHT = 0xFFC4;
constexpr std::uint16_t DQT = 0xFFDB;
constexpr std::uint16_t SOS = 0xFFDA;
constexpr std::uint16_t DRI = 0xFFDD;
constexpr std::uint16_t APP0 = 0xFFE0;
}  // namespace markers

struct HuffmanTable {
    enum class Class { DC, AC };
    Class cls = Class::DC;
    int id = 0;
    std::array<std::uint8_t, 16> counts{};  // codes per bit length 1..16
    std::vector<std::uint8_t> symbols;
};

// Canonical code assignment plus decode acceleration arrays.
struct HuffmanCodec {
    // per symbol: code value and bit length (encode side)
    std::vector<std::uint16_t> code_of;
    std::vector<std::uint8_t> length_of;
    std::array<std::uint8_t, 256> symbol_present{};
    // per bit length 1..16: smallest/largest code and index of first symbol
    std::array<std::int32_t, 17> min_code{};
    std::array<std::int32_t, 17> max_code{};
    std::array<std::int32_t, 17> val_ptr{};
    std::vector<std::uint8_t> symbols;
};

// Canonical construction; throws on an over-full code space (Kraft sum > 1).
HuffmanCodec build_huffman(const HuffmanTable& table);

struct ComponentInfo {
    int id = 0;
    int quant_id = 0;
    int dc_table = 0;
    int ac_table = 0;
};

struct ParsedJpeg {
    int width = 0;
    int height = 0;
    std::vector<ComponentInfo> comps;
    std::array<std::optional<QuantTable>, 4> quant_tables;
    std::vector<CoeffGrid> coeff_grids;  // one per component, quantized values
};

// Ordered marker walk from SOI to EOI. Entropy-coded scan bytes (with
// 0xFF00 stuffing preserved) are attached to their SOS segment.
std::vector<MarkerSegment> parse_markers(const std::vector<std::uint8_t>& bytes);

// Zigzag-ordered 8-bit tables; a DQT segment may carry several.
std::vector<std::pair<int, QuantTable>> parse_dqt(const MarkerSegment& seg);

std::vector<HuffmanTable> parse_dht(const MarkerSegment& seg);

// Full parse: markers, tables, frame header, entropy decode of the scan
// (DC prediction undone, runs expanded, coefficients de-zigzagged).
ParsedJpeg parse_jpeg(const std::vector<std::uint8_t>& bytes);

// Emits SOI / DQT / SOF0 / DHT / SOS / EOI with the T.81 Annex K standard
// Huffman tables; 0xFF bytes in entropy data are stuffed.
std::vector<std::uint8_t> write_jfif(const ParsedJpeg& parsed);

// Dequantize + IDCT + inverse color transform of parsed coefficients.
ImageU8 decode_to_image(const ParsedJpeg& parsed);

// Adapter for serializing simulate_jpeg output.
ParsedJpeg to_parsed(const JpegSimResult& sim, int width, int height);

}  // namespace fdg
