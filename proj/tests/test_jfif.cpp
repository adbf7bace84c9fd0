#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "fdg/jfif.hpp"
#include "fdg/rng.hpp"
#include "helpers.hpp"

using fdg::markers::DHT;
using fdg::markers::DQT;
using fdg::markers::EOI;
using fdg::markers::SOF0;
using fdg::markers::SOI;
using fdg::markers::SOS;

TEST_CASE("markers: minimal SOI/EOI stream") {
    std::vector<std::uint8_t> bytes = {0xFF, 0xD8, 0xFF, 0xD9};
    auto segs = fdg::parse_markers(bytes);
    REQUIRE(segs.size() == 2);
    CHECK(segs.front().marker == SOI);
    CHECK(segs.back().marker == EOI);
}

TEST_CASE("markers: missing SOI / truncation / missing EOI rejected") {
    CHECK_THROWS(fdg::parse_markers({0xFF, 0xD9}));
    CHECK_THROWS(fdg::parse_markers({0x12, 0x34}));
    CHECK_THROWS(fdg::parse_markers({0xFF, 0xD8, 0xFF, 0xDB, 0x00, 0x45}));  // short DQT
    CHECK_THROWS(fdg::parse_markers({0xFF, 0xD8}));
}

static fdg::ParsedJpeg encode_scene(int w, int h, std::uint64_t seed, int qf = 80) {
    fdg::ImageU8 img = fdg::to_u8(testutil::synthetic_scene(w, h, seed));
    return fdg::to_parsed(fdg::simulate_jpeg(img, qf), w, h);
}

TEST_CASE("markers: writer emits the canonical segment sequence") {
    auto bytes = fdg::write_jfif(encode_scene(24, 16, 1));
    CHECK(bytes.front() == 0xFF);
    CHECK(bytes[1] == 0xD8);
    CHECK(bytes[bytes.size() - 2] == 0xFF);
    CHECK(bytes.back() == 0xD9);
    auto segs = fdg::parse_markers(bytes);
    std::vector<std::uint16_t> seq;
    for (const auto& s : segs) seq.push_back(s.marker);
    CHECK(seq == std::vector<std::uint16_t>{SOI, DQT, DQT, SOF0, DHT, DHT, DHT, DHT, SOS, EOI});
}

TEST_CASE("dqt: qf=80 luma table starts at 6; two tables per segment; 16-bit rejected") {
    auto bytes = fdg::write_jfif(encode_scene(16, 16, 2));
    auto segs = fdg::parse_markers(bytes);
    auto tables = fdg::parse_dqt(segs[1]);
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].first == 0);
    CHECK(tables[0].second.zig[0] == 6);

    // hand-build a segment with two tables
    fdg::MarkerSegment seg;
    seg.marker = DQT;
    for (int id = 0; id < 2; ++id) {
        seg.payload.push_back(static_cast<std::uint8_t>(id));  // precision 0, id
        for (int i = 0; i < 64; ++i) seg.payload.push_back(static_cast<std::uint8_t>(i + 1));
    }
    CHECK(fdg::parse_dqt(seg).size() == 2);

    fdg::MarkerSegment bad;
    bad.marker = DQT;
    bad.payload.push_back(0x10);  // claims 16-bit precision
    for (int i = 0; i < 64; ++i) bad.payload.push_back(1);
    CHECK_THROWS(fdg::parse_dqt(bad));
}

TEST_CASE("huffman: canonical construction by hand") {
    // counts: one 1-bit code, two 2-bit codes -> "0", "10", "11"
    fdg::HuffmanTable t;
    t.counts[0] = 1;
    t.counts[1] = 2;
    t.symbols = {7, 8, 9};
    fdg::HuffmanCodec c = fdg::build_huffman(t);
    CHECK(c.code_of[7] == 0b0);
    CHECK(c.length_of[7] == 1);
    CHECK(c.code_of[8] == 0b10);
    CHECK(c.code_of[9] == 0b11);
    CHECK(c.length_of[9] == 2);
}

TEST_CASE("huffman: Kraft over-full code space rejected") {
    fdg::HuffmanTable t;
    t.counts[0] = 2;  // two 1-bit codes fill the space
    t.counts[1] = 1;  // a 2-bit code overflows it
    t.symbols = {1, 2, 3};
    CHECK_THROWS(fdg::build_huffman(t));
}

TEST_CASE("scan: constant gray block decodes to DC-only coefficients") {
    fdg::ImageU8 img(8, 8, 1);
    for (auto& v : img.data) v = 90;
    auto parsed = fdg::to_parsed(fdg::simulate_jpeg(img, 80), 8, 8);
    auto back = fdg::parse_jpeg(fdg::write_jfif(parsed));
    REQUIRE(back.coeff_grids.size() == 1);
    const fdg::CoeffBlock& blk = back.coeff_grids[0].blocks[0];
    CHECK(blk[0] != 0);
    for (int i = 1; i < 64; ++i) CHECK(blk[i] == 0);
}

TEST_CASE("round trip: parse(write(x)) is coefficient- and table-exact") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        int w = 16 + 8 * static_cast<int>(s % 3);
        int h = 24 + 8 * static_cast<int>(s % 2);
        fdg::ParsedJpeg p = encode_scene(w, h, 40 + s);
        fdg::ParsedJpeg back = fdg::parse_jpeg(fdg::write_jfif(p));
        CHECK(back.width == p.width);
        CHECK(back.height == p.height);
        REQUIRE(back.coeff_grids.size() == p.coeff_grids.size());
        for (std::size_t c = 0; c < p.coeff_grids.size(); ++c)
            CHECK(back.coeff_grids[c].blocks == p.coeff_grids[c].blocks);
        for (int id = 0; id < 4; ++id) {
            REQUIRE(back.quant_tables[id].has_value() == p.quant_tables[id].has_value());
            if (p.quant_tables[id]) CHECK(back.quant_tables[id]->zig == p.quant_tables[id]->zig);
        }
    }
}

TEST_CASE("round trip: grayscale single-component stream") {
    fdg::ImageU8 img(19, 11, 1);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint8_t>((i * 13) % 251);
    fdg::ParsedJpeg p = fdg::to_parsed(fdg::simulate_jpeg(img, 65), 19, 11);
    fdg::ParsedJpeg back = fdg::parse_jpeg(fdg::write_jfif(p));
    CHECK(back.coeff_grids[0].blocks == p.coeff_grids[0].blocks);
}

TEST_CASE("byte stuffing: no bare 0xFF markers inside emitted scan data") {
    // high-entropy content exercises many 0xFF-prone codes
    fdg::ImageU8 img(48, 48, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint8_t>(fdg::mix64(i) & 0xFF);
    auto bytes = fdg::write_jfif(fdg::to_parsed(fdg::simulate_jpeg(img, 95), 48, 48));
    auto segs = fdg::parse_markers(bytes);
    const auto& scan = segs[segs.size() - 2].scan;
    REQUIRE(!scan.empty());
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
        if (scan[i] == 0xFF) {
            std::uint8_t next = scan[i + 1];
            bool ok = next == 0x00 || (next >= 0xD0 && next <= 0xD7);
            CHECK(ok);
        }
    }
    // and the full decode still round-trips
    fdg::ParsedJpeg back = fdg::parse_jpeg(bytes);
    CHECK(back.width == 48);
}

TEST_CASE("decode_to_image agrees with the codec simulation output") {
    fdg::ImageU8 img = fdg::to_u8(testutil::synthetic_scene(32, 24, 8));
    fdg::JpegSimResult sim = fdg::simulate_jpeg(img, 80);
    fdg::ParsedJpeg p = fdg::to_parsed(sim, 32, 24);
    fdg::ImageU8 decoded = fdg::decode_to_image(fdg::parse_jpeg(fdg::write_jfif(p)));
    REQUIRE(decoded.data.size() == sim.image.data.size());
    for (std::size_t i = 0; i < decoded.data.size(); ++i)
        CHECK(std::abs(static_cast<int>(decoded.data[i]) - static_cast<int>(sim.image.data[i])) <= 1);
}

TEST_CASE("writer: oversized dimensions rejected") {
    fdg::ParsedJpeg p = encode_scene(8, 8, 3);
    p.width = 70000;
    CHECK_THROWS(fdg::write_jfif(p));
}
