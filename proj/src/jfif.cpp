#include "fdg/jfif.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdg {

namespace {

// T.81 Annex K standard Huffman table definitions
constexpr std::uint8_t kDcLumaCounts[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
constexpr std::uint8_t kDcValues[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
constexpr std::uint8_t kDcChromaCounts[16] = {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
constexpr std::uint8_t kAcLumaCounts[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125};
constexpr std::uint8_t kAcLumaValues[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
    0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA};
constexpr std::uint8_t kAcChromaCounts[16] = {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119};
constexpr std::uint8_t kAcChromaValues[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
    0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0,
    0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
    0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
    0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
    0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5,
    0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
    0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
    0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA};

HuffmanTable std_table(HuffmanTable::Class cls, int id) {
    HuffmanTable t;
    t.cls = cls;
    t.id = id;
    const std::uint8_t* counts;
    const std::uint8_t* values;
    std::size_t nvalues;
    if (cls == HuffmanTable::Class::DC) {
        counts = (id == 0) ? kDcLumaCounts : kDcChromaCounts;
        values = kDcValues;
        nvalues = 12;
    } else {
        counts = (id == 0) ? kAcLumaCounts : kAcChromaCounts;
        values = (id == 0) ? kAcLumaValues : kAcChromaValues;
        nvalues = 162;
    }
    for (int i = 0; i < 16; ++i) t.counts[i] = counts[i];
    t.symbols.assign(values, values + nvalues);
    return t;
}

bool standalone_marker(std::uint8_t m) {
    return m == 0xD8 || m == 0xD9 || m == 0x01 || (m >= 0xD0 && m <= 0xD7);
}

}  // namespace

HuffmanCodec build_huffman(const HuffmanTable& table) {
    std::size_t total = 0;
    for (auto c : table.counts) total += c;
    if (total != table.symbols.size())
        throw std::runtime_error("huffman: counts do not match symbol list");
    if (total > 256) throw std::runtime_error("huffman: more than 256 symbols");

    // Kraft check before assigning codes
    double kraft = 0.0;
    for (int len = 1; len <= 16; ++len) kraft += table.counts[len - 1] * std::ldexp(1.0, -len);
    if (kraft > 1.0 + 1e-12) throw std::runtime_error("huffman: over-full code space");

    HuffmanCodec c;
    c.symbols = table.symbols;
    c.code_of.assign(256, 0);
    c.length_of.assign(256, 0);
    int code = 0;
    std::size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
        c.val_ptr[len] = static_cast<std::int32_t>(k);
        c.min_code[len] = code;
        for (int i = 0; i < table.counts[len - 1]; ++i) {
            if (code >= (1 << len)) throw std::runtime_error("huffman: over-full code space");
            std::uint8_t sym = table.symbols[k];
            c.code_of[sym] = static_cast<std::uint16_t>(code);
            c.length_of[sym] = static_cast<std::uint8_t>(len);
            c.symbol_present[sym] = 1;
            ++code;
            ++k;
        }
        c.max_code[len] = code - 1;
        if (table.counts[len - 1] == 0) c.max_code[len] = -1;
        code <<= 1;
    }
    return c;
}

std::vector<MarkerSegment> parse_markers(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8)
        throw std::runtime_error("jfif: missing SOI marker");
    std::vector<MarkerSegment> segs;
    std::size_t pos = 0;
    bool saw_eoi = false;
    while (pos + 1 < bytes.size()) {
        if (bytes[pos] != 0xFF) throw std::runtime_error("jfif: expected marker at offset " + std::to_string(pos));
        std::uint8_t m = bytes[pos + 1];
        while (m == 0xFF && pos + 2 < bytes.size()) { ++pos; m = bytes[pos + 1]; }  // fill bytes
        MarkerSegment seg;
        seg.marker = static_cast<std::uint16_t>(0xFF00 | m);
        seg.offset = pos;
        pos += 2;
        if (!standalone_marker(m)) {
            if (pos + 2 > bytes.size()) throw std::runtime_error("jfif: truncated segment length");
            std::size_t len = (static_cast<std::size_t>(bytes[pos]) << 8) | bytes[pos + 1];
            if (len < 2 || pos + len > bytes.size()) throw std::runtime_error("jfif: truncated segment payload");
            seg.payload.assign(bytes.begin() + pos + 2, bytes.begin() + pos + len);
            pos += len;
        }
        if (seg.marker == markers::SOS) {
            // attach entropy-coded data up to the next real marker
            std::size_t start = pos;
            while (pos + 1 < bytes.size()) {
                if (bytes[pos] == 0xFF) {
                    std::uint8_t next = bytes[pos + 1];
                    if (next != 0x00 && !(next >= 0xD0 && next <= 0xD7)) break;
                    pos += 2;
                } else {
                    ++pos;
                }
            }
            seg.scan.assign(bytes.begin() + start, bytes.begin() + pos);
        }
        bool is_eoi = seg.marker == markers::EOI;
        segs.push_back(std::move(seg));
        if (is_eoi) { saw_eoi = true; break; }
    }
    if (!saw_eoi) throw std::runtime_error("jfif: missing EOI marker");
    return segs;
}

std::vector<std::pair<int, QuantTable>> parse_dqt(const MarkerSegment& seg) {
    if (seg.marker != markers::DQT) throw std::runtime_error("dqt: not a DQT segment");
    std::vector<std::pair<int, QuantTable>> out;
    std::size_t pos = 0;
    while (pos < seg.payload.size()) {
        std::uint8_t pqtq = seg.payload[pos++];
        int precision = pqtq >> 4;
        int id = pqtq & 0x0F;
        if (precision != 0) throw std::runtime_error("dqt: only 8-bit precision supported");
        if (id > 3) throw std::runtime_error("dqt: table id out of range");
        if (pos + 64 > seg.payload.size()) throw std::runtime_error("dqt: short payload");
        QuantTable q;
        for (int i = 0; i < 64; ++i) {
            std::uint8_t v = seg.payload[pos + i];
            if (v == 0) throw std::runtime_error("dqt: zero quantizer entry");
            q.zig[i] = v;
        }
        pos += 64;
        out.emplace_back(id, q);
    }
    return out;
}

std::vector<HuffmanTable> parse_dht(const MarkerSegment& seg) {
    if (seg.marker != markers::DHT) throw std::runtime_error("dht: not a DHT segment");
    std::vector<HuffmanTable> out;
    std::size_t pos = 0;
    while (pos < seg.payload.size()) {
        std::uint8_t tctn = seg.payload[pos++];
        HuffmanTable t;
        t.cls = (tctn >> 4) ? HuffmanTable::Class::AC : HuffmanTable::Class::DC;
        t.id = tctn & 0x0F;
        if (t.id > 3) throw std::runtime_error("dht: table id out of range");
        if (pos + 16 > seg.payload.size()) throw std::runtime_error("dht: short payload");
        std::size_t total = 0;
        for (int i = 0; i < 16; ++i) {
            t.counts[i] = seg.payload[pos + i];
            total += t.counts[i];
        }
        pos += 16;
        if (pos + total > seg.payload.size()) throw std::runtime_error("dht: short payload");
        t.symbols.assign(seg.payload.begin() + pos, seg.payload.begin() + pos + total);
        pos += total;
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

class BitReader {
public:
    explicit BitReader(const std::vector<std::uint8_t>& scan) : scan_(scan) {}

    int read_bit() {
        if (bits_left_ == 0) {
            if (pos_ >= scan_.size()) throw std::runtime_error("scan: out of data");
            std::uint8_t b = scan_[pos_++];
            if (b == 0xFF) {
                if (pos_ >= scan_.size()) throw std::runtime_error("scan: truncated stuffing");
                std::uint8_t next = scan_[pos_];
                if (next == 0x00) {
                    ++pos_;  // stuffed zero
                } else {
                    throw std::runtime_error("scan: unexpected marker inside entropy data");
                }
            }
            cur_ = b;
            bits_left_ = 8;
        }
        --bits_left_;
        return (cur_ >> bits_left_) & 1;
    }

    int read_bits(int n) {
        int v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | read_bit();
        return v;
    }

    // consume an RSTn marker at a byte boundary, if present
    bool consume_rst() {
        bits_left_ = 0;
        if (pos_ + 1 < scan_.size() && scan_[pos_] == 0xFF && scan_[pos_ + 1] >= 0xD0 && scan_[pos_ + 1] <= 0xD7) {
            pos_ += 2;
            return true;
        }
        return false;
    }

private:
    const std::vector<std::uint8_t>& scan_;
    std::size_t pos_ = 0;
    std::uint8_t cur_ = 0;
    int bits_left_ = 0;
};

std::uint8_t decode_symbol(BitReader& br, const HuffmanCodec& hc) {
    int code = 0;
    for (int len = 1; len <= 16; ++len) {
        code = (code << 1) | br.read_bit();
        if (hc.max_code[len] >= 0 && code <= hc.max_code[len] && code >= hc.min_code[len])
            return hc.symbols[hc.val_ptr[len] + (code - hc.min_code[len])];
    }
    throw std::runtime_error("scan: invalid Huffman code");
}

int extend(int v, int size) {
    if (size == 0) return 0;
    if (v < (1 << (size - 1))) return v - ((1 << size) - 1);
    return v;
}

class BitWriter {
public:
    void put_bits(int code, int length) {
        for (int i = length - 1; i >= 0; --i) put_bit((code >> i) & 1);
    }
    void put_bit(int b) {
        cur_ = static_cast<std::uint8_t>((cur_ << 1) | b);
        if (++nbits_ == 8) flush_byte();
    }
    void align_with_ones() {
        while (nbits_ != 0) put_bit(1);
    }
    std::vector<std::uint8_t> take() {
        align_with_ones();
        return std::move(out_);
    }

private:
    void flush_byte() {
        out_.push_back(cur_);
        if (cur_ == 0xFF) out_.push_back(0x00);  // byte stuffing
        cur_ = 0;
        nbits_ = 0;
    }
    std::vector<std::uint8_t> out_;
    std::uint8_t cur_ = 0;
    int nbits_ = 0;
};

int bit_size(int v) {
    int a = v < 0 ? -v : v;
    int n = 0;
    while (a) { a >>= 1; ++n; }
    return n;
}

}  // namespace

ParsedJpeg parse_jpeg(const std::vector<std::uint8_t>& bytes) {
    auto segs = parse_markers(bytes);
    ParsedJpeg pj;
    std::array<std::optional<HuffmanCodec>, 4> dc_codecs, ac_codecs;
    int restart_interval = 0;
    const MarkerSegment* sos = nullptr;
    std::vector<int> scan_dc_table, scan_ac_table;

    for (const auto& seg : segs) {
        switch (seg.marker) {
            case markers::DQT:
                for (auto& [id, q] : parse_dqt(seg)) pj.quant_tables[id] = q;
                break;
            case markers::DHT:
                for (auto& t : parse_dht(seg)) {
                    auto codec = build_huffman(t);
                    if (t.cls == HuffmanTable::Class::DC) dc_codecs[t.id] = std::move(codec);
                    else ac_codecs[t.id] = std::move(codec);
                }
                break;
            case markers::DRI:
                if (seg.payload.size() < 2) throw std::runtime_error("dri: short payload");
                restart_interval = (seg.payload[0] << 8) | seg.payload[1];
                break;
            case markers::SOF0: {
                const auto& p = seg.payload;
                if (p.size() < 6) throw std::runtime_error("sof0: short payload");
                if (p[0] != 8) throw std::runtime_error("sof0: only 8-bit precision supported");
                pj.height = (p[1] << 8) | p[2];
                pj.width = (p[3] << 8) | p[4];
                int nc = p[5];
                if (nc != 1 && nc != 3) throw std::runtime_error("sof0: only 1 or 3 components supported");
                if (p.size() < 6 + 3 * static_cast<std::size_t>(nc)) throw std::runtime_error("sof0: short payload");
                for (int i = 0; i < nc; ++i) {
                    ComponentInfo ci;
                    ci.id = p[6 + 3 * i];
                    std::uint8_t hv = p[7 + 3 * i];
                    if (hv != 0x11)
                        throw std::runtime_error("sof0: only 4:4:4 sampling (1x1 factors) supported");
                    ci.quant_id = p[8 + 3 * i];
                    pj.comps.push_back(ci);
                }
                break;
            }
            case 0xFFC1: case 0xFFC2: case 0xFFC3: case 0xFFC5: case 0xFFC6: case 0xFFC7:
            case 0xFFC9: case 0xFFCA: case 0xFFCB: case 0xFFCD: case 0xFFCE: case 0xFFCF:
                throw std::runtime_error("jfif: only baseline sequential (SOF0) is supported");
            case markers::SOS: {
                const auto& p = seg.payload;
                if (p.empty()) throw std::runtime_error("sos: short payload");
                int ns = p[0];
                if (static_cast<std::size_t>(ns) != pj.comps.size())
                    throw std::runtime_error("sos: scan must cover all frame components");
                if (p.size() < 1 + 2 * static_cast<std::size_t>(ns) + 3) throw std::runtime_error("sos: short payload");
                for (int i = 0; i < ns; ++i) {
                    int cid = p[1 + 2 * i];
                    std::uint8_t tables = p[2 + 2 * i];
                    bool found = false;
                    for (auto& ci : pj.comps) {
                        if (ci.id == cid) {
                            ci.dc_table = tables >> 4;
                            ci.ac_table = tables & 0x0F;
                            found = true;
                        }
                    }
                    if (!found) throw std::runtime_error("sos: unknown component id");
                }
                sos = &seg;
                break;
            }
            default:
                break;  // APPn / COM / others skipped
        }
    }

    if (pj.comps.empty()) throw std::runtime_error("jfif: no SOF0 frame header found");
    if (!sos) throw std::runtime_error("jfif: no SOS scan found");
    for (const auto& ci : pj.comps)
        if (!pj.quant_tables[ci.quant_id])
            throw std::runtime_error("jfif: component references missing quantization table");

    const int bw = (pj.width + 7) / 8;
    const int bh = (pj.height + 7) / 8;
    pj.coeff_grids.resize(pj.comps.size());
    for (auto& g : pj.coeff_grids) {
        g.blocks_w = bw;
        g.blocks_h = bh;
        g.blocks.assign(static_cast<std::size_t>(bw) * bh, CoeffBlock{});
    }

    BitReader br(sos->scan);
    std::vector<int> dc_pred(pj.comps.size(), 0);
    int mcu_count = 0;
    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            if (restart_interval > 0 && mcu_count > 0 && mcu_count % restart_interval == 0) {
                if (!br.consume_rst()) throw std::runtime_error("scan: expected restart marker");
                std::fill(dc_pred.begin(), dc_pred.end(), 0);
            }
            for (std::size_t c = 0; c < pj.comps.size(); ++c) {
                const auto& ci = pj.comps[c];
                if (!dc_codecs[ci.dc_table] || !ac_codecs[ci.ac_table])
                    throw std::runtime_error("scan: missing Huffman table");
                CoeffBlock& blk = pj.coeff_grids[c].at(by, bx);
                // DC
                int size = decode_symbol(br, *dc_codecs[ci.dc_table]);
                if (size > 11) throw std::runtime_error("scan: DC coefficient overflow");
                int diff = extend(br.read_bits(size), size);
                dc_pred[c] += diff;
                blk[0] = dc_pred[c];
                // AC
                int zz = 1;
                while (zz < 64) {
                    std::uint8_t rs = decode_symbol(br, *ac_codecs[ci.ac_table]);
                    int run = rs >> 4;
                    int sz = rs & 0x0F;
                    if (sz == 0) {
                        if (run == 15) { zz += 16; continue; }  // ZRL
                        break;  // EOB
                    }
                    zz += run;
                    if (zz > 63) throw std::runtime_error("scan: AC run past end of block");
                    if (sz > 10) throw std::runtime_error("scan: AC coefficient overflow");
                    auto [u, v] = zigzag_to_uv(zz);
                    blk[u * 8 + v] = extend(br.read_bits(sz), sz);
                    ++zz;
                }
            }
            ++mcu_count;
        }
    }
    return pj;
}

std::vector<std::uint8_t> write_jfif(const ParsedJpeg& parsed) {
    if (parsed.width <= 0 || parsed.height <= 0 || parsed.width > 65535 || parsed.height > 65535)
        throw std::invalid_argument("write_jfif: dimensions out of range");
    const std::size_t nc = parsed.comps.size();
    if (nc != 1 && nc != 3) throw std::invalid_argument("write_jfif: 1 or 3 components required");

    std::vector<std::uint8_t> out;
    auto put = [&out](std::uint8_t b) { out.push_back(b); };
    auto put16 = [&out](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    };

    put16(markers::SOI);

    // DQT, one segment per referenced table
    std::array<bool, 4> emitted{};
    for (const auto& ci : parsed.comps) {
        int id = ci.quant_id;
        if (emitted[id]) continue;
        emitted[id] = true;
        if (!parsed.quant_tables[id]) throw std::invalid_argument("write_jfif: missing quant table");
        put16(markers::DQT);
        put16(2 + 1 + 64);
        put(static_cast<std::uint8_t>(id));
        for (int i = 0; i < 64; ++i) {
            auto v = parsed.quant_tables[id]->zig[i];
            if (v < 1 || v > 255) throw std::invalid_argument("write_jfif: quantizer entry out of 8-bit range");
            put(static_cast<std::uint8_t>(v));
        }
    }

    // SOF0
    put16(markers::SOF0);
    put16(static_cast<std::uint16_t>(2 + 6 + 3 * nc));
    put(8);
    put16(static_cast<std::uint16_t>(parsed.height));
    put16(static_cast<std::uint16_t>(parsed.width));
    put(static_cast<std::uint8_t>(nc));
    for (const auto& ci : parsed.comps) {
        put(static_cast<std::uint8_t>(ci.id));
        put(0x11);
        put(static_cast<std::uint8_t>(ci.quant_id));
    }

    // DHT: standard tables, luma pair always, chroma pair for color
    auto emit_dht = [&](const HuffmanTable& t) {
        put16(markers::DHT);
        put16(static_cast<std::uint16_t>(2 + 1 + 16 + t.symbols.size()));
        put(static_cast<std::uint8_t>(((t.cls == HuffmanTable::Class::AC) ? 0x10 : 0x00) | t.id));
        for (auto c : t.counts) put(c);
        for (auto s : t.symbols) put(s);
    };
    emit_dht(std_table(HuffmanTable::Class::DC, 0));
    emit_dht(std_table(HuffmanTable::Class::AC, 0));
    if (nc == 3) {
        emit_dht(std_table(HuffmanTable::Class::DC, 1));
        emit_dht(std_table(HuffmanTable::Class::AC, 1));
    }
    auto dc_luma = build_huffman(std_table(HuffmanTable::Class::DC, 0));
    auto ac_luma = build_huffman(std_table(HuffmanTable::Class::AC, 0));
    auto dc_chroma = build_huffman(std_table(HuffmanTable::Class::DC, 1));
    auto ac_chroma = build_huffman(std_table(HuffmanTable::Class::AC, 1));

    // SOS header
    put16(markers::SOS);
    put16(static_cast<std::uint16_t>(2 + 1 + 2 * nc + 3));
    put(static_cast<std::uint8_t>(nc));
    for (std::size_t c = 0; c < nc; ++c) {
        put(static_cast<std::uint8_t>(parsed.comps[c].id));
        put(c == 0 ? 0x00 : 0x11);
    }
    put(0);    // spectral start
    put(63);   // spectral end
    put(0);    // successive approximation

    // entropy-coded scan
    const int bw = (parsed.width + 7) / 8;
    const int bh = (parsed.height + 7) / 8;
    BitWriter bwr;
    std::vector<int> dc_pred(nc, 0);
    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            for (std::size_t c = 0; c < nc; ++c) {
                const HuffmanCodec& dc = (c == 0) ? dc_luma : dc_chroma;
                const HuffmanCodec& ac = (c == 0) ? ac_luma : ac_chroma;
                const CoeffBlock& blk = parsed.coeff_grids[c].at(by, bx);
                int diff = blk[0] - dc_pred[c];
                dc_pred[c] = blk[0];
                int size = bit_size(diff);
                if (size > 11) throw std::invalid_argument("write_jfif: DC coefficient out of baseline range");
                bwr.put_bits(dc.code_of[size], dc.length_of[size]);
                if (size > 0) {
                    int v = diff < 0 ? diff + ((1 << size) - 1) : diff;
                    bwr.put_bits(v, size);
                }
                int run = 0;
                for (int zz = 1; zz < 64; ++zz) {
                    auto [u, v] = zigzag_to_uv(zz);
                    int coeff = blk[u * 8 + v];
                    if (coeff == 0) { ++run; continue; }
                    while (run > 15) {
                        bwr.put_bits(ac.code_of[0xF0], ac.length_of[0xF0]);  // ZRL
                        run -= 16;
                    }
                    int sz = bit_size(coeff);
                    if (sz > 10) throw std::invalid_argument("write_jfif: AC coefficient out of baseline range");
                    std::uint8_t rs = static_cast<std::uint8_t>((run << 4) | sz);
                    bwr.put_bits(ac.code_of[rs], ac.length_of[rs]);
                    int bits = coeff < 0 ? coeff + ((1 << sz) - 1) : coeff;
                    bwr.put_bits(bits, sz);
                    run = 0;
                }
                if (run > 0) bwr.put_bits(ac.code_of[0x00], ac.length_of[0x00]);  // EOB
            }
        }
    }
    auto scan = bwr.take();
    out.insert(out.end(), scan.begin(), scan.end());

    put16(markers::EOI);
    return out;
}

ImageU8 decode_to_image(const ParsedJpeg& parsed) {
    const int bw = (parsed.width + 7) / 8;
    const int bh = (parsed.height + 7) / 8;
    const int nc = static_cast<int>(parsed.comps.size());
    ImageF32 planes(parsed.width, parsed.height, nc);
    for (int c = 0; c < nc; ++c) {
        const QuantTable& q = *parsed.quant_tables[parsed.comps[c].quant_id];
        for (int by = 0; by < bh; ++by)
            for (int bx = 0; bx < bw; ++bx) {
                Block8 r = idct2d(dequantize(parsed.coeff_grids[c].at(by, bx), q));
                for (int m = 0; m < 8; ++m) {
                    int y = by * 8 + m;
                    if (y >= parsed.height) break;
                    for (int n = 0; n < 8; ++n) {
                        int x = bx * 8 + n;
                        if (x >= parsed.width) break;
                        planes.at(y, x, c) = static_cast<float>((r[m * 8 + n] + 128.0) / 255.0);
                    }
                }
            }
    }
    ImageF32 rgb = (nc == 3) ? ycbcr_to_rgb(planes) : planes;
    for (auto& v : rgb.data) {
        if (v < 0.0f) v = 0.0f;
        if (v > 1.0f) v = 1.0f;
    }
    return to_u8(rgb);
}

ParsedJpeg to_parsed(const JpegSimResult& sim, int width, int height) {
    ParsedJpeg pj;
    pj.width = width;
    pj.height = height;
    pj.quant_tables[0] = sim.luma;
    const int nc = static_cast<int>(sim.components.size());
    if (nc == 3) pj.quant_tables[1] = sim.chroma;
    for (int c = 0; c < nc; ++c) {
        ComponentInfo ci;
        ci.id = c + 1;
        ci.quant_id = (c == 0) ? 0 : 1;
        ci.dc_table = (c == 0) ? 0 : 1;
        ci.ac_table = (c == 0) ? 0 : 1;
        pj.comps.push_back(ci);
    }
    pj.coeff_grids = sim.components;
    return pj;
}

}  // namespace fdg
