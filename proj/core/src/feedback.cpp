// SPDX-License-Identifier: Apache-2.0
#include "irsfb/feedback.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "irsfb/errors.hpp"

namespace irsfb {

namespace {

constexpr std::size_t kMaxOrder = (1u << kOrderBits) - 1;
constexpr std::size_t kMaxSize = (1u << kSizeBits) - 1;
constexpr std::size_t kMaxRank = (1u << kRankBits) - 1;
constexpr std::array<char, 4> kMagic{'I', 'R', 'S', 'F'};
// Upper bound on the reconstructed vector length and on the Tucker core size.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 24;

bool product_exceeds(const Shape& shape, std::uint64_t limit) {
    std::uint64_t p = 1;
    for (auto n : shape) {
        p *= n;
        if (p > limit) return true;
    }
    return false;
}

void check_resolution(unsigned bits, const char* what) {
    if (bits < kMinCodebookBits || bits > kMaxCodebookBits) {
        throw ConfigError(std::string(what) + " resolution must be between 1 and 16 bits, got " +
                          std::to_string(bits));
    }
}

void check_shape(const Shape& shape, const std::vector<unsigned>& phase_bits, unsigned weight_bits) {
    if (shape.empty() || shape.size() > kMaxOrder)
        throw ConfigError("number of factors must be between 1 and 15, got " + std::to_string(shape.size()));
    for (auto n : shape) {
        if (n == 0 || n > kMaxSize) throw ConfigError("factor size must be between 1 and 65535, got " + std::to_string(n));
    }
    if (product_exceeds(shape, kMaxElements)) throw ConfigError("factor sizes multiply to more than 2^24 elements");
    if (phase_bits.size() != shape.size())
        throw ConfigError("expected one phase resolution per factor (" + std::to_string(shape.size()) + "), got " +
                          std::to_string(phase_bits.size()));
    for (auto b : phase_bits) check_resolution(b, "phase");
    check_resolution(weight_bits, "weight");
}

std::uint64_t product_minus_one(const Shape& ranks) {
    std::uint64_t p = 1;
    for (auto r : ranks) p *= r - 1;
    return p;
}

std::uint64_t sum_minus_one(const Shape& ranks) {
    std::uint64_t s = 0;
    for (auto r : ranks) s += r - 1;
    return s;
}

void write_indices(BitWriter& w, std::span<const CodeIndex> indices, unsigned bits) {
    for (auto idx : indices) {
        if (idx >> bits) throw CodecError("code index " + std::to_string(idx) + " does not fit in " +
                                          std::to_string(bits) + " bits");
        w.write(idx, bits);
    }
}

std::vector<CodeIndex> read_indices(BitReader& r, std::size_t count, unsigned bits) {
    std::vector<CodeIndex> out(count);
    for (auto& idx : out) idx = static_cast<CodeIndex>(r.read(bits));
    return out;
}

void write_factor_header(BitWriter& w, const Shape& shape) {
    w.write(shape.size(), kOrderBits);
    for (auto n : shape) w.write(n, kSizeBits);
}

void write_resolutions(BitWriter& w, const std::vector<unsigned>& phase_bits) {
    for (auto b : phase_bits) w.write(b - 1, kResolutionBits);
}

// Validation failures while decoding are reported as codec errors.
template <class Layout>
void validate_decoded(const Layout& layout) {
    try {
        validate(layout);
    } catch (const ConfigError& e) {
        throw CodecError(std::string("malformed preamble: ") + e.what());
    }
}

void require_body(const BitReader& r, std::uint64_t body_bits) {
    if (r.remaining() < body_bits) {
        throw CodecError("truncated message: body needs " + std::to_string(body_bits) + " bits, " +
                         std::to_string(r.remaining()) + " available");
    }
}

FeedbackMessage encode_one(const QuantizedBaseline& q) {
    const auto layout = layout_of(q);
    validate(layout);
    BitWriter w;
    w.write(static_cast<unsigned>(ModelKind::kBaseline), kModelIdBits);
    write_factor_header(w, {layout.n});
    w.write(q.bits - 1, kResolutionBits);
    write_indices(w, q.indices, q.bits);
    return std::move(w).finish();
}

FeedbackMessage encode_one(const QuantizedParafac& q) {
    const auto layout = layout_of(q);
    validate(layout);
    if (q.phase_indices.size() != q.shape.size()) throw ConfigError("PARAFAC payload has the wrong factor count");
    for (std::size_t p = 0; p < q.shape.size(); ++p) {
        if (q.phase_indices[p].size() != q.shape[p] * q.rank)
            throw ConfigError("PARAFAC factor " + std::to_string(p) + " has the wrong number of phases");
    }
    if (q.weights.length() != q.rank) throw ConfigError("PARAFAC weight count does not match rank");
    if (q.weights.unit_position != 0) throw CodecError("PARAFAC payload must list the unit weight first");

    BitWriter w;
    w.write(static_cast<unsigned>(ModelKind::kParafac), kModelIdBits);
    write_factor_header(w, q.shape);
    w.write(q.rank, kRankBits);
    write_resolutions(w, q.phase_bits);
    w.write(q.weight_bits - 1, kResolutionBits);
    for (std::size_t p = 0; p < q.shape.size(); ++p) write_indices(w, q.phase_indices[p], q.phase_bits[p]);
    write_indices(w, q.weights.indices, q.weight_bits);
    return std::move(w).finish();
}

FeedbackMessage encode_one(const QuantizedTucker& q) {
    const auto layout = layout_of(q);
    validate(layout);
    const std::size_t order = q.shape.size();
    if (q.phase_indices.size() != order || q.sigmas.size() != order)
        throw ConfigError("Tucker payload has the wrong factor count");
    for (std::size_t p = 0; p < order; ++p) {
        if (q.phase_indices[p].size() != q.shape[p] * q.ranks[p])
            throw ConfigError("Tucker factor " + std::to_string(p) + " has the wrong number of phases");
        if (q.sigmas[p].length() != q.ranks[p]) throw ConfigError("Tucker weight vector length does not match rank");
        if (q.sigmas[p].unit_position != 0) throw CodecError("Tucker weights must list the unit entry first");
    }
    const std::size_t core = shape_product(q.ranks);
    if (q.core_phase_indices.size() != core || q.core_magnitude_indices.size() != core)
        throw ConfigError("Tucker core has the wrong number of entries");

    BitWriter w;
    w.write(static_cast<unsigned>(ModelKind::kTucker), kModelIdBits);
    write_factor_header(w, q.shape);
    for (auto r : q.ranks) w.write(r, kRankBits);
    write_resolutions(w, q.phase_bits);
    w.write(q.weight_bits - 1, kResolutionBits);
    for (std::size_t p = 0; p < order; ++p) write_indices(w, q.phase_indices[p], q.phase_bits[p]);
    write_indices(w, q.core_phase_indices, q.core_phase_bits());
    for (const auto& s : q.sigmas) write_indices(w, s.indices, q.weight_bits);
    write_indices(w, q.core_magnitude_indices, q.weight_bits);
    return std::move(w).finish();
}

Shape read_factor_header(BitReader& r) {
    const auto order = static_cast<std::size_t>(r.read(kOrderBits));
    if (order == 0) throw CodecError("malformed preamble: zero factors");
    Shape shape(order);
    for (auto& n : shape) n = static_cast<std::size_t>(r.read(kSizeBits));
    return shape;
}

std::vector<unsigned> read_resolutions(BitReader& r, std::size_t count) {
    std::vector<unsigned> bits(count);
    for (auto& b : bits) b = static_cast<unsigned>(r.read(kResolutionBits)) + 1;
    return bits;
}

QuantizedBaseline decode_baseline(BitReader& r) {
    const Shape shape = read_factor_header(r);
    if (shape.size() != 1) throw CodecError("malformed preamble: baseline message must have one factor");
    QuantizedBaseline q;
    q.bits = static_cast<unsigned>(r.read(kResolutionBits)) + 1;
    const BaselineLayout layout{shape[0], q.bits};
    validate_decoded(layout);
    require_body(r, payload_bits(layout).body_bits);
    q.indices = read_indices(r, layout.n, q.bits);
    return q;
}

QuantizedParafac decode_parafac(BitReader& r) {
    QuantizedParafac q;
    q.shape = read_factor_header(r);
    q.rank = static_cast<std::size_t>(r.read(kRankBits));
    q.phase_bits = read_resolutions(r, q.shape.size());
    q.weight_bits = static_cast<unsigned>(r.read(kResolutionBits)) + 1;
    const auto layout = layout_of(q);
    validate_decoded(layout);
    require_body(r, payload_bits(layout).body_bits);
    for (std::size_t p = 0; p < q.shape.size(); ++p)
        q.phase_indices.push_back(read_indices(r, q.shape[p] * q.rank, q.phase_bits[p]));
    q.weights.unit_position = 0;
    q.weights.indices = read_indices(r, q.rank - 1, q.weight_bits);
    return q;
}

QuantizedTucker decode_tucker(BitReader& r) {
    QuantizedTucker q;
    q.shape = read_factor_header(r);
    q.ranks.resize(q.shape.size());
    for (auto& rank : q.ranks) rank = static_cast<std::size_t>(r.read(kRankBits));
    q.phase_bits = read_resolutions(r, q.shape.size());
    q.weight_bits = static_cast<unsigned>(r.read(kResolutionBits)) + 1;
    const auto layout = layout_of(q);
    validate_decoded(layout);
    require_body(r, payload_bits(layout, PayloadAccounting::kCodec).body_bits);
    for (std::size_t p = 0; p < q.shape.size(); ++p)
        q.phase_indices.push_back(read_indices(r, q.shape[p] * q.ranks[p], q.phase_bits[p]));
    const std::size_t core = shape_product(q.ranks);
    q.core_phase_indices = read_indices(r, core, q.core_phase_bits());
    for (auto rank : q.ranks) {
        QuantizedWeights s;
        s.indices = read_indices(r, rank - 1, q.weight_bits);
        q.sigmas.push_back(std::move(s));
    }
    q.core_magnitude_indices = read_indices(r, core, q.weight_bits);
    return q;
}

void put_u32(std::ostream& os, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) os.put(static_cast<char>((v >> shift) & 0xffu));
}

} // namespace

// ---------------------------------------------------------------- layouts

void validate(const BaselineLayout& layout) {
    if (layout.n == 0 || layout.n > kMaxSize)
        throw ConfigError("baseline size must be between 1 and 65535, got " + std::to_string(layout.n));
    check_resolution(layout.bits, "phase");
}

void validate(const ParafacLayout& layout) {
    check_shape(layout.shape, layout.phase_bits, layout.weight_bits);
    if (layout.rank == 0 || layout.rank > kMaxRank)
        throw ConfigError("PARAFAC rank must be between 1 and 255, got " + std::to_string(layout.rank));
}

void validate(const TuckerLayout& layout) {
    check_shape(layout.shape, layout.phase_bits, layout.weight_bits);
    if (layout.ranks.size() != layout.shape.size())
        throw ConfigError("expected one Tucker rank per factor (" + std::to_string(layout.shape.size()) + "), got " +
                          std::to_string(layout.ranks.size()));
    for (std::size_t p = 0; p < layout.ranks.size(); ++p) {
        const auto r = layout.ranks[p];
        if (r == 0 || r > kMaxRank || r > layout.shape[p]) {
            throw ConfigError("Tucker rank " + std::to_string(r) + " for mode " + std::to_string(p) +
                              " must be between 1 and min(N_p, 255)");
        }
    }
}

std::uint64_t preamble_bits(ModelKind kind, std::size_t order) {
    const std::uint64_t p = order;
    switch (kind) {
    case ModelKind::kBaseline:
        return kModelIdBits + kOrderBits + kSizeBits + kResolutionBits;
    case ModelKind::kParafac:
        return kModelIdBits + kOrderBits + p * kSizeBits + kRankBits + p * kResolutionBits + kResolutionBits;
    case ModelKind::kTucker:
        return kModelIdBits + kOrderBits + p * (kSizeBits + kRankBits + kResolutionBits) + kResolutionBits;
    }
    throw ConfigError("unknown model kind");
}

PayloadCount payload_bits(const BaselineLayout& layout) {
    validate(layout);
    return {preamble_bits(ModelKind::kBaseline, 1), std::uint64_t{layout.n} * layout.bits};
}

PayloadCount payload_bits(const ParafacLayout& layout) {
    validate(layout);
    std::uint64_t phase_bits = 0;
    for (std::size_t p = 0; p < layout.shape.size(); ++p) phase_bits += std::uint64_t{layout.shape[p]} * layout.phase_bits[p];
    const std::uint64_t r = layout.rank;
    return {preamble_bits(ModelKind::kParafac, layout.shape.size()), r * phase_bits + (r - 1) * layout.weight_bits};
}

PayloadCount payload_bits(const TuckerLayout& layout, PayloadAccounting accounting) {
    validate(layout);
    std::uint64_t body = 0;
    for (std::size_t p = 0; p < layout.shape.size(); ++p)
        body += std::uint64_t{layout.ranks[p]} * layout.shape[p] * layout.phase_bits[p];
    const std::uint64_t core = shape_product(layout.ranks);
    if (accounting == PayloadAccounting::kLiteral) {
        body += core + std::uint64_t{layout.weight_bits} * product_minus_one(layout.ranks);
    } else {
        body += core * layout.phase_bits.front() + std::uint64_t{layout.weight_bits} * (sum_minus_one(layout.ranks) + core);
    }
    return {preamble_bits(ModelKind::kTucker, layout.shape.size()), body};
}

std::uint64_t conveyed_phases(const BaselineLayout& layout) { return layout.n; }

std::uint64_t conveyed_phases(const ParafacLayout& layout) {
    return layout.rank * std::accumulate(layout.shape.begin(), layout.shape.end(), std::uint64_t{0});
}

std::uint64_t conveyed_phases(const TuckerLayout& layout) {
    std::uint64_t total = 0;
    for (std::size_t p = 0; p < layout.shape.size(); ++p) total += std::uint64_t{layout.ranks.at(p)} * layout.shape[p];
    return total;
}

// ---------------------------------------------------------------- baseline

QuantizedBaseline quantize_baseline(std::span<const Complex> s, unsigned bits) {
    QuantizedBaseline q;
    q.bits = bits;
    q.indices = quantize_phases(s, PhaseCodebook(bits)).indices;
    return q;
}

PhaseShiftVector reconstruct_from_baseline(const QuantizedBaseline& q) {
    return project_unit_modulus(dequantize_phases(q.indices, PhaseCodebook(q.bits)));
}

BaselineLayout layout_of(const QuantizedBaseline& q) { return {q.indices.size(), q.bits}; }
ParafacLayout layout_of(const QuantizedParafac& q) { return {q.shape, q.rank, q.phase_bits, q.weight_bits}; }
TuckerLayout layout_of(const QuantizedTucker& q) { return {q.shape, q.ranks, q.phase_bits, q.weight_bits}; }

// ---------------------------------------------------------------- bits

void BitWriter::write(std::uint64_t value, unsigned width) {
    if (width > 64) throw CodecError("bit field wider than 64 bits");
    if (width < 64 && (value >> width) != 0)
        throw CodecError("value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
    for (unsigned i = width; i-- > 0;) {
        if (bits_ % 8 == 0) bytes_.push_back(0);
        if ((value >> i) & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
        ++bits_;
    }
}

FeedbackMessage BitWriter::finish() && { return {std::move(bytes_), bits_}; }

std::uint64_t BitReader::read(unsigned width) {
    if (width > 64) throw CodecError("bit field wider than 64 bits");
    if (remaining() < width) {
        throw CodecError("truncated message: needed " + std::to_string(width) + " bits at offset " +
                         std::to_string(pos_) + ", " + std::to_string(remaining()) + " available");
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i, ++pos_) {
        const auto byte = message_.bytes[pos_ / 8];
        v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
    }
    return v;
}

// ---------------------------------------------------------------- codec

FeedbackMessage encode_feedback(const FeedbackPayload& payload) {
    return std::visit([](const auto& q) { return encode_one(q); }, payload);
}

FeedbackPayload decode_feedback(const FeedbackMessage& message) {
    if (message.bytes.size() != (message.bit_length + 7) / 8) {
        throw CodecError("message holds " + std::to_string(message.bytes.size()) + " bytes for a bit length of " +
                         std::to_string(message.bit_length));
    }
    BitReader r(message);
    const auto id = r.read(kModelIdBits);
    FeedbackPayload out;
    switch (id) {
    case 0: out = decode_baseline(r); break;
    case 1: out = decode_parafac(r); break;
    case 2: out = decode_tucker(r); break;
    default: throw CodecError("unknown model id " + std::to_string(id));
    }
    if (r.remaining() != 0) throw CodecError(std::to_string(r.remaining()) + " trailing bits after the body");
    return out;
}

ModelKind kind_of(const FeedbackPayload& payload) { return static_cast<ModelKind>(payload.index()); }

PhaseShiftVector reconstruct(const FeedbackPayload& payload) {
    struct Visitor {
        PhaseShiftVector operator()(const QuantizedBaseline& q) const { return reconstruct_from_baseline(q); }
        PhaseShiftVector operator()(const QuantizedParafac& q) const { return reconstruct_from_parafac(q); }
        PhaseShiftVector operator()(const QuantizedTucker& q) const { return reconstruct_from_tucker(q); }
    };
    return std::visit(Visitor{}, payload);
}

void write_message_file(const std::filesystem::path& path, const FeedbackMessage& message) {
    if (message.bit_length > 0xffffffffu) throw CodecError("message too long for the file format");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, static_cast<std::uint32_t>(message.bit_length));
    os.write(reinterpret_cast<const char*>(message.bytes.data()), static_cast<std::streamsize>(message.bytes.size()));
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

FeedbackMessage read_message_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    const std::vector<std::uint8_t> raw{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    if (raw.size() < 8 || !std::equal(kMagic.begin(), kMagic.end(), raw.begin()))
        throw CodecError(path.string() + " is not a feedback message file");
    std::uint64_t bits = 0;
    for (std::size_t i = 4; i < 8; ++i) bits = (bits << 8) | raw[i];
    FeedbackMessage m{{raw.begin() + 8, raw.end()}, bits};
    if (m.bytes.size() != (bits + 7) / 8) throw CodecError("message file length does not match its header");
    return m;
}

} // namespace irsfb
