// SPDX-License-Identifier: Apache-2.0
//
// Feedback payload layouts, their analytic bit counts, and the bit-exact
// message codec.
//
// Message layout (all fields big-endian, most significant bit first):
//
//   preamble  model id            2 bits   00 baseline, 01 PARAFAC, 10 Tucker
//             P                   4 bits   number of factors (1 for baseline)
//             N_p                16 bits   per factor
//             R                   8 bits   PARAFAC only (one field)
//             R_p                 8 bits   Tucker only (per factor)
//             b_p - 1             4 bits   per factor
//             b_w - 1             4 bits   PARAFAC and Tucker only
//   body      factor phase indices, factor by factor, column-major, b_p bits each
//             Tucker core phase indices, column-major, b_1 bits each
//             weight indices, b_w bits each: PARAFAC weights 2..R; for Tucker
//             sigma entries 2..R_p of every mode, then the core magnitudes
//
// The message carries no padding in its bit length; the byte buffer is
// zero-padded to a whole byte.
#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "irsfb/quantization.hpp"
#include "irsfb/reconstruction.hpp"
#include "irsfb/tensor.hpp"

namespace irsfb {

enum class ModelKind : std::uint8_t { kBaseline = 0, kParafac = 1, kTucker = 2 };

inline constexpr unsigned kModelIdBits = 2;
inline constexpr unsigned kOrderBits = 4;
inline constexpr unsigned kSizeBits = 16;
inline constexpr unsigned kRankBits = 8;
inline constexpr unsigned kResolutionBits = 4;

struct BaselineLayout {
    std::size_t n = 0;
    unsigned bits = 1;
};

struct ParafacLayout {
    Shape shape;
    std::size_t rank = 1;
    std::vector<unsigned> phase_bits;  ///< one per factor
    unsigned weight_bits = 1;
};

struct TuckerLayout {
    Shape shape;
    Shape ranks;
    std::vector<unsigned> phase_bits;  ///< one per factor
    unsigned weight_bits = 1;
};

/// How the Tucker weight and core terms are counted.
///
/// kLiteral: prod R_p core bits plus b_w prod(R_p - 1) weight bits.
/// kCodec:   what the codec actually sends, prod R_p core phases at b_1 bits
///           plus b_w (sum (R_p - 1) + prod R_p) weight and magnitude bits.
enum class PayloadAccounting { kLiteral, kCodec };

struct PayloadCount {
    std::uint64_t preamble_bits = 0;
    std::uint64_t body_bits = 0;

    std::uint64_t total() const noexcept { return preamble_bits + body_bits; }
    std::uint64_t total(bool include_preamble) const noexcept {
        return include_preamble ? total() : body_bits;
    }
};

/// Throw ConfigError when a layout is inconsistent or cannot be framed.
void validate(const BaselineLayout& layout);
void validate(const ParafacLayout& layout);
void validate(const TuckerLayout& layout);

std::uint64_t preamble_bits(ModelKind kind, std::size_t order);

PayloadCount payload_bits(const BaselineLayout& layout);
PayloadCount payload_bits(const ParafacLayout& layout);
PayloadCount payload_bits(const TuckerLayout& layout, PayloadAccounting accounting = PayloadAccounting::kLiteral);

/// Number of phase-shifts conveyed: N, R sum N_p, or sum R_p N_p.
std::uint64_t conveyed_phases(const BaselineLayout& layout);
std::uint64_t conveyed_phases(const ParafacLayout& layout);
std::uint64_t conveyed_phases(const TuckerLayout& layout);

/// Quantized phases of the full (unfactorized) vector.
struct QuantizedBaseline {
    unsigned bits = 1;
    std::vector<CodeIndex> indices;

    friend bool operator==(const QuantizedBaseline&, const QuantizedBaseline&) = default;
};

QuantizedBaseline quantize_baseline(std::span<const Complex> s, unsigned bits);
PhaseShiftVector reconstruct_from_baseline(const QuantizedBaseline& q);

BaselineLayout layout_of(const QuantizedBaseline& q);
ParafacLayout layout_of(const QuantizedParafac& q);
TuckerLayout layout_of(const QuantizedTucker& q);

using FeedbackPayload = std::variant<QuantizedBaseline, QuantizedParafac, QuantizedTucker>;

struct FeedbackMessage {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bit_length = 0;

    friend bool operator==(const FeedbackMessage&, const FeedbackMessage&) = default;
};

class BitWriter {
public:
    /// Appends the low `width` bits of `value`, most significant first.
    void write(std::uint64_t value, unsigned width);
    std::uint64_t bit_length() const noexcept { return bits_; }
    FeedbackMessage finish() &&;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bits_ = 0;
};

class BitReader {
public:
    explicit BitReader(const FeedbackMessage& message) : message_(message) {}
    /// Throws CodecError when fewer than `width` bits remain.
    std::uint64_t read(unsigned width);
    std::uint64_t remaining() const noexcept { return message_.bit_length - pos_; }

private:
    const FeedbackMessage& message_;
    std::uint64_t pos_ = 0;
};

/// Throws CodecError if a field does not fit its width or indices exceed
/// their codebook, and ConfigError on inconsistent payloads.
FeedbackMessage encode_feedback(const FeedbackPayload& payload);
/// Throws CodecError on truncated or trailing data and unknown model ids.
FeedbackPayload decode_feedback(const FeedbackMessage& message);

ModelKind kind_of(const FeedbackPayload& payload);
PhaseShiftVector reconstruct(const FeedbackPayload& payload);

/// File format: "IRSF", the bit length as a big-endian u32, then the bytes.
void write_message_file(const std::filesystem::path& path, const FeedbackMessage& message);
FeedbackMessage read_message_file(const std::filesystem::path& path);

} // namespace irsfb
