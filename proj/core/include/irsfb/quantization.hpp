// SPDX-License-Identifier: Apache-2.0
//
// Scalar codebooks for phase-shifts and weighting factors.
//
// Phase codebook with b bits: { -pi + 2 pi k / 2^b : k = 1..2^b }, so the last
// codeword is pi and index i holds k = i + 1. Amplitude codebook with b bits:
// 2^b uniformly spaced values from 0.01 to 1, each rounded to two decimals.
// Both quantizers map to the nearest codeword; exact ties go to the smaller
// index.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irsfb/tensor.hpp"

namespace irsfb {

using CodeIndex = std::uint32_t;

inline constexpr unsigned kMinCodebookBits = 1;
inline constexpr unsigned kMaxCodebookBits = 16;

class PhaseCodebook {
public:
    explicit PhaseCodebook(unsigned bits);

    unsigned bits() const noexcept { return bits_; }
    std::size_t size() const noexcept { return codewords_.size(); }
    std::span<const double> codewords() const noexcept { return codewords_; }
    /// Angle in radians; throws DimensionError when out of range.
    double codeword(CodeIndex index) const;
    /// Index of the codeword nearest to `angle` in wrapped angular distance.
    CodeIndex nearest(double angle) const;

private:
    unsigned bits_;
    std::vector<double> codewords_;
};

class AmplitudeCodebook {
public:
    explicit AmplitudeCodebook(unsigned bits);

    unsigned bits() const noexcept { return bits_; }
    std::size_t size() const noexcept { return codewords_.size(); }
    std::span<const double> codewords() const noexcept { return codewords_; }
    double codeword(CodeIndex index) const;
    CodeIndex nearest(double value) const;

private:
    unsigned bits_;
    std::vector<double> codewords_;  // non-decreasing; may repeat after rounding
};

/// Smallest wrapped distance |a - b| modulo 2 pi, in [0, pi].
double wrapped_distance(double a, double b);

struct QuantizedPhases {
    std::vector<CodeIndex> indices;
    CVector values;  ///< unit-modulus e^{j codeword}
};

QuantizedPhases quantize_phases(std::span<const Complex> v, const PhaseCodebook& codebook);
CVector dequantize_phases(std::span<const CodeIndex> indices, const PhaseCodebook& codebook);

/// A weight vector normalized by its largest entry. The entry at
/// `unit_position` is exactly 1 and carries no index; `indices` holds the
/// remaining entries in order.
struct QuantizedWeights {
    std::vector<CodeIndex> indices;
    std::size_t unit_position = 0;

    std::size_t length() const noexcept { return indices.size() + 1; }
    friend bool operator==(const QuantizedWeights&, const QuantizedWeights&) = default;
};

/// Normalizes by the largest entry (first one on ties). Throws NumericalError
/// if every entry is zero or any entry is negative or non-finite.
QuantizedWeights quantize_parafac_weights(std::span<const double> weights, const AmplitudeCodebook& codebook);

/// One QuantizedWeights per mode, each normalized by its leading singular
/// value (unit_position 0). Throws NumericalError on a zero leading value.
std::vector<QuantizedWeights> quantize_tucker_weights(const std::vector<std::vector<double>>& sigmas,
                                                      const AmplitudeCodebook& codebook);

std::vector<double> dequantize(const QuantizedWeights& q, const AmplitudeCodebook& codebook);

} // namespace irsfb
