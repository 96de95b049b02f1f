// SPDX-License-Identifier: Apache-2.0
#include "irsfb/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "irsfb/errors.hpp"

namespace irsfb {

namespace {

void check_bits(unsigned bits) {
    if (bits < kMinCodebookBits || bits > kMaxCodebookBits) {
        throw DimensionError("codebook resolution must be between 1 and 16 bits, got " + std::to_string(bits));
    }
}

void check_index(CodeIndex index, std::size_t size) {
    if (index >= size) {
        throw DimensionError("code index " + std::to_string(index) + " out of range for codebook of size " +
                             std::to_string(size));
    }
}

} // namespace

double wrapped_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

// ---------------------------------------------------------------- phases

PhaseCodebook::PhaseCodebook(unsigned bits) : bits_(bits) {
    check_bits(bits);
    const std::size_t m = std::size_t{1} << bits;
    codewords_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        codewords_[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(m);
    }
    codewords_.back() = std::numbers::pi;
}

double PhaseCodebook::codeword(CodeIndex index) const {
    check_index(index, codewords_.size());
    return codewords_[index];
}

CodeIndex PhaseCodebook::nearest(double angle) const {
    const std::size_t m = codewords_.size();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
    // Position relative to -pi in units of the codeword spacing; codeword k
    // (1-based) sits at k, and k = 0 wraps onto k = m.
    const double x = (std::remainder(angle, 2.0 * std::numbers::pi) + std::numbers::pi) / step;
    const auto k0 = static_cast<long long>(std::floor(x));
    CodeIndex best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (long long k = k0 - 1; k <= k0 + 2; ++k) {
        long long wrapped = ((k - 1) % static_cast<long long>(m) + static_cast<long long>(m)) % static_cast<long long>(m);
        const auto idx = static_cast<CodeIndex>(wrapped);
        const double d = wrapped_distance(angle, codewords_[idx]);
        if (d < best_dist || (d == best_dist && idx < best)) {
            best_dist = d;
            best = idx;
        }
    }
    return best;
}

QuantizedPhases quantize_phases(std::span<const Complex> v, const PhaseCodebook& codebook) {
    QuantizedPhases q;
    q.indices.reserve(v.size());
    q.values.reserve(v.size());
    for (const auto& z : v) {
        const CodeIndex idx = codebook.nearest(std::arg(z));
        q.indices.push_back(idx);
        q.values.push_back(std::polar(1.0, codebook.codeword(idx)));
    }
    return q;
}

CVector dequantize_phases(std::span<const CodeIndex> indices, const PhaseCodebook& codebook) {
    CVector out;
    out.reserve(indices.size());
    for (auto idx : indices) out.push_back(std::polar(1.0, codebook.codeword(idx)));
    return out;
}

// ---------------------------------------------------------------- amplitudes

AmplitudeCodebook::AmplitudeCodebook(unsigned bits) : bits_(bits) {
    check_bits(bits);
    const std::size_t m = std::size_t{1} << bits;
    const double step = (1.0 - 0.01) / static_cast<double>(m - 1);
    codewords_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        codewords_[i] = std::round((0.01 + static_cast<double>(i) * step) * 100.0) / 100.0;
    }
}

double AmplitudeCodebook::codeword(CodeIndex index) const {
    check_index(index, codewords_.size());
    return codewords_[index];
}

CodeIndex AmplitudeCodebook::nearest(double value) const {
    const auto first = codewords_.begin();
    auto hi = std::lower_bound(first, codewords_.end(), value);
    if (hi == first) return 0;
    if (hi == codewords_.end()) {
        return static_cast<CodeIndex>(std::lower_bound(first, codewords_.end(), codewords_.back()) - first);
    }
    auto lo = std::lower_bound(first, codewords_.end(), *(hi - 1));
    const double d_lo = value - *lo;
    const double d_hi = *hi - value;
    return static_cast<CodeIndex>((d_lo <= d_hi ? lo : hi) - first);
}

QuantizedWeights quantize_parafac_weights(std::span<const double> weights, const AmplitudeCodebook& codebook) {
    if (weights.empty()) throw DimensionError("quantize_parafac_weights: empty weight vector");
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw NumericalError("quantize_parafac_weights: weights must be finite and >= 0");
    }
    const auto max_it = std::max_element(weights.begin(), weights.end());
    const double wmax = *max_it;
    if (!(wmax > 0.0)) throw NumericalError("quantize_parafac_weights: all weights are zero");

    QuantizedWeights q;
    q.unit_position = static_cast<std::size_t>(max_it - weights.begin());
    for (std::size_t r = 0; r < weights.size(); ++r) {
        if (r == q.unit_position) continue;
        q.indices.push_back(codebook.nearest(weights[r] / wmax));
    }
    return q;
}

std::vector<QuantizedWeights> quantize_tucker_weights(const std::vector<std::vector<double>>& sigmas,
                                                      const AmplitudeCodebook& codebook) {
    std::vector<QuantizedWeights> out;
    out.reserve(sigmas.size());
    for (const auto& sigma : sigmas) {
        if (sigma.empty()) throw DimensionError("quantize_tucker_weights: empty singular-value vector");
        if (!(sigma.front() > 0.0) || !std::isfinite(sigma.front())) {
            throw NumericalError("quantize_tucker_weights: leading singular value must be positive");
        }
        QuantizedWeights q;
        q.unit_position = 0;
        for (std::size_t k = 1; k < sigma.size(); ++k) q.indices.push_back(codebook.nearest(sigma[k] / sigma.front()));
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<double> dequantize(const QuantizedWeights& q, const AmplitudeCodebook& codebook) {
    if (q.unit_position > q.indices.size()) throw DimensionError("dequantize: unit position out of range");
    std::vector<double> out;
    out.reserve(q.length());
    std::size_t next = 0;
    for (std::size_t r = 0; r < q.length(); ++r) {
        out.push_back(r == q.unit_position ? 1.0 : codebook.codeword(q.indices[next++]));
    }
    return out;
}

} // namespace irsfb
