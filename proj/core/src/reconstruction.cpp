// SPDX-License-Identifier: Apache-2.0
#include "irsfb/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "irsfb/errors.hpp"

namespace irsfb {

namespace {

std::vector<unsigned> expand_bits(std::span<const unsigned> bits, std::size_t order) {
    if (bits.size() == 1) return std::vector<unsigned>(order, bits[0]);
    if (bits.size() != order) {
        throw DimensionError("expected 1 or " + std::to_string(order) + " phase resolutions, got " +
                             std::to_string(bits.size()));
    }
    return {bits.begin(), bits.end()};
}

ComplexMatrix unit_modulus_factor(std::span<const CodeIndex> indices, std::size_t rows, std::size_t cols,
                                  const PhaseCodebook& codebook) {
    if (indices.size() != rows * cols) throw DimensionError("factor phase index count does not match its size");
    return ComplexMatrix(rows, cols, dequantize_phases(indices, codebook));
}

// Outer product of the per-mode weight vectors, column-major over the core.
std::vector<double> weight_outer_product(const std::vector<std::vector<double>>& sigmas, const Shape& ranks) {
    std::vector<double> out(shape_product(ranks), 1.0);
    std::size_t stride = 1;
    for (std::size_t p = 0; p < ranks.size(); ++p) {
        if (sigmas[p].size() != ranks[p]) throw DimensionError("weight vector length does not match core rank");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= sigmas[p][(i / stride) % ranks[p]];
        stride *= ranks[p];
    }
    return out;
}

} // namespace

PhaseShiftVector project_unit_modulus(std::span<const Complex> v) {
    PhaseShiftVector s;
    s.entries.reserve(v.size());
    for (const auto& z : v) {
        const double mag = std::abs(z);
        if (mag == 0.0) {
            ++s.zero_magnitude_count;
            s.entries.emplace_back(1.0, 0.0);
        } else {
            s.entries.push_back(z / mag);
        }
    }
    return s;
}

QuantizedParafac quantize_parafac(const ParafacModel& model, std::span<const unsigned> phase_bits,
                                  unsigned weight_bits) {
    const std::size_t order = model.factors.size();
    const std::size_t rank = model.rank();
    if (order == 0 || rank == 0) throw DimensionError("quantize_parafac: empty model");

    QuantizedParafac q;
    q.shape = model.shape();
    q.rank = rank;
    q.phase_bits = expand_bits(phase_bits, order);
    q.weight_bits = weight_bits;

    // Largest component first, the rest in their original order.
    const auto max_it = std::max_element(model.weights.begin(), model.weights.end());
    const auto lead = static_cast<std::size_t>(max_it - model.weights.begin());
    std::vector<std::size_t> perm{lead};
    for (std::size_t r = 0; r < rank; ++r)
        if (r != lead) perm.push_back(r);

    std::vector<double> weights(rank);
    for (std::size_t r = 0; r < rank; ++r) weights[r] = model.weights[perm[r]];
    q.weights = quantize_parafac_weights(weights, AmplitudeCodebook(weight_bits));

    for (std::size_t p = 0; p < order; ++p) {
        const PhaseCodebook cb(q.phase_bits[p]);
        std::vector<CodeIndex> idx;
        idx.reserve(q.shape[p] * rank);
        for (std::size_t r = 0; r < rank; ++r) {
            auto qp = quantize_phases(model.factors[p].col(perm[r]), cb);
            idx.insert(idx.end(), qp.indices.begin(), qp.indices.end());
        }
        q.phase_indices.push_back(std::move(idx));
    }
    return q;
}

ParafacModel dequantize(const QuantizedParafac& q) {
    if (q.phase_indices.size() != q.shape.size() || q.phase_bits.size() != q.shape.size())
        throw DimensionError("quantized PARAFAC payload is inconsistent with its shape");
    if (q.weights.length() != q.rank) throw DimensionError("quantized PARAFAC weight count does not match rank");
    ParafacModel m;
    for (std::size_t p = 0; p < q.shape.size(); ++p) {
        m.factors.push_back(unit_modulus_factor(q.phase_indices[p], q.shape[p], q.rank, PhaseCodebook(q.phase_bits[p])));
    }
    m.weights = dequantize(q.weights, AmplitudeCodebook(q.weight_bits));
    return m;
}

QuantizedTucker quantize_tucker(const TuckerModel& model, std::span<const unsigned> phase_bits,
                                unsigned weight_bits) {
    const std::size_t order = model.factors.size();
    if (order == 0) throw DimensionError("quantize_tucker: empty model");

    QuantizedTucker q;
    q.shape = model.shape();
    q.ranks = model.ranks();
    q.phase_bits = expand_bits(phase_bits, order);
    q.weight_bits = weight_bits;

    const AmplitudeCodebook amp(weight_bits);
    q.sigmas = quantize_tucker_weights(model.sigmas, amp);

    for (std::size_t p = 0; p < order; ++p) {
        q.phase_indices.push_back(quantize_phases(model.factors[p].data(), PhaseCodebook(q.phase_bits[p])).indices);
    }

    std::vector<std::vector<double>> sigma_tilde;
    for (const auto& s : q.sigmas) sigma_tilde.push_back(dequantize(s, amp));
    const auto scale = weight_outer_product(sigma_tilde, q.ranks);

    CVector residual(model.core.size());
    double largest = 0.0;
    for (std::size_t i = 0; i < residual.size(); ++i) {
        residual[i] = model.core.data()[i] / scale[i];
        largest = std::max(largest, std::abs(residual[i]));
    }
    if (largest == 0.0) throw NumericalError("quantize_tucker: core tensor is zero");

    const PhaseCodebook core_cb(q.core_phase_bits());
    for (const auto& h : residual) {
        q.core_phase_indices.push_back(core_cb.nearest(std::arg(h)));
        q.core_magnitude_indices.push_back(amp.nearest(std::abs(h) / largest));
    }
    return q;
}

TuckerModel dequantize(const QuantizedTucker& q) {
    const std::size_t order = q.shape.size();
    if (q.ranks.size() != order || q.phase_indices.size() != order || q.phase_bits.size() != order ||
        q.sigmas.size() != order)
        throw DimensionError("quantized Tucker payload is inconsistent with its shape");
    const std::size_t core_size = shape_product(q.ranks);
    if (q.core_phase_indices.size() != core_size || q.core_magnitude_indices.size() != core_size)
        throw DimensionError("quantized Tucker core has the wrong number of entries");

    const AmplitudeCodebook amp(q.weight_bits);
    TuckerModel m;
    for (std::size_t p = 0; p < order; ++p) {
        m.factors.push_back(unit_modulus_factor(q.phase_indices[p], q.shape[p], q.ranks[p], PhaseCodebook(q.phase_bits[p])));
        if (q.sigmas[p].length() != q.ranks[p]) throw DimensionError("Tucker weight vector length does not match rank");
        m.sigmas.push_back(dequantize(q.sigmas[p], amp));
    }
    const PhaseCodebook core_cb(q.core_phase_bits());
    CVector core(core_size);
    for (std::size_t i = 0; i < core_size; ++i) {
        core[i] = std::polar(amp.codeword(q.core_magnitude_indices[i]), core_cb.codeword(q.core_phase_indices[i]));
    }
    m.core = DenseTensor(q.ranks, std::move(core));
    return m;
}

PhaseShiftVector reconstruct_from_parafac(const std::vector<ComplexMatrix>& factors,
                                          std::span<const double> weights) {
    ParafacModel m{factors, std::vector<double>(weights.begin(), weights.end())};
    return project_unit_modulus(reconstruct_parafac_unfolding(m).vec());
}

PhaseShiftVector reconstruct_from_parafac(const QuantizedParafac& q) {
    const ParafacModel m = dequantize(q);
    return reconstruct_from_parafac(m.factors, m.weights);
}

PhaseShiftVector reconstruct_from_tucker(const std::vector<ComplexMatrix>& factors, const DenseTensor& core,
                                         const std::vector<std::vector<double>>& sigmas) {
    if (factors.size() != core.order() || sigmas.size() != core.order())
        throw DimensionError("reconstruct_from_tucker: factor, core and weight orders differ");
    DenseTensor acc = core;
    for (std::size_t p = 0; p < factors.size(); ++p) {
        if (factors[p].cols() != core.shape()[p] || sigmas[p].size() != core.shape()[p])
            throw DimensionError("reconstruct_from_tucker: rank mismatch in mode " + std::to_string(p));
        ComplexMatrix scaled = factors[p];
        for (std::size_t r = 0; r < scaled.cols(); ++r)
            for (auto& z : scaled.col(r)) z *= sigmas[p][r];
        acc = mode_product(acc, scaled, p);
    }
    return project_unit_modulus(acc.data());
}

PhaseShiftVector reconstruct_from_tucker(const QuantizedTucker& q) {
    const TuckerModel m = dequantize(q);
    return reconstruct_from_tucker(m.factors, m.core, m.sigmas);
}

PhaseShiftVector reconstruct_from_tucker(const TuckerModel& model) {
    std::vector<std::vector<double>> normalized;
    for (const auto& s : model.sigmas) {
        std::vector<double> n(s.size(), 0.0);
        if (!s.empty() && s.front() > 0.0)
            std::transform(s.begin(), s.end(), n.begin(), [&](double x) { return x / s.front(); });
        normalized.push_back(std::move(n));
    }
    const auto scale = weight_outer_product(normalized, model.core.shape());
    CVector residual(model.core.size());
    for (std::size_t i = 0; i < residual.size(); ++i)
        residual[i] = scale[i] > 0.0 ? model.core.data()[i] / scale[i] : Complex{};
    return reconstruct_from_tucker(model.factors, DenseTensor(model.core.shape(), std::move(residual)), normalized);
}

} // namespace irsfb
