// SPDX-License-Identifier: Apache-2.0
//
// Quantized factor payloads and the controller-side rebuild of the IRS
// phase-shift vector from them.
//
// PARAFAC:  s_hat = sum_r w_r (s_r^(P) kron ... kron s_r^(1))
// Tucker:   s_hat = sum_{r_1..r_P} G_{r_1..r_P} (sig_{r_P} s_{r_P}^(P)) kron ... kron (sig_{r_1} s_{r_1}^(1))
//
// followed by the unit-modulus projection s = exp(j angle(s_hat)).
#pragma once

#include <vector>

#include "irsfb/decomposition.hpp"
#include "irsfb/quantization.hpp"
#include "irsfb/tensor.hpp"

namespace irsfb {

struct PhaseShiftVector {
    CVector entries;                     ///< unit modulus
    std::size_t zero_magnitude_count = 0;  ///< entries of s_hat that were exactly 0 (assigned phase 0)

    std::size_t size() const noexcept { return entries.size(); }
};

/// exp(j angle(v)) elementwise; zero entries take phase 0 and are counted.
PhaseShiftVector project_unit_modulus(std::span<const Complex> v);

/// Quantized PARAFAC payload. Components are ordered so that the largest
/// weight comes first; weights.unit_position is therefore always 0.
struct QuantizedParafac {
    Shape shape;
    std::size_t rank = 1;
    std::vector<unsigned> phase_bits;  ///< b_F^(p), one per factor
    unsigned weight_bits = 1;
    std::vector<std::vector<CodeIndex>> phase_indices;  ///< per factor, N_p * R, column-major
    QuantizedWeights weights;

    friend bool operator==(const QuantizedParafac&, const QuantizedParafac&) = default;
};

/// Quantized Tucker payload.
///
/// The core is sent as phase and magnitude. Its phase uses the mode-0 phase
/// resolution. Its magnitude is the residual |G| / prod_p sigma~(p), normalized
/// by the largest entry and quantized with the amplitude codebook, so that the
/// weighted rebuild reproduces G when nothing is quantized.
struct QuantizedTucker {
    Shape shape;
    Shape ranks;
    std::vector<unsigned> phase_bits;
    unsigned weight_bits = 1;
    std::vector<std::vector<CodeIndex>> phase_indices;  ///< per factor, N_p * R_p, column-major
    std::vector<CodeIndex> core_phase_indices;          ///< prod R_p, column-major
    std::vector<CodeIndex> core_magnitude_indices;      ///< prod R_p, column-major
    std::vector<QuantizedWeights> sigmas;               ///< one per mode, unit_position 0

    unsigned core_phase_bits() const { return phase_bits.empty() ? 0 : phase_bits.front(); }
    friend bool operator==(const QuantizedTucker&, const QuantizedTucker&) = default;
};

/// `phase_bits` holds either one entry (used for every factor) or one per factor.
QuantizedParafac quantize_parafac(const ParafacModel& model, std::span<const unsigned> phase_bits,
                                  unsigned weight_bits);
QuantizedTucker quantize_tucker(const TuckerModel& model, std::span<const unsigned> phase_bits,
                                unsigned weight_bits);

/// Dequantized factor form (unit-modulus factor entries, codebook weights).
ParafacModel dequantize(const QuantizedParafac& q);
/// Dequantized Tucker model whose core already holds the rebuilt complex
/// entries (phase and residual magnitude).
TuckerModel dequantize(const QuantizedTucker& q);

/// Rebuild from (possibly quantized) PARAFAC factors and weights.
PhaseShiftVector reconstruct_from_parafac(const std::vector<ComplexMatrix>& factors,
                                          std::span<const double> weights);
PhaseShiftVector reconstruct_from_parafac(const QuantizedParafac& q);

/// Rebuild from Tucker factors, core and per-mode weights.
PhaseShiftVector reconstruct_from_tucker(const std::vector<ComplexMatrix>& factors, const DenseTensor& core,
                                         const std::vector<std::vector<double>>& sigmas);
PhaseShiftVector reconstruct_from_tucker(const QuantizedTucker& q);

/// Unquantized Tucker rebuild. The core is divided by the outer product of the
/// normalized sigmas first, so that the weighted sum reproduces the model.
PhaseShiftVector reconstruct_from_tucker(const TuckerModel& model);

} // namespace irsfb
