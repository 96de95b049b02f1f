// SPDX-License-Identifier: Apache-2.0
//
// Low-rank fits of a tensorized phase-shift vector: PARAFAC (CP) by
// alternating least squares and Tucker by truncated HOSVD.
#pragma once

#include <cstdint>
#include <vector>

#include "irsfb/tensor.hpp"

namespace irsfb {

/// CP model sum_r weights[r] * f1_r o f2_r o ... o fP_r.
/// Each factor is N_p x R with unit-norm columns.
struct ParafacModel {
    std::vector<ComplexMatrix> factors;
    std::vector<double> weights;

    std::size_t rank() const { return weights.size(); }
    Shape shape() const;
};

/// Tucker model core x_1 S1 x_2 S2 ... x_P SP; factors have orthonormal
/// columns and `sigmas[p]` holds the leading R_p singular values of the
/// mode-p unfolding.
struct TuckerModel {
    std::vector<ComplexMatrix> factors;
    DenseTensor core;
    std::vector<std::vector<double>> sigmas;

    Shape ranks() const;
    Shape shape() const;
};

struct FitReport {
    std::size_t iterations = 0;
    std::vector<double> nmse_trace;  ///< one entry per iteration
    bool converged = false;          ///< stopped by the epsilon rule, not the iteration cap
    double final_nmse = 0.0;
    /// R exceeds the row count of some Khatri-Rao design matrix, so the
    /// least-squares updates are rank deficient.
    bool rank_exceeds_design = false;
};

struct AlsOptions {
    std::size_t rank = 1;
    std::size_t max_iterations = 500;
    double epsilon = 1e-6;
    std::uint64_t seed = 0;
};

struct ParafacFit {
    ParafacModel model;
    FitReport report;
};

struct TuckerFit {
    TuckerModel model;
    FitReport report;
};

/// PARAFAC by ALS. Factors are updated in mode order 0..P-1, each from the
/// least-squares solution against the current (normalized) other factors,
/// then column-normalized. Stops when |e_i - e_{i-1}| <= epsilon or after
/// max_iterations. Throws NumericalError on non-finite or all-zero input.
ParafacFit parafac_als(const DenseTensor& t, const AlsOptions& options);

/// Mode-0 unfolding of the model: S1 diag(w) (SP kr ... kr S2)^T.
ComplexMatrix reconstruct_parafac_unfolding(const ParafacModel& model);
DenseTensor to_tensor(const ParafacModel& model);

/// Truncated HOSVD with multilinear ranks `ranks` (1 <= R_p <= N_p).
TuckerFit tucker_hosvd(const DenseTensor& t, const Shape& ranks);
DenseTensor to_tensor(const TuckerModel& model);

/// Khatri-Rao product of all factors except `skip`, highest mode first:
/// F_{P-1} kr ... kr F_{skip+1} kr F_{skip-1} kr ... kr F_0.
ComplexMatrix khatri_rao_except(const std::vector<ComplexMatrix>& factors, std::size_t skip);

/// ||reference - estimate||_F^2 / ||reference||_F^2.
double nmse(const DenseTensor& reference, const DenseTensor& estimate);
double nmse(const ComplexMatrix& reference, const ComplexMatrix& estimate);

} // namespace irsfb
