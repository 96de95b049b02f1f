// SPDX-License-Identifier: Apache-2.0
//
// Complex thin SVD (one-sided Jacobi), Moore-Penrose pseudo-inverse and the
// dominant singular triplet. Problem sizes in this library are small (at most
// a few thousand rows by a few dozen columns), so the Jacobi iteration is used
// for its accuracy rather than speed.
#pragma once

#include <vector>

#include "irsfb/tensor.hpp"

namespace irsfb {

/// Thin SVD m = U diag(s) Vh with k = min(rows, cols).
///
/// Phase convention: the largest-magnitude entry of every column of U is real
/// and positive (first such entry on ties); Vh absorbs the compensating phase.
struct SvdResult {
    ComplexMatrix u;                      ///< rows x k, orthonormal columns
    std::vector<double> singular_values;  ///< length k, non-increasing
    ComplexMatrix vh;                     ///< k x cols, orthonormal rows
};

struct SingularTriplet {
    CVector u;
    double sigma = 0.0;
    CVector v;
};

/// Off-diagonal convergence threshold of the Jacobi sweeps.
inline constexpr double kJacobiTolerance = 1e-12;
/// Relative cut-off below which singular values are treated as zero by the
/// pseudo-inverse.
inline constexpr double kPinvRelativeTolerance = 1e-12;

/// Throws NumericalError on non-finite input.
SvdResult svd(const ComplexMatrix& m);

ComplexMatrix pseudo_inverse(const ComplexMatrix& m);

SingularTriplet dominant_singular_vectors(const ComplexMatrix& m);

} // namespace irsfb
