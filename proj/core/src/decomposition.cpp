// SPDX-License-Identifier: Apache-2.0
#include "irsfb/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "irsfb/errors.hpp"
#include "irsfb/linalg.hpp"
#include "irsfb/random.hpp"

namespace irsfb {

namespace {

constexpr double kColumnFloor = 1e-14;

void normalize_column(std::span<Complex> col, double norm) {
    for (auto& z : col) z /= norm;
}

void random_unit_column(Rng& rng, std::span<Complex> col) {
    for (auto& z : col) z = complex_gaussian(rng);
    normalize_column(col, std::sqrt(squared_norm(col)));
}

// Extends an orthonormal set of columns to `count` columns.
ComplexMatrix complete_orthonormal(const ComplexMatrix& u, std::size_t count) {
    ComplexMatrix out(u.rows(), count);
    const std::size_t have = std::min(u.cols(), count);
    for (std::size_t j = 0; j < have; ++j) std::copy(u.col(j).begin(), u.col(j).end(), out.col(j).begin());
    std::size_t basis = 0;
    for (std::size_t k = have; k < count; ++k) {
        while (basis < u.rows()) {
            CVector cand(u.rows());
            cand[basis++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < k; ++j) {
                    auto uj = out.col(j);
                    Complex proj{};
                    for (std::size_t i = 0; i < cand.size(); ++i) proj += std::conj(uj[i]) * cand[i];
                    for (std::size_t i = 0; i < cand.size(); ++i) cand[i] -= proj * uj[i];
                }
            }
            const double nrm = std::sqrt(squared_norm(cand));
            if (nrm > 0.5) {
                auto dst = out.col(k);
                for (std::size_t i = 0; i < cand.size(); ++i) dst[i] = cand[i] / nrm;
                break;
            }
        }
    }
    return out;
}

// Each component is invariant under opposite phase rotations of its factor
// columns. Make the largest-magnitude entry of every column in factors 1..P-1
// real and positive, and move the compensating phase into factor 0. The
// model is unchanged; the pinned entries land exactly on a phase codeword.
void fix_phase_gauge(std::vector<ComplexMatrix>& factors) {
    if (factors.size() < 2) return;
    for (std::size_t r = 0; r < factors[0].cols(); ++r) {
        Complex total{1.0, 0.0};
        for (std::size_t p = 1; p < factors.size(); ++p) {
            auto col = factors[p].col(r);
            const auto it = std::max_element(col.begin(), col.end(),
                                             [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
            const double mag = std::abs(*it);
            if (mag == 0.0) continue;
            const Complex rot = std::conj(*it) / mag;
            for (auto& z : col) z *= rot;
            *it = mag;
            total *= rot;
        }
        for (auto& z : factors[0].col(r)) z /= total;
    }
}

void check_input(const DenseTensor& t, const char* who) {
    if (!t.all_finite()) throw NumericalError(std::string(who) + ": input contains non-finite entries");
    if (t.frobenius_norm() == 0.0) throw NumericalError(std::string(who) + ": input tensor is zero");
}

} // namespace

Shape ParafacModel::shape() const {
    Shape s;
    for (const auto& f : factors) s.push_back(f.rows());
    return s;
}

Shape TuckerModel::ranks() const { return core.shape(); }

Shape TuckerModel::shape() const {
    Shape s;
    for (const auto& f : factors) s.push_back(f.rows());
    return s;
}

ComplexMatrix khatri_rao_except(const std::vector<ComplexMatrix>& factors, std::size_t skip) {
    if (factors.empty()) throw DimensionError("khatri_rao_except: no factors");
    const std::size_t rank = factors.front().cols();
    ComplexMatrix acc;
    for (std::size_t q = factors.size(); q-- > 0;) {
        if (q == skip) continue;
        acc = acc.empty() ? factors[q] : khatri_rao(acc, factors[q]);
    }
    if (acc.empty()) {
        // Order-1 model: the design matrix degenerates to a row of ones.
        acc = ComplexMatrix(1, rank, CVector(rank, Complex{1.0, 0.0}));
    }
    return acc;
}

ComplexMatrix reconstruct_parafac_unfolding(const ParafacModel& model) {
    if (model.factors.empty()) throw DimensionError("parafac model has no factors");
    ComplexMatrix scaled = model.factors[0];
    if (scaled.cols() != model.weights.size()) throw DimensionError("parafac weights/factor rank mismatch");
    for (std::size_t r = 0; r < scaled.cols(); ++r)
        for (auto& z : scaled.col(r)) z *= model.weights[r];
    return scaled * khatri_rao_except(model.factors, 0).transpose();
}

DenseTensor to_tensor(const ParafacModel& model) {
    return fold(reconstruct_parafac_unfolding(model), 0, model.shape());
}

ParafacFit parafac_als(const DenseTensor& t, const AlsOptions& options) {
    if (options.rank == 0) throw DimensionError("parafac_als: rank must be >= 1");
    if (options.max_iterations == 0) throw DimensionError("parafac_als: max_iterations must be >= 1");
    if (!(options.epsilon > 0.0)) throw DimensionError("parafac_als: epsilon must be positive");
    check_input(t, "parafac_als");

    const std::size_t order = t.order();
    const std::size_t rank = options.rank;
    Rng rng(options.seed);

    ParafacFit fit;
    auto& factors = fit.model.factors;
    factors.reserve(order);
    for (std::size_t p = 0; p < order; ++p) {
        ComplexMatrix f(t.shape()[p], rank);
        for (std::size_t r = 0; r < rank; ++r) random_unit_column(rng, f.col(r));
        factors.push_back(std::move(f));
    }
    fit.model.weights.assign(rank, 1.0);

    std::vector<ComplexMatrix> unfoldings;
    unfoldings.reserve(order);
    for (std::size_t p = 0; p < order; ++p) {
        unfoldings.push_back(unfold(t, p));
        if (unfoldings.back().cols() < rank) fit.report.rank_exceeds_design = true;
    }

    double previous = 0.0;
    for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
        std::vector<double> norms(rank, 1.0);
        for (std::size_t p = 0; p < order; ++p) {
            const ComplexMatrix design = khatri_rao_except(factors, p);
            ComplexMatrix updated = unfoldings[p] * pseudo_inverse(design.transpose());
            for (std::size_t r = 0; r < rank; ++r) {
                auto col = updated.col(r);
                const double nrm = std::sqrt(squared_norm(col));
                norms[r] = nrm;
                if (nrm < kColumnFloor) {
                    random_unit_column(rng, col);
                } else {
                    normalize_column(col, nrm);
                }
            }
            factors[p] = std::move(updated);
        }
        // Each least-squares solve absorbs the full scale of the model, so the
        // norms of the last updated factor are the component weights.
        fit.model.weights = norms;

        const double e = nmse(unfoldings[0], reconstruct_parafac_unfolding(fit.model));
        fit.report.nmse_trace.push_back(e);
        fit.report.iterations = iter;
        fit.report.final_nmse = e;
        if (iter > 1 && std::abs(e - previous) <= options.epsilon) {
            fit.report.converged = true;
            break;
        }
        previous = e;
    }
    fix_phase_gauge(factors);
    return fit;
}

TuckerFit tucker_hosvd(const DenseTensor& t, const Shape& ranks) {
    if (ranks.size() != t.order()) throw DimensionError("tucker_hosvd: need one rank per mode");
    for (std::size_t p = 0; p < ranks.size(); ++p) {
        if (ranks[p] == 0 || ranks[p] > t.shape()[p]) {
            throw DimensionError("tucker_hosvd: rank " + std::to_string(ranks[p]) + " invalid for mode " +
                                 std::to_string(p) + " of extent " + std::to_string(t.shape()[p]));
        }
    }
    check_input(t, "tucker_hosvd");

    TuckerFit fit;
    auto& model = fit.model;
    for (std::size_t p = 0; p < t.order(); ++p) {
        const SvdResult r = svd(unfold(t, p));
        const std::size_t keep = ranks[p];
        if (keep <= r.u.cols()) {
            model.factors.push_back(r.u.leading_columns(keep));
        } else {
            model.factors.push_back(complete_orthonormal(r.u, keep));
        }
        std::vector<double> sigma(keep, 0.0);
        for (std::size_t k = 0; k < keep && k < r.singular_values.size(); ++k) sigma[k] = r.singular_values[k];
        model.sigmas.push_back(std::move(sigma));
    }

    // vec(G) = (S_P^H kron ... kron S_1^H) vec(T), evaluated mode by mode.
    DenseTensor core = t;
    for (std::size_t p = 0; p < t.order(); ++p) core = mode_product(core, model.factors[p].adjoint(), p);
    model.core = std::move(core);

    const double e = nmse(t, to_tensor(model));
    fit.report.iterations = 1;
    fit.report.nmse_trace = {e};
    fit.report.converged = true;
    fit.report.final_nmse = e;
    return fit;
}

DenseTensor to_tensor(const TuckerModel& model) {
    DenseTensor out = model.core;
    for (std::size_t p = 0; p < model.factors.size(); ++p) out = mode_product(out, model.factors[p], p);
    return out;
}

double nmse(const DenseTensor& reference, const DenseTensor& estimate) {
    if (reference.shape() != estimate.shape()) throw DimensionError("nmse: shape mismatch");
    const double den = squared_norm(reference.data());
    if (den == 0.0) throw NumericalError("nmse: reference has zero norm");
    double num = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) num += std::norm(reference.data()[i] - estimate.data()[i]);
    return num / den;
}

double nmse(const ComplexMatrix& reference, const ComplexMatrix& estimate) {
    if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols())
        throw DimensionError("nmse: shape mismatch");
    const double den = squared_norm(reference.data());
    if (den == 0.0) throw NumericalError("nmse: reference has zero norm");
    double num = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) num += std::norm(reference.data()[i] - estimate.data()[i]);
    return num / den;
}

} // namespace irsfb
