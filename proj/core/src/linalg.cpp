// SPDX-License-Identifier: Apache-2.0
#include "irsfb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irsfb/errors.hpp"

namespace irsfb {

namespace {

constexpr int kMaxSweeps = 80;

struct TallSvd {
    ComplexMatrix u;  // m x n
    std::vector<double> s;
    ComplexMatrix v;  // n x n
};

// One-sided (Hestenes) Jacobi on a tall matrix, m >= n.
TallSvd jacobi_tall(ComplexMatrix w) {
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();
    ComplexMatrix v = ComplexMatrix::identity(n);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto wp = w.col(p);
                auto wq = w.col(q);
                double alpha = 0.0;
                double beta = 0.0;
                Complex gamma{};
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += std::norm(wp[i]);
                    beta += std::norm(wq[i]);
                    gamma += std::conj(wp[i]) * wq[i];
                }
                const double g = std::abs(gamma);
                if (alpha == 0.0 || beta == 0.0 || g <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                const Complex phase = std::conj(gamma / g);

                auto rotate = [&](std::span<Complex> x, std::span<Complex> y) {
                    for (std::size_t i = 0; i < x.size(); ++i) {
                        const Complex xp = x[i];
                        const Complex yq = y[i] * phase;
                        x[i] = c * xp - s * yq;
                        y[i] = s * xp + c * yq;
                    }
                };
                rotate(wp, wq);
                rotate(v.col(p), v.col(q));
            }
        }
        if (!rotated) break;
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(squared_norm(w.col(j)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return norms[a] > norms[b]; });

    TallSvd out{ComplexMatrix(m, n), std::vector<double>(n), ComplexMatrix(n, n)};
    const double smax = n > 0 ? norms[order[0]] : 0.0;
    std::vector<bool> filled(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.s[k] = norms[j];
        std::copy(v.col(j).begin(), v.col(j).end(), out.v.col(k).begin());
        if (norms[j] > 0.0 && norms[j] > smax * 1e-15) {
            auto src = w.col(j);
            auto dst = out.u.col(k);
            for (std::size_t i = 0; i < m; ++i) dst[i] = src[i] / norms[j];
            filled[k] = true;
        }
    }

    // Complete U with orthonormal directions where the singular value vanished.
    std::size_t basis = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (filled[k]) continue;
        while (basis < m) {
            CVector cand(m);
            cand[basis++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (!filled[j]) continue;
                    auto uj = out.u.col(j);
                    Complex proj{};
                    for (std::size_t i = 0; i < m; ++i) proj += std::conj(uj[i]) * cand[i];
                    for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * uj[i];
                }
            }
            const double nrm = std::sqrt(squared_norm(cand));
            if (nrm > 0.5) {
                auto dst = out.u.col(k);
                for (std::size_t i = 0; i < m; ++i) dst[i] = cand[i] / nrm;
                filled[k] = true;
                break;
            }
        }
    }
    return out;
}

void apply_phase_convention(ComplexMatrix& u, ComplexMatrix& vh) {
    for (std::size_t k = 0; k < u.cols(); ++k) {
        auto col = u.col(k);
        std::size_t best = 0;
        double best_mag = -1.0;
        for (std::size_t i = 0; i < col.size(); ++i) {
            const double mag = std::abs(col[i]);
            if (mag > best_mag * (1.0 + 1e-12)) {
                best_mag = mag;
                best = i;
            }
        }
        if (best_mag <= 0.0) continue;
        const Complex rot = std::conj(col[best]) / best_mag;  // e^{-j arg}
        for (auto& z : col) z *= rot;
        col[best] = Complex(std::abs(col[best]), 0.0);
        const Complex inv = std::conj(rot);
        for (std::size_t j = 0; j < vh.cols(); ++j) vh(k, j) *= inv;
    }
}

} // namespace

SvdResult svd(const ComplexMatrix& m) {
    if (!m.all_finite()) throw NumericalError("svd: input contains non-finite entries");
    if (m.empty()) throw DimensionError("svd: empty matrix");

    SvdResult r;
    if (m.rows() >= m.cols()) {
        TallSvd t = jacobi_tall(m);
        r.u = std::move(t.u);
        r.singular_values = std::move(t.s);
        r.vh = t.v.adjoint();
    } else {
        TallSvd t = jacobi_tall(m.adjoint());
        r.u = std::move(t.v);
        r.singular_values = std::move(t.s);
        r.vh = t.u.adjoint();
    }
    apply_phase_convention(r.u, r.vh);
    return r;
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& m) {
    const SvdResult r = svd(m);
    const std::size_t k = r.singular_values.size();
    ComplexMatrix out(m.cols(), m.rows());
    const double smax = k > 0 ? r.singular_values[0] : 0.0;
    const double cutoff = kPinvRelativeTolerance * smax;
    for (std::size_t c = 0; c < k; ++c) {
        const double s = r.singular_values[c];
        if (s <= cutoff || s == 0.0) continue;
        // out += v_c (1/s) u_c^H,  v_c = conj(vh row c)
        for (std::size_t j = 0; j < m.rows(); ++j) {
            const Complex uc = std::conj(r.u(j, c)) / s;
            if (uc == Complex{}) continue;
            for (std::size_t i = 0; i < m.cols(); ++i) out(i, j) += std::conj(r.vh(c, i)) * uc;
        }
    }
    return out;
}

SingularTriplet dominant_singular_vectors(const ComplexMatrix& m) {
    const SvdResult r = svd(m);
    SingularTriplet t;
    t.u.assign(r.u.col(0).begin(), r.u.col(0).end());
    t.sigma = r.singular_values[0];
    t.v.resize(m.cols());
    for (std::size_t i = 0; i < m.cols(); ++i) t.v[i] = std::conj(r.vh(0, i));
    return t;
}

} // namespace irsfb
