// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "irsfb/channel.hpp"
#include "irsfb/decomposition.hpp"
#include "irsfb/errors.hpp"
#include "irsfb/system.hpp"
#include "test_support.hpp"

namespace irsfb {
namespace {

using testing::identity_defect;
using testing::naive_adjoint;
using testing::naive_product;
using testing::random_unit_modulus;
using testing::random_vector;

DenseTensor rank_one_unit_modulus(std::mt19937_64& rng, const Shape& shape) {
    std::vector<CVector> vs;
    for (auto n : shape) vs.push_back(random_unit_modulus(rng, n));
    return outer_product(vs);
}

// Elementwise NMSE written out directly.
double nmse_oracle(std::span<const Complex> ref, std::span<const Complex> est) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        num += std::norm(ref[i] - est[i]);
        den += std::norm(ref[i]);
    }
    return num / den;
}

TEST(ParafacAls, ExactRankOneRecovery) {
    std::mt19937_64 rng(31);
    for (const Shape& s : {Shape{32, 32}, Shape{32, 8, 4}, Shape{8, 4, 4, 8}}) {
        const DenseTensor t = rank_one_unit_modulus(rng, s);
        const ParafacFit fit = parafac_als(t, {.rank = 1, .max_iterations = 500, .epsilon = 1e-6, .seed = 5});
        EXPECT_LE(fit.report.final_nmse, 1e-10) << s.size();
        EXPECT_LE(nmse_oracle(t.data(), to_tensor(fit.model).data()), 1e-10);
        EXPECT_LE(fit.report.iterations, 50u);
        EXPECT_TRUE(fit.report.converged);
    }
}

TEST(ParafacAls, TwoComponentSyntheticFit) {
    std::mt19937_64 rng(32);
    const Shape s{16, 8, 4};
    DenseTensor a = rank_one_unit_modulus(rng, s);
    const DenseTensor b = rank_one_unit_modulus(rng, s);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = 3.0 * a.data()[i] + 0.5 * b.data()[i];
    double best = 1.0;
    for (std::uint64_t seed = 0; seed < 3 && best > 1e-6; ++seed) {
        const ParafacFit fit = parafac_als(a, {.rank = 2, .max_iterations = 200, .epsilon = 1e-14, .seed = seed});
        EXPECT_LE(fit.report.iterations, 200u);
        best = std::min(best, fit.report.final_nmse);
    }
    EXPECT_LE(best, 1e-6);
}

TEST(ParafacAls, LineOfSightPhaseVectorIsRankOne) {
    Rng rng(33);
    const PanelSplit panel{16, 8};
    const ChannelParams cp{.n = 128, .m_t = 4, .m_r = 4, .k_h = INFINITY, .k_g = INFINITY};
    for (int trial = 0; trial < 5; ++trial) {
        const GeometrySample geo = sample_geometry(rng, panel);
        const ChannelRealization ch = sample_channels(cp, geo, rng);
        const Beamformers bf = design_beamformers(ch);
        const DenseTensor t = tensorize(bf.s_opt.entries, {panel.n_h, panel.n_v});
        const ParafacFit fit = parafac_als(t, {.rank = 1, .seed = 7});
        EXPECT_LE(fit.report.final_nmse, 1e-9);
    }
}

TEST(ParafacAls, FactorColumnsAreUnitNorm) {
    std::mt19937_64 rng(34);
    const DenseTensor t({16, 4, 4}, random_vector(rng, 256));
    const ParafacFit fit = parafac_als(t, {.rank = 4, .max_iterations = 30, .seed = 1});
    for (const auto& f : fit.model.factors)
        for (std::size_t r = 0; r < f.cols(); ++r) EXPECT_NEAR(std::sqrt(squared_norm(f.col(r))), 1.0, 1e-10);
    for (double w : fit.model.weights) EXPECT_GE(w, 0.0);
}

TEST(ParafacAls, TraceIsMonotone) {
    std::mt19937_64 rng(35);
    for (int k = 0; k < 10; ++k) {
        const DenseTensor t({16, 8, 8}, random_unit_modulus(rng, 1024));
        const ParafacFit fit = parafac_als(t, {.rank = 4, .max_iterations = 100, .seed = static_cast<std::uint64_t>(k)});
        const auto& tr = fit.report.nmse_trace;
        ASSERT_EQ(tr.size(), fit.report.iterations);
        for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_LE(tr[i], tr[i - 1] + 1e-12);
        for (double e : tr) EXPECT_GE(e, 0.0);
    }
}

TEST(ParafacAls, StoppingRule) {
    std::mt19937_64 rng(36);
    const DenseTensor t({8, 8, 8}, random_unit_modulus(rng, 512));
    const ParafacFit fit = parafac_als(t, {.rank = 2, .max_iterations = 500, .epsilon = 1e-6, .seed = 3});
    const auto& tr = fit.report.nmse_trace;
    ASSERT_GE(tr.size(), 2u);
    if (fit.report.converged) {
        EXPECT_LE(std::abs(tr.back() - tr[tr.size() - 2]), 1e-6);
    }
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) EXPECT_GT(std::abs(tr[i] - tr[i - 1]), 1e-6);

    const ParafacFit capped = parafac_als(t, {.rank = 2, .max_iterations = 3, .epsilon = 1e-300, .seed = 3});
    EXPECT_EQ(capped.report.iterations, 3u);
    EXPECT_FALSE(capped.report.converged);
}

TEST(ParafacAls, DeterministicGivenSeed) {
    std::mt19937_64 rng(37);
    const DenseTensor t({8, 4, 4}, random_vector(rng, 128));
    const ParafacFit a = parafac_als(t, {.rank = 3, .seed = 11});
    const ParafacFit b = parafac_als(t, {.rank = 3, .seed = 11});
    EXPECT_EQ(a.model.weights, b.model.weights);
    EXPECT_EQ(a.model.factors, b.model.factors);
    EXPECT_EQ(a.report.nmse_trace, b.report.nmse_trace);
}

TEST(ParafacAls, PhaseGaugePinsLargestEntries) {
    std::mt19937_64 rng(40);
    const DenseTensor t({16, 8, 8}, random_unit_modulus(rng, 1024));
    const ParafacFit fit = parafac_als(t, {.rank = 3, .max_iterations = 30, .seed = 5});
    for (std::size_t p = 1; p < fit.model.factors.size(); ++p) {
        const auto& f = fit.model.factors[p];
        for (std::size_t r = 0; r < f.cols(); ++r) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < f.rows(); ++i)
                if (std::abs(f(i, r)) > std::abs(f(best, r))) best = i;
            EXPECT_GT(f(best, r).real(), 0.0);
            EXPECT_EQ(f(best, r).imag(), 0.0);
        }
    }
    // The gauge leaves the model itself unchanged.
    EXPECT_NEAR(nmse(unfold(t, 0), reconstruct_parafac_unfolding(fit.model)), fit.report.final_nmse, 1e-12);
}

TEST(ParafacAls, FlagsOverParameterizedRank) {
    std::mt19937_64 rng(38);
    const DenseTensor t({4, 2, 2}, random_vector(rng, 16));
    EXPECT_TRUE(parafac_als(t, {.rank = 6, .max_iterations = 5}).report.rank_exceeds_design);
    EXPECT_FALSE(parafac_als(t, {.rank = 2, .max_iterations = 5}).report.rank_exceeds_design);
}

TEST(ParafacAls, Errors) {
    std::mt19937_64 rng(39);
    DenseTensor t({4, 4}, random_vector(rng, 16));
    EXPECT_THROW(parafac_als(t, {.rank = 0}), DimensionError);
    EXPECT_THROW(parafac_als(DenseTensor({4, 4}), {.rank = 1}), NumericalError);
    t.data()[3] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(parafac_als(t, {.rank = 1}), NumericalError);
}

TEST(ParafacUnfolding, UnitVectorModel) {
    ParafacModel m;
    m.factors = {ComplexMatrix(2, 1, {1.0, 0.0}), ComplexMatrix(3, 1, {1.0, 0.0, 0.0})};
    m.weights = {1.0};
    ComplexMatrix expected(2, 3);
    expected(0, 0) = 1.0;
    EXPECT_EQ(reconstruct_parafac_unfolding(m), expected);
}

TEST(ParafacUnfolding, LinearInWeights) {
    std::mt19937_64 rng(40);
    ParafacModel m;
    m.factors = {ComplexMatrix(4, 2, random_vector(rng, 8)), ComplexMatrix(3, 2, random_vector(rng, 6)),
                 ComplexMatrix(2, 2, random_vector(rng, 4))};
    m.weights = {0.7, 0.2};
    const ComplexMatrix base = reconstruct_parafac_unfolding(m);
    ParafacModel doubled = m;
    for (auto& w : doubled.weights) w *= 2.0;
    EXPECT_LE(testing::max_abs_diff(reconstruct_parafac_unfolding(doubled), Complex(2.0) * base), 1e-14);

    // Nested-sum oracle for the mode-0 unfolding.
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                Complex acc{};
                for (std::size_t r = 0; r < 2; ++r)
                    acc += m.weights[r] * m.factors[0](i, r) * m.factors[1](j, r) * m.factors[2](k, r);
                EXPECT_LE(std::abs(base(i, j + 3 * k) - acc), 1e-14);
            }
}

TEST(ParafacUnfolding, ExactFitRoundTrip) {
    std::mt19937_64 rng(41);
    const DenseTensor t = rank_one_unit_modulus(rng, {8, 4, 2});
    const ParafacFit fit = parafac_als(t, {.rank = 1, .seed = 2});
    EXPECT_LE(testing::max_abs_diff(reconstruct_parafac_unfolding(fit.model), unfold(t, 0)), 1e-9);
}

TEST(TuckerHosvd, FullRanksAreLossless) {
    std::mt19937_64 rng(42);
    const DenseTensor t({8, 4, 4}, random_vector(rng, 128));
    const TuckerFit fit = tucker_hosvd(t, {8, 4, 4});
    EXPECT_LE(fit.report.final_nmse, 1e-10);
    EXPECT_LE(nmse_oracle(t.data(), to_tensor(fit.model).data()), 1e-10);
}

TEST(TuckerHosvd, UnitRanksOnOuterProduct) {
    std::mt19937_64 rng(43);
    const DenseTensor t = rank_one_unit_modulus(rng, {16, 4, 4});
    EXPECT_LE(tucker_hosvd(t, {1, 1, 1}).report.final_nmse, 1e-10);
}

TEST(TuckerHosvd, FactorsOrthonormalAndSigmasSorted) {
    std::mt19937_64 rng(44);
    const DenseTensor t({64, 4, 4}, random_unit_modulus(rng, 1024));
    const TuckerFit fit = tucker_hosvd(t, {16, 4, 4});
    ASSERT_EQ(fit.model.ranks(), (Shape{16, 4, 4}));
    for (std::size_t p = 0; p < 3; ++p) {
        const auto& f = fit.model.factors[p];
        EXPECT_LE(identity_defect(naive_product(naive_adjoint(f), f)), 1e-10);
        const auto& s = fit.model.sigmas[p];
        for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s[k], s[k - 1]);
    }
}

TEST(TuckerHosvd, TruncationEnergyBound) {
    // The truncation error of HOSVD is at most the sum over modes of the
    // discarded squared singular values.
    std::mt19937_64 rng(45);
    const DenseTensor t({16, 8, 4}, random_vector(rng, 512));
    const Shape ranks{6, 3, 2};
    const TuckerFit fit = tucker_hosvd(t, ranks);
    const TuckerFit full = tucker_hosvd(t, {16, 8, 4});
    double bound = 0.0;
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t k = ranks[p]; k < full.model.sigmas[p].size(); ++k)
            bound += full.model.sigmas[p][k] * full.model.sigmas[p][k];
    bound /= squared_norm(t.data());
    EXPECT_GT(fit.report.final_nmse, 0.0);
    EXPECT_LE(fit.report.final_nmse, bound * (1.0 + 1e-9));
}

TEST(TuckerHosvd, Errors) {
    std::mt19937_64 rng(46);
    const DenseTensor t({4, 4}, random_vector(rng, 16));
    EXPECT_THROW(tucker_hosvd(t, {5, 1}), DimensionError);
    EXPECT_THROW(tucker_hosvd(t, {0, 1}), DimensionError);
    EXPECT_THROW(tucker_hosvd(t, {2}), DimensionError);
    EXPECT_THROW(tucker_hosvd(DenseTensor({4, 4}), {1, 1}), NumericalError);
}

TEST(Nmse, Examples) {
    std::mt19937_64 rng(47);
    const DenseTensor a({3, 5}, random_vector(rng, 15));
    const DenseTensor b({3, 5}, random_vector(rng, 15));
    EXPECT_EQ(nmse(a, a), 0.0);
    EXPECT_DOUBLE_EQ(nmse(a, DenseTensor({3, 5})), 1.0);
    EXPECT_NEAR(nmse(a, b), nmse_oracle(a.data(), b.data()), 1e-14);
    EXPECT_THROW(nmse(a, DenseTensor({5, 3})), DimensionError);
    EXPECT_THROW(nmse(DenseTensor({2}), DenseTensor({2})), NumericalError);
}

} // namespace
} // namespace irsfb
