// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "irsfb/errors.hpp"
#include "irsfb/tensor.hpp"
#include "test_support.hpp"

namespace irsfb {
namespace {

using testing::max_abs_diff;
using testing::naive_product;
using testing::random_matrix;
using testing::random_vector;

CVector iota(std::size_t n) {
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
    return v;
}

TEST(Tensorize, ScalarShape) {
    const DenseTensor t = tensorize(CVector{7.0}, {1});
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.data()[0], Complex(7.0));
}

TEST(Tensorize, MatrixIsColumnMajor) {
    const DenseTensor t = tensorize(iota(6), {2, 3});
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t r = 0; r < 2; ++r) {
            const std::array<std::size_t, 2> at{r, c};
            EXPECT_EQ(t(at), Complex(static_cast<double>(1 + r + 2 * c)));
        }
    }
}

TEST(Tensorize, MatchesIndexFormula) {
    std::mt19937_64 rng(11);
    const CVector v = random_vector(rng, 24);
    const DenseTensor t = tensorize(v, {2, 3, 4});
    for (std::size_t n1 = 0; n1 < 2; ++n1)
        for (std::size_t n2 = 0; n2 < 3; ++n2)
            for (std::size_t n3 = 0; n3 < 4; ++n3) {
                const std::array<std::size_t, 3> at{n1, n2, n3};
                EXPECT_EQ(t(at), v[n1 + n2 * 2 + n3 * 6]);
            }
}

TEST(Tensorize, RejectsShapeMismatch) {
    EXPECT_THROW(tensorize(iota(5), {2, 3}), DimensionError);
    EXPECT_THROW(tensorize(iota(0), {}), DimensionError);
    EXPECT_THROW(tensorize(iota(4), {4, 0}), DimensionError);
}

TEST(Untensorize, RoundTrips) {
    const CVector v = iota(12);
    EXPECT_EQ(untensorize(tensorize(v, {3, 4})), v);
    EXPECT_EQ(untensorize(DenseTensor({1}, {Complex(2.0, 1.0)})).size(), 1u);
    EXPECT_EQ(untensorize(DenseTensor({2, 2, 2}, iota(8))), iota(8));
}

TEST(Untensorize, RoundTripsManyShapes) {
    std::mt19937_64 rng(3);
    const std::vector<Shape> shapes{{4096}, {64, 64}, {16, 16, 16}, {2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, {5, 7, 3}};
    for (const auto& s : shapes) {
        const CVector v = random_vector(rng, shape_product(s));
        EXPECT_EQ(untensorize(tensorize(v, s)), v);
    }
}

TEST(Unfold, FrontalSlicesForModeZero) {
    // Slices X1 = [1 3; 2 4], X2 = [5 7; 6 8]; mode-0 unfolding is [X1, X2].
    const DenseTensor t({2, 2, 2}, iota(8));
    const ComplexMatrix m = unfold(t, 0);
    EXPECT_EQ(m, ComplexMatrix(2, 4, iota(8)));
}

TEST(Unfold, MiddleModeMatchesIndexOracle) {
    std::mt19937_64 rng(5);
    const DenseTensor t({2, 3, 4}, random_vector(rng, 24));
    const ComplexMatrix m = unfold(t, 1);
    ASSERT_EQ(m.rows(), 3u);
    ASSERT_EQ(m.cols(), 8u);
    for (std::size_t n2 = 0; n2 < 3; ++n2)
        for (std::size_t n3 = 0; n3 < 4; ++n3)
            for (std::size_t n1 = 0; n1 < 2; ++n1) {
                const std::array<std::size_t, 3> at{n1, n2, n3};
                EXPECT_EQ(m(n2, n1 + 2 * n3), t(at));
            }
}

TEST(Unfold, LastModeStacksSliceVectorizations) {
    std::mt19937_64 rng(6);
    const DenseTensor t({2, 3, 4}, random_vector(rng, 24));
    const ComplexMatrix m = unfold(t, 2);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(m(k, j), t.data()[j + 6 * k]);
}

TEST(Unfold, OrderOneIsColumn) {
    const DenseTensor t({5}, iota(5));
    EXPECT_EQ(unfold(t, 0), ComplexMatrix(5, 1, iota(5)));
}

TEST(Unfold, RejectsBadMode) {
    EXPECT_THROW(unfold(DenseTensor({2, 2}), 2), DimensionError);
}

TEST(Fold, InvertsUnfoldForEveryMode) {
    std::mt19937_64 rng(7);
    for (const Shape& s : {Shape{2, 3, 4}, Shape{4, 1, 3, 2}, Shape{6}}) {
        const DenseTensor t(s, random_vector(rng, shape_product(s)));
        for (std::size_t p = 0; p < s.size(); ++p) {
            const ComplexMatrix m = unfold(t, p);
            EXPECT_EQ(fold(m, p, s), t);
            EXPECT_EQ(unfold(fold(m, p, s), p), m);
        }
    }
    EXPECT_THROW(fold(ComplexMatrix(3, 3), 0, {3, 4}), DimensionError);
}

TEST(Kronecker, UnitVectorCase) {
    const ComplexMatrix a(2, 1, {1.0, 0.0});
    const ComplexMatrix b(2, 1, {Complex(2, 1), Complex(-1, 3)});
    EXPECT_EQ(kronecker(a, b), ComplexMatrix(4, 1, {Complex(2, 1), Complex(-1, 3), 0.0, 0.0}));
}

TEST(Kronecker, IdentityTimesIdentity) {
    EXPECT_EQ(kronecker(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), ComplexMatrix::identity(6));
}

TEST(Kronecker, MatchesDefinition) {
    std::mt19937_64 rng(8);
    const ComplexMatrix a = random_matrix(rng, 2, 2);
    const ComplexMatrix b = random_matrix(rng, 3, 2);
    const ComplexMatrix k = kronecker(a, b);
    ASSERT_EQ(k.rows(), 6u);
    ASSERT_EQ(k.cols(), 4u);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t r = 0; r < 3; ++r)
                for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(k(i * 3 + r, j * 2 + c), a(i, j) * b(r, c));
}

TEST(KhatriRao, SingleColumnsGivePlainKronecker) {
    std::mt19937_64 rng(9);
    const ComplexMatrix a = random_matrix(rng, 3, 1);
    const ComplexMatrix b = random_matrix(rng, 4, 1);
    EXPECT_EQ(khatri_rao(a, b), kronecker(a, b));
}

TEST(KhatriRao, OnesRowLeavesOperand) {
    std::mt19937_64 rng(10);
    const ComplexMatrix b = random_matrix(rng, 3, 4);
    const ComplexMatrix ones(1, 4, CVector(4, 1.0));
    EXPECT_EQ(khatri_rao(ones, b), b);
}

TEST(KhatriRao, MatchesColumnwiseKronecker) {
    std::mt19937_64 rng(12);
    const ComplexMatrix a = random_matrix(rng, 3, 2);
    const ComplexMatrix b = random_matrix(rng, 2, 2);
    const ComplexMatrix kr = khatri_rao(a, b);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(kr(i * 2 + k, r), a(i, r) * b(k, r));
    EXPECT_THROW(khatri_rao(a, random_matrix(rng, 2, 3)), DimensionError);
}

TEST(OuterProduct, SingleVector) {
    const CVector v = iota(4);
    const CVector vs[] = {v};
    const DenseTensor t = outer_product(vs);
    EXPECT_EQ(t.shape(), Shape{4});
    EXPECT_EQ(untensorize(t), v);
}

TEST(OuterProduct, VecOfTwoWayOuterIsKronecker) {
    std::mt19937_64 rng(13);
    const CVector a = random_vector(rng, 3);
    const CVector b = random_vector(rng, 2);
    // vec(b o a) = a kron b
    const CVector vs[] = {b, a};
    EXPECT_LE(max_abs_diff(untensorize(outer_product(vs)), kronecker(a, b)), 1e-15);
}

TEST(OuterProduct, ThreeWayMatchesTripleLoop) {
    std::mt19937_64 rng(14);
    const std::vector<CVector> vs{random_vector(rng, 2), random_vector(rng, 3), random_vector(rng, 4)};
    const DenseTensor t = outer_product(vs);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k) {
                const std::array<std::size_t, 3> at{i, j, k};
                EXPECT_LE(std::abs(t(at) - vs[0][i] * vs[1][j] * vs[2][k]), 1e-14);
            }
    EXPECT_THROW(outer_product(std::span<const CVector>{}), DimensionError);
}

TEST(Properties, VecOfTripleProductIsKroneckerMap) {
    // vec(A B C) = (C^T kron A) vec(B)
    std::mt19937_64 rng(15);
    const ComplexMatrix a = random_matrix(rng, 3, 2);
    const ComplexMatrix b = random_matrix(rng, 2, 4);
    const ComplexMatrix c = random_matrix(rng, 4, 2);
    const ComplexMatrix lhs = naive_product(naive_product(a, b), c);
    const CVector rhs = kronecker(c.transpose(), a) * b.vec();
    EXPECT_LE(max_abs_diff(lhs.vec(), rhs), 1e-12);
}

TEST(Properties, VecOfDiagonalScalingIsKhatriRaoMap) {
    // vec(A diag(b) C) = (C^T kr A) b
    std::mt19937_64 rng(16);
    const ComplexMatrix a = random_matrix(rng, 3, 4);
    const CVector b = random_vector(rng, 4);
    const ComplexMatrix c = random_matrix(rng, 4, 5);
    ComplexMatrix d(4, 4);
    for (std::size_t i = 0; i < 4; ++i) d(i, i) = b[i];
    const ComplexMatrix lhs = naive_product(naive_product(a, d), c);
    const CVector rhs = khatri_rao(c.transpose(), a) * b;
    EXPECT_LE(max_abs_diff(lhs.vec(), rhs), 1e-12);
}

TEST(Properties, UnfoldingOfRankOneTensor) {
    std::mt19937_64 rng(17);
    const std::vector<CVector> vs{random_vector(rng, 2), random_vector(rng, 3), random_vector(rng, 4),
                                  random_vector(rng, 2)};
    const DenseTensor t = outer_product(vs);
    for (std::size_t p = 0; p < vs.size(); ++p) {
        ComplexMatrix kr;
        for (std::size_t q = vs.size(); q-- > 0;) {
            if (q == p) continue;
            const ComplexMatrix col = ComplexMatrix::column(vs[q]);
            kr = kr.empty() ? col : khatri_rao(kr, col);
        }
        const ComplexMatrix expected = naive_product(ComplexMatrix::column(vs[p]), kr.transpose());
        EXPECT_LE(max_abs_diff(unfold(t, p), expected), 1e-13) << "mode " << p;
    }
}

TEST(ModeProduct, MatchesUnfoldingIdentity) {
    std::mt19937_64 rng(18);
    const DenseTensor t({3, 4, 2}, random_vector(rng, 24));
    for (std::size_t p = 0; p < 3; ++p) {
        const ComplexMatrix m = random_matrix(rng, 5, t.shape()[p]);
        const DenseTensor y = mode_product(t, m, p);
        EXPECT_EQ(y.shape()[p], 5u);
        EXPECT_LE(max_abs_diff(unfold(y, p), naive_product(m, unfold(t, p))), 1e-12);
    }
    EXPECT_THROW(mode_product(t, random_matrix(rng, 2, 7), 0), DimensionError);
}

TEST(Hadamard, Elementwise) {
    const ComplexMatrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    const ComplexMatrix b(2, 2, {Complex(0, 1), 2.0, -1.0, 0.5});
    EXPECT_EQ(hadamard(a, b), ComplexMatrix(2, 2, {Complex(0, 1), 4.0, -3.0, 2.0}));
    EXPECT_THROW(hadamard(a, ComplexMatrix(2, 3)), DimensionError);
}

TEST(ComplexMatrix, RejectsBadData) {
    EXPECT_THROW(ComplexMatrix(2, 2, CVector(3)), DimensionError);
    EXPECT_THROW(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), DimensionError);
}

} // namespace
} // namespace irsfb
