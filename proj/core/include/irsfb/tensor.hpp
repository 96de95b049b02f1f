// SPDX-License-Identifier: Apache-2.0
//
// Dense complex matrices and tensors plus the product kernels used by the
// decompositions. Storage is column-major everywhere (first index fastest),
// which makes vec(), tensorization and the mode unfoldings index-compatible:
//
//     T(n_1, ..., n_P) == v[n_1 + n_2 N_1 + ... + n_P N_{P-1} ... N_1]
//
// All mode indices in this API are zero-based.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace irsfb {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using Shape = std::vector<std::size_t>;

/// Product of all entries of a shape (1 for an empty shape).
std::size_t shape_product(std::span<const std::size_t> shape);

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    /// Zero-filled rows x cols matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Wraps column-major data; throws DimensionError if data.size() != rows*cols.
    ComplexMatrix(std::size_t rows, std::size_t cols, CVector data);

    static ComplexMatrix identity(std::size_t n);
    /// Single-column matrix holding v.
    static ComplexMatrix column(std::span<const Complex> v);
    static ComplexMatrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    Complex operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }
    Complex& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }

    std::span<const Complex> col(std::size_t j) const {
        return {data_.data() + j * rows_, rows_};
    }
    std::span<Complex> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

    std::span<const Complex> data() const noexcept { return data_; }
    std::span<Complex> data() noexcept { return data_; }
    /// vec(): the column-major data as a vector.
    const CVector& vec() const noexcept { return data_; }

    ComplexMatrix transpose() const;
    /// Conjugate transpose.
    ComplexMatrix adjoint() const;
    /// The first `count` columns.
    ComplexMatrix leading_columns(std::size_t count) const;

    double frobenius_norm() const;
    bool all_finite() const;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    CVector data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
CVector operator*(const ComplexMatrix& a, std::span<const Complex> x);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);

class DenseTensor {
public:
    DenseTensor() = default;
    /// Zero-filled tensor; every extent must be >= 1.
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, CVector data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const Complex> data() const noexcept { return data_; }
    std::span<Complex> data() noexcept { return data_; }

    /// Linear (column-major) offset of a multi-index.
    std::size_t offset(std::span<const std::size_t> index) const;
    Complex operator()(std::span<const std::size_t> index) const { return data_[offset(index)]; }
    Complex& operator()(std::span<const std::size_t> index) { return data_[offset(index)]; }

    double frobenius_norm() const;
    bool all_finite() const;

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    CVector data_;
};

/// Reshape v into a tensor of the given shape (column-major index map).
DenseTensor tensorize(std::span<const Complex> v, const Shape& shape);
/// vec() of a tensor; inverse of tensorize.
CVector untensorize(const DenseTensor& t);

/// Mode-p unfolding: N_p rows, columns enumerate the remaining indices with
/// the lowest remaining mode fastest.
ComplexMatrix unfold(const DenseTensor& t, std::size_t mode);
/// Inverse of unfold for the given target shape.
DenseTensor fold(const ComplexMatrix& m, std::size_t mode, const Shape& shape);

/// t x_p m, where m is J x N_p; the result has extent J in mode p.
DenseTensor mode_product(const DenseTensor& t, const ComplexMatrix& m, std::size_t mode);

ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b);
CVector kronecker(std::span<const Complex> a, std::span<const Complex> b);
/// Column-wise Kronecker product; a and b must have equal column counts.
ComplexMatrix khatri_rao(const ComplexMatrix& a, const ComplexMatrix& b);
/// Elementwise product of equally sized matrices.
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);
/// v(1) o v(2) o ... o v(P); element (n_1..n_P) = prod_p v(p)[n_p].
DenseTensor outer_product(std::span<const CVector> vectors);

double squared_norm(std::span<const Complex> v);

} // namespace irsfb
