// SPDX-License-Identifier: Apache-2.0
#include "irsfb/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "irsfb/errors.hpp"

namespace irsfb {

namespace {

void check_shape(const Shape& shape) {
    if (shape.empty()) throw DimensionError("tensor order must be at least 1");
    for (auto n : shape) {
        if (n == 0) throw DimensionError("tensor extents must be positive");
    }
}

void check_mode(const Shape& shape, std::size_t mode) {
    if (mode >= shape.size()) {
        throw DimensionError("mode " + std::to_string(mode) + " out of range for order " +
                             std::to_string(shape.size()));
    }
}

// Number of elements before / after `mode` in column-major order.
std::pair<std::size_t, std::size_t> split_extents(const Shape& shape, std::size_t mode) {
    std::size_t left = 1;
    for (std::size_t q = 0; q < mode; ++q) left *= shape[q];
    std::size_t right = 1;
    for (std::size_t q = mode + 1; q < shape.size(); ++q) right *= shape[q];
    return {left, right};
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace

std::size_t shape_product(std::span<const std::size_t> shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

// ---------------------------------------------------------------- matrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, CVector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> v) {
    return ComplexMatrix(v.size(), 1, CVector(v.begin(), v.end()));
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t(j, i) = std::conj((*this)(i, j));
    return t;
}

ComplexMatrix ComplexMatrix::leading_columns(std::size_t count) const {
    if (count > cols_) throw DimensionError("requested more columns than available");
    return ComplexMatrix(rows_, count,
                         CVector(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(rows_ * count)));
}

double ComplexMatrix::frobenius_norm() const { return std::sqrt(squared_norm(data_)); }

bool ComplexMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), finite);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols()) +
                             " and " + std::to_string(b.rows()) + " differ");
    }
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto cj = c.col(j);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex bkj = b(k, j);
            if (bkj == Complex{}) continue;
            auto ak = a.col(k);
            for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
        }
    }
    return c;
}

CVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
    CVector y(a.rows());
    for (std::size_t k = 0; k < a.cols(); ++k) {
        auto ak = a.col(k);
        for (std::size_t i = 0; i < a.rows(); ++i) y[i] += ak[i] * x[k];
    }
    return y;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum: shape mismatch");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference: shape mismatch");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
    ComplexMatrix c = a;
    for (auto& z : c.data()) z *= s;
    return c;
}

// ---------------------------------------------------------------- tensor

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_.assign(shape_product(shape_), Complex{});
}

DenseTensor::DenseTensor(Shape shape, CVector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != shape_product(shape_)) {
        throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape product " + std::to_string(shape_product(shape_)));
    }
}

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw DimensionError("multi-index has wrong order");
    std::size_t off = 0;
    std::size_t stride = 1;
    for (std::size_t q = 0; q < shape_.size(); ++q) {
        if (index[q] >= shape_[q]) throw DimensionError("multi-index out of range");
        off += index[q] * stride;
        stride *= shape_[q];
    }
    return off;
}

double DenseTensor::frobenius_norm() const { return std::sqrt(squared_norm(data_)); }

bool DenseTensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), finite);
}

DenseTensor tensorize(std::span<const Complex> v, const Shape& shape) {
    check_shape(shape);
    if (v.size() != shape_product(shape)) {
        throw DimensionError("tensorize: vector length " + std::to_string(v.size()) +
                             " does not equal shape product " + std::to_string(shape_product(shape)));
    }
    return DenseTensor(shape, CVector(v.begin(), v.end()));
}

CVector untensorize(const DenseTensor& t) { return CVector(t.data().begin(), t.data().end()); }

ComplexMatrix unfold(const DenseTensor& t, std::size_t mode) {
    check_mode(t.shape(), mode);
    const std::size_t np = t.shape()[mode];
    const auto [left, right] = split_extents(t.shape(), mode);
    ComplexMatrix m(np, left * right);
    const auto src = t.data();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t n = 0; n < np; ++n)
            for (std::size_t l = 0; l < left; ++l) m(n, l + r * left) = src[l + n * left + r * left * np];
    return m;
}

DenseTensor fold(const ComplexMatrix& m, std::size_t mode, const Shape& shape) {
    check_shape(shape);
    check_mode(shape, mode);
    const std::size_t np = shape[mode];
    const auto [left, right] = split_extents(shape, mode);
    if (m.rows() != np || m.cols() != left * right) {
        throw DimensionError("fold: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             ", expected " + std::to_string(np) + "x" + std::to_string(left * right));
    }
    DenseTensor t(shape);
    auto dst = t.data();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t n = 0; n < np; ++n)
            for (std::size_t l = 0; l < left; ++l) dst[l + n * left + r * left * np] = m(n, l + r * left);
    return t;
}

DenseTensor mode_product(const DenseTensor& t, const ComplexMatrix& m, std::size_t mode) {
    check_mode(t.shape(), mode);
    const std::size_t np = t.shape()[mode];
    if (m.cols() != np) throw DimensionError("mode_product: matrix columns must equal the mode extent");
    const std::size_t j_out = m.rows();
    const auto [left, right] = split_extents(t.shape(), mode);
    Shape out_shape = t.shape();
    out_shape[mode] = j_out;
    DenseTensor out(out_shape);
    auto dst = out.data();
    const auto src = t.data();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t n = 0; n < np; ++n)
            for (std::size_t j = 0; j < j_out; ++j) {
                const Complex w = m(j, n);
                if (w == Complex{}) continue;
                const Complex* s = src.data() + n * left + r * left * np;
                Complex* d = dst.data() + j * left + r * left * j_out;
                for (std::size_t l = 0; l < left; ++l) d[l] += w * s[l];
            }
    return out;
}

ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    ComplexMatrix c(rows, cols);
    for (std::size_t ja = 0; ja < a.cols(); ++ja)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
            for (std::size_t ia = 0; ia < a.rows(); ++ia) {
                const Complex s = a(ia, ja);
                for (std::size_t ib = 0; ib < b.rows(); ++ib)
                    c(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
            }
    return c;
}

CVector kronecker(std::span<const Complex> a, std::span<const Complex> b) {
    CVector c(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) c[i * b.size() + k] = a[i] * b[k];
    return c;
}

ComplexMatrix khatri_rao(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("khatri_rao: column counts " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.cols()) + " differ");
    }
    ComplexMatrix c(a.rows() * b.rows(), a.cols());
    for (std::size_t r = 0; r < a.cols(); ++r) {
        auto ar = a.col(r);
        auto br = b.col(r);
        auto cr = c.col(r);
        for (std::size_t i = 0; i < ar.size(); ++i)
            for (std::size_t k = 0; k < br.size(); ++k) cr[i * br.size() + k] = ar[i] * br[k];
    }
    return c;
}

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("hadamard: shape mismatch");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
    return c;
}

DenseTensor outer_product(std::span<const CVector> vectors) {
    if (vectors.empty()) throw DimensionError("outer_product: need at least one vector");
    Shape shape;
    shape.reserve(vectors.size());
    for (const auto& v : vectors) shape.push_back(v.size());
    // vec(v1 o v2 o ... o vP) = vP (x) ... (x) v1
    CVector acc(vectors[0].begin(), vectors[0].end());
    for (std::size_t p = 1; p < vectors.size(); ++p) acc = kronecker(vectors[p], acc);
    return DenseTensor(std::move(shape), std::move(acc));
}

double squared_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

} // namespace irsfb
