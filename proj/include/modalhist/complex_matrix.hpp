// Copyright 2026 The modalhist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modalhist/error.hpp"
#include "modalhist/numeric_policy.hpp"

namespace modalhist {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

namespace detail {

// Plain product without the C99 Annex G infinity recovery, which keeps the
// inner loops vectorizable.
inline Complex mul(Complex a, Complex b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require(entries_.size() == rows_ * cols_, ErrorKind::kShape,
            "matrix entry count " + std::to_string(entries_.size()) + " does not match " +
                std::to_string(rows_) + "x" + std::to_string(cols_));
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      require(row.size() == cols_, ErrorKind::kShape, "ragged matrix literal");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const Complex> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// |u><v|
  static ComplexMatrix outer(std::span<const Complex> u, std::span<const Complex> v) {
    ComplexMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
    return m;
  }

  static ComplexMatrix projector_onto(std::span<const Complex> v) { return outer(v, v); }

  /// Builds a matrix whose columns are the given vectors.
  static ComplexMatrix from_columns(const std::vector<ComplexVector>& columns) {
    require(!columns.empty(), ErrorKind::kShape, "no columns");
    ComplexMatrix m(columns.front().size(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      require(columns[c].size() == m.rows(), ErrorKind::kShape, "column length mismatch");
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = columns[c][r];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const Complex> entries() const noexcept { return entries_; }
  std::span<const Complex> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  ComplexVector column(std::size_t c) const {
    ComplexVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  ComplexVector apply(std::span<const Complex> v) const {
    require(v.size() == cols_, ErrorKind::kShape, "vector length does not match matrix columns");
    ComplexVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      Complex acc = 0.0;
      const Complex* row_ptr = entries_.data() + r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) acc += detail::mul(row_ptr[c], v[c]);
      out[r] = acc;
    }
    return out;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : entries_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.cols_ == b.rows_, ErrorKind::kShape,
            "cannot multiply " + a.shape_string() + " by " + b.shape_string());
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      Complex* out_row = out.entries_.data() + i * b.cols_;
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        const Complex* b_row = b.entries_.data() + k * b.cols_;
        for (std::size_t j = 0; j < b.cols_; ++j) out_row[j] += detail::mul(aik, b_row[j]);
      }
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void check_same_shape(const ComplexMatrix& other) const {
    require(rows_ == other.rows_ && cols_ == other.cols_, ErrorKind::kShape,
            "shape mismatch " + shape_string() + " vs " + other.shape_string());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

inline bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (!a.is_square()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r; c < a.cols(); ++c)
      if (std::abs(a(r, c) - std::conj(a(c, r))) > tol) return false;
  return true;
}

/// ||U^dagger U - I||_max
inline double unitarity_residual(const ComplexMatrix& u) {
  require(u.is_square(), ErrorKind::kShape, "unitary must be square, got " + u.shape_string());
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows()));
}

inline bool is_unitary(const ComplexMatrix& u, double tol) { return u.is_square() && unitarity_residual(u) <= tol; }

inline void require_unitary(const ComplexMatrix& u, double tol, const std::string& what) {
  require(u.is_square(), ErrorKind::kValidation, what + " is not square (" + u.shape_string() + ")");
  const double residual = unitarity_residual(u);
  require(residual <= tol, ErrorKind::kValidation,
          what + " is not unitary (residual " + std::to_string(residual) + ")");
}

/// Kronecker product a (x) b; the index of b varies fastest.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b, const NumericPolicy& policy = {}) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  require(rows <= policy.max_dim && cols <= policy.max_dim, ErrorKind::kCapacity,
          "tensor product dimension " + std::to_string(std::max(rows, cols)) + " exceeds cap " +
              std::to_string(policy.max_dim));
  ComplexMatrix out(rows, cols);
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      if (s == Complex(0.0)) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

inline ComplexVector tensor_product(std::span<const Complex> a, std::span<const Complex> b) {
  ComplexVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

// Vector helpers

/// <u|v>, antilinear in u.
inline Complex inner(std::span<const Complex> u, std::span<const Complex> v) {
  require(u.size() == v.size(), ErrorKind::kShape, "inner product of vectors with different lengths");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += detail::mul(std::conj(u[i]), v[i]);
  return acc;
}

inline double norm_squared(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc;
}

inline double norm(std::span<const Complex> v) { return std::sqrt(norm_squared(v)); }

inline ComplexVector scaled(std::span<const Complex> v, Complex s) {
  ComplexVector out(v.begin(), v.end());
  for (auto& z : out) z *= s;
  return out;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  require(a.size() == b.size(), ErrorKind::kShape, "vector length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline ComplexVector basis_vector(std::size_t dim, std::size_t index) {
  ComplexVector v(dim);
  v.at(index) = 1.0;
  return v;
}

/// Multiplies v by the unit phase that makes its largest-magnitude entry real
/// and positive. Ties go to the lowest index.
inline void apply_phase_convention(std::span<Complex> v) {
  double best = 0.0;
  for (const auto& z : v) best = std::max(best, std::abs(z));
  if (best == 0.0) return;
  const double cutoff = best * (1.0 - 1e-12);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= cutoff) {
      const Complex phase = std::conj(v[i]) / std::abs(v[i]);
      for (auto& z : v) z *= phase;
      v[i] = std::abs(v[i]);
      return;
    }
  }
}

}  // namespace modalhist
