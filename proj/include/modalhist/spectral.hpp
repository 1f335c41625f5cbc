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
#include <numeric>
#include <vector>

#include "modalhist/complex_matrix.hpp"

namespace modalhist {

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // orthonormal columns, same order as eigenvalues

  ComplexVector vector(std::size_t k) const { return eigenvectors.column(k); }

  ComplexMatrix reconstruct() const {
    const std::size_t n = eigenvalues.size();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const ComplexVector v = vector(k);
      out += ComplexMatrix::outer(v, v) * Complex(eigenvalues[k]);
    }
    return out;
  }
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) acc += std::norm(a(r, c));
  return std::sqrt(acc);
}

inline double frobenius_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (const auto& z : a.entries()) acc += std::norm(z);
  return std::sqrt(acc);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. The sweep order is fixed, so identical input gives
/// bit-identical output. Eigenvalues are sorted descending (stable, so
/// ties keep the lower original index) and each eigenvector's
/// largest-magnitude entry is made real and positive.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& input, const NumericPolicy& policy = {}) {
  require(input.is_square(), ErrorKind::kValidation, "eig_hermitian needs a square matrix, got " + input.shape_string());
  const double scale = std::max(1.0, input.max_abs());
  require(is_hermitian(input, policy.hermitian_tol * scale), ErrorKind::kValidation,
          "eig_hermitian input is not Hermitian");

  const std::size_t n = input.rows();
  // Symmetrize so the rotations act on an exactly Hermitian matrix.
  ComplexMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = input(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex z = 0.5 * (input(r, c) + std::conj(input(c, r)));
      a(r, c) = z;
      a(c, r) = std::conj(z);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double frob = detail::frobenius_norm(a);
  const double target = std::max(frob, 1e-300) * 1e-16;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip rotations that cannot change the diagonal in floating point.
        if (sweep > 3 && std::abs(app) + 100.0 * g == std::abs(app) && std::abs(aqq) + 100.0 * g == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / g;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex s_phase = s * phase;              // s e^{i phi}
        const Complex s_conj_phase = s * std::conj(phase);  // s e^{-i phi}

        // A <- A J with J e_p = c e_p - s e^{-i phi} e_q, J e_q = s e^{i phi} e_p + c e_q
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s_conj_phase * akq;
          a(k, q) = s_phase * akp + c * akq;
        }
        // A <- J^dagger A
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s_phase * aqk;
          a(q, k) = s_conj_phase * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s_conj_phase * vkq;
          v(k, q) = s_phase * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    ComplexVector col = v.column(order[k]);
    apply_phase_convention(col);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = col[r];
  }
  return out;
}

/// exp(-i h t) through the eigendecomposition of h.
inline ComplexMatrix matrix_exponential_unitary(const ComplexMatrix& h, double t, const NumericPolicy& policy = {}) {
  const EigenDecomposition eig = eig_hermitian(h, policy);
  const std::size_t n = eig.eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexVector v = eig.vector(k);
    out += ComplexMatrix::outer(v, v) * std::exp(Complex(0.0, -eig.eigenvalues[k] * t));
  }
  return out;
}

/// Number of eigenvalues above one half; the rank of a projector.
inline std::size_t projector_rank(const ComplexMatrix& p, const NumericPolicy& policy = {}) {
  const auto eig = eig_hermitian(p, policy);
  return static_cast<std::size_t>(
      std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(), [](double x) { return x > 0.5; }));
}

}  // namespace modalhist
