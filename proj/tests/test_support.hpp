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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/state.hpp"

namespace modalhist::testing {

using Rng = std::mt19937_64;

inline Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline ComplexVector random_unit_vector(std::size_t dim, Rng& rng) {
  ComplexVector v(dim);
  for (auto& z : v) z = gaussian_complex(rng);
  const double n = norm(v);
  for (auto& z : v) z /= n;
  return v;
}

inline PureState random_state(const FactorDims& dims, Rng& rng) {
  return PureState(dims, random_unit_vector(total_dimension(dims), rng));
}

/// Haar-ish unitary via Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  std::vector<ComplexVector> cols;
  while (cols.size() < n) {
    ComplexVector v(n);
    for (auto& z : v) z = gaussian_complex(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) {
        const Complex proj = inner(c, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= proj * c[i];
      }
    const double nv = norm(v);
    if (nv < 1e-8) continue;
    for (auto& z : v) z /= nv;
    cols.push_back(std::move(v));
  }
  return ComplexMatrix::from_columns(cols);
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
  ComplexMatrix h(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    h(r, r) = gaussian_complex(rng).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      h(r, c) = gaussian_complex(rng);
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

/// Projector of the given rank in a random orientation.
inline ComplexMatrix random_projector(std::size_t n, std::size_t rank, Rng& rng) {
  const ComplexMatrix u = random_unitary(n, rng);
  ComplexMatrix p(n, n);
  for (std::size_t k = 0; k < rank; ++k) p += ComplexMatrix::projector_onto(u.column(k));
  return p;
}

inline ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix pauli_y() { return {{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}; }
inline ComplexMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

inline ComplexVector ket(std::initializer_list<Complex> amps) { return ComplexVector(amps); }

}  // namespace modalhist::testing
