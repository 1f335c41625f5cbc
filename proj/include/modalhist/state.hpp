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
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/spectral.hpp"
#include "modalhist/tensor.hpp"

namespace modalhist {

/// Normalized state vector on a tensor product of factors.
class PureState {
 public:
  PureState() = default;

  PureState(FactorDims dims, ComplexVector amplitudes, const NumericPolicy& policy = {})
      : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
    require(!dims_.empty(), ErrorKind::kShape, "a state needs at least one factor");
    for (std::size_t d : dims_) require(d >= 1, ErrorKind::kShape, "factor dimensions must be positive");
    const std::size_t total = total_dimension(dims_);
    require(total <= policy.max_dim, ErrorKind::kCapacity,
            "state dimension " + std::to_string(total) + " exceeds cap " + std::to_string(policy.max_dim));
    require(amplitudes_.size() == total, ErrorKind::kShape,
            "amplitude count " + std::to_string(amplitudes_.size()) + " does not match product of dims " +
                std::to_string(total));
    const double n = norm(amplitudes_);
    require(std::abs(n - 1.0) <= policy.state_norm_tol, ErrorKind::kValidation,
            "state is not normalized (norm " + std::to_string(n) + ")");
  }

  /// Rescales the amplitudes to unit norm before validating.
  static PureState normalized(FactorDims dims, ComplexVector amplitudes, const NumericPolicy& policy = {}) {
    const double n = norm(amplitudes);
    require(n > 0.0, ErrorKind::kValidation, "cannot normalize the zero vector");
    for (auto& z : amplitudes) z /= n;
    return PureState(std::move(dims), std::move(amplitudes), policy);
  }

  static PureState product(const std::vector<ComplexVector>& factors, const NumericPolicy& policy = {}) {
    require(!factors.empty(), ErrorKind::kShape, "product of zero factors");
    FactorDims dims;
    ComplexVector amps{1.0};
    for (const auto& f : factors) {
      dims.push_back(f.size());
      amps = tensor_product(amps, f);
    }
    return PureState(std::move(dims), std::move(amps), policy);
  }

  const FactorDims& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::size_t factor_count() const noexcept { return dims_.size(); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }

 private:
  FactorDims dims_;
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
 public:
  DensityOperator() = default;

  explicit DensityOperator(ComplexMatrix matrix, const NumericPolicy& policy = {}) : matrix_(std::move(matrix)) {
    require(matrix_.is_square() && matrix_.rows() > 0, ErrorKind::kShape, "density operator must be square");
    require(matrix_.rows() <= policy.max_dim, ErrorKind::kCapacity, "density operator dimension exceeds cap");
    require(is_hermitian(matrix_, policy.hermitian_tol), ErrorKind::kValidation, "density operator is not Hermitian");
    const Complex tr = matrix_.trace();
    require(std::abs(tr - 1.0) <= policy.trace_tol, ErrorKind::kValidation,
            "density operator trace is " + std::to_string(tr.real()));
    const auto eig = eig_hermitian(matrix_, policy);
    require(eig.eigenvalues.back() >= -policy.eigenvalue_floor, ErrorKind::kValidation,
            "density operator has negative eigenvalue " + std::to_string(eig.eigenvalues.back()));
  }

  static DensityOperator from_pure(const PureState& psi, const NumericPolicy& policy = {}) {
    return DensityOperator(ComplexMatrix::projector_onto(psi.amplitudes()), policy);
  }

  std::size_t dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Reduced density operator on the kept factors, which stay in ascending order.
inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> dims,
                                     std::span<const std::size_t> keep, const NumericPolicy& policy = {}) {
  require(total_dimension(dims) == rho.dim(), ErrorKind::kShape,
          "factor dims multiply to " + std::to_string(total_dimension(dims)) + " but operator has dimension " +
              std::to_string(rho.dim()));
  require(!keep.empty(), ErrorKind::kShape, "partial trace must keep at least one factor");
  FactorSet kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  const FactorSplit split(dims, kept);
  ComplexMatrix reduced(split.part_dim(), split.part_dim());
  const ComplexMatrix& m = rho.matrix();
  for (std::size_t a = 0; a < split.part_dim(); ++a)
    for (std::size_t b = 0; b < split.part_dim(); ++b) {
      Complex acc = 0.0;
      for (std::size_t r = 0; r < split.rest_dim(); ++r) acc += m(split.full_index(a, r), split.full_index(b, r));
      reduced(a, b) = acc;
    }
  return DensityOperator(std::move(reduced), policy);
}

/// Reduced state of a pure state without forming the full density matrix.
inline DensityOperator reduced_state(const PureState& psi, std::span<const std::size_t> keep,
                                     const NumericPolicy& policy = {}) {
  require(!keep.empty(), ErrorKind::kShape, "reduced state must keep at least one factor");
  FactorSet kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  const FactorSplit split(psi.dims(), kept);
  const ComplexMatrix m = bipartite_matrix(psi.amplitudes(), split);
  ComplexMatrix reduced(split.part_dim(), split.part_dim());
  for (std::size_t a = 0; a < split.part_dim(); ++a)
    for (std::size_t b = a; b < split.part_dim(); ++b) {
      Complex acc = 0.0;
      for (std::size_t r = 0; r < split.rest_dim(); ++r) acc += m(a, r) * std::conj(m(b, r));
      reduced(a, b) = acc;
      reduced(b, a) = std::conj(acc);
    }
  for (std::size_t a = 0; a < split.part_dim(); ++a) reduced(a, a) = reduced(a, a).real();
  return DensityOperator(std::move(reduced), policy);
}

inline PureState evolve(const PureState& psi, const ComplexMatrix& u, const NumericPolicy& policy = {}) {
  require_unitary(u, policy.unitary_tol, "evolution operator");
  require(u.rows() == psi.dim(), ErrorKind::kShape,
          "unitary " + u.shape_string() + " does not act on dimension " + std::to_string(psi.dim()));
  return PureState(psi.dims(), u.apply(psi.amplitudes()), policy);
}

}  // namespace modalhist
