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
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "modalhist/complex_matrix.hpp"

namespace modalhist {

using FactorDims = std::vector<std::size_t>;
using FactorSet = std::vector<std::size_t>;

inline std::size_t total_dimension(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Splits a tensor-product space into a chosen set of factors (the "part")
/// and the remaining factors (the "rest"), both kept in the order given
/// for the part and ascending order for the rest. Maps (part index,
/// rest index) to the full basis index, with the last factor varying fastest.
class FactorSplit {
 public:
  FactorSplit(std::span<const std::size_t> dims, std::span<const std::size_t> part)
      : dims_(dims.begin(), dims.end()), part_(part.begin(), part.end()) {
    std::vector<bool> used(dims_.size(), false);
    for (std::size_t f : part_) {
      require(f < dims_.size(), ErrorKind::kShape,
              "factor index " + std::to_string(f) + " out of range for " + std::to_string(dims_.size()) + " factors");
      require(!used[f], ErrorKind::kShape, "factor " + std::to_string(f) + " listed twice");
      used[f] = true;
    }
    for (std::size_t f = 0; f < dims_.size(); ++f)
      if (!used[f]) rest_.push_back(f);

    std::vector<std::size_t> strides(dims_.size(), 1);
    for (std::size_t f = dims_.size(); f-- > 1;) strides[f - 1] = strides[f] * dims_[f];

    part_dim_ = 1;
    for (std::size_t f : part_) part_dim_ *= dims_[f];
    rest_dim_ = 1;
    for (std::size_t f : rest_) rest_dim_ *= dims_[f];

    part_offsets_ = offsets(part_, strides);
    rest_offsets_ = offsets(rest_, strides);
  }

  std::size_t part_dim() const noexcept { return part_dim_; }
  std::size_t rest_dim() const noexcept { return rest_dim_; }
  std::size_t total_dim() const noexcept { return part_dim_ * rest_dim_; }
  const FactorSet& part() const noexcept { return part_; }
  const FactorSet& rest() const noexcept { return rest_; }

  std::size_t full_index(std::size_t part_index, std::size_t rest_index) const {
    return part_offsets_[part_index] + rest_offsets_[rest_index];
  }

 private:
  std::vector<std::size_t> offsets(const FactorSet& factors, const std::vector<std::size_t>& strides) const {
    std::size_t count = 1;
    for (std::size_t f : factors) count *= dims_[f];
    std::vector<std::size_t> out(count, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t remainder = idx;
      std::size_t offset = 0;
      for (std::size_t k = factors.size(); k-- > 0;) {
        const std::size_t d = dims_[factors[k]];
        offset += (remainder % d) * strides[factors[k]];
        remainder /= d;
      }
      out[idx] = offset;
    }
    return out;
  }

  FactorDims dims_;
  FactorSet part_;
  FactorSet rest_;
  std::size_t part_dim_ = 1;
  std::size_t rest_dim_ = 1;
  std::vector<std::size_t> part_offsets_;
  std::vector<std::size_t> rest_offsets_;
};

/// Embeds an operator acting on `targets` (in the given order) into the full
/// space, with identity on every other factor.
inline ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const std::size_t> dims,
                                    std::span<const std::size_t> targets) {
  const FactorSplit split(dims, targets);
  require(op.rows() == split.part_dim() && op.cols() == split.part_dim(), ErrorKind::kShape,
          "operator " + op.shape_string() + " does not act on a factor set of dimension " +
              std::to_string(split.part_dim()));
  ComplexMatrix out(split.total_dim(), split.total_dim());
  for (std::size_t rest = 0; rest < split.rest_dim(); ++rest)
    for (std::size_t a = 0; a < split.part_dim(); ++a)
      for (std::size_t b = 0; b < split.part_dim(); ++b)
        out(split.full_index(a, rest), split.full_index(b, rest)) = op(a, b);
  return out;
}

inline ComplexVector apply_local(const ComplexMatrix& op, std::span<const std::size_t> dims,
                                 std::span<const std::size_t> targets, std::span<const Complex> v) {
  const FactorSplit split(dims, targets);
  require(op.rows() == split.part_dim() && op.cols() == split.part_dim(), ErrorKind::kShape,
          "local operator has wrong dimension");
  require(v.size() == split.total_dim(), ErrorKind::kShape, "state length does not match factor dimensions");
  ComplexVector out(v.size());
  std::vector<Complex> local(split.part_dim());
  for (std::size_t rest = 0; rest < split.rest_dim(); ++rest) {
    for (std::size_t b = 0; b < split.part_dim(); ++b) local[b] = v[split.full_index(b, rest)];
    for (std::size_t a = 0; a < split.part_dim(); ++a) {
      Complex acc = 0.0;
      for (std::size_t b = 0; b < split.part_dim(); ++b) acc += op(a, b) * local[b];
      out[split.full_index(a, rest)] = acc;
    }
  }
  return out;
}

/// Reshapes a state vector into the (part x rest) amplitude matrix.
inline ComplexMatrix bipartite_matrix(std::span<const Complex> amplitudes, const FactorSplit& split) {
  require(amplitudes.size() == split.total_dim(), ErrorKind::kShape, "state length does not match factor dimensions");
  ComplexMatrix m(split.part_dim(), split.rest_dim());
  for (std::size_t a = 0; a < split.part_dim(); ++a)
    for (std::size_t b = 0; b < split.rest_dim(); ++b) m(a, b) = amplitudes[split.full_index(a, b)];
  return m;
}

/// Full-space vector of part_state (x) rest_state laid out in the original factor order.
inline ComplexVector join_bipartite(std::span<const Complex> part_state, std::span<const Complex> rest_state,
                                    const FactorSplit& split) {
  require(part_state.size() == split.part_dim() && rest_state.size() == split.rest_dim(), ErrorKind::kShape,
          "bipartite component lengths do not match the split");
  ComplexVector out(split.total_dim());
  for (std::size_t a = 0; a < split.part_dim(); ++a)
    for (std::size_t b = 0; b < split.rest_dim(); ++b) out[split.full_index(a, b)] = part_state[a] * rest_state[b];
  return out;
}

/// Full-space operator part_op (x) rest_op laid out in the original factor order.
inline ComplexMatrix join_bipartite(const ComplexMatrix& part_op, const ComplexMatrix& rest_op,
                                    const FactorSplit& split) {
  require(part_op.rows() == split.part_dim() && rest_op.rows() == split.rest_dim(), ErrorKind::kShape,
          "bipartite operator dimensions do not match the split");
  const std::size_t n = split.total_dim();
  ComplexMatrix out(n, n);
  for (std::size_t a = 0; a < split.part_dim(); ++a)
    for (std::size_t a2 = 0; a2 < split.part_dim(); ++a2) {
      const Complex pa = part_op(a, a2);
      if (pa == Complex(0.0)) continue;
      for (std::size_t b = 0; b < split.rest_dim(); ++b)
        for (std::size_t b2 = 0; b2 < split.rest_dim(); ++b2)
          out(split.full_index(a, b), split.full_index(a2, b2)) = pa * rest_op(b, b2);
    }
  return out;
}

}  // namespace modalhist
