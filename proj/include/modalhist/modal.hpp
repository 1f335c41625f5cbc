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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/projector_family.hpp"
#include "modalhist/spectral.hpp"
#include "modalhist/state.hpp"
#include "modalhist/tensor.hpp"

namespace modalhist {

using MergeGroups = std::vector<std::vector<std::size_t>>;

/// Clusters descending weights into runs of numerically equal values.
/// Adjacent weights belong together when |w_i - w_{i+1}| <= tol * max(w_i, 1);
/// groups are the transitive closure of that relation.
inline MergeGroups merge_degenerate(std::span<const double> weights, double tol) {
  MergeGroups groups;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i > 0 && std::abs(weights[i - 1] - weights[i]) <= tol * std::max(weights[i - 1], 1.0))
      groups.back().push_back(i);
    else
      groups.push_back({i});
  }
  return groups;
}

/// Biorthogonal decomposition of a bipartite pure state with degenerate
/// weights merged into multi-dimensional projectors.
struct SchmidtResult {
  FactorSet side_a;                  // factors of the subsystem, ascending
  FactorSet side_b;                  // the remaining factors, ascending
  std::vector<Complex> coefficients; // real and nonnegative
  std::vector<double> weights;       // |c_i|^2, descending
  std::vector<ComplexVector> left_states;
  std::vector<ComplexVector> right_states;
  MergeGroups merge_groups;
  /// One projector per merge group, followed by the zero-weight remainder of
  /// side A when the Schmidt rank is below its dimension.
  ProjectorFamily merged_projectors;
  std::optional<std::size_t> remainder_index;

  std::size_t rank() const noexcept { return weights.size(); }

  /// sum_i c_i |a_i>|b_i> laid out in the original factor order.
  ComplexVector reconstruct(std::span<const std::size_t> dims) const {
    const FactorSplit split(dims, side_a);
    ComplexVector out(split.total_dim());
    for (std::size_t i = 0; i < rank(); ++i) {
      const ComplexVector term = join_bipartite(left_states[i], right_states[i], split);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += coefficients[i] * term[k];
    }
    return out;
  }
};

namespace detail {

inline ComplexMatrix group_projector(const std::vector<ComplexVector>& vectors, const std::vector<std::size_t>& group,
                                     std::size_t dim) {
  ComplexMatrix p(dim, dim);
  for (std::size_t i : group) p += ComplexMatrix::projector_onto(vectors[i]);
  return p;
}

inline FactorSet normalize_cut(std::span<const std::size_t> cut, std::size_t factor_count) {
  FactorSet side(cut.begin(), cut.end());
  std::sort(side.begin(), side.end());
  require(std::adjacent_find(side.begin(), side.end()) == side.end(), ErrorKind::kShape, "cut lists a factor twice");
  require(!side.empty() && side.size() < factor_count, ErrorKind::kShape,
          "cut must split the factors into two nonempty sets");
  require(side.back() < factor_count, ErrorKind::kShape, "cut refers to a missing factor");
  return side;
}

}  // namespace detail

/// Schmidt decomposition across the cut `side_a | rest`, computed from the
/// SVD of the reshaped amplitude matrix.
inline SchmidtResult schmidt_decompose(const PureState& psi, std::span<const std::size_t> side_a,
                                       const NumericPolicy& policy = {}) {
  require(std::abs(norm(psi.amplitudes()) - 1.0) <= policy.state_norm_tol, ErrorKind::kValidation,
          "schmidt_decompose needs a normalized state");
  SchmidtResult out;
  out.side_a = detail::normalize_cut(side_a, psi.factor_count());
  const FactorSplit split(psi.dims(), out.side_a);
  out.side_b = split.rest();
  require(split.part_dim() > 1 && split.rest_dim() > 1, ErrorKind::kValidation,
          "one side of the cut is a trivial dimension-1 space");

  const ComplexMatrix m = bipartite_matrix(psi.amplitudes(), split);
  Eigen::MatrixXcd em(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) em(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(em, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  // M = sum_k s_k u_k v_k^dagger, so psi = sum_k s_k u_k (x) conj(v_k).
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double s = sv(k);
    if (s * s < policy.rank_cutoff) continue;
    ComplexVector left(m.rows());
    ComplexVector right(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) left[r] = svd.matrixU()(static_cast<Eigen::Index>(r), k);
    for (std::size_t c = 0; c < m.cols(); ++c) right[c] = std::conj(svd.matrixV()(static_cast<Eigen::Index>(c), k));
    // Fix the phase of the left state; the inverse phase moves to the right state.
    ComplexVector fixed = left;
    apply_phase_convention(fixed);
    std::size_t pivot = 0;
    while (std::abs(left[pivot]) == 0.0) ++pivot;
    const Complex phase = fixed[pivot] / left[pivot];
    for (auto& z : right) z /= phase;
    out.coefficients.push_back(s);
    out.weights.push_back(s * s);
    out.left_states.push_back(std::move(fixed));
    out.right_states.push_back(std::move(right));
  }
  require(!out.weights.empty(), ErrorKind::kValidation, "state has no Schmidt terms above the rank cutoff");

  out.merge_groups = merge_degenerate(out.weights, policy.degeneracy_tol);
  std::vector<ComplexMatrix> projectors;
  std::vector<std::string> labels;
  ComplexMatrix covered(split.part_dim(), split.part_dim());
  for (std::size_t g = 0; g < out.merge_groups.size(); ++g) {
    projectors.push_back(detail::group_projector(out.left_states, out.merge_groups[g], split.part_dim()));
    covered += projectors.back();
    labels.push_back("group" + std::to_string(g));
  }
  if (out.rank() < split.part_dim()) {
    out.remainder_index = projectors.size();
    projectors.push_back(ComplexMatrix::identity(split.part_dim()) - covered);
    labels.push_back("remainder");
  }
  out.merged_projectors = ProjectorFamily(std::move(projectors), std::move(labels), policy);
  return out;
}

/// Definite-valued family of one subsystem together with its probabilities.
struct ModalState {
  std::optional<std::size_t> target_factor;
  std::optional<SchmidtResult> schmidt;
  ProjectorFamily definite_family;
  std::vector<double> probabilities;
  std::vector<bool> weight_zero;  // structural projectors carrying no probability
};

/// Modal family of the subsystem formed by `side_a` in a pure total state.
inline ModalState modal_state(const PureState& psi, std::span<const std::size_t> side_a, const NumericPolicy& policy = {}) {
  ModalState out;
  SchmidtResult s = schmidt_decompose(psi, side_a, policy);
  if (s.side_a.size() == 1) out.target_factor = s.side_a.front();
  out.definite_family = s.merged_projectors;
  for (const auto& group : s.merge_groups) {
    double p = 0.0;
    for (std::size_t i : group) p += s.weights[i];
    out.probabilities.push_back(p);
    out.weight_zero.push_back(false);
  }
  if (s.remainder_index) {
    out.probabilities.push_back(0.0);
    out.weight_zero.push_back(true);
  }
  out.schmidt = std::move(s);
  return out;
}

/// Definite family from the spectral resolution of a density operator.
/// Degenerate eigenvalues are merged; eigenvalues below the rank cutoff form
/// one zero-weight projector so the family stays complete.
inline ModalState spectral_modal(const DensityOperator& rho, const NumericPolicy& policy = {}) {
  const EigenDecomposition eig = eig_hermitian(rho.matrix(), policy);
  const std::size_t n = rho.dim();
  std::vector<double> values = eig.eigenvalues;
  std::size_t positive = 0;
  while (positive < n && values[positive] >= policy.rank_cutoff) ++positive;

  std::vector<ComplexVector> vectors;
  for (std::size_t k = 0; k < n; ++k) vectors.push_back(eig.vector(k));

  ModalState out;
  std::vector<ComplexMatrix> projectors;
  std::vector<std::string> labels;
  const MergeGroups groups = merge_degenerate(std::span<const double>(values.data(), positive), policy.degeneracy_tol);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    projectors.push_back(detail::group_projector(vectors, groups[g], n));
    double p = 0.0;
    for (std::size_t i : groups[g]) p += values[i];
    out.probabilities.push_back(p);
    out.weight_zero.push_back(false);
    labels.push_back("group" + std::to_string(g));
  }
  if (positive < n) {
    std::vector<std::size_t> zero_group;
    for (std::size_t k = positive; k < n; ++k) zero_group.push_back(k);
    projectors.push_back(detail::group_projector(vectors, zero_group, n));
    out.probabilities.push_back(0.0);
    out.weight_zero.push_back(true);
    labels.push_back("zero");
  }
  out.definite_family = ProjectorFamily(std::move(projectors), std::move(labels), policy);
  return out;
}

struct DefiniteValueTest {
  bool definite = false;
  std::vector<double> coefficients;  // a_l with a = sum_l a_l P_l, meaningful when definite
  double residual = 0.0;             // ||a - sum_l a_l P_l||_max
  double max_commutator = 0.0;       // max_l ||[a, P_l]||_max
};

/// Membership of a Hermitian observable in the commutative span of a family.
inline DefiniteValueTest is_definite_valued(const ComplexMatrix& a, const ProjectorFamily& family,
                                            const NumericPolicy& policy = {}) {
  require(a.is_square() && a.rows() == family.dim(), ErrorKind::kShape, "observable and family dimensions differ");
  require(is_hermitian(a, policy.hermitian_tol * std::max(1.0, a.max_abs())), ErrorKind::kValidation,
          "observable is not Hermitian");
  DefiniteValueTest out;
  ComplexMatrix fit(a.rows(), a.cols());
  for (const auto& p : family.projectors()) {
    const double rank = p.trace().real();
    require(rank > 0.5, ErrorKind::kValidation, "family contains a zero projector");
    const double coeff = (p * a).trace().real() / rank;
    out.coefficients.push_back(coeff);
    fit += p * Complex(coeff);
    out.max_commutator = std::max(out.max_commutator, commutator(a, p).max_abs());
  }
  out.residual = max_abs_diff(a, fit);
  out.definite = out.residual <= policy.definite_tol && out.max_commutator <= policy.definite_tol;
  return out;
}

/// A projector acting on a set of factors of the total system.
struct LocalProjector {
  FactorSet factors;
  ComplexMatrix projector;
};

/// <Psi| P^alpha P^beta ... |Psi> for projectors on pairwise disjoint factor sets.
inline double joint_probability_single_time(const PureState& psi, std::span<const LocalProjector> assignments,
                                            const NumericPolicy& policy = {}) {
  std::vector<bool> used(psi.factor_count(), false);
  for (const auto& a : assignments) {
    require(!a.factors.empty(), ErrorKind::kShape, "assignment with no factors");
    for (std::size_t f : a.factors) {
      require(f < psi.factor_count(), ErrorKind::kShape, "assignment refers to a missing factor");
      require(!used[f], ErrorKind::kDisjointness,
              "factor " + std::to_string(f) + " appears in more than one assignment; subsystems must not overlap");
      used[f] = true;
    }
  }
  ComplexVector v = psi.amplitudes();
  for (const auto& a : assignments) {
    require(is_hermitian(a.projector, policy.hermitian_tol) &&
                max_abs_diff(a.projector * a.projector, a.projector) <= policy.projector_tol,
            ErrorKind::kValidation, "assignment operator is not a projector");
    v = apply_local(a.projector, psi.dims(), a.factors, v);
  }
  const Complex value = inner(psi.amplitudes(), v);
  return std::clamp(value.real(), 0.0, 1.0);
}

}  // namespace modalhist
