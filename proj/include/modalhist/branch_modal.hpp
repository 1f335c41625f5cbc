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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/error.hpp"
#include "modalhist/histories.hpp"
#include "modalhist/modal.hpp"
#include "modalhist/numeric_policy.hpp"
#include "modalhist/projector_family.hpp"
#include "modalhist/spectral.hpp"
#include "modalhist/state.hpp"
#include "modalhist/tensor.hpp"

namespace modalhist {

using BranchPath = std::vector<std::size_t>;

/// One branch of the tree. A merged (degenerate) Schmidt group contributes a
/// multi-dimensional system and environment subspace instead of one vector.
struct BranchNode {
  BranchPath path;
  Complex amplitude = 1.0;
  ComplexVector branch_state;  // normalized full-space vector of this branch
  std::vector<ComplexVector> system_basis;
  std::vector<ComplexVector> environment_basis;
  std::vector<std::size_t> children;  // indices into BranchTree::nodes

  double probability() const { return std::norm(amplitude); }
};

struct BranchTree {
  FactorDims dims;
  std::size_t system_factor = 0;
  std::vector<BranchNode> nodes;  // nodes[0] is the root
  std::vector<std::vector<std::size_t>> levels;  // node indices per depth
  std::vector<ComplexMatrix> interactions;
  PureState total_state;  // the globally evolved state
  double reconstruction_residual = 0.0;
  double max_environment_overlap = 0.0;

  std::size_t depth() const noexcept { return interactions.size(); }
  const BranchNode& root() const { return nodes.front(); }
  const std::vector<std::size_t>& leaves() const { return levels.back(); }
  FactorSplit split() const { return FactorSplit(dims, std::vector<std::size_t>{system_factor}); }
};

inline BranchTree make_branch_tree(const PureState& initial, std::size_t system_factor) {
  require(system_factor < initial.factor_count(), ErrorKind::kShape, "system factor out of range");
  require(initial.factor_count() >= 2, ErrorKind::kShape, "a branch tree needs a system and an environment");
  BranchTree tree;
  tree.dims = initial.dims();
  tree.system_factor = system_factor;
  tree.total_state = initial;
  BranchNode root;
  root.branch_state = initial.amplitudes();
  tree.nodes.push_back(std::move(root));
  tree.levels.push_back({0});
  return tree;
}

struct ReinterferenceReport {
  double max_overlap = 0.0;
  std::vector<std::pair<BranchPath, BranchPath>> offending_pairs;
  double tolerance = 0.0;
  bool decoherent = true;
};

namespace detail {

// Operator norm of E_p^dagger E_q for two orthonormal sets of vectors.
inline double subspace_overlap(const std::vector<ComplexVector>& p, const std::vector<ComplexVector>& q,
                               const NumericPolicy& policy) {
  if (p.size() == 1 && q.size() == 1) return std::abs(inner(p[0], q[0]));
  ComplexMatrix g(p.size(), q.size());
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b) g(a, b) = inner(p[a], q[b]);
  const EigenDecomposition eig = eig_hermitian(g.adjoint() * g, policy);
  return std::sqrt(std::max(0.0, eig.eigenvalues.front()));
}

inline ComplexMatrix span_projector(const std::vector<ComplexVector>& basis, std::size_t dim) {
  ComplexMatrix p(dim, dim);
  for (const auto& v : basis) p += ComplexMatrix::projector_onto(v);
  return p;
}

}  // namespace detail

namespace detail {

inline ReinterferenceReport level_reinterference(const BranchTree& tree, std::size_t depth, double tol,
                                                 const NumericPolicy& policy) {
  ReinterferenceReport report;
  report.tolerance = tol;
  if (depth == 0) return report;
  const auto& level = tree.levels.at(depth);
  for (std::size_t a = 0; a < level.size(); ++a)
    for (std::size_t b = a + 1; b < level.size(); ++b) {
      const BranchNode& p = tree.nodes[level[a]];
      const BranchNode& q = tree.nodes[level[b]];
      const double o = subspace_overlap(p.environment_basis, q.environment_basis, policy);
      report.max_overlap = std::max(report.max_overlap, o);
      if (o > tol) report.offending_pairs.emplace_back(p.path, q.path);
    }
  report.decoherent = report.offending_pairs.empty();
  return report;
}

}  // namespace detail

/// Largest overlap between the environment subspaces of distinct leaves.
inline ReinterferenceReport detect_reinterference(const BranchTree& tree, double tol, const NumericPolicy& policy = {}) {
  return detail::level_reinterference(tree, tree.depth(), tol, policy);
}

/// Applies `interaction` to every leaf separately and splits each evolved
/// branch along its own Schmidt decomposition (system factor vs the rest).
inline BranchTree branch_decompose(BranchTree tree, const ComplexMatrix& interaction, const NumericPolicy& policy = {}) {
  const std::size_t n = tree.total_state.dim();
  require(interaction.rows() == n && interaction.cols() == n, ErrorKind::kShape,
          "interaction acts on dimension " + std::to_string(interaction.rows()) + ", tree state has " + std::to_string(n));
  require_unitary(interaction, policy.unitary_tol, "interaction");
  const std::vector<std::size_t> system{tree.system_factor};

  std::vector<std::size_t> next_level;
  const std::vector<std::size_t> current = tree.levels.back();
  for (std::size_t leaf_index : current) {
    const ComplexVector evolved = interaction.apply(tree.nodes[leaf_index].branch_state);
    const SchmidtResult s = schmidt_decompose(PureState(tree.dims, evolved, policy), system, policy);
    const Complex parent_amplitude = tree.nodes[leaf_index].amplitude;
    const BranchPath parent_path = tree.nodes[leaf_index].path;
    std::size_t slot = 0;
    for (const auto& group : s.merge_groups) {
      double weight = 0.0;
      for (std::size_t i : group) weight += s.weights[i];
      const Complex amplitude = parent_amplitude * std::sqrt(weight);
      if (std::norm(amplitude) < policy.rank_cutoff) continue;
      BranchNode child;
      child.path = parent_path;
      child.path.push_back(slot++);
      child.amplitude = amplitude;
      child.branch_state.assign(n, Complex(0.0));
      const FactorSplit split = tree.split();
      for (std::size_t i : group) {
        const ComplexVector term = join_bipartite(s.left_states[i], s.right_states[i], split);
        for (std::size_t k = 0; k < n; ++k) child.branch_state[k] += s.coefficients[i] * term[k] / std::sqrt(weight);
        child.system_basis.push_back(s.left_states[i]);
        child.environment_basis.push_back(s.right_states[i]);
      }
      tree.nodes[leaf_index].children.push_back(tree.nodes.size());
      next_level.push_back(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
      require(next_level.size() <= policy.max_leaves, ErrorKind::kCapacity,
              "branch tree exceeds the leaf cap of " + std::to_string(policy.max_leaves));
    }
  }

  tree.levels.push_back(std::move(next_level));
  tree.interactions.push_back(interaction);
  tree.total_state = evolve(tree.total_state, interaction, policy);

  ComplexVector resummed(n);
  for (std::size_t idx : tree.leaves())
    for (std::size_t k = 0; k < n; ++k) resummed[k] += tree.nodes[idx].amplitude * tree.nodes[idx].branch_state[k];
  double residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) residual = std::max(residual, std::abs(resummed[k] - tree.total_state.amplitudes()[k]));
  tree.reconstruction_residual = residual;
  tree.max_environment_overlap = detect_reinterference(tree, 0.0, policy).max_overlap;
  return tree;
}

struct BranchProperty {
  BranchPath path;
  ComplexMatrix system_projector;
  ComplexMatrix environment_projector;
  double probability = 0.0;
};

/// Branch-relative definite properties of the current leaves.
inline std::vector<BranchProperty> branch_properties(const BranchTree& tree) {
  require(tree.depth() > 0, ErrorKind::kValidation, "no interaction applied yet, so no branch properties");
  const FactorSplit split = tree.split();
  std::vector<BranchProperty> out;
  for (std::size_t idx : tree.leaves()) {
    const BranchNode& node = tree.nodes[idx];
    out.push_back({node.path, detail::span_projector(node.system_basis, split.part_dim()),
                   detail::span_projector(node.environment_basis, split.rest_dim()), node.probability()});
  }
  return out;
}

namespace detail {

// One joint projector P_sys (x) P_env per node of a level, plus the remainder.
inline ProjectorFamily level_family(const BranchTree& tree, std::size_t depth, const NumericPolicy& policy) {
  const FactorSplit split = tree.split();
  const std::size_t n = split.total_dim();
  std::vector<ComplexMatrix> projectors;
  std::vector<std::string> labels;
  ComplexMatrix covered(n, n);
  for (std::size_t idx : tree.levels[depth]) {
    const BranchNode& node = tree.nodes[idx];
    ComplexMatrix p(n, n);
    for (const auto& s : node.system_basis)
      for (const auto& e : node.environment_basis) p += ComplexMatrix::projector_onto(join_bipartite(s, e, split));
    covered += p;
    projectors.push_back(std::move(p));
    std::string label;
    for (std::size_t k = 0; k < node.path.size(); ++k) label += (k ? "." : "") + std::to_string(node.path[k]);
    labels.push_back(std::move(label));
  }
  const ComplexMatrix remainder = ComplexMatrix::identity(n) - covered;
  if (remainder.max_abs() > policy.projector_tol) {
    projectors.push_back(remainder);
    labels.push_back("remainder");
  }
  return ProjectorFamily(std::move(projectors), std::move(labels), policy);
}

}  // namespace detail

/// History family whose k-th time carries the depth-k branch projectors.
/// Refuses trees whose environment records overlap beyond `tol` at any depth.
inline HistoryFamily branch_history_family(const BranchTree& tree, double tol, const NumericPolicy& policy = {}) {
  require(tree.depth() > 0, ErrorKind::kValidation, "branch tree has no interactions");
  for (std::size_t d = 1; d <= tree.depth(); ++d) {
    const ReinterferenceReport r = detail::level_reinterference(tree, d, tol, policy);
    require(r.decoherent, ErrorKind::kConsistencyRefusal,
            "environment records reinterfere at depth " + std::to_string(d) + " (max overlap " +
                std::to_string(r.max_overlap) + ", tolerance " + std::to_string(tol) + ")");
  }

  std::vector<TimedFamily> timed;
  ComplexMatrix u = ComplexMatrix::identity(tree.total_state.dim());
  for (std::size_t d = 1; d <= tree.depth(); ++d) {
    u = tree.interactions[d - 1] * u;
    timed.push_back({static_cast<double>(d), detail::level_family(tree, d, policy), u});
  }
  ComplexVector initial = tree.root().branch_state;
  return HistoryFamily(PureState(tree.dims, std::move(initial), policy), std::move(timed), policy);
}

/// The unmodified scheme for comparison: at every step the system's family is
/// the global biorthogonal decomposition of the evolved total state.
inline HistoryFamily global_modal_history_family(const PureState& initial, std::span<const ComplexMatrix> interactions,
                                                 std::size_t system_factor, const NumericPolicy& policy = {}) {
  require(!interactions.empty(), ErrorKind::kValidation, "no interactions given");
  const std::vector<std::size_t> system{system_factor};
  std::vector<TimedFamily> timed;
  ComplexMatrix u = ComplexMatrix::identity(initial.dim());
  for (std::size_t k = 0; k < interactions.size(); ++k) {
    require_unitary(interactions[k], policy.unitary_tol, "interaction " + std::to_string(k));
    u = interactions[k] * u;
    const ModalState m = modal_state(evolve(initial, u, policy), system, policy);
    timed.push_back({static_cast<double>(k + 1), m.definite_family.embedded(initial.dims(), system, policy), u});
  }
  return HistoryFamily(initial, std::move(timed), policy);
}

}  // namespace modalhist
