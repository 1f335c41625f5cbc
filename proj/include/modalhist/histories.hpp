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
#include <functional>
#include <future>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/projector_family.hpp"
#include "modalhist/spectral.hpp"
#include "modalhist/state.hpp"
#include "modalhist/tensor.hpp"

namespace modalhist {

using OutcomeTuple = std::vector<std::size_t>;

/// U^dagger P U
inline ComplexMatrix heisenberg_projector(const ComplexMatrix& p, const ComplexMatrix& u, const NumericPolicy& policy = {}) {
  require(p.is_square() && u.is_square() && p.rows() == u.rows(), ErrorKind::kShape,
          "projector " + p.shape_string() + " and unitary " + u.shape_string() + " do not match");
  require(is_hermitian(p, policy.hermitian_tol) && max_abs_diff(p * p, p) <= policy.projector_tol,
          ErrorKind::kValidation, "heisenberg_projector input is not a projector");
  require_unitary(u, policy.unitary_tol, "heisenberg_projector unitary");
  return u.adjoint() * p * u;
}

/// A complete family of properties at one time label, together with the
/// evolution from the reference time at which the total state is given.
struct TimedFamily {
  double time = 0.0;
  ProjectorFamily family;
  ComplexMatrix unitary_from_origin;
};

/// Mixed-radix enumeration of outcome tuples, last time varying fastest.
class TupleIndexer {
 public:
  TupleIndexer() = default;
  explicit TupleIndexer(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
    total_ = 1;
    for (std::size_t c : counts_) total_ *= c;
  }

  std::size_t size() const noexcept { return total_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  std::size_t flat(std::span<const std::size_t> tuple) const {
    require(tuple.size() == counts_.size(), ErrorKind::kIndexRange,
            "expected " + std::to_string(counts_.size()) + " outcome indices, got " + std::to_string(tuple.size()));
    std::size_t idx = 0;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
      require(tuple[k] < counts_[k], ErrorKind::kIndexRange,
              "outcome index " + std::to_string(tuple[k]) + " out of range at position " + std::to_string(k));
      idx = idx * counts_[k] + tuple[k];
    }
    return idx;
  }

  OutcomeTuple tuple(std::size_t flat_index) const {
    OutcomeTuple t(counts_.size());
    for (std::size_t k = counts_.size(); k-- > 0;) {
      t[k] = flat_index % counts_[k];
      flat_index /= counts_[k];
    }
    return t;
  }

 private:
  std::vector<std::size_t> counts_;
  std::size_t total_ = 1;
};

/// A total state with a time-ordered sequence of property families.
class HistoryFamily {
 public:
  HistoryFamily(PureState state, std::vector<TimedFamily> timed_families, const NumericPolicy& policy = {})
      : state_(std::move(state)), timed_(std::move(timed_families)) {
    require(!timed_.empty(), ErrorKind::kValidation, "a history family needs at least one time");
    std::vector<std::size_t> counts;
    for (std::size_t k = 0; k < timed_.size(); ++k) {
      const TimedFamily& tf = timed_[k];
      require(tf.family.dim() == state_.dim(), ErrorKind::kShape,
              "family at time index " + std::to_string(k) + " acts on dimension " + std::to_string(tf.family.dim()) +
                  ", state has " + std::to_string(state_.dim()));
      require(tf.unitary_from_origin.rows() == state_.dim(), ErrorKind::kShape, "unitary dimension mismatch");
      require_unitary(tf.unitary_from_origin, policy.unitary_tol, "unitary at time index " + std::to_string(k));
      if (k > 0)
        require(tf.time > timed_[k - 1].time, ErrorKind::kValidation, "time labels must be strictly increasing");
      std::vector<ComplexMatrix> hs;
      const bool identity = tf.unitary_from_origin == ComplexMatrix::identity(state_.dim());
      for (const auto& p : tf.family.projectors())
        hs.push_back(identity ? p : tf.unitary_from_origin.adjoint() * p * tf.unitary_from_origin);
      heisenberg_.push_back(std::move(hs));
      counts.push_back(tf.family.size());
    }
    indexer_ = TupleIndexer(std::move(counts));
  }

  const PureState& state() const noexcept { return state_; }
  const std::vector<TimedFamily>& timed_families() const noexcept { return timed_; }
  std::size_t time_count() const noexcept { return timed_.size(); }
  const TupleIndexer& indexer() const noexcept { return indexer_; }
  const ComplexMatrix& heisenberg(std::size_t time_index, std::size_t outcome) const {
    return heisenberg_.at(time_index).at(outcome);
  }

  /// P_l(t_n) ... P_i(t_1) |Psi>
  ComplexVector chain_vector(std::span<const std::size_t> indices) const {
    indexer_.flat(indices);  // validates
    ComplexVector v = state_.amplitudes();
    for (std::size_t k = 0; k < indices.size(); ++k) v = heisenberg_[k][indices[k]].apply(v);
    return v;
  }

  /// Chain vectors for every outcome tuple in flat order, sharing prefixes.
  std::vector<ComplexVector> all_chain_vectors() const {
    std::vector<ComplexVector> out(indexer_.size());
    std::vector<ComplexVector> prefix(time_count() + 1);
    prefix[0] = state_.amplitudes();
    OutcomeTuple tuple(time_count(), 0);
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t depth, std::size_t flat) {
      if (depth == time_count()) {
        out[flat] = prefix[depth];
        return;
      }
      for (std::size_t i = 0; i < indexer_.counts()[depth]; ++i) {
        prefix[depth + 1] = heisenberg_[depth][i].apply(prefix[depth]);
        walk(depth + 1, flat * indexer_.counts()[depth] + i);
      }
    };
    walk(0, 0);
    return out;
  }

  HistoryFamily without_time(std::size_t time_index, const NumericPolicy& policy = {}) const {
    require(time_index < timed_.size(), ErrorKind::kIndexRange, "time index out of range");
    require(timed_.size() > 1, ErrorKind::kValidation, "cannot drop the only time of a history family");
    std::vector<TimedFamily> kept;
    for (std::size_t k = 0; k < timed_.size(); ++k)
      if (k != time_index) kept.push_back(timed_[k]);
    return HistoryFamily(state_, std::move(kept), policy);
  }

 private:
  PureState state_;
  std::vector<TimedFamily> timed_;
  std::vector<std::vector<ComplexMatrix>> heisenberg_;
  TupleIndexer indexer_;
};

/// ||P_l(t_n) ... P_i(t_1)|Psi>||^2
inline double history_probability(const HistoryFamily& hf, std::span<const std::size_t> indices) {
  return norm_squared(hf.chain_vector(indices));
}

/// <Psi| P_i(t_1)..P_l(t_n) P_l'(t_n)..P_i'(t_1) |Psi>
inline Complex decoherence_functional(const HistoryFamily& hf, std::span<const std::size_t> indices,
                                      std::span<const std::size_t> indices_primed) {
  return inner(hf.chain_vector(indices), hf.chain_vector(indices_primed));
}

/// Full N x N decoherence matrix over all outcome tuples in flat order.
inline ComplexMatrix decoherence_matrix(const HistoryFamily& hf, const NumericPolicy& policy = {}) {
  const std::size_t n = hf.indexer().size();
  require(n <= policy.max_histories && n * n <= policy.max_histories * 16, ErrorKind::kCapacity,
          "decoherence matrix over " + std::to_string(n) + " histories is too large");
  const auto vecs = hf.all_chain_vectors();
  ComplexMatrix d(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) d(x, y) = inner(vecs[x], vecs[y]);
  return d;
}

struct HistoryProbabilityTable {
  TupleIndexer indexer;
  std::vector<double> probabilities;  // flat order, last time fastest
  double normalization_residual = 0.0;
  double max_offdiagonal = 0.0;
  std::pair<OutcomeTuple, OutcomeTuple> worst_pair;  // empty tuples when no off-diagonal term is nonzero
  double tolerance = 0.0;
  bool consistent = false;

  double probability(std::span<const std::size_t> tuple) const { return probabilities.at(indexer.flat(tuple)); }
  double total() const {
    double acc = 0.0;
    for (double p : probabilities) acc += p;
    return acc;
  }
};

namespace detail {

struct OffDiagonalMax {
  double value = 0.0;
  std::size_t x = 0;
  std::size_t y = 0;
  bool found = false;
};

// Max |<v_x|v_y>| over x < y with x in [begin, end). A pair is skipped when
// the Cauchy-Schwarz bound cannot beat the running maximum.
inline OffDiagonalMax offdiagonal_scan(const std::vector<ComplexVector>& vecs, const std::vector<double>& norms,
                                       std::size_t begin, std::size_t end) {
  OffDiagonalMax best;
  for (std::size_t x = begin; x < end; ++x) {
    if (norms[x] == 0.0) continue;
    for (std::size_t y = x + 1; y < vecs.size(); ++y) {
      if (norms[x] * norms[y] <= best.value) continue;
      const double v = std::abs(inner(vecs[x], vecs[y]));
      if (v > best.value) {
        best.value = v;
        best.x = x;
        best.y = y;
        best.found = true;
      }
    }
  }
  return best;
}

}  // namespace detail

/// Enumerates every history, fills the diagonal probabilities and reports
/// the largest mismatched-pair decoherence functional.
inline HistoryProbabilityTable check_consistency(const HistoryFamily& hf, double tol, const NumericPolicy& policy = {}) {
  const std::size_t n = hf.indexer().size();
  require(n <= policy.max_histories, ErrorKind::kCapacity,
          "history family has " + std::to_string(n) + " histories, cap is " + std::to_string(policy.max_histories));
  const auto vecs = hf.all_chain_vectors();

  HistoryProbabilityTable table;
  table.indexer = hf.indexer();
  table.tolerance = tol;
  table.probabilities.resize(n);
  std::vector<double> norms(n);
  for (std::size_t x = 0; x < n; ++x) {
    table.probabilities[x] = norm_squared(vecs[x]);
    norms[x] = std::sqrt(table.probabilities[x]);
  }

  detail::OffDiagonalMax best;
  const unsigned workers = policy.parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  if (workers <= 1 || n < 64) {
    best = detail::offdiagonal_scan(vecs, norms, 0, n);
  } else {
    std::vector<std::future<detail::OffDiagonalMax>> parts;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk)
      parts.push_back(std::async(std::launch::async, detail::offdiagonal_scan, std::cref(vecs), std::cref(norms), begin,
                                 std::min(n, begin + chunk)));
    for (auto& part : parts) {
      const auto r = part.get();
      if (r.found && r.value > best.value) best = r;
    }
  }
  table.max_offdiagonal = best.value;
  if (best.found) table.worst_pair = {table.indexer.tuple(best.x), table.indexer.tuple(best.y)};
  table.normalization_residual = std::abs(table.total() - 1.0);
  table.consistent = table.max_offdiagonal <= tol;
  return table;
}

/// Largest deviation between summing the table over one time and the
/// probabilities of the family with that time removed.
inline double marginalization_check(const HistoryProbabilityTable& table, const HistoryFamily& hf, std::size_t drop_time,
                                    const NumericPolicy& policy = {}) {
  require(hf.time_count() > 1, ErrorKind::kValidation, "cannot marginalize over the only time of a history family");
  require(drop_time < hf.time_count(), ErrorKind::kIndexRange, "drop_time out of range");
  require(table.indexer.counts() == hf.indexer().counts(), ErrorKind::kShape, "table does not belong to this family");
  const HistoryFamily shortened = hf.without_time(drop_time, policy);
  const auto reduced_vecs = shortened.all_chain_vectors();
  double residual = 0.0;
  for (std::size_t r = 0; r < shortened.indexer().size(); ++r) {
    const OutcomeTuple reduced = shortened.indexer().tuple(r);
    double summed = 0.0;
    for (std::size_t i = 0; i < hf.indexer().counts()[drop_time]; ++i) {
      OutcomeTuple full = reduced;
      full.insert(full.begin() + static_cast<std::ptrdiff_t>(drop_time), i);
      summed += table.probability(full);
    }
    residual = std::max(residual, std::abs(summed - norm_squared(reduced_vecs[r])));
  }
  return residual;
}

// Kent's argument as an executable scenario.

enum class KentVariant {
  kClosed,           // the qubit alone, precessing under sigma_x
  kClosedCommuting,  // the qubit alone, evolving under sigma_z (commutes with the z family)
  kDilated,          // the same qubit with an environment recording z at both times
};

struct KentParameters {
  double t1 = 0.0;
  double t2 = std::numbers::pi / 4.0;
  double theta = std::numbers::pi / 6.0;  // initial state cos(theta)|0> + i sin(theta)|1>
};

inline HistoryFamily kent_scenario(KentVariant variant, const KentParameters& params = {}, const NumericPolicy& policy = {}) {
  const ComplexMatrix sigma_x{{0.0, 1.0}, {1.0, 0.0}};
  const ComplexMatrix sigma_z{{1.0, 0.0}, {0.0, -1.0}};
  const ComplexVector system{std::cos(params.theta), Complex(0.0, std::sin(params.theta))};
  const ComplexMatrix z_basis = ComplexMatrix::identity(2);
  const ProjectorFamily z_family = ProjectorFamily::from_basis(z_basis, policy);

  if (variant != KentVariant::kDilated) {
    const ComplexMatrix& h = variant == KentVariant::kClosed ? sigma_x : sigma_z;
    std::vector<TimedFamily> timed{
        {params.t1, z_family, matrix_exponential_unitary(h, params.t1, policy)},
        {params.t2, z_family, matrix_exponential_unitary(h, params.t2, policy)},
    };
    return HistoryFamily(PureState({2}, system, policy), std::move(timed), policy);
  }

  // Factors: system, record of t1, record of t2.
  const FactorDims dims{2, 2, 2};
  const ComplexMatrix cnot{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
  const std::vector<std::size_t> sys{0};
  const std::vector<std::size_t> sys_r1{0, 1};
  const std::vector<std::size_t> sys_r2{0, 2};
  const ComplexMatrix record1 = embed_operator(cnot, dims, sys_r1);
  const ComplexMatrix record2 = embed_operator(cnot, dims, sys_r2);
  const ComplexMatrix u1 = record1 * embed_operator(matrix_exponential_unitary(sigma_x, params.t1, policy), dims, sys);
  const ComplexMatrix u2 =
      record2 * embed_operator(matrix_exponential_unitary(sigma_x, params.t2 - params.t1, policy), dims, sys) * u1;
  const ProjectorFamily z_on_system = z_family.embedded(dims, sys, policy);
  std::vector<TimedFamily> timed{{params.t1, z_on_system, u1}, {params.t2, z_on_system, u2}};
  ComplexVector amps = tensor_product(tensor_product(system, basis_vector(2, 0)), basis_vector(2, 0));
  return HistoryFamily(PureState(dims, std::move(amps), policy), std::move(timed), policy);
}

}  // namespace modalhist
