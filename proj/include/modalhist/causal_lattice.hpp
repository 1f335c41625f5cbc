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
#include <cstdint>
#include <functional>
#include <random>
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

/// A point-like region. Every point of one site shares that site's factor;
/// the record of (x, t) lives in its own factor for t before the last row.
struct LatticePoint {
  std::size_t x = 0;
  std::size_t t = 0;
  std::size_t factor_index = 0;
  std::vector<std::size_t> record_factor_indices;
};

/// Lightcone order with speed 1: y < x iff t_y < t_x and |x_x - x_y| <= t_x - t_y.
class CausalOrder {
 public:
  CausalOrder() = default;
  explicit CausalOrder(std::vector<LatticePoint> points) : points_(std::move(points)) {}

  /// Row-major grid, t slowest. Site x is factor x; the record of (x, t) is
  /// factor width + t * width + x for every row but the last.
  static CausalOrder grid(std::size_t width, std::size_t timesteps) {
    std::vector<LatticePoint> points;
    for (std::size_t t = 0; t < timesteps; ++t)
      for (std::size_t x = 0; x < width; ++x) {
        LatticePoint p{x, t, x, {}};
        if (t + 1 < timesteps) p.record_factor_indices.push_back(width + t * width + x);
        points.push_back(std::move(p));
      }
    return CausalOrder(std::move(points));
  }

  const std::vector<LatticePoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  bool precedes(std::size_t a, std::size_t b) const {
    const LatticePoint& p = points_.at(a);
    const LatticePoint& q = points_.at(b);
    if (p.t >= q.t) return false;
    const std::size_t dx = p.x > q.x ? p.x - q.x : q.x - p.x;
    return dx <= q.t - p.t;
  }
  bool spacelike(std::size_t a, std::size_t b) const { return a != b && !precedes(a, b) && !precedes(b, a); }

  std::size_t index_of(std::size_t x, std::size_t t) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i].x == x && points_[i].t == t) return i;
    fail(ErrorKind::kIndexRange, "no lattice point at (" + std::to_string(x) + ", " + std::to_string(t) + ")");
  }

 private:
  std::vector<LatticePoint> points_;
};

/// Ordered partition of the points into mutually spacelike slices.
struct Foliation {
  std::vector<std::vector<std::size_t>> slices;
  bool operator==(const Foliation&) const = default;
};

/// Relocates the record of point (x, t) at the start of step t + 1: the
/// dedicated record is undone and the point's pointer value is written into
/// site `target_x` instead, i.e. into the point (target_x, t + 1).
struct RecordRoute {
  std::size_t x = 0;
  std::size_t t = 0;
  std::size_t target_x = 0;
};

struct LatticeDynamics {
  ComplexVector initial_sites;   // over all sites; empty means every site in |0>
  ComplexMatrix local_unitary;   // applied to every site each step; empty means identity
  ComplexMatrix neighbor_gate;   // brickwork two-site gate; empty means none
  std::vector<RecordRoute> routes;
  std::vector<std::pair<std::size_t, std::size_t>> erased_records;  // (x, t): record undone at step t + 1
  bool allow_acausal = false;    // test harness only
};

struct LatticeModel {
  std::size_t width = 0;
  std::size_t timesteps = 0;
  std::size_t local_dim = 0;
  CausalOrder order;
  FactorDims dims;
  PureState total_state;
  std::vector<ComplexMatrix> unitary_at;           // U(t), one per time row
  std::vector<ProjectorFamily> local_families;     // on the point's site, Schroedinger picture
  std::vector<std::vector<ComplexMatrix>> heisenberg;  // per point, U(t)^dag P U(t) on the full space
  double microcausality_residual = 0.0;

  std::size_t point_count() const noexcept { return order.size(); }
  std::size_t outcome_count(std::size_t point) const { return heisenberg.at(point).size(); }
  TupleIndexer outcome_indexer() const {
    std::vector<std::size_t> counts;
    for (const auto& h : heisenberg) counts.push_back(h.size());
    return TupleIndexer(std::move(counts));
  }
};

namespace detail {

inline ComplexMatrix basis_record(const EigenDecomposition& basis, std::size_t d) {
  ComplexMatrix local(d * d, d * d);
  for (std::size_t j = 0; j < d; ++j) {
    ComplexMatrix shift(d, d);
    for (std::size_t m = 0; m < d; ++m) shift((m + j) % d, m) = 1.0;
    local += tensor_product(ComplexMatrix::projector_onto(basis.vector(j)), shift);
  }
  return local;
}

inline double max_commutator(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b) {
  double worst = 0.0;
  for (const auto& p : a)
    for (const auto& q : b) worst = std::max(worst, commutator(p, q).max_abs());
  return worst;
}

}  // namespace detail

/// Sites 0..width-1 are factors 0..width-1; the record of (x, t) is factor
/// width + t * width + x. Point families come from the spectral resolution of
/// each site's reduced state once the row has been recorded, fixed there and
/// carried back to the initial time.
inline LatticeModel build_lattice_model(std::size_t width, std::size_t timesteps, std::size_t local_dim,
                                        const LatticeDynamics& dyn = {}, const NumericPolicy& policy = {}) {
  require(width >= 1 && timesteps >= 1, ErrorKind::kValidation, "lattice needs at least one point");
  require(local_dim >= 2, ErrorKind::kValidation, "local dimension must be at least 2");
  const std::size_t records = width * (timesteps - 1);
  const std::size_t factors = width + records;
  std::size_t total = 1;
  for (std::size_t f = 0; f < factors; ++f) {
    total *= local_dim;
    require(total <= policy.max_dim, ErrorKind::kCapacity,
            "lattice of " + std::to_string(width) + " x " + std::to_string(timesteps) + " exceeds dimension cap " +
                std::to_string(policy.max_dim));
  }
  auto record_factor = [&](std::size_t x, std::size_t t) { return width + t * width + x; };

  for (const auto& r : dyn.routes) {
    require(r.x < width && r.target_x < width, ErrorKind::kIndexRange, "record route refers to a missing site");
    require(r.t + 1 < timesteps, ErrorKind::kIndexRange, "routed record has no later step to arrive in");
    require(r.target_x != r.x, ErrorKind::kValidation, "a record cannot be relocated into its own site");
    const std::size_t dx = r.x > r.target_x ? r.x - r.target_x : r.target_x - r.x;
    require(dyn.allow_acausal || dx <= 1, ErrorKind::kCausality,
            "record of (" + std::to_string(r.x) + ", " + std::to_string(r.t) + ") sent to site " +
                std::to_string(r.target_x) + ", outside its future lightcone");
  }
  for (const auto& [x, t] : dyn.erased_records)
    require(x < width && t + 1 < timesteps, ErrorKind::kIndexRange, "erased record refers to a missing record");

  LatticeModel m;
  m.width = width;
  m.timesteps = timesteps;
  m.local_dim = local_dim;
  m.dims.assign(factors, local_dim);

  m.order = CausalOrder::grid(width, timesteps);

  const std::size_t site_dim = total_dimension(std::vector<std::size_t>(width, local_dim));
  ComplexVector sites = dyn.initial_sites.empty() ? basis_vector(site_dim, 0) : dyn.initial_sites;
  require(sites.size() == site_dim, ErrorKind::kShape, "initial site state has the wrong dimension");
  ComplexVector amps = sites;
  for (std::size_t r = 0; r < records; ++r) amps = tensor_product(amps, basis_vector(local_dim, 0));
  m.total_state = PureState(m.dims, std::move(amps), policy);

  const bool has_local = dyn.local_unitary.rows() > 0;
  const bool has_gate = dyn.neighbor_gate.rows() > 0;
  if (has_local) {
    require(dyn.local_unitary.rows() == local_dim, ErrorKind::kShape, "local unitary has the wrong dimension");
    require_unitary(dyn.local_unitary, policy.unitary_tol, "local unitary");
  }
  if (has_gate) {
    require(dyn.neighbor_gate.rows() == local_dim * local_dim, ErrorKind::kShape, "neighbor gate has the wrong dimension");
    require_unitary(dyn.neighbor_gate, policy.unitary_tol, "neighbor gate");
  }

  const std::size_t n = m.total_state.dim();
  ComplexMatrix u = ComplexMatrix::identity(n);
  std::vector<ComplexMatrix> record_ops(width * timesteps);  // per point, on the full space
  std::vector<ComplexMatrix> record_locals(width * timesteps);  // per point, on (site, carrier)
  auto point_index = [&](std::size_t x, std::size_t t) { return t * width + x; };
  m.local_families.resize(width * timesteps);
  m.heisenberg.resize(width * timesteps);

  for (std::size_t t = 0; t < timesteps; ++t) {
    if (t > 0) {
      for (const auto& [x, tr] : dyn.erased_records)
        if (tr + 1 == t) u = record_ops[point_index(x, tr)].adjoint() * u;
      for (const auto& r : dyn.routes)
        if (r.t + 1 == t) {
          const std::vector<std::size_t> pair{r.x, r.target_x};
          u = record_ops[point_index(r.x, r.t)].adjoint() * u;
          u = embed_operator(record_locals[point_index(r.x, r.t)], m.dims, pair) * u;
        }
      if (has_local)
        for (std::size_t x = 0; x < width; ++x) {
          const std::vector<std::size_t> site{x};
          u = embed_operator(dyn.local_unitary, m.dims, site) * u;
        }
      if (has_gate)
        for (std::size_t x = (t - 1) % 2; x + 1 < width; x += 2) {
          const std::vector<std::size_t> pair{x, x + 1};
          u = embed_operator(dyn.neighbor_gate, m.dims, pair) * u;
        }
    }
    if (t + 1 < timesteps) {
      const PureState before(m.dims, u.apply(m.total_state.amplitudes()), policy);
      for (std::size_t x = 0; x < width; ++x) {
        const std::vector<std::size_t> site{x};
        const EigenDecomposition basis = eig_hermitian(reduced_state(before, site, policy).matrix(), policy);
        const std::vector<std::size_t> targets{x, record_factor(x, t)};
        record_locals[point_index(x, t)] = detail::basis_record(basis, local_dim);
        record_ops[point_index(x, t)] = embed_operator(record_locals[point_index(x, t)], m.dims, targets);
        u = record_ops[point_index(x, t)] * u;
      }
    }
    require_unitary(u, policy.unitary_tol, "lattice dynamics up to row " + std::to_string(t));
    m.unitary_at.push_back(u);

    const PureState now(m.dims, u.apply(m.total_state.amplitudes()), policy);
    for (std::size_t x = 0; x < width; ++x) {
      const std::vector<std::size_t> site{x};
      const std::size_t p = point_index(x, t);
      m.local_families[p] = spectral_modal(reduced_state(now, site, policy), policy).definite_family;
      for (const auto& proj : m.local_families[p].projectors())
        m.heisenberg[p].push_back(heisenberg_projector(embed_operator(proj, m.dims, site), u, policy));
    }
  }

  for (std::size_t a = 0; a < m.point_count(); ++a)
    for (std::size_t b = a + 1; b < m.point_count(); ++b)
      if (m.order.spacelike(a, b))
        m.microcausality_residual =
            std::max(m.microcausality_residual, detail::max_commutator(m.heisenberg[a], m.heisenberg[b]));
  return m;
}

/// Checks that `f` partitions the points into antichains respecting the order.
inline void validate_foliation(const CausalOrder& order, const Foliation& f) {
  std::vector<std::size_t> slice_of(order.size(), SIZE_MAX);
  for (std::size_t s = 0; s < f.slices.size(); ++s) {
    require(!f.slices[s].empty(), ErrorKind::kValidation, "foliation has an empty slice");
    for (std::size_t p : f.slices[s]) {
      require(p < order.size(), ErrorKind::kValidation, "foliation names a point outside the lattice");
      require(slice_of[p] == SIZE_MAX, ErrorKind::kValidation, "foliation lists a point twice");
      slice_of[p] = s;
    }
  }
  for (std::size_t p = 0; p < order.size(); ++p)
    require(slice_of[p] != SIZE_MAX, ErrorKind::kValidation, "foliation misses point " + std::to_string(p));
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = 0; b < order.size(); ++b) {
      if (!order.precedes(a, b)) continue;
      require(slice_of[a] != slice_of[b], ErrorKind::kCausality,
              "slice " + std::to_string(slice_of[a]) + " contains timelike points " + std::to_string(a) + " and " +
                  std::to_string(b));
      require(slice_of[a] < slice_of[b], ErrorKind::kCausality,
              "point " + std::to_string(b) + " is sliced before its causal past " + std::to_string(a));
    }
}

/// Product of the point projectors over a slice of spacelike points.
inline ComplexMatrix slice_projector(const LatticeModel& model, std::span<const std::size_t> slice,
                                     std::span<const std::size_t> outcomes, const NumericPolicy& policy = {}) {
  require(!slice.empty(), ErrorKind::kValidation, "empty slice");
  require(slice.size() == outcomes.size(), ErrorKind::kShape, "one outcome label per slice point required");
  for (std::size_t a = 0; a < slice.size(); ++a) {
    require(slice[a] < model.point_count(), ErrorKind::kIndexRange, "slice names a missing point");
    require(outcomes[a] < model.outcome_count(slice[a]), ErrorKind::kIndexRange, "outcome label out of range");
    for (std::size_t b = a + 1; b < slice.size(); ++b)
      require(model.order.spacelike(slice[a], slice[b]), ErrorKind::kCausality,
              "points " + std::to_string(slice[a]) + " and " + std::to_string(slice[b]) + " are not spacelike");
  }
  ComplexMatrix p = model.heisenberg[slice[0]][outcomes[0]];
  for (std::size_t a = 1; a < slice.size(); ++a) p = p * model.heisenberg[slice[a]][outcomes[a]];
  require(max_abs_diff(p * p, p) <= policy.projector_tol && is_hermitian(p, policy.projector_tol),
          ErrorKind::kCausality, "slice product is not a projector; spacelike projectors fail to commute");
  return p;
}

namespace detail {

inline std::vector<std::size_t> flatten(const Foliation& f) {
  std::vector<std::size_t> seq;
  for (const auto& s : f.slices) seq.insert(seq.end(), s.begin(), s.end());
  return seq;
}

inline void check_slices(const LatticeModel& model, const Foliation& f, const NumericPolicy& policy) {
  validate_foliation(model.order, f);
  for (const auto& s : f.slices)
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b)
        require(max_commutator(model.heisenberg[s[a]], model.heisenberg[s[b]]) <= policy.projector_tol,
                ErrorKind::kCausality, "slice points " + std::to_string(s[a]) + " and " + std::to_string(s[b]) +
                                           " carry non-commuting projectors");
}

}  // namespace detail

/// ||P*_n ... P*_1 |Psi>||^2 with `outcomes` indexed by point.
inline double lattice_history_probability(const LatticeModel& model, const Foliation& f,
                                          std::span<const std::size_t> outcomes, const NumericPolicy& policy = {}) {
  require(outcomes.size() == model.point_count(), ErrorKind::kShape, "one outcome label per lattice point required");
  detail::check_slices(model, f, policy);
  ComplexVector v = model.total_state.amplitudes();
  for (const auto& s : f.slices) {
    std::vector<std::size_t> labels;
    for (std::size_t p : s) labels.push_back(outcomes[p]);
    v = slice_projector(model, s, labels, policy).apply(v);
  }
  return std::clamp(norm_squared(v), 0.0, 1.0);
}

/// Full outcome distribution for a foliation, flat over point-indexed tuples.
inline std::vector<double> lattice_distribution(const LatticeModel& model, const Foliation& f,
                                                const NumericPolicy& policy = {}) {
  detail::check_slices(model, f, policy);
  const TupleIndexer idx = model.outcome_indexer();
  require(idx.size() <= policy.max_histories, ErrorKind::kCapacity,
          "lattice has " + std::to_string(idx.size()) + " outcome tuples, cap is " + std::to_string(policy.max_histories));
  const std::vector<std::size_t> seq = detail::flatten(f);
  std::vector<double> out(idx.size());
  OutcomeTuple tuple(model.point_count(), 0);
  std::vector<ComplexVector> prefix(seq.size() + 1);
  prefix[0] = model.total_state.amplitudes();
  std::function<void(std::size_t)> walk = [&](std::size_t depth) {
    if (depth == seq.size()) {
      out[idx.flat(tuple)] = std::clamp(norm_squared(prefix[depth]), 0.0, 1.0);
      return;
    }
    const std::size_t p = seq[depth];
    for (std::size_t i = 0; i < model.outcome_count(p); ++i) {
      tuple[p] = i;
      prefix[depth + 1] = model.heisenberg[p][i].apply(prefix[depth]);
      walk(depth + 1);
    }
  };
  walk(0);
  return out;
}

/// Points grouped by time row: the rest frame of the lattice.
inline Foliation equal_time_foliation(const LatticeModel& model) {
  Foliation f;
  f.slices.resize(model.timesteps);
  for (std::size_t p = 0; p < model.point_count(); ++p) f.slices[model.order.points()[p].t].push_back(p);
  return f;
}

/// One timed family per slice, carrying every joint outcome of that slice.
/// Labels and order follow the slice's points, last point fastest.
inline HistoryFamily to_history_family(const LatticeModel& model, const Foliation& f, const NumericPolicy& policy = {}) {
  detail::check_slices(model, f, policy);
  std::vector<TimedFamily> timed;
  const ComplexMatrix id = ComplexMatrix::identity(model.total_state.dim());
  for (std::size_t s = 0; s < f.slices.size(); ++s) {
    const auto& slice = f.slices[s];
    std::vector<std::size_t> counts;
    for (std::size_t p : slice) counts.push_back(model.outcome_count(p));
    const TupleIndexer local(counts);
    std::vector<ComplexMatrix> projectors;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < local.size(); ++k) {
      const OutcomeTuple o = local.tuple(k);
      projectors.push_back(slice_projector(model, slice, o, policy));
      std::string label;
      for (std::size_t a = 0; a < o.size(); ++a) label += (a ? "," : "") + std::to_string(o[a]);
      labels.push_back(std::move(label));
    }
    timed.push_back({static_cast<double>(s), ProjectorFamily(std::move(projectors), std::move(labels), policy), id});
  }
  return HistoryFamily(model.total_state, std::move(timed), policy);
}

struct LatticeConsistencyReport {
  HistoryProbabilityTable table;
  double max_offdiagonal = 0.0;
  double same_earlier_residual = 0.0;      // max |<Psi|P_l P'_k P'_k' P_l|Psi>|, k != k'
  double distinct_earlier_residual = 0.0;  // max |<Psi|P_l P'_k P_l'|Psi>|, l != l'
  double tolerance = 0.0;
  bool consistent = false;
};

inline LatticeConsistencyReport lattice_consistency_check(const LatticeModel& model, const Foliation& f, double tol,
                                                          const NumericPolicy& policy = {}) {
  const HistoryFamily hf = to_history_family(model, f, policy);
  LatticeConsistencyReport r;
  r.table = check_consistency(hf, tol, policy);
  r.max_offdiagonal = r.table.max_offdiagonal;
  r.tolerance = tol;
  const ComplexVector& psi = model.total_state.amplitudes();
  for (std::size_t s = 0; s < hf.time_count(); ++s)
    for (std::size_t s2 = s + 1; s2 < hf.time_count(); ++s2) {
      const std::size_t nl = hf.indexer().counts()[s];
      const std::size_t nk = hf.indexer().counts()[s2];
      std::vector<ComplexVector> earlier;
      for (std::size_t l = 0; l < nl; ++l) earlier.push_back(hf.heisenberg(s, l).apply(psi));
      for (std::size_t l = 0; l < nl; ++l) {
        std::vector<ComplexVector> later;
        for (std::size_t k = 0; k < nk; ++k) later.push_back(hf.heisenberg(s2, k).apply(earlier[l]));
        for (std::size_t k = 0; k < nk; ++k)
          for (std::size_t k2 = k + 1; k2 < nk; ++k2)
            r.same_earlier_residual = std::max(r.same_earlier_residual, std::abs(inner(later[k], later[k2])));
        for (std::size_t l2 = l + 1; l2 < nl; ++l2)
          for (std::size_t k = 0; k < nk; ++k)
            r.distinct_earlier_residual =
                std::max(r.distinct_earlier_residual, std::abs(inner(earlier[l2], later[k])));
      }
    }
  r.consistent = r.max_offdiagonal <= tol && r.same_earlier_residual <= tol && r.distinct_earlier_residual <= tol;
  return r;
}

/// Every linear extension of the order, each as a foliation of singleton
/// slices, in lexicographic order of point indices.
inline std::vector<Foliation> linear_extensions(const CausalOrder& order, std::size_t cap) {
  std::vector<Foliation> out;
  std::vector<std::size_t> seq;
  std::vector<bool> placed(order.size(), false);
  std::function<void()> walk = [&]() {
    if (seq.size() == order.size()) {
      require(out.size() < cap, ErrorKind::kCapacity,
              "more than " + std::to_string(cap) + " linear extensions; use sampled mode");
      Foliation f;
      for (std::size_t p : seq) f.slices.push_back({p});
      out.push_back(std::move(f));
      return;
    }
    for (std::size_t p = 0; p < order.size(); ++p) {
      if (placed[p]) continue;
      bool ready = true;
      for (std::size_t q = 0; q < order.size() && ready; ++q)
        if (!placed[q] && order.precedes(q, p)) ready = false;
      if (!ready) continue;
      placed[p] = true;
      seq.push_back(p);
      walk();
      seq.pop_back();
      placed[p] = false;
    }
  };
  walk();
  return out;
}

/// Every ordered partition into antichains that respects the order.
inline std::vector<Foliation> enumerate_foliations(const CausalOrder& order, std::size_t cap) {
  std::vector<Foliation> out;
  Foliation current;
  std::vector<bool> placed(order.size(), false);
  std::size_t placed_count = 0;
  std::function<void()> walk = [&]() {
    if (placed_count == order.size()) {
      require(out.size() < cap, ErrorKind::kCapacity, "more than " + std::to_string(cap) + " foliations");
      out.push_back(current);
      return;
    }
    std::vector<std::size_t> ready;
    for (std::size_t p = 0; p < order.size(); ++p) {
      if (placed[p]) continue;
      bool ok = true;
      for (std::size_t q = 0; q < order.size() && ok; ++q)
        if (!placed[q] && order.precedes(q, p)) ok = false;
      if (ok) ready.push_back(p);
    }
    // Ready points are pairwise incomparable, so any nonempty subset is a slice.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << ready.size()); ++mask) {
      std::vector<std::size_t> slice;
      for (std::size_t i = 0; i < ready.size(); ++i)
        if (mask >> i & 1) slice.push_back(ready[i]);
      for (std::size_t p : slice) placed[p] = true;
      placed_count += slice.size();
      current.slices.push_back(slice);
      walk();
      current.slices.pop_back();
      placed_count -= slice.size();
      for (std::size_t p : slice) placed[p] = false;
    }
  };
  walk();
  return out;
}

/// Seeded random linear extensions: each step picks uniformly among the
/// points whose causal past is already placed.
inline std::vector<Foliation> sample_linear_extensions(const CausalOrder& order, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Foliation> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<bool> placed(order.size(), false);
    Foliation f;
    while (f.slices.size() < order.size()) {
      std::vector<std::size_t> ready;
      for (std::size_t p = 0; p < order.size(); ++p) {
        if (placed[p]) continue;
        bool ok = true;
        for (std::size_t q = 0; q < order.size() && ok; ++q)
          if (!placed[q] && order.precedes(q, p)) ok = false;
        if (ok) ready.push_back(p);
      }
      const std::size_t pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
      placed[pick] = true;
      f.slices.push_back({pick});
    }
    out.push_back(std::move(f));
  }
  return out;
}

struct FoliationInvarianceReport {
  std::vector<Foliation> orderings;  // linear extensions evaluated
  std::vector<std::vector<double>> distributions;
  bool exhaustive = true;
  double max_distance = 0.0;  // max over ordering pairs and outcome tuples of |p - p'|
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  double tolerance = 0.0;
  bool invariant = true;
};

/// Compares the outcome distribution across linear extensions of the order.
/// Exhaustive up to the policy's point cap, seeded sampling above it.
inline FoliationInvarianceReport foliation_invariance(const LatticeModel& model, double tol,
                                                      const NumericPolicy& policy = {}, std::size_t samples = 64,
                                                      std::uint64_t seed = 0x5eedULL) {
  FoliationInvarianceReport r;
  r.tolerance = tol;
  r.exhaustive = model.point_count() <= policy.exhaustive_point_cap;
  r.orderings = r.exhaustive ? linear_extensions(model.order, policy.max_foliations)
                             : sample_linear_extensions(model.order, samples, seed);
  for (const auto& f : r.orderings) r.distributions.push_back(lattice_distribution(model, f, policy));
  const std::size_t n = r.distributions.front().size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t a = 1; a < r.distributions.size(); ++a) {
      if (r.distributions[a][k] < r.distributions[lo][k]) lo = a;
      if (r.distributions[a][k] > r.distributions[hi][k]) hi = a;
    }
    const double d = r.distributions[hi][k] - r.distributions[lo][k];
    if (d > r.max_distance) {
      r.max_distance = d;
      r.worst_pair = {std::min(lo, hi), std::max(lo, hi)};
    }
  }
  r.invariant = r.max_distance <= tol;
  return r;
}

}  // namespace modalhist
