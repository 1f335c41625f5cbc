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

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/histories.hpp"
#include "modalhist/projector_family.hpp"
#include "modalhist/state.hpp"
#include "modalhist/tensor.hpp"

namespace modalhist {

/// One measurement-like interaction. With no control step the same pointer
/// basis is recorded for every branch; with a control step the basis is
/// selected by the value stored in that earlier step's record.
struct RecordingStep {
  std::vector<ComplexMatrix> bases;  // columns are the pointer states
  std::optional<std::size_t> control_step;
};

/// A system followed by one dedicated record factor per step. Factor 0 is
/// the system; factor k + 1 holds the record written by step k.
struct RecordingScenario {
  std::size_t system_dim = 0;
  std::vector<RecordingStep> steps;
  FactorDims dims;
  std::vector<std::size_t> record_dims;
  PureState initial_state;
  std::vector<ComplexMatrix> step_unitaries;

  static constexpr std::size_t system_factor() noexcept { return 0; }
  static constexpr std::size_t record_factor(std::size_t step) noexcept { return step + 1; }
  std::size_t step_count() const noexcept { return steps.size(); }
};

namespace detail {

/// |m> -> |m + shift mod n>
inline ComplexMatrix cyclic_shift(std::size_t n, std::size_t shift) {
  ComplexMatrix s(n, n);
  for (std::size_t m = 0; m < n; ++m) s((m + shift) % n, m) = 1.0;
  return s;
}

inline void require_basis(const ComplexMatrix& basis, std::size_t dim, const NumericPolicy& policy, const std::string& what) {
  require(basis.rows() == dim && basis.cols() == dim, ErrorKind::kValidation,
          what + " must have " + std::to_string(dim) + " vectors of length " + std::to_string(dim));
  require(unitarity_residual(basis) <= policy.unitary_tol, ErrorKind::kValidation,
          what + " is not an orthonormal complete basis");
}

// sum_j |b_j><b_j| (x) shift^j on (system, record).
inline ComplexMatrix premeasurement(const ComplexMatrix& basis, std::size_t record_dim) {
  const std::size_t d = basis.rows();
  ComplexMatrix local(d * record_dim, d * record_dim);
  for (std::size_t j = 0; j < basis.cols(); ++j)
    local += tensor_product(ComplexMatrix::projector_onto(basis.column(j)), cyclic_shift(record_dim, j));
  return local;
}

inline RecordingScenario assemble(std::size_t system_dim, std::vector<RecordingStep> steps, const ComplexVector& initial_system,
                                  const NumericPolicy& policy) {
  require(system_dim >= 2, ErrorKind::kValidation, "system dimension must be at least 2");
  require(initial_system.size() == system_dim, ErrorKind::kShape, "initial system state has the wrong dimension");
  RecordingScenario s;
  s.system_dim = system_dim;
  s.dims.push_back(system_dim);
  std::size_t total = system_dim;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    s.record_dims.push_back(system_dim);
    s.dims.push_back(system_dim);
    total *= system_dim;
    require(total <= policy.max_dim, ErrorKind::kCapacity,
            "recording scenario dimension exceeds cap " + std::to_string(policy.max_dim));
  }

  ComplexVector amps = initial_system;
  for (std::size_t k = 0; k < steps.size(); ++k) amps = tensor_product(amps, basis_vector(system_dim, 0));
  s.initial_state = PureState(s.dims, std::move(amps), policy);

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const RecordingStep& step = steps[k];
    const std::size_t record = RecordingScenario::record_factor(k);
    ComplexMatrix u;
    if (!step.control_step) {
      require(step.bases.size() == 1, ErrorKind::kValidation, "an uncontrolled step takes exactly one pointer basis");
      require_basis(step.bases[0], system_dim, policy, "pointer basis of step " + std::to_string(k));
      const std::vector<std::size_t> targets{RecordingScenario::system_factor(), record};
      u = embed_operator(premeasurement(step.bases[0], system_dim), s.dims, targets);
    } else {
      const std::size_t c = *step.control_step;
      require(c < k, ErrorKind::kValidation, "a step can only be controlled by an earlier record");
      require(step.bases.size() == s.record_dims[c], ErrorKind::kValidation,
              "branch-dependent step needs " + std::to_string(s.record_dims[c]) + " bases, one per earlier outcome, got " +
                  std::to_string(step.bases.size()));
      const std::size_t nc = s.record_dims[c];
      ComplexMatrix local(system_dim * nc * system_dim, system_dim * nc * system_dim);
      for (std::size_t i = 0; i < step.bases.size(); ++i) {
        require_basis(step.bases[i], system_dim, policy,
                      "pointer basis for branch " + std::to_string(i) + " of step " + std::to_string(k));
        // Local factor order: system, control record, new record.
        const ComplexMatrix branch = premeasurement(step.bases[i], system_dim);
        const FactorDims local_dims{system_dim, nc, system_dim};
        const std::vector<std::size_t> sys_and_new{0, 2};
        const std::vector<std::size_t> control{1};
        local += embed_operator(branch, local_dims, sys_and_new) *
                 embed_operator(ComplexMatrix::projector_onto(basis_vector(nc, i)), local_dims, control);
      }
      const std::vector<std::size_t> targets{RecordingScenario::system_factor(), RecordingScenario::record_factor(c), record};
      u = embed_operator(local, s.dims, targets);
    }
    require_unitary(u, policy.unitary_tol, "step unitary " + std::to_string(k));
    s.step_unitaries.push_back(std::move(u));
  }
  s.steps = std::move(steps);
  return s;
}

}  // namespace detail

/// Consecutive premeasurements |b_j>|ready> -> |b_j>|record_j>, one pointer
/// basis per step, each step writing into a fresh record factor.
inline RecordingScenario build_measurement_chain(std::size_t system_dim, const std::vector<ComplexMatrix>& pointer_bases,
                                                 const ComplexVector& initial_system, const NumericPolicy& policy = {}) {
  std::vector<RecordingStep> steps;
  for (const auto& b : pointer_bases) steps.push_back({{b}, std::nullopt});
  return detail::assemble(system_dim, std::move(steps), initial_system, policy);
}

/// First step records `first_basis`; the second step measures the basis
/// selected by the first record's value. Optional trailing steps record
/// branch-independent bases afterwards.
inline RecordingScenario build_branch_dependent_chain(std::size_t system_dim, const ComplexMatrix& first_basis,
                                                      const std::vector<ComplexMatrix>& per_branch_bases,
                                                      const ComplexVector& initial_system,
                                                      const std::vector<ComplexMatrix>& trailing_bases = {},
                                                      const NumericPolicy& policy = {}) {
  require(per_branch_bases.size() == system_dim, ErrorKind::kValidation,
          "expected one basis per first-step outcome (" + std::to_string(system_dim) + "), got " +
              std::to_string(per_branch_bases.size()));
  std::vector<RecordingStep> steps{{{first_basis}, std::nullopt}, {per_branch_bases, std::size_t{0}}};
  for (const auto& b : trailing_bases) steps.push_back({{b}, std::nullopt});
  return detail::assemble(system_dim, std::move(steps), initial_system, policy);
}

/// U_k ... U_1 for the first `upto_step` steps.
inline ComplexMatrix scenario_unitary(const RecordingScenario& s, std::size_t upto_step) {
  require(upto_step <= s.step_count(), ErrorKind::kIndexRange, "upto_step exceeds the number of steps");
  ComplexMatrix u = ComplexMatrix::identity(s.initial_state.dim());
  for (std::size_t k = 0; k < upto_step; ++k) u = s.step_unitaries[k] * u;
  return u;
}

inline PureState scenario_total_state(const RecordingScenario& s, std::size_t upto_step, const NumericPolicy& policy = {}) {
  require(upto_step <= s.step_count(), ErrorKind::kIndexRange, "upto_step exceeds the number of steps");
  ComplexVector v = s.initial_state.amplitudes();
  for (std::size_t k = 0; k < upto_step; ++k) v = s.step_unitaries[k].apply(v);
  return PureState(s.dims, std::move(v), policy);
}

/// The property family of each step: pointer projectors on the system, or
/// for a branch-dependent step the joint projectors |b_ij><b_ij| (x) |i><i|
/// on the system and the controlling record. Heisenberg-evolved with the
/// scenario's own dynamics.
inline HistoryFamily pointer_history_family(const RecordingScenario& s, const NumericPolicy& policy = {}) {
  std::vector<TimedFamily> timed;
  for (std::size_t k = 0; k < s.step_count(); ++k) {
    const RecordingStep& step = s.steps[k];
    std::vector<ComplexMatrix> projectors;
    std::vector<std::string> labels;
    if (!step.control_step) {
      for (std::size_t j = 0; j < s.system_dim; ++j) {
        const std::vector<std::size_t> sys{RecordingScenario::system_factor()};
        projectors.push_back(embed_operator(ComplexMatrix::projector_onto(step.bases[0].column(j)), s.dims, sys));
        labels.push_back(std::to_string(j));
      }
    } else {
      const std::size_t c = *step.control_step;
      const std::vector<std::size_t> targets{RecordingScenario::system_factor(), RecordingScenario::record_factor(c)};
      for (std::size_t i = 0; i < step.bases.size(); ++i)
        for (std::size_t j = 0; j < s.system_dim; ++j) {
          const ComplexMatrix local = tensor_product(ComplexMatrix::projector_onto(step.bases[i].column(j)),
                                                     ComplexMatrix::projector_onto(basis_vector(s.record_dims[c], i)));
          projectors.push_back(embed_operator(local, s.dims, targets));
          labels.push_back(std::to_string(i) + "." + std::to_string(j));
        }
    }
    timed.push_back({static_cast<double>(k + 1), ProjectorFamily(std::move(projectors), std::move(labels), policy),
                     scenario_unitary(s, k + 1)});
  }
  return HistoryFamily(s.initial_state, std::move(timed), policy);
}

/// Max over steps k and earlier records m of ||[U_k, |j><j|_m]||: a step
/// must leave every earlier record value intact.
inline double record_persistence_residual(const RecordingScenario& s) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.step_count(); ++k)
    for (std::size_t m = 0; m < k; ++m)
      for (std::size_t j = 0; j < s.record_dims[m]; ++j) {
        const std::vector<std::size_t> rec{RecordingScenario::record_factor(m)};
        const ComplexMatrix p = embed_operator(ComplexMatrix::projector_onto(basis_vector(s.record_dims[m], j)), s.dims, rec);
        worst = std::max(worst, commutator(s.step_unitaries[k], p).max_abs());
      }
  return worst;
}

}  // namespace modalhist
