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


#include <cmath>
#include <vector>

#include "gtest/gtest.h"

#include "modalhist/decoherence_models.hpp"
#include "modalhist/modal.hpp"
#include "test_support.hpp"

using namespace modalhist;
using namespace modalhist::testing;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

ComplexMatrix z_basis() { return ComplexMatrix::identity(2); }
ComplexMatrix x_basis() { return {{kH, kH}, {kH, -kH}}; }

// <system_vec| <r_1| ... <r_n| applied to the total state.
Complex component(const PureState& psi, const ComplexVector& system_vec, const std::vector<std::size_t>& records) {
  ComplexVector bra = system_vec;
  for (std::size_t r : records) bra = tensor_product(bra, basis_vector(psi.dims()[1], r));
  return inner(bra, psi.amplitudes());
}

}  // namespace

TEST(MeasurementChain, OneStepPremeasurement) {
  const RecordingScenario s = build_measurement_chain(2, {z_basis()}, {kH, kH});
  const PureState out = scenario_total_state(s, 1);
  const ComplexVector expected{kH, 0, 0, kH};
  EXPECT_LE(max_abs_diff(ComplexMatrix(4, 1, out.amplitudes()), ComplexMatrix(4, 1, expected)), 1e-15);
}

TEST(MeasurementChain, ZThenXHasQuarterAmplitudes) {
  const RecordingScenario s = build_measurement_chain(2, {z_basis(), x_basis()}, {kH, kH});
  const PureState out = scenario_total_state(s, 2);
  // Hand expansion: amplitude on |x_j>|i>|j> is c_i <x_j|z_i> with c_i = 1/sqrt2.
  const double expected[2][2] = {{0.5, 0.5}, {0.5, -0.5}};
  double total = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const Complex a = component(out, x_basis().column(j), {i, j});
      EXPECT_NEAR(a.real(), expected[i][j], 1e-14);
      EXPECT_NEAR(a.imag(), 0.0, 1e-14);
      total += std::norm(a);
    }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(MeasurementChain, PointerStateGivesSingleBranch) {
  const RecordingScenario s = build_measurement_chain(2, {z_basis(), z_basis()}, {0, 1});
  const HistoryFamily hf = pointer_history_family(s);
  const auto t = check_consistency(hf, 1e-12);
  EXPECT_NEAR(t.probability(std::vector<std::size_t>{1, 1}), 1.0, 1e-14);
  EXPECT_NEAR(t.total(), 1.0, 1e-14);
}

TEST(MeasurementChain, StepUnitariesAreUnitaryAndKeepEarlierRecords) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 2);
    std::vector<ComplexMatrix> bases{random_unitary(d, rng), random_unitary(d, rng), random_unitary(d, rng)};
    const RecordingScenario s = build_measurement_chain(d, bases, random_unit_vector(d, rng));
    for (const auto& u : s.step_unitaries) EXPECT_LE(unitarity_residual(u), 1e-10);
    EXPECT_LE(record_persistence_residual(s), 1e-12);
  }
}

TEST(MeasurementChain, RejectsIncompleteBasis) {
  const ComplexMatrix bad{{1.0, 1.0}, {0.0, 0.0}};
  try {
    build_measurement_chain(2, {bad}, {1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
  EXPECT_THROW(build_measurement_chain(2, {ComplexMatrix::identity(3)}, {1, 0}), Error);
}

TEST(MeasurementChain, CapacityCapEnforced) {
  NumericPolicy small;
  small.max_dim = 8;
  try {
    build_measurement_chain(2, {z_basis(), z_basis(), z_basis()}, {1, 0}, small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapacity);
  }
}

TEST(ScenarioTotalState, ZeroStepsIsInitialState) {
  const RecordingScenario s = build_measurement_chain(2, {x_basis()}, {0.6, 0.8});
  EXPECT_EQ(scenario_total_state(s, 0).amplitudes(), s.initial_state.amplitudes());
  EXPECT_THROW(scenario_total_state(s, 2), Error);
}

TEST(ScenarioTotalState, PartialChainSchmidtWeightsAreBornWeights) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix b0 = random_unitary(3, rng);
    const ComplexMatrix b1 = random_unitary(3, rng);
    const ComplexVector init = random_unit_vector(3, rng);
    const RecordingScenario s = build_measurement_chain(3, {b0, b1}, init);
    const PureState after_one = scenario_total_state(s, 1);
    const SchmidtResult r = schmidt_decompose(after_one, std::vector<std::size_t>{0});
    std::vector<double> born;
    for (std::size_t j = 0; j < 3; ++j) born.push_back(std::norm(inner(b0.column(j), init)));
    std::sort(born.rbegin(), born.rend());
    ASSERT_EQ(r.weights.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.weights[j], born[j], 1e-10);
  }
}

TEST(ScenarioTotalState, FullChainIsConsistent) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ComplexMatrix> bases{random_unitary(2, rng), random_unitary(2, rng), random_unitary(2, rng)};
    const RecordingScenario s = build_measurement_chain(2, bases, random_unit_vector(2, rng));
    const auto t = check_consistency(pointer_history_family(s), 1e-12);
    EXPECT_LE(t.max_offdiagonal, 1e-12);
    EXPECT_LE(t.normalization_residual, 1e-10);
  }
}

TEST(ScenarioTotalState, HeisenbergChainMatchesRecordComponents) {
  // U(t_n) P_l(t_n) ... P_i(t_1) |Psi> equals the final state's component with
  // the system in the last pointer state and the records reading (i, ..., l).
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ComplexMatrix> bases{random_unitary(2, rng), random_unitary(2, rng), random_unitary(2, rng)};
    const RecordingScenario s = build_measurement_chain(2, bases, random_unit_vector(2, rng));
    const HistoryFamily hf = pointer_history_family(s);
    const ComplexMatrix u = scenario_unitary(s, 3);
    const PureState out = scenario_total_state(s, 3);
    for (std::size_t x = 0; x < hf.indexer().size(); ++x) {
      const auto tuple = hf.indexer().tuple(x);
      const ComplexVector chain = u.apply(hf.chain_vector(tuple));
      ComplexVector expected = bases[2].column(tuple[2]);
      for (std::size_t r : tuple) expected = tensor_product(expected, basis_vector(2, r));
      const Complex c = component(out, bases[2].column(tuple[2]), {tuple[0], tuple[1], tuple[2]});
      for (std::size_t k = 0; k < chain.size(); ++k) EXPECT_LE(std::abs(chain[k] - c * expected[k]), 1e-10);
    }
  }
}

TEST(BranchDependentChain, AmplitudesMatchInnerProducts) {
  const ComplexVector init{0.6, 0.8};
  const RecordingScenario s = build_branch_dependent_chain(2, z_basis(), {z_basis(), x_basis()}, init);
  const PureState out = scenario_total_state(s, 2);
  // c_{i,j} <beta_ij|alpha_i>: branch 0 keeps z, branch 1 splits over x.
  const double expected[2][2] = {{0.6, 0.0}, {0.8 * kH, -0.8 * kH}};
  const ComplexMatrix per_branch[2] = {z_basis(), x_basis()};
  double total = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const Complex a = component(out, per_branch[i].column(j), {i, j});
      EXPECT_NEAR(a.real(), expected[i][j], 1e-14);
      EXPECT_NEAR(a.imag(), 0.0, 1e-14);
      total += std::norm(a);
    }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(BranchDependentChain, EqualBasesReduceToMeasurementChain) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix b0 = random_unitary(2, rng);
    const ComplexMatrix b1 = random_unitary(2, rng);
    const ComplexVector init = random_unit_vector(2, rng);
    const RecordingScenario dep = build_branch_dependent_chain(2, b0, {b1, b1}, init);
    const RecordingScenario plain = build_measurement_chain(2, {b0, b1}, init);
    for (std::size_t k = 0; k < 2; ++k)
      EXPECT_LE(max_abs_diff(dep.step_unitaries[k], plain.step_unitaries[k]), 1e-14);
  }
}

TEST(BranchDependentChain, RecordsPersistAndFamilyDecoheres) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const RecordingScenario s = build_branch_dependent_chain(
        2, random_unitary(2, rng), {random_unitary(2, rng), random_unitary(2, rng)}, random_unit_vector(2, rng),
        {random_unitary(2, rng)});
    EXPECT_LE(record_persistence_residual(s), 1e-12);
    const PureState out = scenario_total_state(s, 3);
    const auto t = check_consistency(pointer_history_family(s), 1e-12);
    EXPECT_LE(t.max_offdiagonal, 1e-12);
    EXPECT_LE(t.normalization_residual, 1e-10);
    EXPECT_NEAR(norm(out.amplitudes()), 1.0, 1e-12);
  }
}

TEST(BranchDependentChain, BasisCountMismatchRejected) {
  try {
    build_branch_dependent_chain(2, z_basis(), {z_basis()}, {1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}
