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

#include "modalhist/modal.hpp"
#include "test_support.hpp"

using namespace modalhist;
using namespace modalhist::testing;

namespace {

const std::vector<std::size_t> kFirst{0};

// sqrt(0.3)|000> + sqrt(0.7)|111>
PureState ghz_like() {
  ComplexVector amps(8);
  amps[0] = std::sqrt(0.3);
  amps[7] = std::sqrt(0.7);
  return PureState({2, 2, 2}, amps);
}

ComplexMatrix p0() { return ComplexMatrix::projector_onto(ket({1, 0})); }
ComplexMatrix p1() { return ComplexMatrix::projector_onto(ket({0, 1})); }

}  // namespace

TEST(MergeDegenerate, TransitiveClosureOverAdjacentWeights) {
  const std::vector<double> w{0.5, 0.5 - 5e-10, 0.5 - 1.4e-9, 0.1};
  const MergeGroups g = merge_degenerate(w, 1e-9);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(g[1], (std::vector<std::size_t>{3}));
}

TEST(SchmidtDecompose, ProductState) {
  const double s = 1.0 / std::sqrt(2.0);
  const PureState psi = PureState::product({ket({1, 0}), ket({s, s})});
  const SchmidtResult r = schmidt_decompose(psi, kFirst);
  ASSERT_EQ(r.rank(), 1u);
  EXPECT_NEAR(r.coefficients[0].real(), 1.0, 1e-12);
  EXPECT_LE(max_abs_diff(r.merged_projectors[0], p0()), 1e-12);
  ASSERT_TRUE(r.remainder_index.has_value());
  EXPECT_LE(max_abs_diff(r.merged_projectors[*r.remainder_index], p1()), 1e-12);
}

TEST(SchmidtDecompose, BellStateMergesToIdentity) {
  const double s = 1.0 / std::sqrt(2.0);
  const PureState bell({2, 2}, {s, 0, 0, s});
  const SchmidtResult r = schmidt_decompose(bell, kFirst);
  ASSERT_EQ(r.weights.size(), 2u);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-12);
  EXPECT_NEAR(r.weights[1], 0.5, 1e-12);
  ASSERT_EQ(r.merge_groups.size(), 1u);
  ASSERT_EQ(r.merged_projectors.size(), 1u);
  EXPECT_LE(max_abs_diff(r.merged_projectors[0], ComplexMatrix::identity(2)), 1e-12);
  EXPECT_EQ(projector_rank(r.merged_projectors[0]), 2u);
}

TEST(SchmidtDecompose, UnequalWeightsMatchReducedSpectrum) {
  const PureState psi({2, 2}, {std::sqrt(0.36), 0, 0, std::sqrt(0.64)});
  const SchmidtResult r = schmidt_decompose(psi, kFirst);
  // Oracle: eigendecomposition of the reduced density operator.
  const auto eig = eig_hermitian(reduced_state(psi, kFirst).matrix());
  ASSERT_EQ(r.weights.size(), 2u);
  EXPECT_NEAR(r.weights[0], eig.eigenvalues[0], 1e-12);
  EXPECT_NEAR(r.weights[1], eig.eigenvalues[1], 1e-12);
  EXPECT_NEAR(r.weights[0], 0.64, 1e-12);
  EXPECT_LE(max_abs_diff(r.merged_projectors[0], p1()), 1e-12);
  EXPECT_LE(max_abs_diff(r.merged_projectors[1], p0()), 1e-12);
}

TEST(SchmidtDecompose, ReconstructsStateAndCoefficientsAreRealNonnegative) {
  Rng rng(31);
  for (int sample = 0; sample < 50; ++sample) {
    const PureState psi = random_state({2, 3, 2}, rng);
    const std::vector<std::size_t> cut{2, 0};
    const SchmidtResult r = schmidt_decompose(psi, cut);
    EXPECT_LE(max_abs_diff(r.reconstruct(psi.dims()), psi.amplitudes()), 1e-9);
    double total = 0.0;
    for (std::size_t i = 0; i < r.rank(); ++i) {
      EXPECT_EQ(r.coefficients[i].imag(), 0.0);
      EXPECT_GE(r.coefficients[i].real(), 0.0);
      total += r.weights[i];
      EXPECT_TRUE(i == 0 || r.weights[i - 1] >= r.weights[i]);
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    for (std::size_t i = 0; i < r.rank(); ++i)
      for (std::size_t j = 0; j < r.rank(); ++j) {
        EXPECT_NEAR(std::abs(inner(r.left_states[i], r.left_states[j])), i == j ? 1.0 : 0.0, 1e-10);
        EXPECT_NEAR(std::abs(inner(r.right_states[i], r.right_states[j])), i == j ? 1.0 : 0.0, 1e-10);
      }
  }
}

TEST(SchmidtDecompose, MergedProjectorsAreGroupSums) {
  // Weights {0.4, 0.4, 0.2} on a 3x3 state.
  ComplexVector amps(9);
  amps[0] = std::sqrt(0.4);
  amps[4] = std::sqrt(0.4);
  amps[8] = std::sqrt(0.2);
  const PureState psi({3, 3}, amps);
  const SchmidtResult r = schmidt_decompose(psi, kFirst);
  ASSERT_EQ(r.merge_groups.size(), 2u);
  EXPECT_EQ(r.merge_groups[0].size(), 2u);
  EXPECT_EQ(projector_rank(r.merged_projectors[0]), 2u);
  EXPECT_EQ(projector_rank(r.merged_projectors[1]), 1u);
  ComplexMatrix expected(3, 3);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  EXPECT_LE(max_abs_diff(r.merged_projectors[0], expected), 1e-12);
}

TEST(SchmidtDecompose, Errors) {
  const PureState psi({2, 2}, {1, 0, 0, 0});
  EXPECT_THROW(schmidt_decompose(psi, std::vector<std::size_t>{0, 1}), Error);
  const PureState with_trivial({2, 1}, {1, 0});
  try {
    schmidt_decompose(with_trivial, kFirst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(SpectralModal, PureDensityKeepsZeroProjector) {
  const ModalState m = spectral_modal(DensityOperator(p0()));
  ASSERT_EQ(m.definite_family.size(), 2u);
  EXPECT_LE(max_abs_diff(m.definite_family[0], p0()), 1e-12);
  EXPECT_LE(max_abs_diff(m.definite_family[1], p1()), 1e-12);
  EXPECT_NEAR(m.probabilities[0], 1.0, 1e-12);
  EXPECT_EQ(m.probabilities[1], 0.0);
  EXPECT_FALSE(m.weight_zero[0]);
  EXPECT_TRUE(m.weight_zero[1]);
}

TEST(SpectralModal, FullDegeneracy) {
  const ModalState m = spectral_modal(DensityOperator(ComplexMatrix::identity(2) * Complex(0.5)));
  ASSERT_EQ(m.definite_family.size(), 1u);
  EXPECT_LE(max_abs_diff(m.definite_family[0], ComplexMatrix::identity(2)), 1e-12);
  EXPECT_NEAR(m.probabilities[0], 1.0, 1e-12);
}

TEST(SpectralModal, DiagonalThreeLevel) {
  const std::vector<Complex> diag{0.5, 0.3, 0.2};
  const ModalState m = spectral_modal(DensityOperator(ComplexMatrix::diagonal(diag)));
  ASSERT_EQ(m.definite_family.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(m.probabilities[k], diag[k].real(), 1e-12);
    EXPECT_LE(max_abs_diff(m.definite_family[k], ComplexMatrix::projector_onto(basis_vector(3, k))), 1e-12);
  }
}

TEST(SpectralModal, ProbabilitiesAreNonnegativeAndNormalized) {
  Rng rng(77);
  for (int sample = 0; sample < 100; ++sample) {
    const PureState psi = random_state({3, 2, 2}, rng);
    const std::vector<std::size_t> keep{0, 2};
    const ModalState m = spectral_modal(reduced_state(psi, keep));
    double total = 0.0;
    for (double p : m.probabilities) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(SpectralModal, MergingIsIdempotent) {
  // Rebuilding a density operator from a merged family and re-running the
  // modal rule reproduces the same family.
  Rng rng(19);
  for (int sample = 0; sample < 20; ++sample) {
    const ComplexMatrix u = random_unitary(4, rng);
    std::vector<Complex> diag{0.4, 0.4, 0.2, 0.0};
    const ComplexMatrix rho = u * ComplexMatrix::diagonal(diag) * u.adjoint();
    const ModalState first = spectral_modal(DensityOperator(rho));
    ComplexMatrix rebuilt(4, 4);
    for (std::size_t l = 0; l < first.definite_family.size(); ++l) {
      const double rank = first.definite_family[l].trace().real();
      rebuilt += first.definite_family[l] * Complex(first.probabilities[l] / rank);
    }
    const ModalState second = spectral_modal(DensityOperator(rebuilt));
    ASSERT_EQ(first.definite_family.size(), second.definite_family.size());
    for (std::size_t l = 0; l < first.definite_family.size(); ++l) {
      EXPECT_LE(max_abs_diff(first.definite_family[l], second.definite_family[l]), 1e-9);
      EXPECT_NEAR(first.probabilities[l], second.probabilities[l], 1e-12);
    }
  }
}

TEST(ModalState, SchmidtRouteMatchesSpectralRoute) {
  Rng rng(2024);
  for (int sample = 0; sample < 50; ++sample) {
    const PureState psi = random_state({3, 4}, rng);
    const ModalState via_schmidt = modal_state(psi, kFirst);
    const ModalState via_spectral = spectral_modal(reduced_state(psi, kFirst));
    ASSERT_EQ(via_schmidt.probabilities.size(), via_spectral.probabilities.size());
    for (std::size_t l = 0; l < via_schmidt.probabilities.size(); ++l) {
      EXPECT_NEAR(via_schmidt.probabilities[l], via_spectral.probabilities[l], 1e-9);
      EXPECT_LE(max_abs_diff(via_schmidt.definite_family[l], via_spectral.definite_family[l]), 1e-8);
    }
  }
}

TEST(IsDefiniteValued, FamilyMember) {
  const auto family = ProjectorFamily({p0(), p1()});
  const DefiniteValueTest t = is_definite_valued(p0(), family);
  EXPECT_TRUE(t.definite);
  ASSERT_EQ(t.coefficients.size(), 2u);
  EXPECT_NEAR(t.coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(t.coefficients[1], 0.0, 1e-12);
}

TEST(IsDefiniteValued, OffDiagonalObservable) {
  const auto family = ProjectorFamily({p0(), p1()});
  EXPECT_FALSE(is_definite_valued(pauli_x(), family).definite);
}

TEST(IsDefiniteValued, NotConstantOnDegenerateBlock) {
  const auto family = ProjectorFamily::trivial(2);
  const DefiniteValueTest t = is_definite_valued(pauli_z(), family);
  EXPECT_FALSE(t.definite);
  // a - (tr(I sigma_z)/2) I = sigma_z, whose largest entry is 1.
  EXPECT_NEAR(t.residual, 1.0, 1e-12);
  EXPECT_NEAR(t.max_commutator, 0.0, 1e-12);
}

TEST(IsDefiniteValued, RealLinearCombinations) {
  Rng rng(6);
  const auto family = ProjectorFamily::from_basis(random_unitary(3, rng));
  const ComplexMatrix a = family[0] * Complex(2.5) + family[1] * Complex(-1.0) + family[2] * Complex(0.25);
  const DefiniteValueTest t = is_definite_valued(a, family);
  EXPECT_TRUE(t.definite);
  EXPECT_NEAR(t.coefficients[0], 2.5, 1e-12);
  EXPECT_NEAR(t.coefficients[1], -1.0, 1e-12);
  EXPECT_NEAR(t.coefficients[2], 0.25, 1e-12);
}

TEST(IsDefiniteValued, RejectsNonHermitian) {
  const auto family = ProjectorFamily::trivial(2);
  EXPECT_THROW(is_definite_valued(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}, family), Error);
}

TEST(JointProbability, BornRule) {
  const std::vector<LocalProjector> a{{{0}, p0()}};
  EXPECT_NEAR(joint_probability_single_time(ghz_like(), a), 0.3, 1e-12);
}

TEST(JointProbability, ThreeProjectorsMatchExpectationOracle) {
  const std::vector<LocalProjector> a{{{0}, p0()}, {{1}, p0()}, {{2}, p0()}};
  // Oracle: <psi| P0 (x) P0 (x) P0 |psi> with the full embedded operator.
  const ComplexMatrix full = tensor_product(tensor_product(p0(), p0()), p0());
  const PureState psi = ghz_like();
  const double oracle = inner(psi.amplitudes(), full.apply(psi.amplitudes())).real();
  EXPECT_NEAR(oracle, 0.3, 1e-12);
  EXPECT_NEAR(joint_probability_single_time(psi, a), oracle, 1e-12);
}

TEST(JointProbability, PerfectCorrelation) {
  const std::vector<LocalProjector> a{{{0}, p0()}, {{1}, p1()}};
  EXPECT_NEAR(joint_probability_single_time(ghz_like(), a), 0.0, 1e-15);
}

TEST(JointProbability, OverlappingFactorsRejected) {
  const std::vector<LocalProjector> a{{{0}, p0()}, {{0, 1}, tensor_product(p0(), p0())}};
  try {
    joint_probability_single_time(ghz_like(), a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDisjointness);
  }
}

TEST(JointProbability, MarginalCoherenceOverModalFamilies) {
  Rng rng(55);
  for (int sample = 0; sample < 30; ++sample) {
    const PureState psi = random_state({2, 3, 2}, rng);
    const auto fam0 = spectral_modal(reduced_state(psi, std::vector<std::size_t>{0})).definite_family;
    const auto fam2 = spectral_modal(reduced_state(psi, std::vector<std::size_t>{2})).definite_family;
    const Rng::result_type pick = rng();
    const ComplexMatrix proj1 = random_projector(3, 1 + pick % 2, rng);
    for (std::size_t i = 0; i < fam0.size(); ++i) {
      double summed = 0.0;
      for (std::size_t k = 0; k < fam2.size(); ++k) {
        const std::vector<LocalProjector> a{{{0}, fam0[i]}, {{1}, proj1}, {{2}, fam2[k]}};
        const double p = joint_probability_single_time(psi, a);
        EXPECT_GE(p, 0.0);
        summed += p;
      }
      const std::vector<LocalProjector> reduced{{{0}, fam0[i]}, {{1}, proj1}};
      EXPECT_NEAR(summed, joint_probability_single_time(psi, reduced), 1e-10);
    }
  }
}
