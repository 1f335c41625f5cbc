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
#include <string>
#include <utility>
#include <vector>

#include "modalhist/complex_matrix.hpp"
#include "modalhist/tensor.hpp"

namespace modalhist {

/// Worst-case residuals of the PVM conditions for a set of matrices.
struct FamilyResiduals {
  double idempotence = 0.0;   // max ||P^2 - P||
  double hermiticity = 0.0;   // max ||P - P^dagger||
  double orthogonality = 0.0; // max ||P_i P_j||, i != j
  double completeness = 0.0;  // ||sum P - I||
};

inline FamilyResiduals family_residuals(const std::vector<ComplexMatrix>& projectors) {
  FamilyResiduals r;
  if (projectors.empty()) return r;
  const std::size_t n = projectors.front().rows();
  ComplexMatrix sum(n, n);
  std::vector<ComplexMatrix> squares;
  for (const auto& p : projectors) {
    r.idempotence = std::max(r.idempotence, max_abs_diff(p * p, p));
    r.hermiticity = std::max(r.hermiticity, max_abs_diff(p, p.adjoint()));
    sum += p;
  }
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = i + 1; j < projectors.size(); ++j)
      r.orthogonality = std::max(r.orthogonality, (projectors[i] * projectors[j]).max_abs());
  r.completeness = max_abs_diff(sum, ComplexMatrix::identity(n));
  return r;
}

/// An exhaustive set of mutually orthogonal projectors on one space.
class ProjectorFamily {
 public:
  ProjectorFamily() = default;

  ProjectorFamily(std::vector<ComplexMatrix> projectors, std::vector<std::string> labels = {},
                  const NumericPolicy& policy = {})
      : projectors_(std::move(projectors)), labels_(std::move(labels)) {
    require(!projectors_.empty(), ErrorKind::kValidation, "projector family is empty");
    dim_ = projectors_.front().rows();
    for (const auto& p : projectors_)
      require(p.rows() == dim_ && p.cols() == dim_, ErrorKind::kShape, "projectors in a family must share a dimension");
    if (labels_.empty())
      for (std::size_t i = 0; i < projectors_.size(); ++i) labels_.push_back(std::to_string(i));
    require(labels_.size() == projectors_.size(), ErrorKind::kShape, "one label per projector required");

    const FamilyResiduals r = family_residuals(projectors_);
    require(r.hermiticity <= policy.hermitian_tol, ErrorKind::kValidation,
            "family member not Hermitian (residual " + std::to_string(r.hermiticity) + ")");
    require(r.idempotence <= policy.projector_tol, ErrorKind::kValidation,
            "family member not idempotent (residual " + std::to_string(r.idempotence) + ")");
    require(r.orthogonality <= policy.projector_tol, ErrorKind::kValidation,
            "family members not orthogonal (residual " + std::to_string(r.orthogonality) + ")");
    require(r.completeness <= policy.projector_tol, ErrorKind::kValidation,
            "family incomplete (residual " + std::to_string(r.completeness) + ")");
  }

  /// Rank-one projectors onto the columns of an orthonormal basis.
  static ProjectorFamily from_basis(const ComplexMatrix& basis, const NumericPolicy& policy = {}) {
    require(basis.is_square(), ErrorKind::kValidation, "basis matrix must be square");
    std::vector<ComplexMatrix> ps;
    for (std::size_t c = 0; c < basis.cols(); ++c) ps.push_back(ComplexMatrix::projector_onto(basis.column(c)));
    return ProjectorFamily(std::move(ps), {}, policy);
  }

  static ProjectorFamily trivial(std::size_t dim) {
    return ProjectorFamily({ComplexMatrix::identity(dim)}, {"identity"});
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return projectors_.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return projectors_.at(i); }
  const std::vector<ComplexMatrix>& projectors() const noexcept { return projectors_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  FamilyResiduals residuals() const { return family_residuals(projectors_); }

  /// The same family acting on `targets` of a larger tensor-product space.
  ProjectorFamily embedded(std::span<const std::size_t> dims, std::span<const std::size_t> targets,
                           const NumericPolicy& policy = {}) const {
    std::vector<ComplexMatrix> ps;
    ps.reserve(projectors_.size());
    for (const auto& p : projectors_) ps.push_back(embed_operator(p, dims, targets));
    return ProjectorFamily(std::move(ps), labels_, policy);
  }

 private:
  std::size_t dim_ = 0;
  std::vector<ComplexMatrix> projectors_;
  std::vector<std::string> labels_;
};

}  // namespace modalhist
