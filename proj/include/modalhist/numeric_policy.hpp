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

namespace modalhist {

/// Tolerances and capacity limits shared by every module. Values are passed
/// explicitly to each operation; there is no process-wide default state.
struct NumericPolicy {
  // qstate-core
  double hermitian_tol = 1e-12;
  double projector_tol = 1e-10;
  double unitary_tol = 1e-10;
  double trace_tol = 1e-10;
  double eigenvalue_floor = 1e-10;  // density operators may dip this far below zero
  double state_norm_tol = 1e-12;
  double reconstruction_tol = 1e-9;

  // modal-assignment
  double rank_cutoff = 1e-12;      // Schmidt weights below this are dropped
  double degeneracy_tol = 1e-9;    // relative: |w_i - w_j| <= tol * max(w_i, 1)
  double definite_tol = 1e-9;

  // histories-engine
  double consistency_tol = 1e-10;

  // capacities
  std::size_t max_dim = 4096;
  std::size_t max_histories = 1'000'000;
  std::size_t max_leaves = 4096;
  std::size_t exhaustive_point_cap = 8;
  std::size_t max_foliations = 20'000;

  // Allows modules with embarrassingly parallel loops to use threads. Results
  // are always reduced in a fixed order.
  bool parallel = false;
};

}  // namespace modalhist
