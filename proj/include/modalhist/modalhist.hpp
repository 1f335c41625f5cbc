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

// Everything except the scenario runner, which additionally needs
// nlohmann/json (modalhist/scenario.hpp, modalhist/emit.hpp).

#include "modalhist/error.hpp"
#include "modalhist/numeric_policy.hpp"
#include "modalhist/complex_matrix.hpp"
#include "modalhist/tensor.hpp"
#include "modalhist/projector_family.hpp"
#include "modalhist/state.hpp"
#include "modalhist/spectral.hpp"
#include "modalhist/modal.hpp"
#include "modalhist/histories.hpp"
#include "modalhist/decoherence_models.hpp"
#include "modalhist/branch_modal.hpp"
#include "modalhist/causal_lattice.hpp"
