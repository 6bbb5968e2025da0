// Copyright 2026 The stgrape Authors
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

#include <vector>

#include "stgrape/propagate.hpp"

namespace stgrape::detail {

/// The m nilpotent half-step factors, in order 0..m-1 or reversed.
void trotter_uncertainties(const TrotterPlan& plan, const MultiIndexSet& mset,
                           AugmentedState& state, bool reverse, bool adjoint);

CMatrix fused_middle(const TrotterPlan& plan, const std::vector<CMatrix>& group_unitaries);

}  // namespace stgrape::detail
