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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stgrape/propagate.hpp"

namespace stgrape {

/// Wall-clock cost of one forward step on the spin chain with edge
/// uncertainties and rho0 = ones/d.
struct StepTiming {
    Backend backend = Backend::kExpm;
    std::size_t num_qubits = 0;
    std::size_t order = 0;
    std::size_t aug_dim = 0;  // N * d^2
    double median_ns = 0.0;
    double mean_ns = 0.0;
    std::size_t samples = 0;
};

struct TimingSweep {
    std::vector<std::size_t> qubits = {2, 3, 4, 5};
    std::vector<std::size_t> orders = {1};
    std::vector<Backend> backends = {Backend::kExpm, Backend::kOde, Backend::kTrotter};
    /// Random controls per point.
    std::size_t controls = 10;
    /// Per-point wall budget in seconds; once spent, the point stops drawing
    /// controls (at least one sample is always taken). 0 disables it.
    double budget_s = 0.0;
    double dt = 0.5;
    double jxy_mhz = 30.0;
    double t1_us = 30.0;
    double t2_us = 30.0;
    double bound_mhz = 100.0;
    std::uint64_t seed = 0;
    PropagationOptions propagation;
};

std::vector<StepTiming> time_step_sweep(const TimingSweep& sweep);

}  // namespace stgrape
