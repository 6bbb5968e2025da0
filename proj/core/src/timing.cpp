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

#include "stgrape/timing.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "stgrape/random.hpp"

namespace stgrape {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<StepTiming> time_step_sweep(const TimingSweep& sweep) {
    if (sweep.controls == 0) throw std::invalid_argument("time_step_sweep: controls must be >= 1");
    if (!(sweep.dt > 0.0)) throw std::invalid_argument("time_step_sweep: dt must be positive");
    std::vector<StepTiming> out;
    for (std::size_t nq : sweep.qubits) {
        const OpenSystemModel model = attach_uncertainties(
            build_spin_chain(nq, sweep.jxy_mhz, sweep.t1_us, sweep.t2_us), UncertaintyKind::kEdges);
        const auto d = static_cast<Eigen::Index>(model.dim());
        const double bound = mhz_to_rad_per_ns(sweep.bound_mhz);
        const std::vector<AmplitudeBounds> bounds(model.num_controls(), {-bound, bound});
        for (std::size_t n : sweep.orders) {
            const MultiIndexSet mset(model.num_uncertainties(), n);
            const AugmentedState state0 =
                AugmentedState::initial(mset, CMatrix::Constant(d, d, 1.0 / double(d)));
            for (Backend backend : sweep.backends) {
                std::optional<TrotterPlan> plan;
                if (backend == Backend::kTrotter) plan.emplace(model, sweep.dt, sweep.propagation);
                std::vector<double> ns;
                const auto point_start = Clock::now();
                for (std::size_t c = 0; c < sweep.controls; ++c) {
                    const ControlGrid grid =
                        random_grid(model.num_controls(), 1, sweep.dt, bounds, sweep.seed + c);
                    const auto amps = grid.step_amplitudes(0);
                    std::size_t substeps = 0;
                    if (backend == Backend::kOde) {
                        substeps = sweep.propagation.ode_substeps
                                       ? sweep.propagation.ode_substeps
                                       : default_substeps(model, amps, sweep.dt,
                                                          sweep.propagation.ode_step_scale);
                    }
                    const auto t0 = Clock::now();
                    AugmentedState s;
                    switch (backend) {
                        case Backend::kExpm:
                            s = step_expm(model, mset, amps, sweep.dt, state0,
                                          sweep.propagation.supermatrix_cap);
                            break;
                        case Backend::kOde:
                            s = step_ode(model, mset, amps, sweep.dt, state0, substeps);
                            break;
                        case Backend::kTrotter:
                            s = step_trotter(*plan, mset, amps, state0);
                            break;
                    }
                    const auto t1 = Clock::now();
                    ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
                    const double spent = std::chrono::duration<double>(t1 - point_start).count();
                    if (sweep.budget_s > 0.0 && spent >= sweep.budget_s) break;
                }
                StepTiming t;
                t.backend = backend;
                t.num_qubits = nq;
                t.order = n;
                t.aug_dim = mset.size() * model.dim() * model.dim();
                t.median_ns = median(ns);
                t.mean_ns = std::accumulate(ns.begin(), ns.end(), 0.0) / double(ns.size());
                t.samples = ns.size();
                out.push_back(t);
            }
        }
    }
    return out;
}

}  // namespace stgrape
