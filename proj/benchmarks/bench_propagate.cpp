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

#include <benchmark/benchmark.h>

#include <vector>

#include <stgrape/augment.hpp>
#include <stgrape/model.hpp>
#include <stgrape/objective.hpp>
#include <stgrape/optimize.hpp>
#include <stgrape/propagate.hpp>
#include <stgrape/tensor.hpp>

namespace {

using namespace stgrape;

struct Setup {
    OpenSystemModel model;
    MultiIndexSet mset;
    ControlGrid grid;
    AugmentedState state0;

    Setup(std::size_t nq, std::size_t n, std::size_t steps)
        : model(attach_uncertainties(build_spin_chain(nq, 30.0, 30.0, 30.0), UncertaintyKind::kEdges)),
          mset(model.num_uncertainties(), n),
          grid(random_grid(model.num_controls(), steps, 0.5,
                           std::vector<AmplitudeBounds>(model.num_controls(),
                                                        {-mhz_to_rad_per_ns(100.0), mhz_to_rad_per_ns(100.0)}),
                           7)) {
        const auto d = static_cast<Eigen::Index>(model.dim());
        state0 = AugmentedState::initial(mset, CMatrix::Constant(d, d, 1.0 / double(d)));
    }
};

void set_counters(benchmark::State& st, const Setup& s) {
    st.counters["d_aug"] = double(s.mset.size() * s.model.dim() * s.model.dim());
}

void BM_StepExpm(benchmark::State& st) {
    const Setup s(std::size_t(st.range(0)), std::size_t(st.range(1)), 1);
    const auto amps = s.grid.step_amplitudes(0);
    for (auto _ : st) benchmark::DoNotOptimize(step_expm(s.model, s.mset, amps, 0.5, s.state0));
    set_counters(st, s);
}

void BM_StepOde(benchmark::State& st) {
    const Setup s(std::size_t(st.range(0)), std::size_t(st.range(1)), 1);
    const auto amps = s.grid.step_amplitudes(0);
    const std::size_t substeps = default_substeps(s.model, amps, 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(step_ode(s.model, s.mset, amps, 0.5, s.state0, substeps));
    set_counters(st, s);
    st.counters["substeps"] = double(substeps);
}

void BM_StepTrotter(benchmark::State& st) {
    const Setup s(std::size_t(st.range(0)), std::size_t(st.range(1)), 1);
    const TrotterPlan plan(s.model, 0.5);
    const auto amps = s.grid.step_amplitudes(0);
    for (auto _ : st) benchmark::DoNotOptimize(step_trotter(plan, s.mset, amps, s.state0));
    set_counters(st, s);
}

void BM_Expm(benchmark::State& st) {
    const auto dim = static_cast<Eigen::Index>(st.range(0));
    const CMatrix a = CMatrix::Random(dim, dim) * 0.5;
    for (auto _ : st) benchmark::DoNotOptimize(expm(a));
}

// Objective plus gradient over a 20-step pulse.
void BM_EvaluateGradient(benchmark::State& st) {
    const Setup s(std::size_t(st.range(0)), 1, 20);
    const auto d = static_cast<Eigen::Index>(s.model.dim());
    CMatrix target = CMatrix::Zero(d, d);
    target(d - 1, d - 1) = 1.0;
    const ControlProblem problem =
        state_problem(s.model, s.mset, CMatrix::Constant(d, d, 1.0 / double(d)),
                      make_robust_objective(s.mset, target));
    const auto backend = static_cast<Backend>(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(evaluate(problem, s.grid, backend, true).value);
}

}  // namespace

BENCHMARK(BM_StepExpm)->ArgsProduct({{1, 2, 3}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepExpm)->Args({4, 1})->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_StepOde)->ArgsProduct({{1, 2, 3, 4, 5}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepTrotter)->ArgsProduct({{1, 2, 3, 4, 5}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Expm)->RangeMultiplier(2)->Range(4, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EvaluateGradient)
    ->ArgsProduct({{2, 3}, {int(Backend::kExpm), int(Backend::kOde), int(Backend::kTrotter)}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
