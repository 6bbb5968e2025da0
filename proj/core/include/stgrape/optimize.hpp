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
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stgrape/augment.hpp"
#include "stgrape/lbfgs.hpp"
#include "stgrape/model.hpp"
#include "stgrape/objective.hpp"
#include "stgrape/propagate.hpp"

namespace stgrape {

enum class Method { kGrape, kStGrape };

/// Raised when an objective or gradient evaluates to a non-finite value.
class NumericalFailure : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

struct OptimizerConfig {
    std::size_t max_iters = 500;
    std::size_t lbfgs_memory = 10;
    /// N_r: true-objective checkpoints every this many iterations (ST-GRAPE).
    std::size_t monitor_interval = 50;
    /// alpha of the projected-gradient fallback step.
    double learning_rate = 1e-3;
    double gradient_tolerance = 1e-8;
    double ftol = 1e-12;
    /// Stop once the objective reaches this value.
    double objective_target = 1.0 - 1e-10;
    /// Exact backend for GRAPE and for the ST-GRAPE monitor.
    Backend exact_backend = Backend::kExpm;
    PropagationOptions propagation;
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    bool progress = false;
};

/// One state-transfer subroutine: weight * J_i(rho_i(T)).
struct Subproblem {
    double weight = 1.0;
    CMatrix rho0;
    StateObjective objective;
};

struct ControlProblem {
    OpenSystemModel model;
    MultiIndexSet mset;
    std::vector<Subproblem> subproblems;
};

ControlProblem state_problem(const OpenSystemModel& model, const MultiIndexSet& mset,
                             const CMatrix& rho0, StateObjective objective);
ControlProblem gate_problem(const OpenSystemModel& model, const MultiIndexSet& mset,
                            const GateObjective& gobj);

/// Wall time in seconds spent per phase.
struct PhaseTimes {
    double forward = 0.0;
    double backward = 0.0;
    double gradient = 0.0;
    double update = 0.0;
    double monitor = 0.0;

    PhaseTimes& operator+=(const PhaseTimes& o);
};

struct Evaluation {
    double value = 0.0;
    /// channels x steps; empty unless requested.
    Eigen::MatrixXd gradient;
    std::vector<AugmentedState> finals;
    PhaseTimes times{};
};

/// Weighted objective over all subproblems and optionally its gradient.
/// Exact backends give the first-order GRAPE gradient
///   dt * Re <O(t_{k+1}), -i[H_c, rho(t_{k+1})]>,
/// the Trotter backend the exact derivative of the Trotterized objective.
/// Subproblems run on up to `workers` threads and are reduced in index order.
Evaluation evaluate(const ControlProblem& problem, const ControlGrid& grid, Backend backend,
                    bool with_gradient, const PropagationOptions& opts = {},
                    std::size_t workers = 1);

/// The objective with an exact backend: expm when the supermatrix fits the
/// cap, otherwise RK4 with ten times finer substeps.
double true_objective(const ControlProblem& problem, const ControlGrid& grid,
                      const PropagationOptions& opts = {}, std::size_t workers = 1);
Backend monitor_backend(const ControlProblem& problem, const PropagationOptions& opts);

Eigen::MatrixXd grape_gradient(const OpenSystemModel& model, const MultiIndexSet& mset,
                               const ControlGrid& grid, const CMatrix& rho0,
                               const StateObjective& obj, Backend backend,
                               const PropagationOptions& opts = {});
Eigen::MatrixXd stgrape_gradient(const OpenSystemModel& model, const MultiIndexSet& mset,
                                 const ControlGrid& grid, const CMatrix& rho0,
                                 const StateObjective& obj, const PropagationOptions& opts = {});

struct Checkpoint {
    std::size_t iteration = 0;
    double true_value = 0.0;
    double approx_value = 0.0;
};

enum class StopReason { kConverged, kMonitorDecrease, kMaxIters };

std::string_view to_string(StopReason reason);

struct OptimizationReport {
    Method method = Method::kGrape;
    Backend backend = Backend::kExpm;
    /// Optimized objective (J for GRAPE, J^ for ST-GRAPE) per iteration,
    /// starting with the initial guess.
    std::vector<double> history{};
    std::vector<Checkpoint> checkpoints{};
    ControlGrid best;
    /// Exact-backend objective of `best`.
    double best_value = 0.0;
    StopReason stop = StopReason::kMaxIters;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    PhaseTimes times{};
    std::uint64_t seed = 0;
};

OptimizationReport run_grape(const ControlProblem& problem, const ControlGrid& grid0,
                             const OptimizerConfig& cfg);
OptimizationReport run_stgrape(const ControlProblem& problem, const ControlGrid& grid0,
                               const OptimizerConfig& cfg);
OptimizationReport run_gate_synthesis(const OpenSystemModel& model, const MultiIndexSet& mset,
                                      const ControlGrid& grid0, const GateObjective& gobj,
                                      const OptimizerConfig& cfg, Method method);

}  // namespace stgrape
