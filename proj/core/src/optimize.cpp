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

#include "stgrape/optimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "stgrape/parallel.hpp"

namespace stgrape {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// tr(A B) without forming the product.
Complex trace_product(const CMatrix& a, const CMatrix& b) {
    return (a.transpose().array() * b.array()).sum();
}

// sum over blocks of (rho O^dagger - O^dagger rho)
CMatrix commutator_source(const AugmentedState& rho, const AugmentedState& co) {
    CMatrix g = CMatrix::Zero(static_cast<Eigen::Index>(rho.dim()),
                              static_cast<Eigen::Index>(rho.dim()));
    for (std::size_t b = 0; b < rho.size(); ++b) {
        const CMatrix od = co[b].adjoint();
        g.noalias() += rho[b] * od;
        g.noalias() -= od * rho[b];
    }
    return g;
}

Eigen::MatrixXd grape_gradient_from(const OpenSystemModel& model, const ControlGrid& grid,
                                    const StepCache& fwd, const StepCache& bwd) {
    Eigen::MatrixXd grad(static_cast<Eigen::Index>(model.num_controls()),
                         static_cast<Eigen::Index>(grid.steps()));
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const CMatrix g = commutator_source(fwd.states[k + 1], bwd.states[k + 1]);
        for (std::size_t c = 0; c < model.num_controls(); ++c) {
            grad(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) =
                grid.dt() * trace_product(model.controls()[c], g).imag();
        }
    }
    return grad;
}

Eigen::MatrixXd stgrape_gradient_from(const OpenSystemModel& model, const ControlGrid& grid,
                                      const Propagator& prop, const StepCache& fwd,
                                      const StepCache& bwd) {
    const TrotterPlan& plan = *prop.trotter_plan();
    const auto& groups = plan.groups();
    const std::size_t nq = groups.size();
    const double half = 0.5 * grid.dt();
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.num_controls()),
                                                 static_cast<Eigen::Index>(grid.steps()));
    std::vector<AugmentedState> costates(nq + 1);
    std::vector<std::size_t> order(nq);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const auto& us = prop.group_unitaries(k);
        for (int block = 0; block < 2; ++block) {
            // The first control block applies groups 0..Q-1, the second Q-1..0.
            for (std::size_t i = 0; i < nq; ++i) order[i] = block == 0 ? i : nq - 1 - i;
            costates[nq] = bwd.inner[k][static_cast<std::size_t>(block)];
            for (std::size_t i = nq; i-- > 0;) {
                costates[i] = costates[i + 1];
                conjugate_blocks(costates[i], us[order[i]].adjoint());
            }
            AugmentedState x = fwd.inner[k][static_cast<std::size_t>(block)];
            for (std::size_t i = 0; i < nq; ++i) {
                const ControlGroup& g = groups[order[i]];
                conjugate_blocks(x, us[order[i]]);
                const CMatrix src = commutator_source(x, costates[i + 1]);
                for (std::size_t c : g.channels) {
                    grad(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) +=
                        half * trace_product(model.controls()[c], src).imag();
                }
            }
        }
    }
    return grad;
}

struct SubResult {
    double value = 0.0;
    Eigen::MatrixXd gradient;
    AugmentedState final_state;
    PhaseTimes times;
};

Box grid_box(const ControlGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.flat().size());
    Box box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& b = grid.bounds()[static_cast<std::size_t>(i) % grid.channels()];
        box.lo(i) = b.lo;
        box.hi(i) = b.hi;
    }
    return box;
}

Eigen::VectorXd to_vector(const ControlGrid& grid) {
    return Eigen::Map<const Eigen::VectorXd>(grid.flat().data(),
                                             static_cast<Eigen::Index>(grid.flat().size()));
}

void load(ControlGrid& grid, const Eigen::VectorXd& x) {
    grid.set_flat(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

// Gradient matrices are channels x steps (column-major), which matches the
// step-major flat layout of ControlGrid.
Eigen::VectorXd flatten(const Eigen::MatrixXd& g) {
    return Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
}

MinimizeOptions minimize_options(const OptimizerConfig& cfg) {
    if (cfg.monitor_interval == 0) throw std::invalid_argument("monitor interval must be >= 1");
    MinimizeOptions o;
    o.max_iters = cfg.max_iters;
    o.memory = cfg.lbfgs_memory;
    o.gradient_tolerance = cfg.gradient_tolerance;
    o.ftol = cfg.ftol;
    o.f_target = -cfg.objective_target;
    o.line_search.fallback_step = cfg.learning_rate;
    return o;
}

StopReason stop_reason(MinimizeStatus status) {
    return status == MinimizeStatus::kMaxIters ? StopReason::kMaxIters : StopReason::kConverged;
}

}  // namespace

Method parse_method(std::string_view name) {
    if (name == "grape") return Method::kGrape;
    if (name == "stgrape") return Method::kStGrape;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
    return method == Method::kGrape ? "grape" : "stgrape";
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::kConverged:
            return "converged";
        case StopReason::kMonitorDecrease:
            return "monitor_decrease";
        case StopReason::kMaxIters:
            return "max_iters";
    }
    return "converged";
}

PhaseTimes& PhaseTimes::operator+=(const PhaseTimes& o) {
    forward += o.forward;
    backward += o.backward;
    gradient += o.gradient;
    update += o.update;
    monitor += o.monitor;
    return *this;
}

ControlProblem state_problem(const OpenSystemModel& model, const MultiIndexSet& mset,
                             const CMatrix& rho0, StateObjective objective) {
    ControlProblem p{model, mset, {}};
    p.subproblems.push_back(Subproblem{1.0, rho0, std::move(objective)});
    return p;
}

ControlProblem gate_problem(const OpenSystemModel& model, const MultiIndexSet& mset,
                            const GateObjective& gobj) {
    ControlProblem p{model, mset, {}};
    for (std::size_t i = 0; i < gobj.initial_states.size(); ++i) {
        p.subproblems.push_back(
            Subproblem{gobj.weights[i], gobj.initial_states[i], gobj.objectives[i]});
    }
    return p;
}

Evaluation evaluate(const ControlProblem& problem, const ControlGrid& grid, Backend backend,
                    bool with_gradient, const PropagationOptions& opts, std::size_t workers) {
    const auto t_setup = Clock::now();
    const Propagator prop(backend, problem.model, problem.mset, grid, opts);
    Evaluation ev;
    ev.times.forward = seconds_since(t_setup);

    std::vector<SubResult> slots(problem.subproblems.size());
    parallel_for(slots.size(), workers, [&](std::size_t i) {
        const Subproblem& sub = problem.subproblems[i];
        SubResult& out = slots[i];
        auto t0 = Clock::now();
        StepCache fwd;
        out.final_state =
            prop.forward(AugmentedState::initial(problem.mset, sub.rho0), with_gradient ? &fwd : nullptr);
        out.value = objective_value(out.final_state, sub.objective);
        out.times.forward = seconds_since(t0);
        if (!with_gradient) return;
        t0 = Clock::now();
        const StepCache bwd = prop.backward(objective_costate(out.final_state, sub.objective),
                                            backend == Backend::kTrotter);
        out.times.backward = seconds_since(t0);
        t0 = Clock::now();
        out.gradient = backend == Backend::kTrotter
                           ? stgrape_gradient_from(problem.model, grid, prop, fwd, bwd)
                           : grape_gradient_from(problem.model, grid, fwd, bwd);
        out.times.gradient = seconds_since(t0);
    });

    if (with_gradient) {
        ev.gradient = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(problem.model.num_controls()),
                                            static_cast<Eigen::Index>(grid.steps()));
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double w = problem.subproblems[i].weight;
        ev.value += w * slots[i].value;
        if (with_gradient) ev.gradient += w * slots[i].gradient;
        ev.times += slots[i].times;
        ev.finals.push_back(std::move(slots[i].final_state));
    }
    if (!std::isfinite(ev.value) || (with_gradient && !ev.gradient.allFinite())) {
        throw NumericalFailure("objective or gradient is not finite");
    }
    return ev;
}

Backend monitor_backend(const ControlProblem& problem, const PropagationOptions& opts) {
    const std::size_t d = problem.model.dim();
    return problem.mset.size() * d * d <= opts.supermatrix_cap ? Backend::kExpm : Backend::kOde;
}

double true_objective(const ControlProblem& problem, const ControlGrid& grid,
                      const PropagationOptions& opts, std::size_t workers) {
    const Backend b = monitor_backend(problem, opts);
    PropagationOptions tight = opts;
    tight.ode_step_scale = opts.ode_step_scale / 10.0;
    return evaluate(problem, grid, b, false, tight, workers).value;
}

Eigen::MatrixXd grape_gradient(const OpenSystemModel& model, const MultiIndexSet& mset,
                               const ControlGrid& grid, const CMatrix& rho0,
                               const StateObjective& obj, Backend backend,
                               const PropagationOptions& opts) {
    if (backend == Backend::kTrotter) {
        throw std::invalid_argument("grape_gradient needs an exact backend (expm or ode)");
    }
    return evaluate(state_problem(model, mset, rho0, obj), grid, backend, true, opts).gradient;
}

Eigen::MatrixXd stgrape_gradient(const OpenSystemModel& model, const MultiIndexSet& mset,
                                 const ControlGrid& grid, const CMatrix& rho0,
                                 const StateObjective& obj, const PropagationOptions& opts) {
    return evaluate(state_problem(model, mset, rho0, obj), grid, Backend::kTrotter, true, opts)
        .gradient;
}

OptimizationReport run_grape(const ControlProblem& problem, const ControlGrid& grid0,
                             const OptimizerConfig& cfg) {
    if (cfg.exact_backend == Backend::kTrotter) {
        throw std::invalid_argument("GRAPE needs an exact backend (expm or ode)");
    }
    const auto t_start = Clock::now();
    OptimizationReport report{.best = grid0};
    report.method = Method::kGrape;
    report.backend = cfg.exact_backend;
    report.seed = cfg.seed;

    ControlGrid grid = grid0;
    const BoundedObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        load(grid, x);
        const Evaluation ev =
            evaluate(problem, grid, cfg.exact_backend, true, cfg.propagation, cfg.workers);
        report.times += ev.times;
        g = -flatten(ev.gradient);
        return -ev.value;
    };
    MinimizeOptions mo = minimize_options(cfg);
    if (cfg.progress) {
        mo.callback = [](std::size_t it, const Eigen::VectorXd&, double fx) {
            std::fprintf(stderr, "iter %zu J=%.12f\n", it, -fx);
            return true;
        };
    }
    const MinimizeResult res = minimize_bounded(f, to_vector(grid0), grid_box(grid0), mo);
    load(report.best, res.x);
    report.best_value = -res.f;
    for (double v : res.history) report.history.push_back(-v);
    report.iterations = res.iterations;
    report.evaluations = res.evaluations;
    report.stop = stop_reason(res.status);
    const double total = seconds_since(t_start);
    report.times.update = std::max(0.0, total - report.times.forward - report.times.backward -
                                            report.times.gradient);
    return report;
}

OptimizationReport run_stgrape(const ControlProblem& problem, const ControlGrid& grid0,
                               const OptimizerConfig& cfg) {
    const auto t_start = Clock::now();
    OptimizationReport report{.best = grid0};
    report.method = Method::kStGrape;
    report.backend = Backend::kTrotter;
    report.seed = cfg.seed;

    ControlGrid grid = grid0;
    ControlGrid probe = grid0;
    const BoundedObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        load(grid, x);
        const Evaluation ev =
            evaluate(problem, grid, Backend::kTrotter, true, cfg.propagation, cfg.workers);
        report.times += ev.times;
        g = -flatten(ev.gradient);
        return -ev.value;
    };

    Eigen::VectorXd best_x = to_vector(grid0);
    bool decreased = false;
    // Returns false when the true objective dropped below the last checkpoint.
    auto checkpoint = [&](std::size_t it, const Eigen::VectorXd& x, double fx) {
        const auto t0 = Clock::now();
        load(probe, x);
        const double tj = true_objective(problem, probe, cfg.propagation, cfg.workers);
        report.times.monitor += seconds_since(t0);
        if (cfg.progress) {
            std::fprintf(stderr, "checkpoint %zu J^=%.12f J=%.12f\n", it, -fx, tj);
        }
        const bool dropped = !report.checkpoints.empty() && tj < report.checkpoints.back().true_value;
        report.checkpoints.push_back({it, tj, -fx});
        if (dropped) {
            decreased = true;
            return false;
        }
        best_x = x;
        report.best_value = tj;
        return true;
    };

    MinimizeOptions mo = minimize_options(cfg);
    mo.callback = [&](std::size_t it, const Eigen::VectorXd& x, double fx) {
        if (cfg.progress) std::fprintf(stderr, "iter %zu J^=%.12f\n", it, -fx);
        if (it % cfg.monitor_interval != 0) return true;
        return checkpoint(it, x, fx);
    };
    const MinimizeResult res = minimize_bounded(f, to_vector(grid0), grid_box(grid0), mo);
    if (!decreased && report.checkpoints.back().iteration != res.iterations) {
        checkpoint(res.iterations, res.x, res.f);
    }
    load(report.best, best_x);
    for (double v : res.history) report.history.push_back(-v);
    report.iterations = res.iterations;
    report.evaluations = res.evaluations;
    report.stop = decreased ? StopReason::kMonitorDecrease : stop_reason(res.status);
    const double total = seconds_since(t_start);
    report.times.update =
        std::max(0.0, total - report.times.forward - report.times.backward -
                          report.times.gradient - report.times.monitor);
    return report;
}

OptimizationReport run_gate_synthesis(const OpenSystemModel& model, const MultiIndexSet& mset,
                                      const ControlGrid& grid0, const GateObjective& gobj,
                                      const OptimizerConfig& cfg, Method method) {
    const ControlProblem problem = gate_problem(model, mset, gobj);
    return method == Method::kGrape ? run_grape(problem, grid0, cfg)
                                    : run_stgrape(problem, grid0, cfg);
}

}  // namespace stgrape
