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

#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>

#include "output.hpp"
#include "stgrape/oracle.hpp"
#include "stgrape/parallel.hpp"
#include "stgrape/timing.hpp"

namespace stgrape::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string order_label(std::span<const int> p) {
    std::string s;
    for (std::size_t j = 0; j < p.size(); ++j) s += (j ? "-" : "") + std::to_string(p[j]);
    return s.empty() ? "0" : s;
}

// F_agf needs the full d^2 x d^2 channel; past d = 16 that is too costly to
// report routinely.
constexpr std::size_t kChannelReportMaxDim = 16;

CMatrix ground_state(std::size_t d) {
    CMatrix r = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    r(0, 0) = 1.0;
    return r;
}

CMatrix initial_state(const std::string& kind, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    if (kind == "ground") return ground_state(d);
    if (kind == "mixed") return identity(n) / double(d);
    return CMatrix::Constant(n, n, 1.0 / double(d));
}

CMatrix state_target(const RunConfig& cfg, std::size_t d) {
    const CMatrix& u = cfg.task.target_matrix;
    return u * ground_state(d) * u.adjoint();
}

void apply_lambdas(const RunConfig& cfg, const MultiIndexSet& mset, StateObjective& obj) {
    auto* robust = std::get_if<RobustStateObjective>(&obj);
    if (!robust) return;
    for (std::size_t k = 0; k < mset.size(); ++k) {
        const int deg = mset.total_degree(k);
        robust->lambdas[k] = deg == 0 ? 0.0 : cfg.robustness.lambdas[static_cast<std::size_t>(deg - 1)];
    }
}

StateObjective state_objective(const RunConfig& cfg, const MultiIndexSet& mset, const CMatrix& target) {
    if (cfg.task.average) {
        return make_average_objective(
            mset, target, sigmas_rad(cfg.robustness.sigma_mhz, mset.num_params(), "robustness.sigma_mhz"));
    }
    StateObjective obj = make_robust_objective(mset, target);
    apply_lambdas(cfg, mset, obj);
    return obj;
}

GateObjective gate_objective_for(const RunConfig& cfg, const MultiIndexSet& mset) {
    GateObjective g =
        cfg.task.average
            ? make_average_gate_objective(
                  cfg.task.target_matrix, mset, cfg.task.basis,
                  sigmas_rad(cfg.robustness.sigma_mhz, mset.num_params(), "robustness.sigma_mhz"))
            : make_gate_objective(cfg.task.target_matrix, mset, cfg.task.basis);
    for (StateObjective& o : g.objectives) apply_lambdas(cfg, mset, o);
    if (!cfg.task.weights.empty()) {
        if (cfg.task.weights.size() != g.weights.size()) {
            throw ConfigError("task.weights", "expected " + std::to_string(g.weights.size()) +
                                                  " weights (one per basis state)");
        }
        g.weights = cfg.task.weights;
    }
    return g;
}

YAML::Node flow(const std::vector<double>& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (double x : v) n.push_back(x);
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node times_node(const PhaseTimes& t) {
    YAML::Node n;
    n["forward_s"] = t.forward;
    n["backward_s"] = t.backward;
    n["gradient_s"] = t.gradient;
    n["update_s"] = t.update;
    n["monitor_s"] = t.monitor;
    return n;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const YAML::Node config = to_yaml(cfg, Command::kSimulate);
    const OpenSystemModel model = build_model(cfg);
    const MultiIndexSet mset = build_orders(cfg, model);
    const ControlGrid grid =
        opts.pulse ? read_pulse(*opts.pulse, model.num_controls(), build_bounds(cfg), cfg.control.dt_ns)
                   : initial_grid(cfg, model);
    const AugmentedState state0 =
        AugmentedState::initial(mset, initial_state(cfg.simulate.initial, model.dim()));

    YAML::Node body;
    YAML::Node timings;
    std::ostringstream csv;
    csv << comment_header(config, "simulate");
    csv << "backend,block,order,degree,trace_re,trace_im,frobenius,hermiticity_defect\n";
    std::optional<AugmentedState> exact;
    std::optional<AugmentedState> trotter;
    for (Backend b : cfg.simulate.backends) {
        const auto t0 = Clock::now();
        const AugmentedState fin =
            propagate_forward(b, model, mset, grid, state0, false, cfg.optimizer.propagation).final_state;
        timings[std::string(to_string(b)) + "_s"] = seconds_since(t0);
        const std::string name(to_string(b));
        YAML::Node summary;
        const CMatrix& rho = fin[mset.zero_index()];
        summary["trace"] = rho.trace().real();
        summary["purity"] = (rho * rho).trace().real();
        double max_herm = 0.0;
        double max_block_trace = 0.0;
        double high_energy = 0.0;
        for (std::size_t k = 0; k < fin.size(); ++k) {
            const Complex tr = fin[k].trace();
            const double herm = hermiticity_defect(fin[k]);
            max_herm = std::max(max_herm, herm);
            if (k != mset.zero_index()) {
                max_block_trace = std::max(max_block_trace, std::abs(tr));
                high_energy += fin[k].squaredNorm();
            }
            csv << name << "," << k << "," << order_label(mset.multi_index(k)) << ","
                << mset.total_degree(k) << "," << num(tr.real()) << "," << num(tr.imag()) << ","
                << num(fin[k].norm()) << "," << num(herm) << "\n";
        }
        summary["max_hermiticity_defect"] = max_herm;
        summary["max_higher_block_trace"] = max_block_trace;
        summary["higher_block_energy"] = high_energy;
        summary["norm"] = fin.norm();
        body["backends"][name] = summary;
        if (b == Backend::kTrotter) {
            trotter = fin;
        } else if (!exact) {
            exact = fin;
        }
    }
    if (exact && trotter) {
        body["delta_st"] = (exact->stacked() - trotter->stacked()).norm() / exact->stacked().norm();
    }
    body["steps"] = grid.steps();
    body["aug_dim"] = mset.size() * model.dim() * model.dim();
    write_report(opts.out_dir / "simulate.yaml", config, "simulate", body);
    write_text(opts.out_dir / "blocks.csv", csv.str());
    YAML::Node t;
    t["timings"] = timings;
    write_report(opts.out_dir / "timings.yaml", config, "simulate", t);
    if (!opts.quiet && body["delta_st"]) {
        std::fprintf(stderr, "delta_ST = %.3e\n", body["delta_st"].as<double>());
    }
}

void cmd_optimize(const RunConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const YAML::Node config = to_yaml(cfg, Command::kOptimize);
    const OpenSystemModel model = build_model(cfg);
    const MultiIndexSet mset = build_orders(cfg, model);
    const ControlGrid grid0 = initial_grid(cfg, model);
    OptimizerConfig ocfg = cfg.optimizer;
    ocfg.workers = opts.workers;
    ocfg.progress = !opts.quiet;

    const auto t0 = Clock::now();
    OptimizationReport report{.best = grid0};
    YAML::Node body;
    if (cfg.task.kind == TaskKind::kGate) {
        const GateObjective g = gate_objective_for(cfg, mset);
        report = run_gate_synthesis(model, mset, grid0, g, ocfg, cfg.method);
        if (model.dim() <= kChannelReportMaxDim) {
            const CMatrix channel =
                oracle::noisy_channel(model, report.best, std::vector<double>(model.num_uncertainties(), 0.0));
            body["f_agf"] = avg_gate_fidelity(channel, cfg.task.target_matrix);
            body["f_pro"] = process_fidelity(channel, cfg.task.target_matrix);
        }
    } else {
        const CMatrix target = state_target(cfg, model.dim());
        const ControlProblem problem =
            state_problem(model, mset, ground_state(model.dim()), state_objective(cfg, mset, target));
        report = cfg.method == Method::kGrape ? run_grape(problem, grid0, ocfg)
                                              : run_stgrape(problem, grid0, ocfg);
    }
    const double wall = seconds_since(t0);

    body["method"] = std::string(to_string(report.method));
    body["backend"] = std::string(to_string(report.backend));
    body["stop"] = std::string(to_string(report.stop));
    body["iterations"] = report.iterations;
    body["evaluations"] = report.evaluations;
    body["best_value"] = report.best_value;
    body["history"] = flow(report.history);
    YAML::Node cks(YAML::NodeType::Sequence);
    for (const Checkpoint& c : report.checkpoints) {
        YAML::Node n;
        n["iteration"] = c.iteration;
        n["true_value"] = c.true_value;
        n["approx_value"] = c.approx_value;
        n.SetStyle(YAML::EmitterStyle::Flow);
        cks.push_back(n);
    }
    body["checkpoints"] = cks;
    body["pulse_file"] = "pulse.csv";
    write_report(opts.out_dir / "report.yaml", config, "optimize", body);
    write_text(opts.out_dir / "pulse.csv", comment_header(config, "optimize") + pulse_csv(report.best));
    YAML::Node t;
    t["timings"] = times_node(report.times);
    t["timings"]["wall_s"] = wall;
    write_report(opts.out_dir / "timings.yaml", config, "optimize", t);
    if (!opts.quiet) {
        std::fprintf(stderr, "stop=%s iterations=%zu J*=%.10f\n", std::string(to_string(report.stop)).c_str(),
                     report.iterations, report.best_value);
    }
}

void cmd_sweep(const RunConfig& cfg, const RunOptions& opts) {
    if (!opts.pulse) throw ConfigError("--pulse", "sweep needs a pulse file");
    ensure_dir(opts.out_dir);
    const YAML::Node config = to_yaml(cfg, Command::kSweep);
    const OpenSystemModel model = build_model(cfg);
    const ControlGrid grid =
        read_pulse(*opts.pulse, model.num_controls(), build_bounds(cfg), cfg.control.dt_ns);
    NoiseDistribution dist;
    dist.kind = cfg.sweep.distribution;
    dist.sigmas = sigmas_rad(cfg.sweep.sigma_mhz, model.num_uncertainties(), "sweep.sigma_mhz");
    dist.seed = cfg.sweep.seed;

    oracle::NoiseSweepResult res;
    if (cfg.task.kind == TaskKind::kGate) {
        res = oracle::noise_sweep(model, grid, cfg.task.target_matrix, dist, cfg.sweep.count,
                                  cfg.sweep.thresholds, opts.workers);
    } else {
        const CMatrix rho0 = ground_state(model.dim());
        const CMatrix target = state_target(cfg, model.dim());
        res.samples = dist.sample(cfg.sweep.count);
        res.fidelities.resize(res.samples.size());
        parallel_for(res.samples.size(), opts.workers, [&](std::size_t i) {
            res.fidelities[i] = overlap(oracle::propagate_noisy_exact(model, grid, res.samples[i], rho0), target);
        });
        std::vector<double> errors;
        for (double f : res.fidelities) errors.push_back(1.0 - f);
        double sum = 0.0;
        for (double e : errors) sum += e;
        res.mean_error = sum / double(errors.size());
        res.thresholds = cfg.sweep.thresholds;
        res.cdf = oracle::error_cdf(errors, res.thresholds);
    }

    std::ostringstream samples;
    samples << comment_header(config, "sweep") << "sample";
    for (std::size_t j = 0; j < model.num_uncertainties(); ++j) samples << ",eps_" << j + 1 << "_mhz";
    samples << ",fidelity,error\n";
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
        samples << i;
        for (double e : res.samples[i]) samples << "," << num(rad_per_ns_to_mhz(e));
        samples << "," << num(res.fidelities[i]) << "," << num(1.0 - res.fidelities[i]) << "\n";
    }
    write_text(opts.out_dir / "sweep_samples.csv", samples.str());

    std::ostringstream cdf;
    cdf << comment_header(config, "sweep") << "threshold,cdf\n";
    for (std::size_t i = 0; i < res.thresholds.size(); ++i) {
        cdf << num(res.thresholds[i]) << "," << num(res.cdf[i]) << "\n";
    }
    write_text(opts.out_dir / "sweep_cdf.csv", cdf.str());

    YAML::Node body;
    body["metric"] = cfg.task.kind == TaskKind::kGate ? "f_agf" : "overlap";
    body["count"] = res.samples.size();
    body["mean_error"] = res.mean_error;
    body["thresholds"] = flow(res.thresholds);
    body["cdf"] = flow(res.cdf);
    write_report(opts.out_dir / "sweep.yaml", config, "sweep", body);
    if (!opts.quiet) std::fprintf(stderr, "mean gate error = %.6e\n", res.mean_error);
}

void cmd_benchmark(const RunConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const YAML::Node config = to_yaml(cfg, Command::kBenchmark);
    TimingSweep sweep;
    sweep.qubits = cfg.benchmark.qubits;
    sweep.orders = cfg.benchmark.orders;
    sweep.backends = cfg.benchmark.backends;
    sweep.controls = cfg.benchmark.controls;
    sweep.budget_s = cfg.benchmark.budget_s;
    sweep.dt = cfg.control.dt_ns;
    sweep.jxy_mhz = cfg.system.jxy_mhz;
    sweep.t1_us = cfg.system.t1_us;
    sweep.t2_us = cfg.system.t2_us;
    sweep.bound_mhz = cfg.control.bound_mhz.front();
    sweep.seed = cfg.control.seed;
    sweep.propagation = cfg.optimizer.propagation;

    std::ostringstream csv;
    csv << comment_header(config, "benchmark") << "backend,n_q,n,d_aug,median_ns,mean_ns,samples\n";
    for (const StepTiming& t : time_step_sweep(sweep)) {
        csv << to_string(t.backend) << "," << t.num_qubits << "," << t.order << "," << t.aug_dim << ","
            << num(t.median_ns) << "," << num(t.mean_ns) << "," << t.samples << "\n";
        if (!opts.quiet) {
            std::fprintf(stderr, "%-8s n_q=%zu n=%zu d_aug=%zu median=%.4g ns (%zu samples)\n",
                         std::string(to_string(t.backend)).c_str(), t.num_qubits, t.order, t.aug_dim,
                         t.median_ns, t.samples);
        }
    }
    write_text(opts.out_dir / "benchmark.csv", csv.str());
}

}  // namespace stgrape::cli
