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

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stgrape/oracle.hpp"

namespace stgrape::cli {

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

template <typename T>
T convert(const YAML::Node& node, const std::string& field, const char* what) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(field, std::string("expected ") + what);
    }
}

std::size_t to_count(const YAML::Node& node, const std::string& field) {
    const auto v = convert<long long>(node, field, "a non-negative integer");
    if (v < 0) throw ConfigError(field, "must be non-negative");
    return static_cast<std::size_t>(v);
}

/// A mapping whose keys are checked off as they are read.
class Section {
   public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_, "expected a mapping");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
    }
    YAML::Node get(const std::string& key) {
        if (!has(key)) throw ConfigError(field(key), "missing required field");
        return node_[key];
    }
    std::string field(const std::string& key) const { return join(path_, key); }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        if (!has(key)) {
            if (def) return *def;
            throw ConfigError(field(key), "missing required field");
        }
        const double v = convert<double>(node_[key], field(key), "a number");
        if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite");
        return v;
    }
    std::size_t count(const std::string& key, std::optional<std::size_t> def = std::nullopt) {
        if (!has(key)) {
            if (def) return *def;
            throw ConfigError(field(key), "missing required field");
        }
        return to_count(node_[key], field(key));
    }
    std::string text(const std::string& key, std::optional<std::string> def = std::nullopt) {
        if (!has(key)) {
            if (def) return *def;
            throw ConfigError(field(key), "missing required field");
        }
        return convert<std::string>(node_[key], field(key), "a string");
    }
    /// A scalar or a list of numbers.
    std::vector<double> numbers(const std::string& key, std::vector<double> def) {
        if (!has(key)) return def;
        const YAML::Node n = node_[key];
        if (n.IsScalar()) return {number(key)};
        if (!n.IsSequence()) throw ConfigError(field(key), "expected a number or a list of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            out.push_back(convert<double>(n[i], field(key) + "[" + std::to_string(i) + "]", "a number"));
        }
        return out;
    }
    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> def) {
        if (!has(key)) return def;
        const YAML::Node n = node_[key];
        if (n.IsScalar()) return {count(key)};
        if (!n.IsSequence()) throw ConfigError(field(key), "expected an integer or a list");
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            out.push_back(to_count(n[i], field(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    }
    std::vector<std::string> texts(const std::string& key, std::vector<std::string> def) {
        if (!has(key)) return def;
        const YAML::Node n = node_[key];
        if (n.IsScalar()) return {text(key)};
        if (!n.IsSequence()) throw ConfigError(field(key), "expected a string or a list");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            out.push_back(convert<std::string>(n[i], field(key) + "[" + std::to_string(i) + "]", "a string"));
        }
        return out;
    }
    Section child(const std::string& key) {
        seen_.insert(key);
        return Section(node_ && node_.IsMap() ? node_[key] : YAML::Node(), field(key));
    }
    bool present() const { return node_ && !node_.IsNull(); }

    /// Rejects keys that were never read.
    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) throw ConfigError(field(key), "unknown field");
        }
    }

   private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename Parse>
auto parse_enum(Section& s, const std::string& key, const std::string& def, Parse parse) {
    const std::string value = s.text(key, def);
    try {
        return parse(value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(s.field(key), e.what());
    }
}

std::vector<Backend> parse_backends(Section& s, const std::string& key,
                                    std::vector<std::string> def) {
    std::vector<Backend> out;
    for (const std::string& name : s.texts(key, std::move(def))) {
        try {
            out.push_back(parse_backend(name));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(s.field(key), e.what());
        }
    }
    if (out.empty()) throw ConfigError(s.field(key), "needs at least one backend");
    return out;
}

CMatrix parse_matrix(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence() || n.size() == 0) throw ConfigError(field, "expected a list of rows");
    const auto rows = static_cast<Eigen::Index>(n.size());
    CMatrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const YAML::Node row = n[static_cast<std::size_t>(r)];
        const std::string rf = field + "[" + std::to_string(r) + "]";
        if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw ConfigError(rf, "expected a row of " + std::to_string(rows) + " entries");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            const YAML::Node e = row[static_cast<std::size_t>(c)];
            const std::string ef = rf + "[" + std::to_string(c) + "]";
            if (e.IsSequence()) {
                if (e.size() != 2) throw ConfigError(ef, "expected [re, im]");
                m(r, c) = Complex(convert<double>(e[0], ef, "a number"),
                                  convert<double>(e[1], ef, "a number"));
            } else {
                m(r, c) = convert<double>(e, ef, "a number or [re, im]");
            }
        }
    }
    return m;
}

std::string basis_name(BasisKind k) { return std::string(to_string(k)); }

}  // namespace

RunConfig load_config(const YAML::Node& root, Command command,
                      std::optional<std::uint64_t> seed_override) {
    if (!root || !root.IsMap()) throw ConfigError("<root>", "expected a mapping");
    Section top(root, "");
    RunConfig cfg;
    const bool needs_system = command != Command::kBenchmark;

    Section sys = top.child("system");
    if (needs_system) {
        cfg.system.qubits = sys.count("qubits");
        if (cfg.system.qubits < 1) throw ConfigError("system.qubits", "must be >= 1");
    } else {
        cfg.system.qubits = sys.count("qubits", 2);
    }
    cfg.system.jxy_mhz = sys.number("jxy_mhz", 30.0);
    cfg.system.t1_us = sys.number("t1_us", 30.0);
    cfg.system.t2_us = sys.number("t2_us", 30.0);
    if (!(cfg.system.t1_us > 0.0)) throw ConfigError("system.t1_us", "must be positive");
    if (!(cfg.system.t2_us > 0.0)) throw ConfigError("system.t2_us", "must be positive");
    cfg.system.uncertainty = parse_enum(sys, "uncertainty", "edges", parse_uncertainty_kind);
    if (cfg.system.uncertainty == UncertaintyKind::kCouplings && cfg.system.qubits < 3 && needs_system) {
        throw ConfigError("system.uncertainty", "couplings need at least 3 qubits");
    }
    sys.finish();

    const std::size_t channels = 2 * cfg.system.qubits;
    Section ctl = top.child("control");
    const bool needs_grid = command == Command::kSimulate || command == Command::kOptimize ||
                            command == Command::kSweep;
    cfg.control.dt_ns = needs_grid ? ctl.number("dt_ns") : ctl.number("dt_ns", 0.5);
    if (!(cfg.control.dt_ns > 0.0)) throw ConfigError("control.dt_ns", "must be positive");
    const bool needs_steps = command == Command::kSimulate || command == Command::kOptimize;
    cfg.control.steps = needs_steps ? ctl.count("steps") : ctl.count("steps", 0);
    if (needs_steps && cfg.control.steps == 0) throw ConfigError("control.steps", "must be >= 1");
    cfg.control.bound_mhz = ctl.numbers("bound_mhz", {100.0});
    if (cfg.control.bound_mhz.size() == 1) cfg.control.bound_mhz.assign(channels, cfg.control.bound_mhz[0]);
    if (cfg.control.bound_mhz.size() != channels) {
        throw ConfigError("control.bound_mhz",
                          "expected one value or " + std::to_string(channels) + " (one per channel)");
    }
    for (double b : cfg.control.bound_mhz) {
        if (!(b > 0.0)) throw ConfigError("control.bound_mhz", "bounds must be positive");
    }
    cfg.control.seed = ctl.count("seed", 0);
    ctl.finish();

    const std::size_t m = cfg.system.uncertainty == UncertaintyKind::kNone ? 0
                          : cfg.system.uncertainty == UncertaintyKind::kEdges ? 2
                                                                               : 4;
    Section rob = top.child("robustness");
    cfg.robustness.order = rob.count("order", 0);
    cfg.robustness.lambdas = rob.numbers("lambda", {1.0});
    if (cfg.robustness.lambdas.size() == 1) {
        cfg.robustness.lambdas.assign(std::max<std::size_t>(cfg.robustness.order, 1), cfg.robustness.lambdas[0]);
    }
    if (cfg.robustness.order > 0 && cfg.robustness.lambdas.size() != cfg.robustness.order) {
        throw ConfigError("robustness.lambda", "expected one value or one per order 1..n");
    }
    for (double l : cfg.robustness.lambdas) {
        if (l < 0.0) throw ConfigError("robustness.lambda", "must be non-negative");
    }
    cfg.robustness.sigma_mhz = rob.numbers("sigma_mhz", {});
    rob.finish();

    Section task = top.child("task");
    const bool needs_task = command == Command::kOptimize || command == Command::kSweep;
    if (needs_task && !task.present()) throw ConfigError("task", "missing required section");
    if (needs_task) {
        const std::string kind = task.text("kind");
        if (kind == "gate") {
            cfg.task.kind = TaskKind::kGate;
        } else if (kind == "state_prep") {
            cfg.task.kind = TaskKind::kStatePrep;
        } else {
            throw ConfigError("task.kind", "expected gate or state_prep, got '" + kind + "'");
        }
        cfg.task.target = task.text("target");
        const auto d = static_cast<Eigen::Index>(std::size_t{1} << cfg.system.qubits);
        if (cfg.task.target == "matrix") {
            cfg.task.target_matrix = parse_matrix(task.get("matrix"), "task.matrix");
            if (cfg.task.target_matrix.rows() != d) {
                throw ConfigError("task.matrix", "dimension does not match system.qubits");
            }
            if (!is_unitary(cfg.task.target_matrix, 1e-8)) {
                throw ConfigError("task.matrix", "target is not unitary");
            }
        } else {
            try {
                cfg.task.target_matrix = gate_preset(cfg.task.target, cfg.system.qubits);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("task.target", e.what());
            }
        }
        cfg.task.basis = parse_enum(task, "basis", "d_plus_one", parse_basis_kind);
        cfg.task.weights = task.numbers("weights", {});
        const std::string objective = task.text("objective", "robust");
        if (objective == "average") {
            cfg.task.average = true;
            if (cfg.robustness.order < 2) {
                throw ConfigError("task.objective", "the average objective needs robustness.order >= 2");
            }
            if (cfg.robustness.sigma_mhz.empty()) {
                throw ConfigError("robustness.sigma_mhz", "missing required field");
            }
        } else if (objective != "robust") {
            throw ConfigError("task.objective", "expected robust or average, got '" + objective + "'");
        }
    }
    task.finish();

    Section opt = top.child("optimizer");
    cfg.method = parse_enum(opt, "method", "stgrape", parse_method);
    cfg.optimizer.exact_backend = parse_enum(opt, "backend", "expm", parse_backend);
    if (cfg.optimizer.exact_backend == Backend::kTrotter) {
        throw ConfigError("optimizer.backend", "the exact backend must be expm or ode");
    }
    cfg.optimizer.max_iters = opt.count("max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.lbfgs_memory = opt.count("lbfgs_memory", cfg.optimizer.lbfgs_memory);
    cfg.optimizer.monitor_interval = opt.count("monitor_interval", cfg.optimizer.monitor_interval);
    if (cfg.optimizer.monitor_interval == 0) throw ConfigError("optimizer.monitor_interval", "must be >= 1");
    if (cfg.optimizer.lbfgs_memory == 0) throw ConfigError("optimizer.lbfgs_memory", "must be >= 1");
    cfg.optimizer.learning_rate = opt.number("learning_rate", cfg.optimizer.learning_rate);
    cfg.optimizer.gradient_tolerance = opt.number("gradient_tolerance", cfg.optimizer.gradient_tolerance);
    cfg.optimizer.ftol = opt.number("ftol", cfg.optimizer.ftol);
    cfg.optimizer.objective_target = opt.number("objective_target", cfg.optimizer.objective_target);
    PropagationOptions& prop = cfg.optimizer.propagation;
    prop.ode_step_scale = opt.number("ode_step_scale", prop.ode_step_scale);
    if (!(prop.ode_step_scale > 0.0)) throw ConfigError("optimizer.ode_step_scale", "must be positive");
    prop.ode_substeps = opt.count("ode_substeps", prop.ode_substeps);
    prop.supermatrix_cap = opt.count("supermatrix_cap", prop.supermatrix_cap);
    opt.finish();
    cfg.optimizer.seed = cfg.control.seed;

    Section sim = top.child("simulate");
    cfg.simulate.backends = parse_backends(sim, "backends", {"expm", "trotter"});
    cfg.simulate.initial = sim.text("initial", "ones");
    if (cfg.simulate.initial != "ones" && cfg.simulate.initial != "ground" &&
        cfg.simulate.initial != "mixed") {
        throw ConfigError("simulate.initial", "expected ones, ground or mixed");
    }
    sim.finish();

    Section sw = top.child("sweep");
    cfg.sweep.count = sw.count("count", cfg.sweep.count);
    if (command == Command::kSweep && cfg.sweep.count == 0) throw ConfigError("sweep.count", "must be >= 1");
    cfg.sweep.distribution = parse_enum(sw, "distribution", "normal", parse_noise_kind);
    cfg.sweep.sigma_mhz = sw.numbers(
        "sigma_mhz", cfg.robustness.sigma_mhz.empty() ? std::vector<double>{2.0} : cfg.robustness.sigma_mhz);
    cfg.sweep.seed = sw.count("seed", cfg.control.seed);
    cfg.sweep.thresholds = sw.numbers("thresholds", oracle::kDefaultErrorThresholds);
    if (!std::is_sorted(cfg.sweep.thresholds.begin(), cfg.sweep.thresholds.end())) {
        throw ConfigError("sweep.thresholds", "must be sorted ascending");
    }
    sw.finish();
    if (needs_system) {
        sigmas_rad(cfg.sweep.sigma_mhz, m, "sweep.sigma_mhz");
        if (!cfg.robustness.sigma_mhz.empty()) sigmas_rad(cfg.robustness.sigma_mhz, m, "robustness.sigma_mhz");
    }

    Section bench = top.child("benchmark");
    cfg.benchmark.qubits = bench.counts("qubits", cfg.benchmark.qubits);
    for (std::size_t q : cfg.benchmark.qubits) {
        if (q < 1) throw ConfigError("benchmark.qubits", "must be >= 1");
    }
    cfg.benchmark.orders = bench.counts("orders", cfg.benchmark.orders);
    cfg.benchmark.backends = parse_backends(bench, "backends", {"expm", "ode", "trotter"});
    cfg.benchmark.controls = bench.count("controls", cfg.benchmark.controls);
    if (cfg.benchmark.controls == 0) throw ConfigError("benchmark.controls", "must be >= 1");
    cfg.benchmark.budget_s = bench.number("budget_s", cfg.benchmark.budget_s);
    bench.finish();

    top.finish();

    if (seed_override) {
        cfg.control.seed = *seed_override;
        cfg.optimizer.seed = *seed_override;
        cfg.sweep.seed = *seed_override;
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path, Command command,
                           std::optional<std::uint64_t> seed_override) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError("--config", "cannot read '" + path + "'");
    } catch (const YAML::ParserException& e) {
        throw ConfigError("--config", std::string("parse error: ") + e.what());
    }
    return load_config(root, command, seed_override);
}

YAML::Node to_yaml(const RunConfig& cfg, Command command) {
    YAML::Node root;
    auto seq = [](const auto& v) {
        YAML::Node n(YAML::NodeType::Sequence);
        for (const auto& x : v) n.push_back(x);
        n.SetStyle(YAML::EmitterStyle::Flow);
        return n;
    };
    YAML::Node sys;
    sys["qubits"] = cfg.system.qubits;
    sys["jxy_mhz"] = cfg.system.jxy_mhz;
    sys["t1_us"] = cfg.system.t1_us;
    sys["t2_us"] = cfg.system.t2_us;
    sys["uncertainty"] = std::string(to_string(cfg.system.uncertainty));
    root["system"] = sys;

    YAML::Node ctl;
    ctl["dt_ns"] = cfg.control.dt_ns;
    ctl["steps"] = cfg.control.steps;
    ctl["bound_mhz"] = seq(cfg.control.bound_mhz);
    ctl["seed"] = cfg.control.seed;
    root["control"] = ctl;

    YAML::Node rob;
    rob["order"] = cfg.robustness.order;
    rob["lambda"] = seq(cfg.robustness.lambdas);
    rob["sigma_mhz"] = seq(cfg.robustness.sigma_mhz);
    root["robustness"] = rob;

    if (command == Command::kOptimize || command == Command::kSweep) {
        YAML::Node task;
        task["kind"] = cfg.task.kind == TaskKind::kGate ? "gate" : "state_prep";
        task["target"] = cfg.task.target;
        if (cfg.task.target == "matrix") {
            YAML::Node rows(YAML::NodeType::Sequence);
            for (Eigen::Index r = 0; r < cfg.task.target_matrix.rows(); ++r) {
                YAML::Node row(YAML::NodeType::Sequence);
                for (Eigen::Index c = 0; c < cfg.task.target_matrix.cols(); ++c) {
                    row.push_back(seq(std::vector<double>{cfg.task.target_matrix(r, c).real(),
                                                          cfg.task.target_matrix(r, c).imag()}));
                }
                rows.push_back(row);
            }
            task["matrix"] = rows;
        }
        task["basis"] = basis_name(cfg.task.basis);
        task["weights"] = seq(cfg.task.weights);
        task["objective"] = cfg.task.average ? "average" : "robust";
        root["task"] = task;
    }
    if (command == Command::kOptimize) {
        YAML::Node opt;
        opt["method"] = std::string(to_string(cfg.method));
        opt["backend"] = std::string(to_string(cfg.optimizer.exact_backend));
        opt["max_iters"] = cfg.optimizer.max_iters;
        opt["lbfgs_memory"] = cfg.optimizer.lbfgs_memory;
        opt["monitor_interval"] = cfg.optimizer.monitor_interval;
        opt["learning_rate"] = cfg.optimizer.learning_rate;
        opt["gradient_tolerance"] = cfg.optimizer.gradient_tolerance;
        opt["ftol"] = cfg.optimizer.ftol;
        opt["objective_target"] = cfg.optimizer.objective_target;
        opt["ode_step_scale"] = cfg.optimizer.propagation.ode_step_scale;
        opt["ode_substeps"] = cfg.optimizer.propagation.ode_substeps;
        opt["supermatrix_cap"] = cfg.optimizer.propagation.supermatrix_cap;
        root["optimizer"] = opt;
    }
    if (command == Command::kSimulate) {
        std::vector<std::string> names;
        for (Backend b : cfg.simulate.backends) names.emplace_back(to_string(b));
        root["simulate"]["backends"] = seq(names);
        root["simulate"]["initial"] = cfg.simulate.initial;
        root["optimizer"]["ode_step_scale"] = cfg.optimizer.propagation.ode_step_scale;
        root["optimizer"]["ode_substeps"] = cfg.optimizer.propagation.ode_substeps;
        root["optimizer"]["supermatrix_cap"] = cfg.optimizer.propagation.supermatrix_cap;
    }
    if (command == Command::kSweep) {
        YAML::Node sw;
        sw["count"] = cfg.sweep.count;
        sw["distribution"] = std::string(to_string(cfg.sweep.distribution));
        sw["sigma_mhz"] = seq(cfg.sweep.sigma_mhz);
        sw["seed"] = cfg.sweep.seed;
        sw["thresholds"] = seq(cfg.sweep.thresholds);
        root["sweep"] = sw;
    }
    if (command == Command::kBenchmark) {
        YAML::Node b;
        b["qubits"] = seq(cfg.benchmark.qubits);
        b["orders"] = seq(cfg.benchmark.orders);
        std::vector<std::string> names;
        for (Backend x : cfg.benchmark.backends) names.emplace_back(to_string(x));
        b["backends"] = seq(names);
        b["controls"] = cfg.benchmark.controls;
        b["budget_s"] = cfg.benchmark.budget_s;
        root["benchmark"] = b;
    }
    return root;
}

OpenSystemModel build_model(const RunConfig& cfg) {
    return attach_uncertainties(build_spin_chain(cfg.system.qubits, cfg.system.jxy_mhz,
                                                 cfg.system.t1_us, cfg.system.t2_us),
                                cfg.system.uncertainty);
}

MultiIndexSet build_orders(const RunConfig& cfg, const OpenSystemModel& model) {
    return enumerate_orders(model.num_uncertainties(), cfg.robustness.order);
}

std::vector<AmplitudeBounds> build_bounds(const RunConfig& cfg) {
    std::vector<AmplitudeBounds> out;
    for (double b : cfg.control.bound_mhz) {
        const double r = mhz_to_rad_per_ns(b);
        out.push_back({-r, r});
    }
    return out;
}

ControlGrid initial_grid(const RunConfig& cfg, const OpenSystemModel& model) {
    return random_grid(model.num_controls(), cfg.control.steps, cfg.control.dt_ns,
                       build_bounds(cfg), cfg.control.seed);
}

std::vector<double> sigmas_rad(const std::vector<double>& mhz, std::size_t m,
                               const std::string& field) {
    std::vector<double> v = mhz;
    if (v.size() == 1) v.assign(m, v[0]);
    if (v.size() != m) {
        throw ConfigError(field, "expected one value or " + std::to_string(m) + " (one per uncertainty)");
    }
    for (double& x : v) {
        if (x < 0.0) throw ConfigError(field, "must be non-negative");
        x = mhz_to_rad_per_ns(x);
    }
    return v;
}

}  // namespace stgrape::cli
