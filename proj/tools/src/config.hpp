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
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "stgrape/model.hpp"
#include "stgrape/objective.hpp"
#include "stgrape/optimize.hpp"
#include "stgrape/propagate.hpp"

namespace stgrape::cli {

/// Invalid or missing configuration; `field` is the dotted path.
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

   private:
    std::string field_;
};

struct SystemConfig {
    std::size_t qubits = 0;
    double jxy_mhz = 30.0;
    double t1_us = 30.0;
    double t2_us = 30.0;
    UncertaintyKind uncertainty = UncertaintyKind::kEdges;
};

struct ControlConfig {
    double dt_ns = 0.0;
    std::size_t steps = 0;
    std::vector<double> bound_mhz;  // one per channel after resolution
    std::uint64_t seed = 0;
};

struct RobustnessConfig {
    std::size_t order = 0;
    std::vector<double> lambdas;  // per total degree 1..order
    std::vector<double> sigma_mhz;
};

enum class TaskKind { kStatePrep, kGate };

struct TaskConfig {
    TaskKind kind = TaskKind::kGate;
    std::string target = "cnot";  // preset name, or "matrix"
    CMatrix target_matrix;        // resolved unitary
    BasisKind basis = BasisKind::kDPlusOne;
    std::vector<double> weights;  // empty: uniform
    bool average = false;         // J~ objective instead of penalized J
};

struct SimulateConfig {
    std::vector<Backend> backends = {Backend::kExpm, Backend::kTrotter};
    /// ones (all entries 1/d), ground (|0..0><0..0|) or mixed (I/d).
    std::string initial = "ones";
};

struct SweepConfig {
    std::size_t count = 500;
    NoiseKind distribution = NoiseKind::kNormal;
    std::vector<double> sigma_mhz;
    std::uint64_t seed = 0;
    std::vector<double> thresholds;
};

struct BenchmarkConfig {
    std::vector<std::size_t> qubits = {2, 3, 4, 5};
    std::vector<std::size_t> orders = {1};
    std::vector<Backend> backends = {Backend::kExpm, Backend::kOde, Backend::kTrotter};
    std::size_t controls = 10;
    double budget_s = 0.0;
};

struct RunConfig {
    SystemConfig system;
    ControlConfig control;
    RobustnessConfig robustness;
    TaskConfig task;
    Method method = Method::kStGrape;
    OptimizerConfig optimizer;
    SimulateConfig simulate;
    SweepConfig sweep;
    BenchmarkConfig benchmark;
};

enum class Command { kSimulate, kOptimize, kSweep, kBenchmark };

/// Parses and validates a config for `command`; unknown keys are errors.
/// `seed_override` replaces every seed in the file.
RunConfig load_config(const YAML::Node& root, Command command,
                      std::optional<std::uint64_t> seed_override);
RunConfig load_config_file(const std::string& path, Command command,
                           std::optional<std::uint64_t> seed_override);

/// Fully resolved config with every default spelled out.
YAML::Node to_yaml(const RunConfig& cfg, Command command);

OpenSystemModel build_model(const RunConfig& cfg);
MultiIndexSet build_orders(const RunConfig& cfg, const OpenSystemModel& model);
std::vector<AmplitudeBounds> build_bounds(const RunConfig& cfg);
/// Random initial guess from control.seed.
ControlGrid initial_grid(const RunConfig& cfg, const OpenSystemModel& model);
/// rad/ns per uncertainty operator, from the given MHz list (one value is
/// broadcast to every operator).
std::vector<double> sigmas_rad(const std::vector<double>& mhz, std::size_t m,
                               const std::string& field);

}  // namespace stgrape::cli
