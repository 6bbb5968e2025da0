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

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Args {
    std::string config;
    std::string out = ".";
    std::size_t workers = 1;
    std::optional<std::uint64_t> seed;
    std::string pulse;
    bool quiet = false;
};

CLI::App* add_command(CLI::App& app, const char* name, const char* help, Args& args, bool pulse,
                      bool pulse_required) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "YAML run configuration")->required();
    sub->add_option("--out", args.out, "output directory (created if missing)");
    sub->add_option("--workers", args.workers, "worker threads for parallel sections")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", args.seed, "overrides every seed in the config");
    sub->add_flag("--quiet", args.quiet, "no progress output on stderr");
    if (pulse) {
        auto* opt = sub->add_option("--pulse", args.pulse, "pulse CSV (t_ns,u_1,...) in MHz");
        if (pulse_required) opt->required();
    }
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace stgrape::cli;
    CLI::App app{"Robust open-system pulse optimization.\n"
                 "Control amplitudes are given in MHz (u / 2pi) and converted to rad/ns\n"
                 "internally: u[rad/ns] = 2pi * 1e-3 * u[MHz]. Times are in ns.\n"
                 "Exit codes: 0 success, 1 other error, 2 invalid configuration or\n"
                 "arguments, 3 numerical failure (non-finite objective)."};
    app.require_subcommand(1);
    Args args;
    CLI::App* sim = add_command(app, "simulate", "propagate a pulse with each configured backend", args, true, false);
    CLI::App* opt = add_command(app, "optimize", "run GRAPE or ST-GRAPE", args, false, false);
    CLI::App* sweep = add_command(app, "sweep", "sample uncertainties and tabulate the error CDF", args, true, true);
    CLI::App* bench = add_command(app, "benchmark", "time one forward step per backend", args, false, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    Command command = Command::kSimulate;
    if (opt->parsed()) command = Command::kOptimize;
    if (sweep->parsed()) command = Command::kSweep;
    if (bench->parsed()) command = Command::kBenchmark;
    (void)sim;

    RunOptions run;
    run.out_dir = args.out;
    run.workers = args.workers;
    run.quiet = args.quiet;
    if (!args.pulse.empty()) run.pulse = args.pulse;

    try {
        const RunConfig cfg = load_config_file(args.config, command, args.seed);
        switch (command) {
            case Command::kSimulate:
                cmd_simulate(cfg, run);
                break;
            case Command::kOptimize:
                cmd_optimize(cfg, run);
                break;
            case Command::kSweep:
                cmd_sweep(cfg, run);
                break;
            case Command::kBenchmark:
                cmd_benchmark(cfg, run);
                break;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const stgrape::NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitOk;
}
