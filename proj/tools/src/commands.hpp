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
#include <filesystem>
#include <optional>

#include "config.hpp"

namespace stgrape::cli {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::size_t workers = 1;
    bool quiet = false;
    std::optional<std::filesystem::path> pulse;
};

void cmd_simulate(const RunConfig& cfg, const RunOptions& opts);
void cmd_optimize(const RunConfig& cfg, const RunOptions& opts);
void cmd_sweep(const RunConfig& cfg, const RunOptions& opts);
void cmd_benchmark(const RunConfig& cfg, const RunOptions& opts);

}  // namespace stgrape::cli
