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

#include <filesystem>
#include <string>

#include <yaml-cpp/yaml.h>

#include "config.hpp"

namespace stgrape::cli {

inline constexpr const char* kUnitsNote =
    "amplitudes in MHz (u / 2pi); internally rad/ns with u[rad/ns] = 2pi * 1e-3 * u[MHz]; time in ns";

double rad_per_ns_to_mhz(double rad);

/// "# "-prefixed header lines carrying the command, units and resolved config.
std::string comment_header(const YAML::Node& config, const std::string& command);

/// YAML document with the resolved config under "config" and `body` merged in.
void write_report(const std::filesystem::path& path, const YAML::Node& config,
                  const std::string& command, const YAML::Node& body);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Header "t_ns,u_1,...,u_nc", one row per interval (start time), MHz.
std::string pulse_csv(const ControlGrid& grid);

/// Reads a pulse CSV ('#' lines skipped). Row k must have t_ns = k * dt and
/// amplitudes within `bounds`; the row count sets the number of steps.
ControlGrid read_pulse(const std::filesystem::path& path, std::size_t channels,
                       const std::vector<AmplitudeBounds>& bounds, double dt);

/// Shortest round-trip decimal form.
std::string num(double v);

}  // namespace stgrape::cli
