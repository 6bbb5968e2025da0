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

#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stgrape::cli {

double rad_per_ns_to_mhz(double rad) { return rad / (2.0 * std::numbers::pi * 1e-3); }

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// yaml-cpp stores doubles with max_digits10; rewrite numeric scalars in their
// shortest round-trip form.
YAML::Node canonical(const YAML::Node& n) {
    if (n.IsScalar()) {
        const std::string& s = n.Scalar();
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size() &&
            s.find_first_of(".eE") != std::string::npos) {
            return YAML::Node(num(v));
        }
        return YAML::Node(s);
    }
    if (n.IsSequence()) {
        YAML::Node out(YAML::NodeType::Sequence);
        for (const auto& x : n) out.push_back(canonical(x));
        out.SetStyle(n.Style());
        return out;
    }
    if (n.IsMap()) {
        YAML::Node out(YAML::NodeType::Map);
        for (const auto& kv : n) out[kv.first.as<std::string>()] = canonical(kv.second);
        out.SetStyle(n.Style());
        return out;
    }
    return YAML::Node(n.Type());
}

}  // namespace

std::string comment_header(const YAML::Node& config, const std::string& command) {
    YAML::Emitter em;
    em << canonical(config);
    std::ostringstream out;
    out << "# stgrape " << command << "\n# units: " << kUnitsNote << "\n# config:\n";
    std::istringstream lines(em.c_str());
    for (std::string line; std::getline(lines, line);) out << "#   " << line << "\n";
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_report(const std::filesystem::path& path, const YAML::Node& config,
                  const std::string& command, const YAML::Node& body) {
    YAML::Node doc;
    doc["command"] = command;
    doc["units"] = kUnitsNote;
    doc["seed"] = config["control"]["seed"].as<std::uint64_t>();
    doc["config"] = config;
    for (const auto& kv : body) doc[kv.first.as<std::string>()] = kv.second;
    YAML::Emitter em;
    em << canonical(doc);
    write_text(path, std::string(em.c_str()) + "\n");
}

std::string pulse_csv(const ControlGrid& grid) {
    std::ostringstream out;
    out << "t_ns";
    for (std::size_t c = 0; c < grid.channels(); ++c) out << ",u_" << c + 1;
    out << "\n";
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        out << num(grid.dt() * double(k));
        for (std::size_t c = 0; c < grid.channels(); ++c) {
            out << "," << num(rad_per_ns_to_mhz(grid.amplitude(c, k)));
        }
        out << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& cell, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != cell.size() || !std::isfinite(v)) {
        throw ConfigError("pulse", where + ": '" + cell + "' is not a number");
    }
    return v;
}

}  // namespace

ControlGrid read_pulse(const std::filesystem::path& path, std::size_t channels,
                       const std::vector<AmplitudeBounds>& bounds, double dt) {
    std::ifstream f(path);
    if (!f) throw ConfigError("pulse", "cannot read '" + path.string() + "'");
    std::string line;
    bool header = false;
    std::vector<double> times;
    std::vector<double> values;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split(line);
        const std::string where = "line " + std::to_string(lineno);
        if (!header) {
            if (cells.size() != channels + 1 || cells[0] != "t_ns") {
                throw ConfigError("pulse", "expected header t_ns,u_1,...,u_" + std::to_string(channels) +
                                               " for " + std::to_string(channels) + " channels");
            }
            header = true;
            continue;
        }
        if (cells.size() != channels + 1) {
            throw ConfigError("pulse", where + ": expected " + std::to_string(channels + 1) + " columns");
        }
        times.push_back(parse_double(cells[0], where));
        for (std::size_t c = 0; c < channels; ++c) {
            values.push_back(mhz_to_rad_per_ns(parse_double(cells[c + 1], where)));
        }
    }
    if (!header) throw ConfigError("pulse", "missing header row");
    if (times.empty()) throw ConfigError("pulse", "no amplitude rows");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - dt * double(k)) > 1e-9 * std::max(1.0, dt * double(k))) {
            throw ConfigError("pulse", "row " + std::to_string(k + 1) + ": t_ns must be " +
                                           num(dt * double(k)) + " (control.dt_ns = " + num(dt) + ")");
        }
    }
    // MHz <-> rad/ns round trips can land an ulp outside a bound.
    for (std::size_t i = 0; i < values.size(); ++i) {
        const AmplitudeBounds& b = bounds[i % channels];
        const double slack = 1e-12 * std::max(std::abs(b.lo), std::abs(b.hi));
        if (values[i] > b.hi && values[i] <= b.hi + slack) values[i] = b.hi;
        if (values[i] < b.lo && values[i] >= b.lo - slack) values[i] = b.lo;
    }
    ControlGrid grid(dt, times.size(), channels, bounds);
    try {
        grid.set_flat(values);
    } catch (const std::out_of_range&) {
        throw ConfigError("pulse", "amplitudes exceed control.bound_mhz");
    }
    return grid;
}

}  // namespace stgrape::cli
