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
#include <span>
#include <string_view>
#include <vector>

#include "stgrape/tensor.hpp"

namespace stgrape {

// Internal units: time in ns, rates in 1/ns, energies in rad/ns (hbar = 1).

/// f [MHz] -> 2*pi*f*1e-3 [rad/ns]
double mhz_to_rad_per_ns(double mhz);
double rad_per_ns_to_mhz(double rad_per_ns);

struct AmplitudeBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Piecewise-constant control amplitudes on a uniform time grid.
///
/// Amplitudes are stored step-major: value(c, k) lives at flat index
/// k * channels + c, so the amplitudes of one interval are contiguous.
class ControlGrid {
   public:
    ControlGrid(double dt, std::size_t steps, std::size_t channels,
                std::vector<AmplitudeBounds> bounds);

    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    std::size_t channels() const { return channels_; }
    double duration() const { return dt_ * static_cast<double>(steps_); }

    double amplitude(std::size_t channel, std::size_t step) const {
        return values_[step * channels_ + channel];
    }
    /// Throws std::out_of_range when value lies outside the channel bounds.
    void set_amplitude(std::size_t channel, std::size_t step, double value);

    std::span<const double> step_amplitudes(std::size_t step) const {
        return {values_.data() + step * channels_, channels_};
    }
    const std::vector<double>& flat() const { return values_; }
    /// Replaces all amplitudes; every value must respect its channel bounds.
    void set_flat(std::span<const double> values);

    const std::vector<AmplitudeBounds>& bounds() const { return bounds_; }

    /// Same piecewise-constant pulse on a grid with `factor` times as many
    /// intervals of length dt/factor.
    ControlGrid refined(std::size_t factor) const;

   private:
    double dt_;
    std::size_t steps_;
    std::size_t channels_;
    std::vector<AmplitudeBounds> bounds_;
    std::vector<double> values_;
};

/// Uniform random amplitudes in [0.2*lo, 0.2*hi] per channel.
ControlGrid random_grid(std::size_t channels, std::size_t steps, double dt,
                        const std::vector<AmplitudeBounds>& bounds, std::uint64_t seed);

struct LindbladChannel {
    CMatrix op;
    double rate = 0.0;
};

struct SpinChainLayout {
    std::size_t num_qubits = 0;
};

/// Controlled open system: drift, control Hamiltonians, Lindblad channels
/// and additive uncertainty operators. Immutable once built.
class OpenSystemModel {
   public:
    /// Validates dimensions, Hermiticity (1e-12) and non-negative rates;
    /// throws std::invalid_argument on violation.
    OpenSystemModel(CMatrix drift, std::vector<CMatrix> controls,
                    std::vector<LindbladChannel> lindblads, std::vector<CMatrix> uncertainties,
                    std::optional<SpinChainLayout> layout = std::nullopt);

    std::size_t dim() const { return dim_; }
    const CMatrix& drift() const { return drift_; }
    const std::vector<CMatrix>& controls() const { return controls_; }
    const std::vector<LindbladChannel>& lindblads() const { return lindblads_; }
    const std::vector<CMatrix>& uncertainties() const { return uncertainties_; }
    std::size_t num_controls() const { return controls_.size(); }
    std::size_t num_uncertainties() const { return uncertainties_.size(); }
    const std::optional<SpinChainLayout>& spin_chain() const { return layout_; }

    /// H_S = H_0 + sum_c u_c H_c
    CMatrix hamiltonian(std::span<const double> amplitudes) const;

    OpenSystemModel with_uncertainties(std::vector<CMatrix> uncertainties) const;

   private:
    std::size_t dim_;
    CMatrix drift_;
    std::vector<CMatrix> controls_;
    std::vector<LindbladChannel> lindblads_;
    std::vector<CMatrix> uncertainties_;
    std::optional<SpinChainLayout> layout_;
};

/// XY spin chain with sigma_x/sigma_y controls on every qubit (channel order
/// x_1, y_1, x_2, y_2, ...), amplitude damping sigma^- = |0><1| at rate 1/T1
/// and sigma^+ sigma^- = |1><1| at rate 1/T2 on each qubit.
OpenSystemModel build_spin_chain(std::size_t num_qubits, double jxy_over_2pi_mhz, double t1_us,
                                 double t2_us);

enum class UncertaintyKind { kNone, kEdges, kCouplings };

UncertaintyKind parse_uncertainty_kind(std::string_view name);
std::string_view to_string(UncertaintyKind kind);

/// kEdges: E_1 = sigma_x on the first qubit, E_2 = sigma_x on the last.
/// kCouplings additionally adds the XX+YY couplings of qubit pairs (1,2)
/// and (2,3); requires at least three qubits.
OpenSystemModel attach_uncertainties(const OpenSystemModel& model, UncertaintyKind kind);

enum class NoiseKind { kNormal, kUniform };

NoiseKind parse_noise_kind(std::string_view name);
std::string_view to_string(NoiseKind kind);

/// Zero-mean independent noise on the uncertainty strengths. The uniform
/// kind has half-width sqrt(3)*sigma so both kinds share variance sigma^2.
struct NoiseDistribution {
    NoiseKind kind = NoiseKind::kNormal;
    std::vector<double> sigmas;  // rad/ns
    std::uint64_t seed = 0;

    std::vector<std::vector<double>> sample(std::size_t count) const;
};

}  // namespace stgrape
