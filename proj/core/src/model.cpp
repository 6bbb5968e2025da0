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

#include "stgrape/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stgrape/random.hpp"

namespace stgrape {

double mhz_to_rad_per_ns(double mhz) { return 2.0 * std::numbers::pi * mhz * 1e-3; }

double rad_per_ns_to_mhz(double rad_per_ns) {
    return rad_per_ns * 1e3 / (2.0 * std::numbers::pi);
}

ControlGrid::ControlGrid(double dt, std::size_t steps, std::size_t channels,
                         std::vector<AmplitudeBounds> bounds)
    : dt_(dt), steps_(steps), channels_(channels), bounds_(std::move(bounds)) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("ControlGrid: dt must be positive");
    }
    if (bounds_.size() != channels_) {
        throw std::invalid_argument("ControlGrid: need one bounds pair per channel");
    }
    for (const auto& b : bounds_) {
        if (!(b.lo <= b.hi)) {
            throw std::invalid_argument("ControlGrid: bounds require lo <= hi");
        }
    }
    values_.resize(steps_ * channels_);
    for (std::size_t k = 0; k < steps_; ++k) {
        for (std::size_t c = 0; c < channels_; ++c) {
            values_[k * channels_ + c] = std::clamp(0.0, bounds_[c].lo, bounds_[c].hi);
        }
    }
}

void ControlGrid::set_amplitude(std::size_t channel, std::size_t step, double value) {
    if (channel >= channels_ || step >= steps_) {
        throw std::out_of_range("ControlGrid::set_amplitude: index out of range");
    }
    const auto& b = bounds_[channel];
    if (!(value >= b.lo && value <= b.hi)) {
        throw std::out_of_range("ControlGrid::set_amplitude: value " + std::to_string(value) +
                                " outside channel bounds");
    }
    values_[step * channels_ + channel] = value;
}

void ControlGrid::set_flat(std::span<const double> values) {
    if (values.size() != values_.size()) {
        throw std::invalid_argument("ControlGrid::set_flat: size mismatch");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& b = bounds_[i % channels_];
        if (!(values[i] >= b.lo && values[i] <= b.hi)) {
            throw std::out_of_range("ControlGrid::set_flat: value outside channel bounds");
        }
    }
    values_.assign(values.begin(), values.end());
}

ControlGrid ControlGrid::refined(std::size_t factor) const {
    if (factor == 0) {
        throw std::invalid_argument("ControlGrid::refined: factor must be positive");
    }
    ControlGrid out(dt_ / static_cast<double>(factor), steps_ * factor, channels_, bounds_);
    for (std::size_t k = 0; k < out.steps_; ++k) {
        for (std::size_t c = 0; c < channels_; ++c) {
            out.values_[k * channels_ + c] = amplitude(c, k / factor);
        }
    }
    return out;
}

ControlGrid random_grid(std::size_t channels, std::size_t steps, double dt,
                        const std::vector<AmplitudeBounds>& bounds, std::uint64_t seed) {
    ControlGrid grid(dt, steps, channels, bounds);
    Rng rng(seed);
    std::vector<double> values(steps * channels);
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t c = 0; c < channels; ++c) {
            values[k * channels + c] = rng.uniform(0.2 * bounds[c].lo, 0.2 * bounds[c].hi);
        }
    }
    grid.set_flat(values);
    return grid;
}

OpenSystemModel::OpenSystemModel(CMatrix drift, std::vector<CMatrix> controls,
                                 std::vector<LindbladChannel> lindblads,
                                 std::vector<CMatrix> uncertainties,
                                 std::optional<SpinChainLayout> layout)
    : dim_(static_cast<std::size_t>(drift.rows())),
      drift_(std::move(drift)),
      controls_(std::move(controls)),
      lindblads_(std::move(lindblads)),
      uncertainties_(std::move(uncertainties)),
      layout_(layout) {
    const auto d = static_cast<Eigen::Index>(dim_);
    auto check_square = [d](const CMatrix& m, const std::string& what) {
        if (m.rows() != d || m.cols() != d) {
            throw std::invalid_argument("OpenSystemModel: " + what + " is not " +
                                        std::to_string(d) + "x" + std::to_string(d));
        }
    };
    auto check_hermitian = [](const CMatrix& m, const std::string& what) {
        if (!is_hermitian(m)) {
            throw std::invalid_argument("OpenSystemModel: " + what + " is not Hermitian");
        }
    };
    if (dim_ == 0) {
        throw std::invalid_argument("OpenSystemModel: dimension must be at least 1");
    }
    check_square(drift_, "drift");
    check_hermitian(drift_, "drift");
    for (std::size_t c = 0; c < controls_.size(); ++c) {
        check_square(controls_[c], "control " + std::to_string(c));
        check_hermitian(controls_[c], "control " + std::to_string(c));
    }
    for (std::size_t i = 0; i < lindblads_.size(); ++i) {
        check_square(lindblads_[i].op, "lindblad " + std::to_string(i));
        if (!(lindblads_[i].rate >= 0.0) || !std::isfinite(lindblads_[i].rate)) {
            throw std::invalid_argument("OpenSystemModel: lindblad rate must be >= 0");
        }
    }
    for (std::size_t j = 0; j < uncertainties_.size(); ++j) {
        check_square(uncertainties_[j], "uncertainty " + std::to_string(j));
        check_hermitian(uncertainties_[j], "uncertainty " + std::to_string(j));
    }
}

CMatrix OpenSystemModel::hamiltonian(std::span<const double> amplitudes) const {
    if (amplitudes.size() != controls_.size()) {
        throw std::invalid_argument("OpenSystemModel::hamiltonian: expected " +
                                    std::to_string(controls_.size()) + " amplitudes");
    }
    CMatrix h = drift_;
    for (std::size_t c = 0; c < controls_.size(); ++c) {
        if (amplitudes[c] != 0.0) {
            h += amplitudes[c] * controls_[c];
        }
    }
    return h;
}

OpenSystemModel OpenSystemModel::with_uncertainties(std::vector<CMatrix> uncertainties) const {
    return OpenSystemModel(drift_, controls_, lindblads_, std::move(uncertainties), layout_);
}

OpenSystemModel build_spin_chain(std::size_t num_qubits, double jxy_over_2pi_mhz, double t1_us,
                                 double t2_us) {
    if (num_qubits < 1) {
        throw std::invalid_argument("build_spin_chain: need at least one qubit");
    }
    if (!(t1_us > 0.0) || !(t2_us > 0.0)) {
        throw std::invalid_argument("build_spin_chain: T1 and T2 must be positive");
    }
    const auto dim = Eigen::Index{1} << num_qubits;
    const double jxy = mhz_to_rad_per_ns(jxy_over_2pi_mhz);

    std::vector<CMatrix> sx(num_qubits);
    std::vector<CMatrix> sy(num_qubits);
    for (std::size_t q = 0; q < num_qubits; ++q) {
        sx[q] = embed_qubit_operator(pauli::x(), q, num_qubits);
        sy[q] = embed_qubit_operator(pauli::y(), q, num_qubits);
    }

    CMatrix drift = CMatrix::Zero(dim, dim);
    for (std::size_t q = 0; q + 1 < num_qubits; ++q) {
        drift += jxy * (sx[q] * sx[q + 1] + sy[q] * sy[q + 1]);
    }

    std::vector<CMatrix> controls;
    controls.reserve(2 * num_qubits);
    for (std::size_t q = 0; q < num_qubits; ++q) {
        controls.push_back(sx[q]);
        controls.push_back(sy[q]);
    }

    const double gamma1 = 1.0 / (t1_us * 1e3);
    const double gamma2 = 1.0 / (t2_us * 1e3);
    const CMatrix lower = pauli::lowering();
    const CMatrix excited = lower.adjoint() * lower;
    std::vector<LindbladChannel> lindblads;
    for (std::size_t q = 0; q < num_qubits; ++q) {
        lindblads.push_back({embed_qubit_operator(lower, q, num_qubits), gamma1});
        lindblads.push_back({embed_qubit_operator(excited, q, num_qubits), gamma2});
    }

    return OpenSystemModel(std::move(drift), std::move(controls), std::move(lindblads), {},
                           SpinChainLayout{num_qubits});
}

UncertaintyKind parse_uncertainty_kind(std::string_view name) {
    if (name == "none") return UncertaintyKind::kNone;
    if (name == "edges") return UncertaintyKind::kEdges;
    if (name == "couplings") return UncertaintyKind::kCouplings;
    throw std::invalid_argument("unknown uncertainty kind '" + std::string(name) + "'");
}

std::string_view to_string(UncertaintyKind kind) {
    switch (kind) {
        case UncertaintyKind::kNone:
            return "none";
        case UncertaintyKind::kEdges:
            return "edges";
        case UncertaintyKind::kCouplings:
            return "couplings";
    }
    return "none";
}

OpenSystemModel attach_uncertainties(const OpenSystemModel& model, UncertaintyKind kind) {
    if (!model.spin_chain()) {
        throw std::invalid_argument("attach_uncertainties: model is not a spin chain");
    }
    const std::size_t n = model.spin_chain()->num_qubits;
    std::vector<CMatrix> es;
    if (kind == UncertaintyKind::kNone) {
        return model.with_uncertainties({});
    }
    if (kind == UncertaintyKind::kCouplings && n < 3) {
        throw std::invalid_argument("attach_uncertainties: couplings need at least 3 qubits");
    }
    es.push_back(embed_qubit_operator(pauli::x(), 0, n));
    es.push_back(embed_qubit_operator(pauli::x(), n - 1, n));
    if (kind == UncertaintyKind::kCouplings) {
        for (std::size_t q = 0; q < 2; ++q) {
            es.push_back(embed_qubit_operator(pauli::x(), q, n) *
                             embed_qubit_operator(pauli::x(), q + 1, n) +
                         embed_qubit_operator(pauli::y(), q, n) *
                             embed_qubit_operator(pauli::y(), q + 1, n));
        }
    }
    return model.with_uncertainties(std::move(es));
}

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "normal") return NoiseKind::kNormal;
    if (name == "uniform") return NoiseKind::kUniform;
    throw std::invalid_argument("unknown noise distribution '" + std::string(name) + "'");
}

std::string_view to_string(NoiseKind kind) {
    return kind == NoiseKind::kNormal ? "normal" : "uniform";
}

std::vector<std::vector<double>> NoiseDistribution::sample(std::size_t count) const {
    for (double s : sigmas) {
        if (!(s >= 0.0)) {
            throw std::invalid_argument("NoiseDistribution: sigma must be >= 0");
        }
    }
    Rng rng(seed);
    std::vector<std::vector<double>> out(count, std::vector<double>(sigmas.size()));
    const double half_width = std::sqrt(3.0);
    for (auto& eps : out) {
        for (std::size_t j = 0; j < sigmas.size(); ++j) {
            eps[j] = kind == NoiseKind::kNormal
                         ? sigmas[j] * rng.normal()
                         : sigmas[j] * rng.uniform(-half_width, half_width);
        }
    }
    return out;
}

}  // namespace stgrape
