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

#include <string>

#include "stgrape/augment.hpp"

namespace stgrape {

LindbladGenerator::LindbladGenerator(const OpenSystemModel& model,
                                     std::span<const double> amplitudes)
    : h_(model.hamiltonian(amplitudes)) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    CMatrix decay = CMatrix::Zero(d, d);
    for (const auto& ch : model.lindblads()) {
        if (ch.rate == 0.0) continue;
        decay.noalias() += ch.rate * (ch.op.adjoint() * ch.op);
        const CMatrix scaled = std::sqrt(ch.rate) * ch.op;
        jumps_.push_back(to_sparse(scaled));
        jumps_adj_.push_back(to_sparse(scaled.adjoint()));
    }
    h_eff_ = h_ - 0.5 * kI * decay;
}

CMatrix LindbladGenerator::apply(const CMatrix& rho) const {
    CMatrix out(rho.rows(), rho.cols());
    out.noalias() = -kI * (h_eff_ * rho);
    out.noalias() += kI * (rho * h_eff_.adjoint());
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        CMatrix tmp = jumps_[i] * rho;
        out.noalias() += tmp * jumps_adj_[i];
    }
    return out;
}

CMatrix LindbladGenerator::apply_adjoint(const CMatrix& rho) const {
    CMatrix out(rho.rows(), rho.cols());
    out.noalias() = kI * (h_eff_.adjoint() * rho);
    out.noalias() -= kI * (rho * h_eff_);
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        CMatrix tmp = jumps_adj_[i] * rho;
        out.noalias() += tmp * jumps_[i];
    }
    return out;
}

double LindbladGenerator::norm_bound() const {
    double bound = 2.0 * one_norm(h_);
    for (const auto& j : jumps_) {
        const CMatrix dense(j);
        const double c = std::max(one_norm(dense), one_norm(dense.adjoint()));
        bound += 2.0 * c * c;
    }
    return bound;
}

namespace {

void check_state(const OpenSystemModel& model, const AugmentedState& state) {
    if (state.dim() != model.dim()) {
        throw std::invalid_argument("augmented state block dimension " +
                                    std::to_string(state.dim()) + " does not match model " +
                                    std::to_string(model.dim()));
    }
}

void check_param(const OpenSystemModel& model, const MultiIndexSet& mset, std::size_t j) {
    if (j >= model.num_uncertainties() || j >= mset.num_params()) {
        throw std::invalid_argument("uncertainty index " + std::to_string(j) + " out of range");
    }
}

}  // namespace

AugmentedState apply_L(const OpenSystemModel& model, std::span<const double> amplitudes,
                       const AugmentedState& state) {
    check_state(model, state);
    const LindbladGenerator gen(model, amplitudes);
    AugmentedState out(state.size(), state.dim());
    for (std::size_t k = 0; k < state.size(); ++k) {
        out[k] = gen.apply(state[k]);
    }
    return out;
}

AugmentedState apply_L_adjoint(const OpenSystemModel& model, std::span<const double> amplitudes,
                               const AugmentedState& state) {
    check_state(model, state);
    const LindbladGenerator gen(model, amplitudes);
    AugmentedState out(state.size(), state.dim());
    for (std::size_t k = 0; k < state.size(); ++k) {
        out[k] = gen.apply_adjoint(state[k]);
    }
    return out;
}

AugmentedState apply_Ej(const OpenSystemModel& model, std::size_t j, const MultiIndexSet& mset,
                        const AugmentedState& state) {
    check_state(model, state);
    check_param(model, mset, j);
    const CMatrix& e = model.uncertainties()[j];
    AugmentedState out(state.size(), state.dim());
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (const auto l = mset.lower(j, k)) {
            out[k] = -kI * commutator(e, state[*l]);
        }
    }
    return out;
}

AugmentedState apply_Ej_adjoint(const OpenSystemModel& model, std::size_t j,
                                const MultiIndexSet& mset, const AugmentedState& state) {
    check_state(model, state);
    check_param(model, mset, j);
    const CMatrix& e = model.uncertainties()[j];
    AugmentedState out(state.size(), state.dim());
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (const auto l = mset.lower(j, k)) {
            out[*l] += kI * commutator(e, state[k]);
        }
    }
    return out;
}

CMatrix lindblad_supermatrix(const OpenSystemModel& model, std::span<const double> amplitudes) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    const CMatrix id = identity(d);
    const CMatrix h = model.hamiltonian(amplitudes);
    CMatrix out = -kI * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& ch : model.lindblads()) {
        if (ch.rate == 0.0) continue;
        const CMatrix cdc = ch.op.adjoint() * ch.op;
        out += ch.rate * (kron(ch.op.conjugate(), ch.op) - 0.5 * kron(id, cdc) -
                          0.5 * kron(cdc.transpose(), id));
    }
    return out;
}

CMatrix commutator_supermatrix(const CMatrix& e) {
    const CMatrix id = identity(e.rows());
    return -kI * (kron(id, e) - kron(e.transpose(), id));
}

CMatrix assemble_supermatrix(const OpenSystemModel& model, const MultiIndexSet& mset,
                             std::span<const double> amplitudes, std::size_t cap) {
    const std::size_t d2 = model.dim() * model.dim();
    const std::size_t total = mset.size() * d2;
    if (total > cap) {
        throw SupermatrixCapExceeded("augmented supermatrix dimension " + std::to_string(total) +
                                     " exceeds cap " + std::to_string(cap));
    }
    const auto n = static_cast<Eigen::Index>(total);
    const auto b = static_cast<Eigen::Index>(d2);
    CMatrix out = CMatrix::Zero(n, n);
    const CMatrix l = lindblad_supermatrix(model, amplitudes);
    for (std::size_t k = 0; k < mset.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        out.block(kk * b, kk * b, b, b) = l;
    }
    for (std::size_t j = 0; j < model.num_uncertainties() && j < mset.num_params(); ++j) {
        const CMatrix e = commutator_supermatrix(model.uncertainties()[j]);
        for (std::size_t k = 0; k < mset.size(); ++k) {
            if (const auto lo = mset.lower(j, k)) {
                out.block(static_cast<Eigen::Index>(k) * b, static_cast<Eigen::Index>(*lo) * b, b,
                          b) += e;
            }
        }
    }
    return out;
}

}  // namespace stgrape
