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

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "stgrape/propagate.hpp"
#include "stgrape/random.hpp"
#include "trotter_internal.hpp"

namespace stgrape {

namespace {

constexpr double kCommuteTol = 1e-10;
constexpr double kDiagonalTol = 1e-10;
constexpr std::uint64_t kGroupingSeed = 0x9e3779b97f4a7c15ULL;

// Real diagonal of R^dagger H R, checking that the off-diagonal part vanishes.
Eigen::VectorXd diagonal_spectrum(const CMatrix& r, const CMatrix& h) {
    const CMatrix m = r.adjoint() * h * r;
    Eigen::VectorXd diag = m.diagonal().real();
    CMatrix off = m;
    off.diagonal().setZero();
    if (off.norm() > kDiagonalTol * std::max(1.0, h.norm())) {
        throw std::logic_error("control group diagonalizer does not diagonalize a member");
    }
    return diag;
}

void fill_spectra(const std::vector<CMatrix>& controls, ControlGroup& group) {
    group.spectra.clear();
    for (std::size_t c : group.channels) {
        group.spectra.push_back(diagonal_spectrum(group.diagonalizer, controls[c]));
    }
}

CMatrix tensor_power(const CMatrix& single, std::size_t n) {
    CMatrix out = identity(1);
    for (std::size_t q = 0; q < n; ++q) out = kron(out, single);
    return out;
}

// In-place exp(dt_half * E_j) (or its adjoint) on the augmented state. Only
// blocks reachable along the R_j routing are ever modified.
void nilpotent_loop(const CMatrix& e, const MultiIndexSet& mset, std::size_t j,
                    AugmentedState& state, double dt_half, bool adjoint) {
    const std::size_t n = mset.order();
    if (n == 0 || dt_half == 0.0) return;
    // (target block, source block) pairs of one application.
    std::vector<std::pair<std::size_t, std::size_t>> routes;
    for (std::size_t k = 0; k < mset.size(); ++k) {
        if (const auto l = mset.lower(j, k)) {
            routes.emplace_back(adjoint ? *l : k, adjoint ? k : *l);
        }
    }
    const Complex sign = adjoint ? kI : -kI;
    const AugmentedState original = state;
    std::vector<CMatrix> updated(routes.size());
    for (std::size_t ell = 0; ell < n; ++ell) {
        const double coeff = dt_half / static_cast<double>(n - ell);
        for (std::size_t r = 0; r < routes.size(); ++r) {
            const CMatrix& src = state[routes[r].second];
            updated[r] = original[routes[r].first];
            updated[r].noalias() += (coeff * sign) * (e * src);
            updated[r].noalias() -= (coeff * sign) * (src * e);
        }
        for (std::size_t r = 0; r < routes.size(); ++r) {
            state[routes[r].first].swap(updated[r]);
        }
    }
}

void check_uncertainty(std::size_t j, std::size_t available, const MultiIndexSet& mset) {
    if (j >= available || j >= mset.num_params()) {
        throw std::invalid_argument("uncertainty index " + std::to_string(j) + " out of range");
    }
}

}  // namespace

std::vector<ControlGroup> commuting_groups(const std::vector<CMatrix>& controls) {
    std::vector<ControlGroup> groups;
    for (std::size_t c = 0; c < controls.size(); ++c) {
        bool placed = false;
        for (auto& g : groups) {
            bool fits = true;
            for (std::size_t other : g.channels) {
                if (commutator(controls[c], controls[other]).norm() >= kCommuteTol) {
                    fits = false;
                    break;
                }
            }
            if (fits) {
                g.channels.push_back(c);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back(ControlGroup{{c}, {}, {}});
    }
    Rng rng(kGroupingSeed);
    for (auto& g : groups) {
        const auto d = controls[g.channels.front()].rows();
        Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t c : g.channels) mix += rng.uniform(0.5, 1.5) * controls[c];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mix);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("eigendecomposition of control group failed");
        }
        g.diagonalizer = solver.eigenvectors();
        fill_spectra(controls, g);
    }
    return groups;
}

std::vector<ControlGroup> spin_chain_groups(const OpenSystemModel& model) {
    if (!model.spin_chain()) {
        throw std::invalid_argument("spin_chain_groups: model is not a spin chain");
    }
    const std::size_t n = model.spin_chain()->num_qubits;
    if (model.num_controls() != 2 * n) {
        throw std::invalid_argument("spin_chain_groups: unexpected control layout");
    }
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix rx(2, 2);
    rx << s, s, s, -s;
    CMatrix ry(2, 2);
    ry << s, s, kI * s, -kI * s;

    ControlGroup gx;
    ControlGroup gy;
    for (std::size_t q = 0; q < n; ++q) {
        gx.channels.push_back(2 * q);
        gy.channels.push_back(2 * q + 1);
    }
    gx.diagonalizer = tensor_power(rx, n);
    gy.diagonalizer = tensor_power(ry, n);
    fill_spectra(model.controls(), gx);
    fill_spectra(model.controls(), gy);
    return {std::move(gx), std::move(gy)};
}

TrotterPlan::TrotterPlan(const OpenSystemModel& model, double dt, const PropagationOptions& opts)
    : dt_(dt),
      dim_(model.dim()),
      controls_(model.controls()),
      uncertainties_(model.uncertainties()),
      collapse_(opts.collapse) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("TrotterPlan: dt must be finite and non-negative");
    }
    const auto d = static_cast<Eigen::Index>(dim_);
    CMatrix decay = CMatrix::Zero(d, d);
    for (const auto& ch : model.lindblads()) {
        if (ch.rate == 0.0) continue;
        decay.noalias() += ch.rate * (ch.op.adjoint() * ch.op);
        const CMatrix scaled = std::sqrt(ch.rate) * ch.op;
        jumps_.push_back(to_sparse(scaled));
        jumps_adj_.push_back(to_sparse(scaled.adjoint()));
    }
    h_eff_ = model.drift() - 0.5 * kI * decay;
    u_eff_ = expm(-kI * dt * h_eff_);

    const bool fast = opts.spin_chain_fast_path && model.spin_chain() &&
                      model.num_controls() == 2 * model.spin_chain()->num_qubits;
    groups_ = fast ? spin_chain_groups(model) : commuting_groups(controls_);

    if (collapse_ == CollapseMode::kVectorized && !jumps_.empty()) {
        const auto d2 = d * d;
        collapse_super_.resize(d2, d2);
        for (const auto& j : jumps_) {
            const SparseCMatrix jbar = j.conjugate();
            collapse_super_ += SparseCMatrix(Eigen::kroneckerProduct(jbar, j));
        }
        collapse_super_adj_ = collapse_super_.adjoint();
    }
}

CMatrix TrotterPlan::group_unitary(std::size_t q, std::span<const double> amplitudes) const {
    const ControlGroup& g = groups_.at(q);
    Eigen::VectorXd phase = Eigen::VectorXd::Zero(g.diagonalizer.cols());
    for (std::size_t i = 0; i < g.channels.size(); ++i) {
        phase += amplitudes[g.channels[i]] * g.spectra[i];
    }
    const double half = 0.5 * dt_;
    CMatrix scaled = g.diagonalizer;
    for (Eigen::Index col = 0; col < scaled.cols(); ++col) {
        scaled.col(col) *= std::exp(-kI * half * phase(col));
    }
    return scaled * g.diagonalizer.adjoint();
}

void TrotterPlan::collapse_once(const AugmentedState& in, AugmentedState& out,
                                bool adjoint) const {
    if (collapse_ == CollapseMode::kVectorized) {
        const auto d = static_cast<Eigen::Index>(dim_);
        const auto nb = static_cast<Eigen::Index>(in.size());
        Eigen::MatrixXcd cols(d * d, nb);
        for (Eigen::Index k = 0; k < nb; ++k) cols.col(k) = vec(in[static_cast<std::size_t>(k)]);
        const Eigen::MatrixXcd mapped =
            (adjoint ? collapse_super_adj_ : collapse_super_) * cols;
        for (Eigen::Index k = 0; k < nb; ++k) {
            out[static_cast<std::size_t>(k)] = unvec(mapped.col(k), d);
        }
        return;
    }
    const auto& left = adjoint ? jumps_adj_ : jumps_;
    const auto& right = adjoint ? jumps_ : jumps_adj_;
    for (std::size_t k = 0; k < in.size(); ++k) {
        out[k].setZero();
        for (std::size_t i = 0; i < left.size(); ++i) {
            const CMatrix tmp = left[i] * in[k];
            out[k].noalias() += tmp * right[i];
        }
    }
}

void TrotterPlan::apply_collapse(AugmentedState& state) const {
    if (jumps_.empty()) return;
    const double a = 0.5 * dt_;
    AugmentedState c1(state.size(), state.dim());
    AugmentedState c2(state.size(), state.dim());
    collapse_once(state, c1, false);
    collapse_once(c1, c2, false);
    state.add_scaled(a, c1);
    state.add_scaled(0.5 * a * a, c2);
}

void TrotterPlan::apply_collapse_adjoint(AugmentedState& state) const {
    if (jumps_.empty()) return;
    const double a = 0.5 * dt_;
    AugmentedState c1(state.size(), state.dim());
    AugmentedState c2(state.size(), state.dim());
    collapse_once(state, c1, true);
    collapse_once(c1, c2, true);
    state.add_scaled(a, c1);
    state.add_scaled(0.5 * a * a, c2);
}

void conjugate_blocks(AugmentedState& state, const CMatrix& u) {
    const CMatrix ud = u.adjoint();
    CMatrix tmp(u.rows(), u.cols());
    for (auto& b : state.blocks()) {
        tmp.noalias() = u * b;
        b.noalias() = tmp * ud;
    }
}

AugmentedState exp_nilpotent(const OpenSystemModel& model, std::size_t j,
                             const MultiIndexSet& mset, const AugmentedState& state,
                             double dt_half) {
    check_uncertainty(j, model.num_uncertainties(), mset);
    AugmentedState out = state;
    nilpotent_loop(model.uncertainties()[j], mset, j, out, dt_half, false);
    return out;
}

AugmentedState exp_nilpotent_adjoint(const OpenSystemModel& model, std::size_t j,
                                     const MultiIndexSet& mset, const AugmentedState& state,
                                     double dt_half) {
    check_uncertainty(j, model.num_uncertainties(), mset);
    AugmentedState out = state;
    nilpotent_loop(model.uncertainties()[j], mset, j, out, dt_half, true);
    return out;
}

namespace detail {

void trotter_uncertainties(const TrotterPlan& plan, const MultiIndexSet& mset,
                           AugmentedState& state, bool reverse, bool adjoint) {
    const std::size_t m = std::min(plan.uncertainties().size(), mset.num_params());
    const double half = 0.5 * plan.dt();
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = reverse ? m - 1 - i : i;
        nilpotent_loop(plan.uncertainties()[j], mset, j, state, half, adjoint);
    }
}

// Middle section of the step as one matrix: U_0...U_{Q-1} U_eff U_{Q-1}...U_0,
// i.e. the groups are applied in order 0..Q-1, then U_eff, then Q-1..0.
CMatrix fused_middle(const TrotterPlan& plan, const std::vector<CMatrix>& group_unitaries) {
    CMatrix w = plan.drift_propagator();
    for (auto it = group_unitaries.rbegin(); it != group_unitaries.rend(); ++it) {
        w = *it * w * *it;
    }
    return w;
}

}  // namespace detail

AugmentedState step_trotter(const TrotterPlan& plan, const MultiIndexSet& mset,
                            std::span<const double> amplitudes, const AugmentedState& state) {
    std::vector<CMatrix> us;
    for (std::size_t q = 0; q < plan.groups().size(); ++q) {
        us.push_back(plan.group_unitary(q, amplitudes));
    }
    AugmentedState s = state;
    detail::trotter_uncertainties(plan, mset, s, false, false);
    plan.apply_collapse(s);
    conjugate_blocks(s, detail::fused_middle(plan, us));
    plan.apply_collapse(s);
    detail::trotter_uncertainties(plan, mset, s, true, false);
    return s;
}

AugmentedState step_trotter_adjoint(const TrotterPlan& plan, const MultiIndexSet& mset,
                                    std::span<const double> amplitudes,
                                    const AugmentedState& state) {
    std::vector<CMatrix> us;
    for (std::size_t q = 0; q < plan.groups().size(); ++q) {
        us.push_back(plan.group_unitary(q, amplitudes));
    }
    AugmentedState s = state;
    detail::trotter_uncertainties(plan, mset, s, false, true);
    plan.apply_collapse_adjoint(s);
    conjugate_blocks(s, detail::fused_middle(plan, us).adjoint());
    plan.apply_collapse_adjoint(s);
    detail::trotter_uncertainties(plan, mset, s, true, true);
    return s;
}

}  // namespace stgrape
