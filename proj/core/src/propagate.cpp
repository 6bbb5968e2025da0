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

#include "stgrape/propagate.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "trotter_internal.hpp"

namespace stgrape {

Backend parse_backend(std::string_view name) {
    if (name == "expm") return Backend::kExpm;
    if (name == "ode") return Backend::kOde;
    if (name == "trotter") return Backend::kTrotter;
    throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

std::string_view to_string(Backend backend) {
    switch (backend) {
        case Backend::kExpm:
            return "expm";
        case Backend::kOde:
            return "ode";
        case Backend::kTrotter:
            return "trotter";
    }
    return "expm";
}

namespace {

void check_state(const MultiIndexSet& mset, std::size_t dim, const AugmentedState& s) {
    if (s.size() != mset.size() || s.dim() != dim) {
        throw std::invalid_argument("augmented state has " + std::to_string(s.size()) +
                                    " blocks of dim " + std::to_string(s.dim()) + ", expected " +
                                    std::to_string(mset.size()) + " of dim " +
                                    std::to_string(dim));
    }
}

void check_params(const OpenSystemModel& model, const MultiIndexSet& mset) {
    if (mset.num_params() != model.num_uncertainties()) {
        throw std::invalid_argument("multi-index set has m = " +
                                    std::to_string(mset.num_params()) + " but the model has " +
                                    std::to_string(model.num_uncertainties()) +
                                    " uncertainty operators");
    }
}

void apply_dense(const CMatrix& propagator, AugmentedState& s) {
    const CVector v = propagator * s.stacked();
    s = AugmentedState::from_stacked(v, s.size(), s.dim());
}

// d/dt of the augmented state: L on every block plus the E_j routing.
void augmented_rhs(const LindbladGenerator& gen, const std::vector<CMatrix>& es,
                   const MultiIndexSet& mset, const AugmentedState& s, AugmentedState& out,
                   bool adjoint) {
    for (std::size_t k = 0; k < s.size(); ++k) {
        out[k] = adjoint ? gen.apply_adjoint(s[k]) : gen.apply(s[k]);
    }
    if (mset.order() == 0) return;
    for (std::size_t j = 0; j < es.size(); ++j) {
        const CMatrix& e = es[j];
        for (std::size_t k = 0; k < s.size(); ++k) {
            const auto l = mset.lower(j, k);
            if (!l) continue;
            if (adjoint) {
                out[*l].noalias() += kI * (e * s[k]);
                out[*l].noalias() -= kI * (s[k] * e);
            } else {
                out[k].noalias() -= kI * (e * s[*l]);
                out[k].noalias() += kI * (s[*l] * e);
            }
        }
    }
}

void rk4(const LindbladGenerator& gen, const std::vector<CMatrix>& es, const MultiIndexSet& mset,
         AugmentedState& s, double dt, std::size_t substeps, bool adjoint) {
    const double h = dt / static_cast<double>(substeps);
    AugmentedState k1(s.size(), s.dim());
    AugmentedState k2(s.size(), s.dim());
    AugmentedState k3(s.size(), s.dim());
    AugmentedState k4(s.size(), s.dim());
    AugmentedState tmp;
    for (std::size_t i = 0; i < substeps; ++i) {
        augmented_rhs(gen, es, mset, s, k1, adjoint);
        tmp = s;
        tmp.add_scaled(0.5 * h, k1);
        augmented_rhs(gen, es, mset, tmp, k2, adjoint);
        tmp = s;
        tmp.add_scaled(0.5 * h, k2);
        augmented_rhs(gen, es, mset, tmp, k3, adjoint);
        tmp = s;
        tmp.add_scaled(h, k3);
        augmented_rhs(gen, es, mset, tmp, k4, adjoint);
        k2 += k3;
        k1.add_scaled(2.0, k2);
        k1 += k4;
        s.add_scaled(h / 6.0, k1);
    }
}

double generator_estimate(const OpenSystemModel& model, std::span<const double> amplitudes) {
    double est = LindbladGenerator(model, amplitudes).norm_bound();
    for (const auto& e : model.uncertainties()) est += 2.0 * one_norm(e);
    return est;
}

}  // namespace

AugmentedState step_expm(const OpenSystemModel& model, const MultiIndexSet& mset,
                         std::span<const double> amplitudes, double dt,
                         const AugmentedState& state, std::size_t cap) {
    check_params(model, mset);
    check_state(mset, model.dim(), state);
    const CMatrix gen = assemble_supermatrix(model, mset, amplitudes, cap);
    AugmentedState out = state;
    apply_dense(expm(dt * gen), out);
    return out;
}

std::size_t default_substeps(const OpenSystemModel& model, std::span<const double> amplitudes,
                             double dt, double step_scale) {
    if (!(step_scale > 0.0)) {
        throw std::invalid_argument("default_substeps: step scale must be positive");
    }
    const double n = std::ceil(dt * generator_estimate(model, amplitudes) / step_scale);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

AugmentedState step_ode(const OpenSystemModel& model, const MultiIndexSet& mset,
                        std::span<const double> amplitudes, double dt,
                        const AugmentedState& state, std::size_t substeps) {
    check_params(model, mset);
    check_state(mset, model.dim(), state);
    if (substeps == 0) throw std::invalid_argument("step_ode: substeps must be >= 1");
    const LindbladGenerator gen(model, amplitudes);
    AugmentedState out = state;
    rk4(gen, model.uncertainties(), mset, out, dt, substeps, false);
    return out;
}

struct Propagator::Impl {
    OpenSystemModel model;
    MultiIndexSet mset;
    ControlGrid grid;
    PropagationOptions opts;

    // expm
    std::size_t aug_dim = 0;
    std::vector<CMatrix> propagators;

    // ode
    std::vector<LindbladGenerator> generators;
    std::vector<std::size_t> substeps;

    // trotter
    std::optional<TrotterPlan> plan;
    std::vector<std::vector<CMatrix>> group_us;
    std::vector<CMatrix> fused;

    Impl(const OpenSystemModel& m, const MultiIndexSet& s, const ControlGrid& g,
         const PropagationOptions& o)
        : model(m), mset(s), grid(g), opts(o) {}

    CMatrix expm_propagator(std::size_t k) const {
        return expm(grid.dt() *
                    assemble_supermatrix(model, mset, grid.step_amplitudes(k), opts.supermatrix_cap));
    }

    void trotter_forward_recorded(std::size_t k, AugmentedState& s,
                                  std::array<AugmentedState, 2>& inner) const {
        const auto& us = group_us[k];
        detail::trotter_uncertainties(*plan, mset, s, false, false);
        plan->apply_collapse(s);
        inner[0] = s;
        for (const auto& u : us) conjugate_blocks(s, u);
        conjugate_blocks(s, plan->drift_propagator());
        inner[1] = s;
        for (auto it = us.rbegin(); it != us.rend(); ++it) conjugate_blocks(s, *it);
        plan->apply_collapse(s);
        detail::trotter_uncertainties(*plan, mset, s, true, false);
    }

    void trotter_backward_recorded(std::size_t k, AugmentedState& s,
                                   std::array<AugmentedState, 2>& inner) const {
        const auto& us = group_us[k];
        detail::trotter_uncertainties(*plan, mset, s, false, true);
        plan->apply_collapse_adjoint(s);
        inner[1] = s;
        for (const auto& u : us) conjugate_blocks(s, u.adjoint());
        conjugate_blocks(s, plan->drift_propagator().adjoint());
        inner[0] = s;
        for (auto it = us.rbegin(); it != us.rend(); ++it) conjugate_blocks(s, it->adjoint());
        plan->apply_collapse_adjoint(s);
        detail::trotter_uncertainties(*plan, mset, s, true, true);
    }
};

Propagator::Propagator(Backend backend, const OpenSystemModel& model, const MultiIndexSet& mset,
                       const ControlGrid& grid, const PropagationOptions& opts)
    : backend_(backend), impl_(std::make_unique<Impl>(model, mset, grid, opts)) {
    check_params(model, mset);
    if (grid.channels() != model.num_controls()) {
        throw std::invalid_argument("control grid has " + std::to_string(grid.channels()) +
                                    " channels but the model has " +
                                    std::to_string(model.num_controls()) + " controls");
    }
    Impl& im = *impl_;
    const std::size_t steps = grid.steps();
    switch (backend) {
        case Backend::kExpm: {
            im.aug_dim = mset.size() * model.dim() * model.dim();
            if (im.aug_dim > opts.supermatrix_cap) {
                throw SupermatrixCapExceeded("augmented supermatrix dimension " +
                                             std::to_string(im.aug_dim) + " exceeds cap " +
                                             std::to_string(opts.supermatrix_cap));
            }
            const double bytes = static_cast<double>(steps) * static_cast<double>(im.aug_dim) *
                                 static_cast<double>(im.aug_dim) * sizeof(Complex);
            if (bytes <= static_cast<double>(opts.expm_cache_bytes)) {
                im.propagators.reserve(steps);
                for (std::size_t k = 0; k < steps; ++k) {
                    im.propagators.push_back(im.expm_propagator(k));
                }
            }
            break;
        }
        case Backend::kOde:
            im.generators.reserve(steps);
            for (std::size_t k = 0; k < steps; ++k) {
                const auto amps = grid.step_amplitudes(k);
                im.generators.emplace_back(model, amps);
                im.substeps.push_back(
                    opts.ode_substeps > 0
                        ? opts.ode_substeps
                        : default_substeps(model, amps, grid.dt(), opts.ode_step_scale));
            }
            break;
        case Backend::kTrotter:
            im.plan.emplace(model, grid.dt(), opts);
            im.group_us.resize(steps);
            im.fused.resize(steps);
            for (std::size_t k = 0; k < steps; ++k) {
                const auto amps = grid.step_amplitudes(k);
                for (std::size_t q = 0; q < im.plan->groups().size(); ++q) {
                    im.group_us[k].push_back(im.plan->group_unitary(q, amps));
                }
                im.fused[k] = detail::fused_middle(*im.plan, im.group_us[k]);
            }
            break;
    }
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

std::size_t Propagator::steps() const { return impl_->grid.steps(); }

const TrotterPlan* Propagator::trotter_plan() const {
    return impl_->plan ? &*impl_->plan : nullptr;
}

const std::vector<CMatrix>& Propagator::group_unitaries(std::size_t k) const {
    if (backend_ != Backend::kTrotter) {
        throw std::logic_error("group_unitaries: only available for the Trotter backend");
    }
    return impl_->group_us.at(k);
}

void Propagator::step(std::size_t k, AugmentedState& s) const {
    const Impl& im = *impl_;
    switch (backend_) {
        case Backend::kExpm:
            if (!im.propagators.empty()) {
                apply_dense(im.propagators[k], s);
            } else {
                apply_dense(im.expm_propagator(k), s);
            }
            return;
        case Backend::kOde:
            rk4(im.generators[k], im.model.uncertainties(), im.mset, s, im.grid.dt(),
                im.substeps[k], false);
            return;
        case Backend::kTrotter:
            detail::trotter_uncertainties(*im.plan, im.mset, s, false, false);
            im.plan->apply_collapse(s);
            conjugate_blocks(s, im.fused[k]);
            im.plan->apply_collapse(s);
            detail::trotter_uncertainties(*im.plan, im.mset, s, true, false);
            return;
    }
}

void Propagator::step_adjoint(std::size_t k, AugmentedState& s) const {
    const Impl& im = *impl_;
    switch (backend_) {
        case Backend::kExpm:
            if (!im.propagators.empty()) {
                apply_dense(im.propagators[k].adjoint(), s);
            } else {
                apply_dense(im.expm_propagator(k).adjoint(), s);
            }
            return;
        case Backend::kOde:
            rk4(im.generators[k], im.model.uncertainties(), im.mset, s, im.grid.dt(),
                im.substeps[k], true);
            return;
        case Backend::kTrotter:
            detail::trotter_uncertainties(*im.plan, im.mset, s, false, true);
            im.plan->apply_collapse_adjoint(s);
            conjugate_blocks(s, im.fused[k].adjoint());
            im.plan->apply_collapse_adjoint(s);
            detail::trotter_uncertainties(*im.plan, im.mset, s, true, true);
            return;
    }
}

AugmentedState Propagator::forward(const AugmentedState& state0, StepCache* cache) const {
    const Impl& im = *impl_;
    check_state(im.mset, im.model.dim(), state0);
    const std::size_t steps = im.grid.steps();
    AugmentedState s = state0;
    if (cache) {
        cache->states.clear();
        cache->states.reserve(steps + 1);
        cache->states.push_back(s);
        cache->inner.clear();
        if (backend_ == Backend::kTrotter) cache->inner.resize(steps);
    }
    for (std::size_t k = 0; k < steps; ++k) {
        if (cache && backend_ == Backend::kTrotter) {
            im.trotter_forward_recorded(k, s, cache->inner[k]);
        } else {
            step(k, s);
        }
        if (cache) cache->states.push_back(s);
    }
    return s;
}

StepCache Propagator::backward(const AugmentedState& costate_T, bool record_inner) const {
    const Impl& im = *impl_;
    check_state(im.mset, im.model.dim(), costate_T);
    const std::size_t steps = im.grid.steps();
    StepCache cache;
    cache.states.resize(steps + 1);
    cache.states[steps] = costate_T;
    const bool inner = record_inner && backend_ == Backend::kTrotter;
    if (inner) cache.inner.resize(steps);
    AugmentedState s = costate_T;
    for (std::size_t k = steps; k-- > 0;) {
        if (inner) {
            im.trotter_backward_recorded(k, s, cache.inner[k]);
        } else {
            step_adjoint(k, s);
        }
        cache.states[k] = s;
    }
    return cache;
}

ForwardResult propagate_forward(Backend backend, const OpenSystemModel& model,
                                const MultiIndexSet& mset, const ControlGrid& grid,
                                const AugmentedState& state0, bool record_cache,
                                const PropagationOptions& opts) {
    const Propagator prop(backend, model, mset, grid, opts);
    ForwardResult result;
    result.final_state = prop.forward(state0, record_cache ? &result.cache : nullptr);
    return result;
}

StepCache propagate_backward(Backend backend, const OpenSystemModel& model,
                             const MultiIndexSet& mset, const ControlGrid& grid,
                             const AugmentedState& costate_T, const PropagationOptions& opts) {
    const Propagator prop(backend, model, mset, grid, opts);
    return prop.backward(costate_T);
}

double delta_st(const OpenSystemModel& model, const MultiIndexSet& mset, const ControlGrid& grid,
                const AugmentedState& state0, const PropagationOptions& opts) {
    const AugmentedState exact =
        propagate_forward(Backend::kExpm, model, mset, grid, state0, false, opts).final_state;
    const AugmentedState approx =
        propagate_forward(Backend::kTrotter, model, mset, grid, state0, false, opts).final_state;
    const double ref = exact.norm();
    if (ref == 0.0) throw std::invalid_argument("delta_st: exact final state is zero");
    return (exact - approx).norm() / ref;
}

}  // namespace stgrape
