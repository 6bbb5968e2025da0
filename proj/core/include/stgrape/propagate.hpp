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

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "stgrape/augment.hpp"
#include "stgrape/model.hpp"

namespace stgrape {

enum class Backend { kExpm, kOde, kTrotter };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);

/// How the collapse map rho -> sum_i gamma_i c_i rho c_i^dagger is applied.
enum class CollapseMode { kBlockwise, kVectorized };

struct PropagationOptions {
    std::size_t supermatrix_cap = kDefaultSupermatrixCap;
    /// 0 picks max(1, ceil(dt * ||generator||_est / ode_step_scale)).
    std::size_t ode_substeps = 0;
    double ode_step_scale = 0.1;
    CollapseMode collapse = CollapseMode::kBlockwise;
    /// Use the closed-form x/y diagonalizers when the model is a spin chain.
    bool spin_chain_fast_path = true;
    /// Per-step expm propagators are kept in memory while they fit here.
    std::size_t expm_cache_bytes = std::size_t{512} << 20;
};

/// Control Hamiltonians that commute pairwise, with a shared diagonalizer R
/// such that R^dagger H_c R = diag(spectra[i]) for c = channels[i].
struct ControlGroup {
    std::vector<std::size_t> channels;
    CMatrix diagonalizer;
    std::vector<Eigen::VectorXd> spectra;
};

/// Greedy grouping by pairwise commutator norm < 1e-10, diagonalized via a
/// random Hermitian combination of each group.
std::vector<ControlGroup> commuting_groups(const std::vector<CMatrix>& controls);

/// Groups {sigma_x on every qubit} and {sigma_y on every qubit} with the
/// tensor-product diagonalizers; requires the spin-chain channel layout.
std::vector<ControlGroup> spin_chain_groups(const OpenSystemModel& model);

/// Precomputed pieces of the symmetric Trotter step for one model and dt.
class TrotterPlan {
   public:
    TrotterPlan(const OpenSystemModel& model, double dt, const PropagationOptions& opts = {});

    double dt() const { return dt_; }
    std::size_t dim() const { return dim_; }
    const CMatrix& effective_hamiltonian() const { return h_eff_; }
    /// exp(-i H_eff dt)
    const CMatrix& drift_propagator() const { return u_eff_; }
    const std::vector<ControlGroup>& groups() const { return groups_; }
    const std::vector<CMatrix>& uncertainties() const { return uncertainties_; }
    const std::vector<CMatrix>& controls() const { return controls_; }
    CollapseMode collapse_mode() const { return collapse_; }
    /// Truncation order of the collapse exponential.
    static constexpr int kCollapseOrder = 2;

    /// exp(-i (dt/2) sum_{c in group q} u_c H_c)
    CMatrix group_unitary(std::size_t q, std::span<const double> amplitudes) const;

    /// In-place rho -> rho + a C rho + (a^2/2) C^2 rho with a = dt/2.
    void apply_collapse(AugmentedState& state) const;
    void apply_collapse_adjoint(AugmentedState& state) const;

   private:
    void collapse_once(const AugmentedState& in, AugmentedState& out, bool adjoint) const;

    double dt_;
    std::size_t dim_;
    CMatrix h_eff_;
    CMatrix u_eff_;
    std::vector<CMatrix> controls_;
    std::vector<CMatrix> uncertainties_;
    std::vector<ControlGroup> groups_;
    std::vector<SparseCMatrix> jumps_;
    std::vector<SparseCMatrix> jumps_adj_;
    SparseCMatrix collapse_super_;
    SparseCMatrix collapse_super_adj_;
    CollapseMode collapse_;
};

/// In-place conjugation of every block: rho -> U rho U^dagger.
void conjugate_blocks(AugmentedState& state, const CMatrix& u);

/// exp(dt_half * E_j) via the nested nilpotent loop; exact for the truncated
/// augmented system because E_j^(n+1) = 0.
AugmentedState exp_nilpotent(const OpenSystemModel& model, std::size_t j,
                             const MultiIndexSet& mset, const AugmentedState& state,
                             double dt_half);
/// exp(dt_half * E_j^dagger) by the same loop.
AugmentedState exp_nilpotent_adjoint(const OpenSystemModel& model, std::size_t j,
                                     const MultiIndexSet& mset, const AugmentedState& state,
                                     double dt_half);

AugmentedState step_expm(const OpenSystemModel& model, const MultiIndexSet& mset,
                         std::span<const double> amplitudes, double dt,
                         const AugmentedState& state,
                         std::size_t cap = kDefaultSupermatrixCap);

/// max(1, ceil(dt * estimate / step_scale)) with the estimate built from
/// 1-norms of the Lindblad generator and the commutators with E_j.
std::size_t default_substeps(const OpenSystemModel& model, std::span<const double> amplitudes,
                             double dt, double step_scale = 0.1);

AugmentedState step_ode(const OpenSystemModel& model, const MultiIndexSet& mset,
                        std::span<const double> amplitudes, double dt,
                        const AugmentedState& state, std::size_t substeps);

AugmentedState step_trotter(const TrotterPlan& plan, const MultiIndexSet& mset,
                            std::span<const double> amplitudes, const AugmentedState& state);
AugmentedState step_trotter_adjoint(const TrotterPlan& plan, const MultiIndexSet& mset,
                                    std::span<const double> amplitudes,
                                    const AugmentedState& state);

/// Trajectory record. states[k] is the state at t_k (k = 0..N_T). For the
/// Trotter backend, inner[k] holds the two intra-step points of step k: in a
/// forward cache the states just before each control block, in a backward
/// cache the co-states just after each control block.
struct StepCache {
    std::vector<AugmentedState> states;
    std::vector<std::array<AugmentedState, 2>> inner;
};

/// One backend bound to a model, truncation and pulse. Construction does all
/// per-pulse precomputation, after which every method is const and safe to
/// call from several threads.
class Propagator {
   public:
    Propagator(Backend backend, const OpenSystemModel& model, const MultiIndexSet& mset,
               const ControlGrid& grid, const PropagationOptions& opts = {});
    ~Propagator();
    Propagator(Propagator&&) noexcept;
    Propagator& operator=(Propagator&&) noexcept;

    Backend backend() const { return backend_; }
    std::size_t steps() const;
    const TrotterPlan* trotter_plan() const;
    /// Per-group unitaries of step k (Trotter backend only).
    const std::vector<CMatrix>& group_unitaries(std::size_t k) const;

    void step(std::size_t k, AugmentedState& state) const;
    void step_adjoint(std::size_t k, AugmentedState& state) const;

    /// Folds all steps; fills `cache` when given.
    AugmentedState forward(const AugmentedState& state0, StepCache* cache = nullptr) const;
    /// Applies the adjoint steps in reverse order; co-states for every t_k.
    /// Intra-step co-states are only recorded for the Trotter backend.
    StepCache backward(const AugmentedState& costate_T, bool record_inner = true) const;

   private:
    struct Impl;
    Backend backend_;
    std::unique_ptr<Impl> impl_;
};

struct ForwardResult {
    AugmentedState final_state;
    StepCache cache;
};

ForwardResult propagate_forward(Backend backend, const OpenSystemModel& model,
                                const MultiIndexSet& mset, const ControlGrid& grid,
                                const AugmentedState& state0, bool record_cache = false,
                                const PropagationOptions& opts = {});

StepCache propagate_backward(Backend backend, const OpenSystemModel& model,
                             const MultiIndexSet& mset, const ControlGrid& grid,
                             const AugmentedState& costate_T,
                             const PropagationOptions& opts = {});

/// ||exact(T) - trotter(T)|| / ||exact(T)|| with the expm backend as the
/// exact reference.
double delta_st(const OpenSystemModel& model, const MultiIndexSet& mset, const ControlGrid& grid,
                const AugmentedState& state0, const PropagationOptions& opts = {});

}  // namespace stgrape
