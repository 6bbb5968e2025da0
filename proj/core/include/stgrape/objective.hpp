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
#include <string_view>
#include <variant>
#include <vector>

#include "stgrape/augment.hpp"
#include "stgrape/tensor.hpp"

namespace stgrape {

/// F = Re tr(rho * target)
double overlap(const CMatrix& rho, const CMatrix& target);

/// J = F[rho_0(T)] - 1/2 sum_p lambda_p ||rho_p(T)||_F^2.
/// lambdas is indexed by block position; the zero-order entry is ignored.
struct RobustStateObjective {
    CMatrix target;
    std::vector<double> lambdas;
};

/// Same lambda for every nonzero order. Validates a Hermitian, unit-trace
/// target and lambda >= 0.
RobustStateObjective make_robust_objective(const MultiIndexSet& mset, CMatrix target,
                                           double lambda = 1.0);

double robust_J(const AugmentedState& state, const RobustStateObjective& obj);
AugmentedState costate_J(const AugmentedState& state, const RobustStateObjective& obj);

/// J~ = tr[target rho_0(T)] + sum_i sigma_i^2 tr[target rho_ii(T)], the
/// second-order estimate of the mean overlap under independent zero-mean noise.
struct AverageStateObjective {
    CMatrix target;
    std::vector<double> sigmas;
    std::vector<std::size_t> second_order_blocks;  // block of p_i = 2 per i
};

/// Requires n >= 2 so that every (0,..,2,..,0) block exists.
AverageStateObjective make_average_objective(const MultiIndexSet& mset, CMatrix target,
                                             std::vector<double> sigmas);

double avg_J_tilde(const AugmentedState& state, const AverageStateObjective& obj);
AugmentedState costate_J_tilde(const AugmentedState& state, const AverageStateObjective& obj);

using StateObjective = std::variant<RobustStateObjective, AverageStateObjective>;

double objective_value(const AugmentedState& state, const StateObjective& obj);
AugmentedState objective_costate(const AugmentedState& state, const StateObjective& obj);
const CMatrix& objective_target(const StateObjective& obj);

enum class BasisKind { kThree, kDPlusOne };

BasisKind parse_basis_kind(std::string_view name);
std::string_view to_string(BasisKind kind);

/// Initial states for gate synthesis, all unit trace. kThree returns
/// {diag 2(d-k+1)/(d(d+1)), all-1/d, I/d}; kDPlusOne returns the
/// computational basis projectors followed by the all-1/d matrix.
std::vector<CMatrix> gate_basis_states(std::size_t d, BasisKind kind);

/// The three-state set with rho3 = I (not trace normalized).
std::vector<CMatrix> three_state_set(std::size_t d);

/// Checks Lambda(rho_i) = U rho_i U^dagger for the three-state set, given the
/// channel as a d^2 x d^2 supermatrix.
bool three_state_conditions_hold(const CMatrix& channel, const CMatrix& target_unitary,
                                 double tol = 1e-9);

struct GateObjective {
    CMatrix target_unitary;
    std::vector<CMatrix> initial_states;
    std::vector<double> weights;
    std::vector<StateObjective> objectives;
};

/// Uniform weights 1/(number of states); per-state robust objectives with a
/// common lambda and targets U rho_i(0) U^dagger.
GateObjective make_gate_objective(const CMatrix& target_unitary, const MultiIndexSet& mset,
                                  BasisKind kind = BasisKind::kDPlusOne, double lambda = 1.0);
/// As above with the J~ objective per state.
GateObjective make_average_gate_objective(const CMatrix& target_unitary,
                                          const MultiIndexSet& mset, BasisKind kind,
                                          std::vector<double> sigmas);

/// sum_i w_i J_i, reduced in index order.
double gate_objective(const std::vector<AugmentedState>& finals, const GateObjective& gobj);

bool is_unitary(const CMatrix& u, double tol = 1e-10);

/// Supermatrix of rho -> U rho U^dagger, i.e. conj(U) (x) U.
CMatrix unitary_superoperator(const CMatrix& u);

/// Re tr(S_U^dagger S) / d^2
double process_fidelity(const CMatrix& channel, const CMatrix& target_unitary);
/// (d F_pro + 1) / (d + 1)
double avg_gate_fidelity(const CMatrix& channel, const CMatrix& target_unitary);

/// Named targets: hadamard_transform and pauli_x (any n), cnot (n = 2),
/// toffoli (n = 3), cccnot (n = 4). Qubit 0 is the control-most factor.
CMatrix gate_preset(std::string_view name, std::size_t num_qubits);

}  // namespace stgrape
