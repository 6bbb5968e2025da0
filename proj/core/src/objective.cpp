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

#include "stgrape/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stgrape {

namespace {

void check_target(const CMatrix& target) {
    if (target.rows() != target.cols() || target.rows() == 0) {
        throw std::invalid_argument("target state must be square");
    }
    if (!is_hermitian(target, 1e-10)) {
        throw std::invalid_argument("target state must be Hermitian");
    }
    if (std::abs(trace(target) - Complex(1.0)) > 1e-12) {
        throw std::invalid_argument("target state must have unit trace");
    }
}

void check_blocks(const AugmentedState& state, const CMatrix& target, std::size_t expected) {
    if (state.size() != expected) {
        throw std::invalid_argument("augmented state has " + std::to_string(state.size()) +
                                    " blocks, objective expects " + std::to_string(expected));
    }
    if (static_cast<Eigen::Index>(state.dim()) != target.rows()) {
        throw std::invalid_argument("augmented state dimension does not match target");
    }
}

}  // namespace

double overlap(const CMatrix& rho, const CMatrix& target) {
    if (rho.rows() != target.cols() || rho.cols() != target.rows()) {
        throw std::invalid_argument("overlap: dimension mismatch");
    }
    // Re tr(A B) = Re sum_ij A_ij B_ji
    return (rho.array() * target.transpose().array()).sum().real();
}

RobustStateObjective make_robust_objective(const MultiIndexSet& mset, CMatrix target,
                                           double lambda) {
    check_target(target);
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    RobustStateObjective obj{std::move(target), std::vector<double>(mset.size(), lambda)};
    obj.lambdas[mset.zero_index()] = 0.0;
    return obj;
}

double robust_J(const AugmentedState& state, const RobustStateObjective& obj) {
    check_blocks(state, obj.target, obj.lambdas.size());
    const std::size_t zero = state.size() - 1;
    double j = overlap(state[zero], obj.target);
    for (std::size_t k = 0; k < zero; ++k) {
        if (obj.lambdas[k] != 0.0) j -= 0.5 * obj.lambdas[k] * state[k].squaredNorm();
    }
    return j;
}

AugmentedState costate_J(const AugmentedState& state, const RobustStateObjective& obj) {
    check_blocks(state, obj.target, obj.lambdas.size());
    const std::size_t zero = state.size() - 1;
    AugmentedState co(state.size(), state.dim());
    co[zero] = obj.target;
    for (std::size_t k = 0; k < zero; ++k) {
        if (obj.lambdas[k] != 0.0) co[k] = -obj.lambdas[k] * state[k];
    }
    return co;
}

AverageStateObjective make_average_objective(const MultiIndexSet& mset, CMatrix target,
                                             std::vector<double> sigmas) {
    check_target(target);
    if (sigmas.size() != mset.num_params()) {
        throw std::invalid_argument("average objective needs one sigma per uncertainty");
    }
    if (mset.order() < 2) {
        throw std::invalid_argument("average objective requires robustness order n >= 2");
    }
    AverageStateObjective obj{std::move(target), std::move(sigmas), {}};
    for (std::size_t i = 0; i < mset.num_params(); ++i) {
        if (!(obj.sigmas[i] >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
        std::vector<int> p(mset.num_params(), 0);
        p[i] = 2;
        obj.second_order_blocks.push_back(*mset.index_of(p));
    }
    return obj;
}

double avg_J_tilde(const AugmentedState& state, const AverageStateObjective& obj) {
    if (static_cast<Eigen::Index>(state.dim()) != obj.target.rows()) {
        throw std::invalid_argument("augmented state dimension does not match target");
    }
    double j = overlap(state[state.size() - 1], obj.target);
    for (std::size_t i = 0; i < obj.sigmas.size(); ++i) {
        const double s2 = obj.sigmas[i] * obj.sigmas[i];
        j += s2 * overlap(state[obj.second_order_blocks[i]], obj.target);
    }
    return j;
}

AugmentedState costate_J_tilde(const AugmentedState& state, const AverageStateObjective& obj) {
    AugmentedState co(state.size(), state.dim());
    co[state.size() - 1] = obj.target;
    for (std::size_t i = 0; i < obj.sigmas.size(); ++i) {
        co[obj.second_order_blocks[i]] = (obj.sigmas[i] * obj.sigmas[i]) * obj.target;
    }
    return co;
}

double objective_value(const AugmentedState& state, const StateObjective& obj) {
    if (const auto* r = std::get_if<RobustStateObjective>(&obj)) return robust_J(state, *r);
    return avg_J_tilde(state, std::get<AverageStateObjective>(obj));
}

AugmentedState objective_costate(const AugmentedState& state, const StateObjective& obj) {
    if (const auto* r = std::get_if<RobustStateObjective>(&obj)) return costate_J(state, *r);
    return costate_J_tilde(state, std::get<AverageStateObjective>(obj));
}

const CMatrix& objective_target(const StateObjective& obj) {
    return std::visit([](const auto& o) -> const CMatrix& { return o.target; }, obj);
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "three") return BasisKind::kThree;
    if (name == "d_plus_one") return BasisKind::kDPlusOne;
    throw std::invalid_argument("unknown basis kind '" + std::string(name) + "'");
}

std::string_view to_string(BasisKind kind) {
    return kind == BasisKind::kThree ? "three" : "d_plus_one";
}

std::vector<CMatrix> three_state_set(std::size_t d) {
    if (d < 2) throw std::invalid_argument("gate basis needs d >= 2");
    const auto n = static_cast<Eigen::Index>(d);
    const double dd = static_cast<double>(d);
    CMatrix r1 = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        // 1-based k in 2(d-k+1)/(d(d+1))
        r1(k, k) = 2.0 * (dd - static_cast<double>(k)) / (dd * (dd + 1.0));
    }
    const CMatrix r2 = CMatrix::Constant(n, n, 1.0 / dd);
    return {r1, r2, identity(n)};
}

std::vector<CMatrix> gate_basis_states(std::size_t d, BasisKind kind) {
    if (d < 2) throw std::invalid_argument("gate basis needs d >= 2");
    const auto n = static_cast<Eigen::Index>(d);
    if (kind == BasisKind::kThree) {
        auto states = three_state_set(d);
        states[2] /= static_cast<double>(d);
        return states;
    }
    std::vector<CMatrix> states;
    for (Eigen::Index i = 0; i < n; ++i) {
        CMatrix p = CMatrix::Zero(n, n);
        p(i, i) = 1.0;
        states.push_back(std::move(p));
    }
    states.push_back(CMatrix::Constant(n, n, 1.0 / static_cast<double>(d)));
    return states;
}

bool three_state_conditions_hold(const CMatrix& channel, const CMatrix& target_unitary,
                                 double tol) {
    const auto d = target_unitary.rows();
    if (channel.rows() != d * d || channel.cols() != d * d) {
        throw std::invalid_argument("channel supermatrix must be d^2 x d^2");
    }
    for (const auto& rho : three_state_set(static_cast<std::size_t>(d))) {
        const CMatrix out = unvec(channel * vec(rho), d);
        const CMatrix want = target_unitary * rho * target_unitary.adjoint();
        if ((out - want).norm() > tol) return false;
    }
    return true;
}

namespace {

GateObjective gate_skeleton(const CMatrix& u, BasisKind kind) {
    if (!is_unitary(u)) throw std::invalid_argument("target gate is not unitary");
    GateObjective g;
    g.target_unitary = u;
    g.initial_states = gate_basis_states(static_cast<std::size_t>(u.rows()), kind);
    g.weights.assign(g.initial_states.size(), 1.0 / static_cast<double>(g.initial_states.size()));
    return g;
}

}  // namespace

GateObjective make_gate_objective(const CMatrix& target_unitary, const MultiIndexSet& mset,
                                  BasisKind kind, double lambda) {
    GateObjective g = gate_skeleton(target_unitary, kind);
    for (const auto& rho : g.initial_states) {
        g.objectives.emplace_back(make_robust_objective(
            mset, target_unitary * rho * target_unitary.adjoint(), lambda));
    }
    return g;
}

GateObjective make_average_gate_objective(const CMatrix& target_unitary,
                                          const MultiIndexSet& mset, BasisKind kind,
                                          std::vector<double> sigmas) {
    GateObjective g = gate_skeleton(target_unitary, kind);
    for (const auto& rho : g.initial_states) {
        g.objectives.emplace_back(make_average_objective(
            mset, target_unitary * rho * target_unitary.adjoint(), sigmas));
    }
    return g;
}

double gate_objective(const std::vector<AugmentedState>& finals, const GateObjective& gobj) {
    if (finals.size() != gobj.objectives.size()) {
        throw std::invalid_argument("gate_objective: expected " +
                                    std::to_string(gobj.objectives.size()) + " final states, got " +
                                    std::to_string(finals.size()));
    }
    double j = 0.0;
    for (std::size_t i = 0; i < finals.size(); ++i) {
        j += gobj.weights[i] * objective_value(finals[i], gobj.objectives[i]);
    }
    return j;
}

bool is_unitary(const CMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - identity(u.rows())).cwiseAbs().maxCoeff() <= tol;
}

CMatrix unitary_superoperator(const CMatrix& u) { return kron(u.conjugate(), u); }

double process_fidelity(const CMatrix& channel, const CMatrix& target_unitary) {
    const auto d = target_unitary.rows();
    if (channel.rows() != channel.cols()) {
        throw std::invalid_argument("process_fidelity: channel supermatrix must be square");
    }
    if (channel.rows() != d * d) {
        throw std::invalid_argument("process_fidelity: channel size does not match target");
    }
    const CMatrix su = unitary_superoperator(target_unitary);
    // tr(A^dagger B) = sum conj(A_ij) B_ij
    const Complex t = (su.conjugate().array() * channel.array()).sum();
    return t.real() / static_cast<double>(d * d);
}

double avg_gate_fidelity(const CMatrix& channel, const CMatrix& target_unitary) {
    const double d = static_cast<double>(target_unitary.rows());
    return (d * process_fidelity(channel, target_unitary) + 1.0) / (d + 1.0);
}

CMatrix gate_preset(std::string_view name, std::size_t num_qubits) {
    if (num_qubits < 1) throw std::invalid_argument("gate preset needs at least one qubit");
    const auto d = Eigen::Index{1} << num_qubits;
    auto tensor_power = [num_qubits](const CMatrix& single) {
        CMatrix out = identity(1);
        for (std::size_t q = 0; q < num_qubits; ++q) out = kron(out, single);
        return out;
    };
    auto controlled_x = [&](std::size_t needed) {
        if (num_qubits != needed) {
            throw std::invalid_argument("gate preset '" + std::string(name) + "' needs " +
                                        std::to_string(needed) + " qubits");
        }
        CMatrix u = identity(d);
        u(d - 2, d - 2) = 0.0;
        u(d - 1, d - 1) = 0.0;
        u(d - 2, d - 1) = 1.0;
        u(d - 1, d - 2) = 1.0;
        return u;
    };
    if (name == "hadamard_transform") {
        const double s = 1.0 / std::sqrt(2.0);
        CMatrix h(2, 2);
        h << s, s, s, -s;
        return tensor_power(h);
    }
    if (name == "pauli_x") return tensor_power(pauli::x());
    if (name == "cnot") return controlled_x(2);
    if (name == "toffoli") return controlled_x(3);
    if (name == "cccnot") return controlled_x(4);
    throw std::invalid_argument("unknown gate preset '" + std::string(name) + "'");
}

}  // namespace stgrape
