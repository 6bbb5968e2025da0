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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stgrape/objective.hpp"
#include "stgrape/oracle.hpp"
#include "stgrape/propagate.hpp"
#include "test_support.hpp"

namespace stgrape {
namespace {

using testing::random_density;
using testing::random_hermitian;
using testing::random_state;
using testing::random_unitary;

CMatrix projector(Eigen::Index d, Eigen::Index i) {
    CMatrix p = CMatrix::Zero(d, d);
    p(i, i) = 1.0;
    return p;
}

TEST(Overlap, Basics) {
    EXPECT_DOUBLE_EQ(overlap(projector(2, 0), projector(2, 0)), 1.0);
    EXPECT_DOUBLE_EQ(overlap(identity(4) / 4.0, projector(4, 2)), 0.25);
    Rng rng(1);
    const CMatrix a = random_hermitian(3, rng);
    const CMatrix b = random_hermitian(3, rng);
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) direct += (a(i, j) * b(j, i)).real();
    }
    EXPECT_NEAR(overlap(a, b), direct, 1e-13);
}

TEST(RobustJ, PerfectTransfer) {
    const MultiIndexSet s = enumerate_orders(2, 1);
    const auto obj = make_robust_objective(s, projector(2, 1));
    EXPECT_DOUBLE_EQ(robust_J(AugmentedState::initial(s, projector(2, 1)), obj), 1.0);
}

TEST(RobustJ, ZeroLambdaIsOverlap) {
    Rng rng(2);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const CMatrix target = random_density(2, rng);
    const auto obj = make_robust_objective(s, target, 0.0);
    const AugmentedState st = random_state(s, 2, rng);
    EXPECT_DOUBLE_EQ(robust_J(st, obj), overlap(st[s.zero_index()], target));
}

TEST(RobustJ, SingleBlockPenalty) {
    Rng rng(3);
    const MultiIndexSet s = enumerate_orders(1, 1);
    const CMatrix target = random_density(2, rng);
    const auto obj = make_robust_objective(s, target, 2.0);
    AugmentedState st = AugmentedState::initial(s, random_density(2, rng));
    st[0] = random_hermitian(2, rng);
    const double f = overlap(st[1], target);
    EXPECT_NEAR(robust_J(st, obj), f - st[0].squaredNorm(), 1e-14);
    EXPECT_LE(robust_J(st, obj), f);
}

TEST(RobustJ, ValidatesTarget) {
    const MultiIndexSet s = enumerate_orders(1, 1);
    EXPECT_THROW(make_robust_objective(s, identity(2)), std::invalid_argument);
    EXPECT_THROW(make_robust_objective(s, pauli::lowering()), std::invalid_argument);
    EXPECT_THROW(make_robust_objective(s, projector(2, 0), -1.0), std::invalid_argument);
}

TEST(CostateJ, Structure) {
    Rng rng(4);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const CMatrix target = random_density(2, rng);
    const auto obj = make_robust_objective(s, target, 1.5);
    const AugmentedState zero_high = AugmentedState::initial(s, random_density(2, rng));
    const AugmentedState co = costate_J(zero_high, obj);
    EXPECT_TRUE(co[s.zero_index()] == target);
    for (std::size_t k = 0; k < s.zero_index(); ++k) EXPECT_EQ(co[k].norm(), 0.0);
    const AugmentedState st = random_state(s, 2, rng);
    const AugmentedState co2 = costate_J(st, obj);
    for (std::size_t k = 0; k < s.zero_index(); ++k) {
        EXPECT_LT((co2[k] + 1.5 * st[k]).norm(), 1e-15);
    }
}

// Re <costate, delta> must be the directional derivative of the objective.
void expect_gateaux(const AugmentedState& st, const StateObjective& obj, Rng& rng) {
    AugmentedState dir(st.size(), st.dim());
    for (std::size_t k = 0; k < st.size(); ++k) {
        dir[k] = random_hermitian(static_cast<Eigen::Index>(st.dim()), rng);
    }
    const double h = 1e-5;
    AugmentedState plus = st;
    plus.add_scaled(h, dir);
    AugmentedState minus = st;
    minus.add_scaled(-h, dir);
    const double fd = (objective_value(plus, obj) - objective_value(minus, obj)) / (2 * h);
    const double an = inner(objective_costate(st, obj), dir).real();
    EXPECT_NEAR(an, fd, 1e-8);
}

TEST(CostateJ, GateauxDerivative) {
    Rng rng(5);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const auto obj = make_robust_objective(s, random_density(2, rng), 0.7);
    for (int t = 0; t < 5; ++t) expect_gateaux(random_state(s, 2, rng), obj, rng);
}

TEST(AverageJ, ZeroSigmaIsOverlap) {
    Rng rng(6);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const CMatrix target = random_density(2, rng);
    const auto obj = make_average_objective(s, target, {0.0, 0.0});
    const AugmentedState st = random_state(s, 2, rng);
    EXPECT_DOUBLE_EQ(avg_J_tilde(st, obj), overlap(st[s.zero_index()], target));
}

TEST(AverageJ, CostateLayout) {
    Rng rng(7);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const CMatrix target = random_density(2, rng);
    const double s1 = 0.3;
    const double s2 = 0.7;
    const auto obj = make_average_objective(s, target, {s1, s2});
    const AugmentedState co = costate_J_tilde(random_state(s, 2, rng), obj);
    const std::vector<CMatrix> expect = {s1 * s1 * target, CMatrix::Zero(2, 2),
                                         CMatrix::Zero(2, 2), s2 * s2 * target,
                                         CMatrix::Zero(2, 2), target};
    ASSERT_EQ(co.size(), expect.size());
    for (std::size_t k = 0; k < expect.size(); ++k) EXPECT_LT((co[k] - expect[k]).norm(), 1e-15);
}

TEST(AverageJ, GateauxDerivative) {
    Rng rng(8);
    const MultiIndexSet s = enumerate_orders(2, 3);
    const auto obj = make_average_objective(s, random_density(2, rng), {0.2, 0.5});
    for (int t = 0; t < 5; ++t) expect_gateaux(random_state(s, 2, rng), obj, rng);
}

TEST(AverageJ, RequiresSecondOrder) {
    const MultiIndexSet s = enumerate_orders(2, 1);
    EXPECT_THROW(make_average_objective(s, projector(2, 0), {0.1, 0.1}), std::invalid_argument);
}

// Mean overlap over eps ~ N(0, sigma^2) against the second-order estimate.
TEST(AverageJ, ApproximatesMonteCarloMean) {
    const OpenSystemModel model = testing::test_chain(1, 1, 5.0, 5.0);
    const MultiIndexSet s = enumerate_orders(1, 2);
    const ControlGrid grid = testing::test_grid(model, 10, 1.0, 21);
    const CMatrix rho0 = projector(2, 0);
    const CMatrix target = projector(2, 1);
    const AugmentedState fin =
        propagate_forward(Backend::kExpm, model, s, grid, AugmentedState::initial(s, rho0))
            .final_state;
    auto mc_error = [&](double sigma) {
        const auto obj = make_average_objective(s, target, {sigma});
        Rng rng(99);
        const std::size_t pairs = 10000;
        double sum = 0.0;
        for (std::size_t i = 0; i < pairs; ++i) {
            const double e = sigma * rng.normal();
            // antithetic pair cancels the odd orders exactly
            for (double sign : {1.0, -1.0}) {
                const std::vector<double> eps = {sign * e};
                sum += overlap(oracle::propagate_noisy_exact(model, grid, eps, rho0), target);
            }
        }
        return std::abs(sum / (2.0 * pairs) - avg_J_tilde(fin, obj));
    };
    const double sigma = mhz_to_rad_per_ns(8.0);
    const double e1 = mc_error(sigma);
    const double e2 = mc_error(sigma / 2.0);
    RecordProperty("error_ratio", std::to_string(e1 / e2));
    EXPECT_GE(e1 / e2, 4.0) << e1 << " " << e2;
}

TEST(GateBasis, ThreeStates) {
    const auto st = gate_basis_states(2, BasisKind::kThree);
    ASSERT_EQ(st.size(), 3u);
    EXPECT_NEAR(st[0](0, 0).real(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(st[0](1, 1).real(), 1.0 / 3.0, 1e-15);
    EXPECT_TRUE(st[2].isApprox(identity(2) / 2.0));
    const auto raw = three_state_set(2);
    EXPECT_TRUE(raw[2] == identity(2));
}

TEST(GateBasis, DPlusOne) {
    const auto st = gate_basis_states(2, BasisKind::kDPlusOne);
    ASSERT_EQ(st.size(), 3u);
    EXPECT_TRUE(st[0] == projector(2, 0));
    EXPECT_TRUE(st[1] == projector(2, 1));
    EXPECT_TRUE(st[2].isApprox(CMatrix::Constant(2, 2, 0.5)));
}

TEST(GateBasis, HermitianPsdUnitTrace) {
    for (std::size_t d : {2u, 3u, 8u}) {
        for (BasisKind kind : {BasisKind::kThree, BasisKind::kDPlusOne}) {
            for (const CMatrix& r : gate_basis_states(d, kind)) {
                EXPECT_TRUE(is_hermitian(r));
                EXPECT_NEAR(r.trace().real(), 1.0, 1e-14);
                Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
                EXPECT_GE(es.eigenvalues().minCoeff(), -1e-14);
            }
        }
    }
}

TEST(GateBasis, ThreeStateConditions) {
    Rng rng(9);
    const CMatrix u = random_unitary(2, rng);
    EXPECT_TRUE(three_state_conditions_hold(unitary_superoperator(u), u));
    const CMatrix v = random_unitary(2, rng);
    EXPECT_FALSE(three_state_conditions_hold(unitary_superoperator(v), u));
}

// For unitary channels near U, the d+1 outputs determine the unitary up to
// phase: the linearized map from su(2) generators to outputs has full rank.
TEST(GateBasis, DPlusOneDeterminesUnitary) {
    Rng rng(10);
    const auto states = gate_basis_states(2, BasisKind::kDPlusOne);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix u = random_unitary(2, rng);
        Eigen::MatrixXd jac(states.size() * 8, 3);
        const std::vector<CMatrix> gens = {pauli::x(), pauli::y(), pauli::z()};
        for (int g = 0; g < 3; ++g) {
            const CMatrix du = -kI * gens[static_cast<std::size_t>(g)] * u;
            Eigen::Index row = 0;
            for (const CMatrix& r : states) {
                const CMatrix out = du * r * u.adjoint() + u * r * du.adjoint();
                for (Eigen::Index i = 0; i < 4; ++i) {
                    jac(row++, g) = out(i / 2, i % 2).real();
                    jac(row++, g) = out(i / 2, i % 2).imag();
                }
            }
        }
        EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(jac).rank(), 3);
    }
}

OpenSystemModel gate_model(const CMatrix& u, double t) {
    // H with exp(-i H t) = u
    Eigen::ComplexEigenSolver<CMatrix> es(u);
    const CMatrix v = es.eigenvectors();
    CVector angles(u.rows());
    for (Eigen::Index i = 0; i < u.rows(); ++i) angles(i) = -std::arg(es.eigenvalues()(i)) / t;
    CMatrix h = v * angles.asDiagonal() * v.inverse();
    h = 0.5 * (h + h.adjoint());
    return OpenSystemModel(h, {}, {}, {});
}

TEST(GateObjective, UnitObjectiveImpliesUnitProcessFidelity) {
    Rng rng(11);
    const MultiIndexSet s = enumerate_orders(0, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix u = random_unitary(2, rng);
        const OpenSystemModel model = gate_model(u, 2.0);
        const ControlGrid grid(1.0, 2, 0, {});
        const GateObjective gobj = make_gate_objective(u, s);
        std::vector<AugmentedState> finals;
        for (const CMatrix& r : gobj.initial_states) {
            finals.push_back(
                propagate_forward(Backend::kExpm, model, s, grid, AugmentedState::initial(s, r))
                    .final_state);
        }
        const double j = gate_objective(finals, gobj);
        ASSERT_NEAR(j, 1.0, 1e-9);
        const CMatrix channel = oracle::noisy_channel(model, grid, {});
        EXPECT_NEAR(process_fidelity(channel, u), 1.0, 1e-6);
    }
}

TEST(GateObjective, TargetChannelScoresOne) {
    Rng rng(12);
    const MultiIndexSet s = enumerate_orders(1, 1);
    const CMatrix u = random_unitary(4, rng);
    const GateObjective gobj = make_gate_objective(u, s);
    EXPECT_EQ(gobj.initial_states.size(), 5u);
    std::vector<AugmentedState> finals;
    for (const CMatrix& r : gobj.initial_states) {
        finals.push_back(AugmentedState::initial(s, u * r * u.adjoint()));
    }
    EXPECT_NEAR(gate_objective(finals, gobj), 1.0, 1e-12);
    finals.pop_back();
    EXPECT_THROW(gate_objective(finals, gobj), std::invalid_argument);
}

TEST(GateObjective, UniformWeightsAverage) {
    const MultiIndexSet s = enumerate_orders(0, 0);
    const GateObjective gobj = make_gate_objective(identity(2), s);
    double wsum = 0.0;
    for (double w : gobj.weights) {
        EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
        wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    // all final states maximally mixed: each J_i = 1/2
    std::vector<AugmentedState> finals(3, AugmentedState::initial(s, identity(2) / 2.0));
    EXPECT_NEAR(gate_objective(finals, gobj), 0.5, 1e-15);
}

TEST(Fidelity, TargetChannelIsOne) {
    Rng rng(13);
    const CMatrix u = random_unitary(3, rng);
    EXPECT_NEAR(avg_gate_fidelity(unitary_superoperator(u), u), 1.0, 1e-13);
    EXPECT_NEAR(process_fidelity(unitary_superoperator(u), u), 1.0, 1e-13);
}

TEST(Fidelity, Depolarizing) {
    const CVector vi = vec(identity(2));
    const CMatrix depol = vi * vi.transpose() / 2.0;
    EXPECT_NEAR(avg_gate_fidelity(depol, identity(2)), 0.5, 1e-15);
    Rng rng(14);
    EXPECT_NEAR(avg_gate_fidelity(depol, random_unitary(2, rng)), 0.5, 1e-14);
}

TEST(Fidelity, RejectsBadShapes) {
    EXPECT_THROW(process_fidelity(CMatrix::Zero(4, 3), identity(2)), std::invalid_argument);
    EXPECT_THROW(process_fidelity(CMatrix::Zero(9, 9), identity(2)), std::invalid_argument);
}

TEST(Presets, Gates) {
    const CMatrix h = gate_preset("hadamard_transform", 2);
    EXPECT_TRUE(is_unitary(h));
    EXPECT_NEAR(std::abs(h(0, 0)), 0.5, 1e-15);
    const CMatrix cnot = gate_preset("cnot", 2);
    EXPECT_EQ(cnot(2, 3), Complex(1.0));
    EXPECT_EQ(cnot(3, 2), Complex(1.0));
    EXPECT_EQ(cnot(0, 0), Complex(1.0));
    EXPECT_EQ(gate_preset("toffoli", 3)(7, 6), Complex(1.0));
    EXPECT_EQ(gate_preset("cccnot", 4)(15, 14), Complex(1.0));
    EXPECT_THROW(gate_preset("cnot", 3), std::invalid_argument);
    EXPECT_THROW(gate_preset("swap", 2), std::invalid_argument);
}

}  // namespace
}  // namespace stgrape
