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

#include "stgrape/oracle.hpp"
#include "stgrape/propagate.hpp"
#include "test_support.hpp"

namespace stgrape {
namespace {

using testing::random_density;
using testing::random_hermitian;
using testing::random_state;
using testing::rel_error;
using testing::test_chain;
using testing::test_grid;

std::vector<double> random_amps(std::size_t n, Rng& rng, double scale = 0.5) {
    std::vector<double> u(n);
    for (double& x : u) x = rng.uniform(-scale, scale);
    return u;
}

// The commuting limit: diagonal drift, one diagonal control, no dissipation.
OpenSystemModel commuting_model() {
    CMatrix h0 = CMatrix::Zero(2, 2);
    h0(0, 0) = 0.7;
    h0(1, 1) = -0.3;
    return OpenSystemModel(h0, {pauli::z()}, {}, {});
}

TEST(StepExpm, ZeroStepIsIdentity) {
    Rng rng(1);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.5);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const AugmentedState st = random_state(s, 4, rng);
    const AugmentedState out = step_expm(model, s, random_amps(4, rng), 0.0, st);
    EXPECT_LT((out - st).norm(), 1e-15 * st.norm());
}

TEST(StepExpm, RabiPiPulse) {
    // H = (Omega/2) sigma_x, so Omega T = pi is a full population transfer.
    const double omega = 0.4;
    const OpenSystemModel model(CMatrix::Zero(2, 2), {pauli::x()}, {}, {});
    const MultiIndexSet s = enumerate_orders(0, 0);
    CMatrix rho0 = CMatrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const double t = std::numbers::pi / omega;
    const std::vector<double> u = {omega / 2.0};
    // split into several steps to exercise the fold
    AugmentedState st = AugmentedState::initial(s, rho0);
    for (int k = 0; k < 7; ++k) st = step_expm(model, s, u, t / 7.0, st);
    CMatrix expect = CMatrix::Zero(2, 2);
    expect(1, 1) = 1.0;
    EXPECT_LT((st[0] - expect).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(StepExpm, CapExceeded) {
    const OpenSystemModel model = test_chain(3, 2);
    const MultiIndexSet s = enumerate_orders(2, 2);
    AugmentedState st(s.size(), 8);
    EXPECT_THROW(step_expm(model, s, std::vector<double>(6, 0.0), 0.5, st, 100),
                 SupermatrixCapExceeded);
}

TEST(StepOde, AgreesWithExpm) {
    Rng rng(2);
    for (int trial = 0; trial < 3; ++trial) {
        const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
        const MultiIndexSet s = enumerate_orders(2, 2);
        const auto u = random_amps(4, rng);
        const AugmentedState st = random_state(s, 4, rng);
        const AugmentedState a = step_expm(model, s, u, 0.5, st);
        const AugmentedState b = step_ode(model, s, u, 0.5, st, 64);
        EXPECT_LT((a - b).norm(), 1e-8 * a.norm());
    }
}

TEST(StepOde, DefaultSubstepsAreAccurate) {
    Rng rng(3);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const auto u = random_amps(4, rng);
    const AugmentedState st = random_state(s, 4, rng);
    const std::size_t sub = default_substeps(model, u, 0.5);
    EXPECT_GE(sub, 1u);
    const AugmentedState a = step_expm(model, s, u, 0.5, st);
    const AugmentedState b = step_ode(model, s, u, 0.5, st, sub);
    EXPECT_LT((a - b).norm(), 1e-6 * a.norm());
}

TEST(StepOde, ZeroGeneratorLeavesStateUnchanged) {
    Rng rng(4);
    const OpenSystemModel model(CMatrix::Zero(2, 2), {pauli::x()}, {}, {CMatrix::Zero(2, 2)});
    const MultiIndexSet s = enumerate_orders(1, 2);
    const AugmentedState st = random_state(s, 2, rng);
    const AugmentedState out = step_ode(model, s, std::vector<double>{0.0}, 1.0, st, 5);
    EXPECT_EQ((out - st).norm(), 0.0);
}

TEST(StepOde, ConservesBlockTraces) {
    Rng rng(5);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 2);
    AugmentedState st = AugmentedState::initial(s, random_density(4, rng));
    st = step_ode(model, s, random_amps(4, rng), 0.5, st, 10);
    for (std::size_t k = 0; k < st.size(); ++k) {
        const double expect = k == s.zero_index() ? 1.0 : 0.0;
        EXPECT_LT(std::abs(st[k].trace() - expect), 1e-10);
    }
}

TEST(StepOde, FourthOrderInSubsteps) {
    Rng rng(6);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const auto u = random_amps(4, rng, 0.6);
    const AugmentedState st = AugmentedState::initial(s, random_density(4, rng));
    const double dt = 2.0;
    const AugmentedState ref = step_expm(model, s, u, dt, st);
    const double e1 = (step_ode(model, s, u, dt, st, 4) - ref).norm();
    const double e2 = (step_ode(model, s, u, dt, st, 8) - ref).norm();
    EXPECT_GE(e1 / e2, 12.0);
    EXPECT_LE(e1 / e2, 20.0);
}

TEST(TrotterPlan, Invariants) {
    const OpenSystemModel model = test_chain(3, 2, 0.5, 0.3);
    const TrotterPlan plan(model, 0.5);
    CMatrix h_eff = model.drift();
    for (const auto& l : model.lindblads()) {
        h_eff -= Complex(0.0, 0.5) * l.rate * l.op.adjoint() * l.op;
    }
    EXPECT_LT((plan.effective_hamiltonian() - h_eff).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((plan.drift_propagator() - expm(Complex(0, -0.5) * h_eff)).norm(), 1e-12);
    std::size_t covered = 0;
    for (const auto& g : plan.groups()) {
        const CMatrix& r = g.diagonalizer;
        EXPECT_LT((r.adjoint() * r - identity(r.rows())).cwiseAbs().maxCoeff(), 1e-10);
        for (std::size_t i = 0; i < g.channels.size(); ++i) {
            CMatrix dm = r.adjoint() * model.controls()[g.channels[i]] * r;
            const CVector diag = dm.diagonal();
            dm.diagonal().setZero();
            EXPECT_LT(dm.norm(), 1e-10);
            EXPECT_LT((diag.real() - g.spectra[i]).norm(), 1e-10);
        }
        covered += g.channels.size();
    }
    EXPECT_EQ(covered, model.num_controls());
    EXPECT_EQ(plan.groups().size(), 2u);
}

TEST(TrotterPlan, FastPathMatchesGenericGroups) {
    Rng rng(7);
    const OpenSystemModel model = test_chain(3, 0);
    PropagationOptions generic;
    generic.spin_chain_fast_path = false;
    const TrotterPlan fast(model, 0.5);
    const TrotterPlan slow(model, 0.5, generic);
    ASSERT_EQ(fast.groups().size(), slow.groups().size());
    const auto u = random_amps(6, rng);
    for (std::size_t q = 0; q < fast.groups().size(); ++q) {
        EXPECT_EQ(fast.groups()[q].channels, slow.groups()[q].channels);
        EXPECT_LT((fast.group_unitary(q, u) - slow.group_unitary(q, u)).norm(), 1e-12);
    }
}

TEST(TrotterPlan, GenericGroupingOfArbitraryControls) {
    Rng rng(8);
    const CMatrix a = random_hermitian(3, rng);
    const CMatrix b = random_hermitian(3, rng);
    const CMatrix ab = a * a;  // commutes with a
    const auto groups = commuting_groups({a, b, ab});
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].channels, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(groups[1].channels, (std::vector<std::size_t>{1}));
}

TEST(StepTrotter, ExactInCommutingLimit) {
    const OpenSystemModel model = commuting_model();
    const MultiIndexSet s = enumerate_orders(0, 0);
    Rng rng(9);
    const AugmentedState st = AugmentedState::initial(s, random_density(2, rng));
    const std::vector<double> u = {0.8};
    const TrotterPlan plan(model, 0.5);
    const AugmentedState a = step_trotter(plan, s, u, st);
    const AugmentedState b = step_expm(model, s, u, 0.5, st);
    EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(StepTrotter, LocalErrorIsThirdOrder) {
    Rng rng(10);
    const OpenSystemModel model = test_chain(2, 2, 0.05, 0.02);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const auto u = random_amps(4, rng, 0.6);
    const AugmentedState st = AugmentedState::initial(s, random_density(4, rng));
    auto err = [&](double dt) {
        const TrotterPlan plan(model, dt);
        return (step_trotter(plan, s, u, st) - step_expm(model, s, u, dt, st)).norm();
    };
    const double ratio = err(0.2) / err(0.1);
    EXPECT_GE(ratio, 6.0);
    EXPECT_LE(ratio, 10.0);
}

TEST(StepTrotter, PreservesHermiticity) {
    Rng rng(11);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const TrotterPlan plan(model, 0.5);
    AugmentedState st = random_state(s, 4, rng);
    for (int k = 0; k < 10; ++k) st = step_trotter(plan, s, random_amps(4, rng), st);
    for (std::size_t k = 0; k < st.size(); ++k) EXPECT_LT(hermiticity_defect(st[k]), 1e-13);
}

TEST(StepTrotter, VectorizedCollapseMatchesBlockwise) {
    Rng rng(12);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 1);
    PropagationOptions vec_opts;
    vec_opts.collapse = CollapseMode::kVectorized;
    const TrotterPlan a(model, 0.5);
    const TrotterPlan b(model, 0.5, vec_opts);
    const AugmentedState st = random_state(s, 4, rng);
    const auto u = random_amps(4, rng);
    EXPECT_LT((step_trotter(a, s, u, st) - step_trotter(b, s, u, st)).norm(), 1e-13 * st.norm());
    EXPECT_LT((step_trotter_adjoint(a, s, u, st) - step_trotter_adjoint(b, s, u, st)).norm(),
              1e-13 * st.norm());
}

TEST(StepTrotter, AdjointIsSupermatrixDagger) {
    Rng rng(13);
    const OpenSystemModel model = test_chain(1, 1, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(1, 2);
    const TrotterPlan plan(model, 0.5);
    const auto u = random_amps(2, rng);
    const auto n = static_cast<Eigen::Index>(s.size() * 4);
    CMatrix fwd(n, n);
    CMatrix adj(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        CVector e = CVector::Zero(n);
        e(i) = 1.0;
        const AugmentedState b = AugmentedState::from_stacked(e, s.size(), 2);
        fwd.col(i) = step_trotter(plan, s, u, b).stacked();
        adj.col(i) = step_trotter_adjoint(plan, s, u, b).stacked();
    }
    EXPECT_LT((adj - fwd.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ExpNilpotent, OrderZeroIsIdentity) {
    Rng rng(14);
    const OpenSystemModel model = test_chain(1, 1);
    const MultiIndexSet s = enumerate_orders(1, 0);
    const AugmentedState st = random_state(s, 2, rng);
    EXPECT_EQ((exp_nilpotent(model, 0, s, st, 0.3) - st).norm(), 0.0);
}

TEST(ExpNilpotent, MatchesSupermatrixFactor) {
    Rng rng(15);
    const OpenSystemModel model(random_hermitian(2, rng), {}, {}, {random_hermitian(2, rng)});
    const MultiIndexSet s = enumerate_orders(1, 2);
    const double h = 0.37;
    const CMatrix r = s.incidence(0).cast<Complex>();
    const CMatrix factor = expm(h * kron(r, commutator_supermatrix(model.uncertainties()[0])));
    const AugmentedState st = random_state(s, 2, rng);
    const AugmentedState got = exp_nilpotent(model, 0, s, st, h);
    const CVector ref = factor * st.stacked();
    EXPECT_LT((got.stacked() - ref).norm(), 1e-11 * ref.norm());
    const CVector ref_adj = factor.adjoint() * st.stacked();
    EXPECT_LT((exp_nilpotent_adjoint(model, 0, s, st, h).stacked() - ref_adj).norm(),
              1e-11 * ref_adj.norm());
}

TEST(ExpNilpotent, NegatedStepInverts) {
    Rng rng(16);
    const OpenSystemModel model = test_chain(2, 2);
    const MultiIndexSet s = enumerate_orders(2, 3);
    const AugmentedState st = random_state(s, 4, rng);
    for (std::size_t j = 0; j < 2; ++j) {
        const AugmentedState back =
            exp_nilpotent(model, j, s, exp_nilpotent(model, j, s, st, 0.25), -0.25);
        EXPECT_LT((back - st).norm(), 1e-11 * st.norm());
        const AugmentedState back_adj = exp_nilpotent_adjoint(
            model, j, s, exp_nilpotent_adjoint(model, j, s, st, 0.25), -0.25);
        EXPECT_LT((back_adj - st).norm(), 1e-11 * st.norm());
    }
}

TEST(Propagate, EmptyGridReturnsInitialState) {
    Rng rng(17);
    const OpenSystemModel model = test_chain(1, 1);
    const MultiIndexSet s = enumerate_orders(1, 1);
    const ControlGrid grid(0.5, 0, 2, testing::mhz_bounds(2, 100.0));
    const AugmentedState st = random_state(s, 2, rng);
    for (Backend b : {Backend::kExpm, Backend::kOde, Backend::kTrotter}) {
        EXPECT_EQ((propagate_forward(b, model, s, grid, st).final_state - st).norm(), 0.0);
    }
}

TEST(Propagate, ZeroOrderBlockIsPlainLindblad) {
    Rng rng(18);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const ControlGrid grid = test_grid(model, 12, 0.5, 3);
    const CMatrix rho0 = random_density(4, rng);
    const CMatrix ref = oracle::propagate_noisy_exact(model, grid, std::vector<double>(2, 0.0), rho0);
    PropagationOptions fine;
    fine.ode_step_scale = 0.01;
    for (Backend b : {Backend::kExpm, Backend::kOde}) {
        const AugmentedState out =
            propagate_forward(b, model, s, grid, AugmentedState::initial(s, rho0), false, fine)
                .final_state;
        EXPECT_LT((out[s.zero_index()] - ref).norm(), 1e-10) << to_string(b);
    }
}

TEST(Propagate, DegenerateCaseAllBackendsAgree) {
    Rng rng(19);
    const OpenSystemModel model = test_chain(2, 0, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(0, 0);
    const ControlGrid grid = test_grid(model, 40, 0.05, 4);
    const CMatrix rho0 = random_density(4, rng);
    const CMatrix ref = oracle::propagate_noisy_exact(model, grid, {}, rho0);
    const auto st = AugmentedState::initial(s, rho0);
    EXPECT_LT((propagate_forward(Backend::kExpm, model, s, grid, st).final_state[0] - ref).norm(),
              1e-12);
    EXPECT_LT((propagate_forward(Backend::kOde, model, s, grid, st).final_state[0] - ref).norm(),
              1e-8);
    EXPECT_LT(
        (propagate_forward(Backend::kTrotter, model, s, grid, st).final_state[0] - ref).norm(),
        1e-3);
}

TEST(Propagate, ExactBackendsConserveTraceAndHermiticity) {
    Rng rng(20);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 2);
    const ControlGrid grid = test_grid(model, 100, 0.5, 5);
    for (Backend b : {Backend::kExpm, Backend::kOde}) {
        const auto res = propagate_forward(
            b, model, s, grid, AugmentedState::initial(s, random_density(4, rng)), true);
        ASSERT_EQ(res.cache.states.size(), 101u);
        for (const auto& st : res.cache.states) {
            for (std::size_t k = 0; k < st.size(); ++k) {
                const double expect = k == s.zero_index() ? 1.0 : 0.0;
                EXPECT_LT(std::abs(st[k].trace() - expect), 1e-9);
                EXPECT_LT(hermiticity_defect(st[k]), 1e-9);
            }
        }
    }
}

TEST(Propagate, PairingIsStepInvariant) {
    Rng rng(21);
    const OpenSystemModel model = test_chain(2, 2, 0.5, 0.3);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const ControlGrid grid = test_grid(model, 100, 0.5, 6);
    for (Backend b : {Backend::kExpm, Backend::kOde, Backend::kTrotter}) {
        const auto fwd = propagate_forward(
            b, model, s, grid, AugmentedState::initial(s, random_density(4, rng)), true);
        const StepCache bwd = propagate_backward(b, model, s, grid, random_state(s, 4, rng));
        ASSERT_EQ(bwd.states.size(), 101u);
        const Complex p0 = inner(bwd.states[0], fwd.cache.states[0]);
        for (std::size_t k = 1; k <= 100; ++k) {
            EXPECT_LT(std::abs(inner(bwd.states[k], fwd.cache.states[k]) - p0), 1e-9)
                << to_string(b) << " k=" << k;
        }
    }
}

TEST(Propagate, ClosedUnitaryBackwardUndoesForward) {
    Rng rng(22);
    const OpenSystemModel model(build_spin_chain(2, 30.0, 30.0, 30.0).drift(),
                                build_spin_chain(2, 30.0, 30.0, 30.0).controls(), {}, {});
    const MultiIndexSet s = enumerate_orders(0, 0);
    const ControlGrid grid = test_grid(model, 20, 0.5, 7);
    const AugmentedState o0 = random_state(s, 4, rng);
    // Adjoint of a unitary channel is its inverse: push o0 backward from a
    // forward-propagated copy.
    for (Backend b : {Backend::kExpm, Backend::kTrotter}) {
        const AugmentedState fwd = propagate_forward(b, model, s, grid, o0).final_state;
        const StepCache bwd = propagate_backward(b, model, s, grid, fwd);
        EXPECT_LT((bwd.states[0] - o0).norm(), 1e-9 * o0.norm()) << to_string(b);
    }
}

TEST(Propagate, TrotterCacheHasInnerStates) {
    Rng rng(23);
    const OpenSystemModel model = test_chain(2, 2);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const ControlGrid grid = test_grid(model, 5, 0.5, 8);
    const auto res = propagate_forward(Backend::kTrotter, model, s, grid,
                                       AugmentedState::initial(s, random_density(4, rng)), true);
    EXPECT_EQ(res.cache.states.size(), 6u);
    EXPECT_EQ(res.cache.inner.size(), 5u);
}

TEST(DeltaSt, ZeroInCommutingLimit) {
    const OpenSystemModel model = commuting_model();
    const MultiIndexSet s = enumerate_orders(0, 0);
    const ControlGrid grid(0.5, 6, 1, {{-1.0, 1.0}});
    CMatrix rho0 = CMatrix::Constant(2, 2, 0.5);
    EXPECT_LT(delta_st(model, s, grid, AugmentedState::initial(s, rho0)), 1e-13);
}

TEST(DeltaSt, GlobalSecondOrder) {
    const OpenSystemModel model = test_chain(2, 2);
    const MultiIndexSet s = enumerate_orders(2, 1);
    const ControlGrid coarse = test_grid(model, 20, 0.5, 9);
    const CMatrix rho0 = CMatrix::Constant(4, 4, 0.25);
    const auto st = AugmentedState::initial(s, rho0);
    const double ratio = delta_st(model, s, coarse, st) / delta_st(model, s, coarse.refined(2), st);
    EXPECT_GE(ratio, 3.2);
    EXPECT_LE(ratio, 4.8);
}

TEST(Backend, ParseNames) {
    EXPECT_EQ(parse_backend("expm"), Backend::kExpm);
    EXPECT_EQ(parse_backend("ode"), Backend::kOde);
    EXPECT_EQ(parse_backend("trotter"), Backend::kTrotter);
    EXPECT_THROW(parse_backend("euler"), std::invalid_argument);
    EXPECT_EQ(to_string(Backend::kTrotter), "trotter");
}

}  // namespace
}  // namespace stgrape
