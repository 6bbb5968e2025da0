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

#include <cstdint>
#include <vector>

#include "stgrape/augment.hpp"
#include "stgrape/model.hpp"
#include "stgrape/optimize.hpp"
#include "stgrape/oracle.hpp"
#include "stgrape/random.hpp"
#include "stgrape/tensor.hpp"

namespace stgrape::testing {

inline CMatrix random_matrix(Eigen::Index d, Rng& rng) {
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    }
    return a;
}

inline CMatrix random_hermitian(Eigen::Index d, Rng& rng) {
    const CMatrix a = random_matrix(d, rng);
    return 0.5 * (a + a.adjoint());
}

inline CMatrix random_density(Eigen::Index d, Rng& rng) {
    const CMatrix a = random_matrix(d, rng);
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

inline CMatrix random_unitary(Eigen::Index d, Rng& rng) {
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(d, rng));
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
}

inline AugmentedState random_state(const MultiIndexSet& mset, Eigen::Index d, Rng& rng) {
    AugmentedState s(mset.size(), static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = random_hermitian(d, rng);
    return s;
}

inline double rel_error(const CMatrix& a, const CMatrix& ref) {
    return (a - ref).norm() / ref.norm();
}

inline double rel_error(const AugmentedState& a, const AugmentedState& ref) {
    return (a - ref).norm() / ref.norm();
}

/// Spin chain with edge uncertainties and strengthened decoherence so that
/// dissipative terms are visible over a few ns.
inline OpenSystemModel test_chain(std::size_t nq, std::size_t m, double t1_us = 30.0,
                                  double t2_us = 30.0) {
    OpenSystemModel base = build_spin_chain(nq, 30.0, t1_us, t2_us);
    OpenSystemModel edges = attach_uncertainties(base, UncertaintyKind::kEdges);
    std::vector<CMatrix> es = edges.uncertainties();
    es.resize(m);
    return base.with_uncertainties(es);
}

inline std::vector<AmplitudeBounds> mhz_bounds(std::size_t channels, double mhz) {
    const double a = mhz_to_rad_per_ns(mhz);
    return std::vector<AmplitudeBounds>(channels, AmplitudeBounds{-a, a});
}

inline ControlGrid test_grid(const OpenSystemModel& model, std::size_t steps, double dt,
                             std::uint64_t seed, double mhz = 100.0) {
    return random_grid(model.num_controls(), steps, dt, mhz_bounds(model.num_controls(), mhz),
                       seed);
}

/// Same pulse on a grid whose bounds are wide enough for finite differences.
inline ControlGrid unbounded_copy(const ControlGrid& grid) {
    ControlGrid out(grid.dt(), grid.steps(), grid.channels(),
                    std::vector<AmplitudeBounds>(grid.channels(), AmplitudeBounds{-1e3, 1e3}));
    out.set_flat(grid.flat());
    return out;
}

/// Central differences of the weighted objective, laid out channels x steps.
inline Eigen::MatrixXd fd_gradient(const ControlProblem& problem, const ControlGrid& grid,
                                   Backend backend, double h,
                                   const PropagationOptions& opts = {}) {
    ControlGrid work = unbounded_copy(grid);
    const Eigen::VectorXd x0 =
        Eigen::Map<const Eigen::VectorXd>(grid.flat().data(), static_cast<Eigen::Index>(grid.flat().size()));
    auto f = [&](const Eigen::VectorXd& x) {
        work.set_flat(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        return evaluate(problem, work, backend, false, opts).value;
    };
    const Eigen::VectorXd g = oracle::central_difference_gradient(f, x0, h);
    return Eigen::Map<const Eigen::MatrixXd>(g.data(), static_cast<Eigen::Index>(grid.channels()),
                                             static_cast<Eigen::Index>(grid.steps()));
}

inline double rel_inf_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
    return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

inline CMatrix basis_projector(std::size_t d, std::size_t i) {
    CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

}  // namespace stgrape::testing
