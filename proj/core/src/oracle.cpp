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

#include "stgrape/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stgrape/objective.hpp"
#include "stgrape/parallel.hpp"
#include "stgrape/random.hpp"

namespace stgrape::oracle {

namespace {

void check_eps(const OpenSystemModel& model, std::span<const double> eps) {
    if (eps.size() != model.num_uncertainties()) {
        throw std::invalid_argument("eps has " + std::to_string(eps.size()) +
                                    " entries, model has " +
                                    std::to_string(model.num_uncertainties()) + " uncertainties");
    }
}

}  // namespace

CMatrix noisy_supermatrix(const OpenSystemModel& model, std::span<const double> amplitudes,
                          std::span<const double> eps) {
    check_eps(model, eps);
    const auto d = static_cast<Eigen::Index>(model.dim());
    CMatrix h = model.drift();
    for (std::size_t c = 0; c < model.num_controls(); ++c) h += amplitudes[c] * model.controls()[c];
    for (std::size_t j = 0; j < eps.size(); ++j) h += eps[j] * model.uncertainties()[j];
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix s = -kI * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& ch : model.lindblads()) {
        const CMatrix cdc = ch.op.adjoint() * ch.op;
        s += ch.rate * (kron(ch.op.conjugate(), ch.op) - 0.5 * kron(id, cdc) -
                        0.5 * kron(cdc.transpose(), id));
    }
    return s;
}

CMatrix noisy_channel(const OpenSystemModel& model, const ControlGrid& grid,
                      std::span<const double> eps) {
    const auto d2 = static_cast<Eigen::Index>(model.dim() * model.dim());
    CMatrix channel = CMatrix::Identity(d2, d2);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const CMatrix p = expm(grid.dt() * noisy_supermatrix(model, grid.step_amplitudes(k), eps));
        channel = p * channel;
    }
    return channel;
}

CMatrix propagate_noisy_exact(const OpenSystemModel& model, const ControlGrid& grid,
                              std::span<const double> eps, const CMatrix& rho0) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("rho0 has wrong shape");
    CVector v = vec(rho0);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        v = expm(grid.dt() * noisy_supermatrix(model, grid.step_amplitudes(k), eps)) * v;
    }
    return unvec(v, d);
}

CMatrix fd_taylor_block(const OpenSystemModel& model, const ControlGrid& grid,
                        const CMatrix& rho0, std::span<const int> p, double h) {
    const std::size_t m = model.num_uncertainties();
    if (p.size() != m) throw std::invalid_argument("order tuple length does not match model");
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    std::vector<std::size_t> active;
    int total = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (p[j] < 0) throw std::invalid_argument("negative order");
        total += p[j];
        if (p[j] > 0) active.push_back(j);
    }
    if (total > 2) throw std::invalid_argument("fd_taylor_block supports total order <= 2");

    auto rho_at = [&](std::initializer_list<std::pair<std::size_t, double>> shifts) {
        std::vector<double> eps(m, 0.0);
        for (const auto& [j, s] : shifts) eps[j] += s;
        return propagate_noisy_exact(model, grid, eps, rho0);
    };
    if (total == 0) return rho_at({});
    if (total == 1) {
        const std::size_t j = active[0];
        return (rho_at({{j, h}}) - rho_at({{j, -h}})) / (2.0 * h);
    }
    if (active.size() == 1) {
        const std::size_t j = active[0];
        // (1/2!) second derivative
        return (rho_at({{j, h}}) - 2.0 * rho_at({}) + rho_at({{j, -h}})) / (2.0 * h * h);
    }
    const std::size_t a = active[0];
    const std::size_t b = active[1];
    return (rho_at({{a, h}, {b, h}}) - rho_at({{a, h}, {b, -h}}) - rho_at({{a, -h}, {b, h}}) +
            rho_at({{a, -h}, {b, -h}})) /
           (4.0 * h * h);
}

Eigen::VectorXd central_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

MonteCarloEstimate haar_mc_agf(const std::function<CMatrix(const CMatrix&)>& channel_apply,
                               const CMatrix& target_unitary, std::size_t n_samples,
                               std::uint64_t seed) {
    if (n_samples < 100) throw std::invalid_argument("haar_mc_agf needs at least 100 samples");
    const Eigen::Index d = target_unitary.rows();
    Rng rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    CVector psi(d);
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            psi(i) = Complex(re, im);
        }
        psi.normalize();
        const CMatrix out = channel_apply(psi * psi.adjoint());
        const CVector phi = target_unitary * psi;
        const double f = (phi.adjoint() * out * phi)(0, 0).real();
        sum += f;
        sum_sq += f * f;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

std::vector<double> fidelity_sensitivity(const OpenSystemModel& model, const ControlGrid& grid,
                                         const CMatrix& target_unitary, double h) {
    const std::size_t m = model.num_uncertainties();
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> eps(m, 0.0);
        eps[j] = h;
        const double fp = avg_gate_fidelity(noisy_channel(model, grid, eps), target_unitary);
        eps[j] = -h;
        const double fm = avg_gate_fidelity(noisy_channel(model, grid, eps), target_unitary);
        out[j] = std::abs(fp - fm) / (2.0 * h);
    }
    return out;
}

std::vector<double> error_cdf(const std::vector<double>& errors,
                              const std::vector<double>& thresholds) {
    std::vector<double> cdf;
    cdf.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto hits = std::count_if(errors.begin(), errors.end(), [t](double e) { return e <= t; });
        cdf.push_back(errors.empty() ? 0.0
                                     : static_cast<double>(hits) / static_cast<double>(errors.size()));
    }
    return cdf;
}

NoiseSweepResult noise_sweep(const OpenSystemModel& model, const ControlGrid& grid,
                             const CMatrix& target_unitary, const NoiseDistribution& dist,
                             std::size_t count, std::vector<double> thresholds,
                             std::size_t workers) {
    if (count == 0) throw std::invalid_argument("noise sweep needs at least one sample");
    if (dist.sigmas.size() != model.num_uncertainties()) {
        throw std::invalid_argument("noise distribution has the wrong number of sigmas");
    }
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw std::invalid_argument("error thresholds must be sorted");
    }
    NoiseSweepResult res;
    res.samples = dist.sample(count);
    res.fidelities.assign(count, 0.0);
    parallel_for(count, workers, [&](std::size_t i) {
        res.fidelities[i] = avg_gate_fidelity(noisy_channel(model, grid, res.samples[i]),
                                              target_unitary);
    });
    std::vector<double> errors(count);
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        errors[i] = 1.0 - res.fidelities[i];
        total += errors[i];
    }
    res.mean_error = total / static_cast<double>(count);
    res.cdf = error_cdf(errors, thresholds);
    res.thresholds = std::move(thresholds);
    return res;
}

}  // namespace stgrape::oracle
