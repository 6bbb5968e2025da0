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
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stgrape/model.hpp"
#include "stgrape/tensor.hpp"

// Brute-force references. Nothing here touches augmented blocks or Trotter
// factors: only model matrices, Kronecker products and expm.

namespace stgrape::oracle {

/// mat(L) for H_S + sum_j eps_j E_j, built directly from the model.
CMatrix noisy_supermatrix(const OpenSystemModel& model, std::span<const double> amplitudes,
                          std::span<const double> eps);

/// Full d^2 x d^2 channel of the pulse at fixed eps (ordered product of
/// per-step supermatrix exponentials). Column c*d+r is vec(Lambda(|r><c|))
/// under column stacking, i.e. the image of every matrix unit.
CMatrix noisy_channel(const OpenSystemModel& model, const ControlGrid& grid,
                      std::span<const double> eps);

/// rho(T; eps) of the noisy master equation.
CMatrix propagate_noisy_exact(const OpenSystemModel& model, const ControlGrid& grid,
                              std::span<const double> eps, const CMatrix& rho0);

inline constexpr double kDefaultFdStep = 1e-4;

/// Central-difference estimate of (1/p!) d^|p| rho(T; eps) / d eps^p at
/// eps = 0. Supports |p| <= 2 (including mixed second derivatives); throws
/// std::invalid_argument otherwise.
CMatrix fd_taylor_block(const OpenSystemModel& model, const ControlGrid& grid,
                        const CMatrix& rho0, std::span<const int> p, double h = kDefaultFdStep);

/// Central differences of a scalar function, one coordinate at a time.
Eigen::VectorXd central_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const Eigen::VectorXd& x, double h);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

/// Haar average of <psi| U^dag Lambda(|psi><psi|) U |psi> over random pure
/// states drawn as normalized complex Gaussian vectors. n_samples >= 100.
MonteCarloEstimate haar_mc_agf(const std::function<CMatrix(const CMatrix&)>& channel_apply,
                               const CMatrix& target_unitary, std::size_t n_samples,
                               std::uint64_t seed);

/// |dF_agf/d eps_j| at eps = 0 by central differences, one entry per
/// uncertainty operator.
std::vector<double> fidelity_sensitivity(const OpenSystemModel& model, const ControlGrid& grid,
                                         const CMatrix& target_unitary,
                                         double h = kDefaultFdStep);

inline const std::vector<double> kDefaultErrorThresholds = {0.001, 0.002, 0.005, 0.01, 0.02,
                                                            0.05,  0.1,   0.2,   0.5,  1.0};

struct NoiseSweepResult {
    std::vector<std::vector<double>> samples;  // eps per sample, rad/ns
    std::vector<double> fidelities;            // F_agf per sample
    double mean_error = 0.0;                   // mean of 1 - F_agf
    std::vector<double> thresholds;
    std::vector<double> cdf;  // fraction of samples with 1 - F_agf <= threshold
};

/// Samples eps from dist, reconstructs the channel for each sample and
/// tabulates the gate-error CDF. Samples run on up to `workers` threads.
NoiseSweepResult noise_sweep(const OpenSystemModel& model, const ControlGrid& grid,
                             const CMatrix& target_unitary, const NoiseDistribution& dist,
                             std::size_t count,
                             std::vector<double> thresholds = kDefaultErrorThresholds,
                             std::size_t workers = 1);

/// Empirical CDF of errors at each threshold.
std::vector<double> error_cdf(const std::vector<double>& errors,
                              const std::vector<double>& thresholds);

}  // namespace stgrape::oracle
