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
#include <deque>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace stgrape {

/// Box constraints lo <= x <= hi (entries may be infinite).
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

/// Limited-memory curvature pairs (s, y); pairs with s.y <= eps |s| |y| are
/// rejected.
class LbfgsHistory {
   public:
    explicit LbfgsHistory(std::size_t memory);

    /// Returns false when the pair fails the curvature condition.
    bool push(const Eigen::VectorXd& s, const Eigen::VectorXd& y);
    void clear() { pairs_.clear(); }
    std::size_t size() const { return pairs_.size(); }
    std::size_t memory() const { return memory_; }

    /// -H g by the two-loop recursion, restricted to variables where
    /// free_mask is 1 (other entries of the result are zero).
    Eigen::VectorXd direction(const Eigen::VectorXd& g, const Eigen::VectorXd& free_mask) const;

   private:
    struct Pair {
        Eigen::VectorXd s;
        Eigen::VectorXd y;
    };
    std::size_t memory_;
    std::deque<Pair> pairs_;
};

/// f(x) for minimization; writes the gradient into grad.
using BoundedObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LineSearchOptions {
    double c1 = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
    /// With an empty history the first trial step moves at most this
    /// fraction of the narrowest finite box width.
    double first_step_fraction = 0.05;
    int max_backtracks = 40;
    /// Step of the projected-gradient fallback.
    double fallback_step = 1e-3;
};

struct BoundedStep {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    bool moved = false;
    bool used_fallback = false;
    int evaluations = 0;
};

/// Variables at a bound whose negative gradient points outward are fixed.
Eigen::VectorXd free_variables(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Box& box);

/// ||P(x - g) - x||_inf
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Box& box);

/// One projected L-BFGS iteration with Armijo backtracking along the
/// projected path. On line-search failure a projected gradient step with
/// fallback_step is tried and the history is cleared.
BoundedStep lbfgs_bounded_step(LbfgsHistory& history, const BoundedObjective& f,
                               const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& gx,
                               const Box& box, const LineSearchOptions& opts = {});

enum class MinimizeStatus { kConverged, kMaxIters, kStopped };

struct MinimizeOptions {
    std::size_t max_iters = 500;
    std::size_t memory = 10;
    double gradient_tolerance = 1e-8;
    /// Relative decrease below this counts as stalled (reported converged).
    double ftol = 1e-12;
    /// Stop once f <= f_target.
    double f_target = -std::numeric_limits<double>::infinity();
    LineSearchOptions line_search;
    /// Called with (iteration, x, f) at iteration 0 and after every accepted
    /// step; returning false stops the run.
    std::function<bool(std::size_t, const Eigen::VectorXd&, double)> callback;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    MinimizeStatus status = MinimizeStatus::kMaxIters;
    std::vector<double> history;  // f after each iteration, starting with f(x0)
};

MinimizeResult minimize_bounded(const BoundedObjective& f, const Eigen::VectorXd& x0,
                                const Box& box, const MinimizeOptions& opts = {});

}  // namespace stgrape
