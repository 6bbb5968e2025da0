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

#include "stgrape/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stgrape {

namespace {

constexpr double kCurvatureEps = 1e-12;

}  // namespace

LbfgsHistory::LbfgsHistory(std::size_t memory) : memory_(memory) {
    if (memory == 0) throw std::invalid_argument("L-BFGS memory must be >= 1");
}

bool LbfgsHistory::push(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
    const double sy = s.dot(y);
    if (!(sy > kCurvatureEps * s.norm() * y.norm())) return false;
    if (pairs_.size() == memory_) pairs_.pop_front();
    pairs_.push_back({s, y});
    return true;
}

Eigen::VectorXd LbfgsHistory::direction(const Eigen::VectorXd& g,
                                        const Eigen::VectorXd& free_mask) const {
    Eigen::VectorXd q = g.cwiseProduct(free_mask);
    std::vector<double> alpha(pairs_.size(), 0.0);
    std::vector<double> rho(pairs_.size(), 0.0);
    std::vector<Eigen::VectorXd> ss(pairs_.size());
    std::vector<Eigen::VectorXd> ys(pairs_.size());
    double gamma = 1.0;
    bool have_gamma = false;
    for (std::size_t i = pairs_.size(); i-- > 0;) {
        ss[i] = pairs_[i].s.cwiseProduct(free_mask);
        ys[i] = pairs_[i].y.cwiseProduct(free_mask);
        const double sy = ss[i].dot(ys[i]);
        if (!(sy > kCurvatureEps * ss[i].norm() * ys[i].norm())) continue;
        rho[i] = 1.0 / sy;
        alpha[i] = rho[i] * ss[i].dot(q);
        q -= alpha[i] * ys[i];
        if (!have_gamma) {
            gamma = sy / ys[i].squaredNorm();
            have_gamma = true;
        }
    }
    Eigen::VectorXd r = gamma * q;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (rho[i] == 0.0) continue;
        const double beta = rho[i] * ys[i].dot(r);
        r += (alpha[i] - beta) * ss[i];
    }
    return -r.cwiseProduct(free_mask);
}

Eigen::VectorXd free_variables(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Box& box) {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x(i) <= box.lo(i) && g(i) > 0.0) || (x(i) >= box.hi(i) && g(i) < 0.0)) {
            mask(i) = 0.0;
        }
    }
    return mask;
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Box& box) {
    if (x.size() == 0) return 0.0;
    return (box.project(x - g) - x).cwiseAbs().maxCoeff();
}

BoundedStep lbfgs_bounded_step(LbfgsHistory& history, const BoundedObjective& f,
                               const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& gx,
                               const Box& box, const LineSearchOptions& opts) {
    BoundedStep out;
    out.x = x;
    out.f = fx;
    out.grad = gx;

    const Eigen::VectorXd mask = free_variables(x, gx, box);
    Eigen::VectorXd d = history.direction(gx, mask);
    if (!d.allFinite() || !(gx.dot(d) < 0.0)) {
        d = -gx.cwiseProduct(mask);
    }
    const double dmax = d.size() > 0 ? d.cwiseAbs().maxCoeff() : 0.0;

    if (dmax > 0.0) {
        double alpha = opts.initial_step;
        if (history.size() == 0) {
            double width = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double w = box.hi(i) - box.lo(i);
                if (std::isfinite(w) && w > 0.0) width = std::min(width, w);
            }
            if (std::isfinite(width)) alpha = std::min(alpha, opts.first_step_fraction * width / dmax);
        }
        Eigen::VectorXd gt(x.size());
        for (int attempt = 0; attempt < opts.max_backtracks; ++attempt) {
            const Eigen::VectorXd xt = box.project(x + alpha * d);
            const Eigen::VectorXd step = xt - x;
            if (step.cwiseAbs().maxCoeff() == 0.0) break;
            const double ft = f(xt, gt);
            ++out.evaluations;
            if (std::isfinite(ft) && ft <= fx + opts.c1 * gx.dot(step)) {
                history.push(step, gt - gx);
                out.x = xt;
                out.f = ft;
                out.grad = gt;
                out.moved = true;
                return out;
            }
            alpha *= opts.shrink;
        }
    }

    history.clear();
    const Eigen::VectorXd xt = box.project(x - opts.fallback_step * gx);
    if ((xt - x).cwiseAbs().maxCoeff() == 0.0) return out;
    Eigen::VectorXd gt(x.size());
    const double ft = f(xt, gt);
    ++out.evaluations;
    if (std::isfinite(ft) && ft < fx) {
        out.x = xt;
        out.f = ft;
        out.grad = gt;
        out.moved = true;
        out.used_fallback = true;
    }
    return out;
}

MinimizeResult minimize_bounded(const BoundedObjective& f, const Eigen::VectorXd& x0,
                                const Box& box, const MinimizeOptions& opts) {
    if (box.lo.size() != x0.size() || box.hi.size() != x0.size()) {
        throw std::invalid_argument("minimize_bounded: box size mismatch");
    }
    MinimizeResult res;
    res.x = box.project(x0);
    res.grad.resize(x0.size());
    res.f = f(res.x, res.grad);
    res.evaluations = 1;
    res.history.push_back(res.f);
    if (!std::isfinite(res.f)) {
        throw std::runtime_error("objective is not finite at the initial point");
    }
    if (opts.callback && !opts.callback(0, res.x, res.f)) {
        res.status = MinimizeStatus::kStopped;
        return res;
    }
    auto converged = [&] {
        return res.f <= opts.f_target ||
               projected_gradient_norm(res.x, res.grad, box) <= opts.gradient_tolerance;
    };
    LbfgsHistory history(opts.memory);
    res.status = MinimizeStatus::kMaxIters;
    while (true) {
        if (converged()) {
            res.status = MinimizeStatus::kConverged;
            break;
        }
        if (res.iterations >= opts.max_iters) break;
        const BoundedStep step = lbfgs_bounded_step(history, f, res.x, res.f, res.grad, box,
                                                    opts.line_search);
        res.evaluations += static_cast<std::size_t>(step.evaluations);
        if (!step.moved) {
            res.status = MinimizeStatus::kConverged;
            break;
        }
        const double scale = std::max({std::abs(res.f), std::abs(step.f), 1.0});
        const double decrease = (res.f - step.f) / scale;
        res.x = step.x;
        res.f = step.f;
        res.grad = step.grad;
        ++res.iterations;
        res.history.push_back(res.f);
        if (opts.callback && !opts.callback(res.iterations, res.x, res.f)) {
            res.status = MinimizeStatus::kStopped;
            break;
        }
        if (decrease <= opts.ftol) {
            res.status = MinimizeStatus::kConverged;
            break;
        }
    }
    return res;
}

}  // namespace stgrape
