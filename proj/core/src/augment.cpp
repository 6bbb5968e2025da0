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

#include "stgrape/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stgrape {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

namespace {

void enumerate_recursive(std::size_t m, int remaining, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (current.size() == m) {
        out.push_back(current);
        return;
    }
    for (int p = 0; p <= remaining; ++p) {
        current.push_back(p);
        enumerate_recursive(m, remaining - p, current, out);
        current.pop_back();
    }
}

std::size_t base_value(const std::vector<int>& p, std::size_t base) {
    std::size_t v = 0;
    for (int digit : p) {
        v = v * base + static_cast<std::size_t>(digit);
    }
    return v;
}

}  // namespace

MultiIndexSet::MultiIndexSet(std::size_t m, std::size_t n) : m_(m), n_(n) {
    std::vector<int> current;
    enumerate_recursive(m, static_cast<int>(n), current, orders_);
    const std::size_t base = n + 1;
    std::sort(orders_.begin(), orders_.end(), [base](const auto& a, const auto& b) {
        return base_value(a, base) > base_value(b, base);
    });

    lower_.assign(m, std::vector<std::size_t>(orders_.size(), kNone));
    raise_.assign(m, std::vector<std::size_t>(orders_.size(), kNone));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < orders_.size(); ++k) {
            if (orders_[k][j] >= 1) {
                std::vector<int> lowered = orders_[k];
                --lowered[j];
                const auto l = index_of(lowered);
                lower_[j][k] = *l;
                raise_[j][*l] = k;
            }
        }
    }
}

int MultiIndexSet::total_degree(std::size_t k) const {
    return std::accumulate(orders_[k].begin(), orders_[k].end(), 0);
}

std::optional<std::size_t> MultiIndexSet::index_of(std::span<const int> p) const {
    if (p.size() != m_) return std::nullopt;
    const std::size_t base = n_ + 1;
    int total = 0;
    for (int digit : p) {
        if (digit < 0) return std::nullopt;
        total += digit;
    }
    if (total > static_cast<int>(n_)) return std::nullopt;
    const std::size_t target = base_value(std::vector<int>(p.begin(), p.end()), base);
    // orders_ is sorted by strictly decreasing base value.
    auto it = std::lower_bound(orders_.begin(), orders_.end(), target,
                               [base](const std::vector<int>& o, std::size_t value) {
                                   return base_value(o, base) > value;
                               });
    if (it == orders_.end() || base_value(*it, base) != target) return std::nullopt;
    return static_cast<std::size_t>(it - orders_.begin());
}

std::size_t MultiIndexSet::count_with_positive(std::size_t j) const {
    return static_cast<std::size_t>(std::count_if(lower_[j].begin(), lower_[j].end(),
                                                  [](std::size_t l) { return l != kNone; }));
}

Eigen::MatrixXi MultiIndexSet::incidence(std::size_t j) const {
    const auto n = static_cast<Eigen::Index>(orders_.size());
    Eigen::MatrixXi r = Eigen::MatrixXi::Zero(n, n);
    for (std::size_t k = 0; k < orders_.size(); ++k) {
        if (lower_[j][k] != kNone) {
            r(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lower_[j][k])) = 1;
        }
    }
    return r;
}

MultiIndexSet enumerate_orders(std::size_t m, std::size_t n) { return MultiIndexSet(m, n); }

AugmentedState::AugmentedState(std::size_t num_blocks, std::size_t dim)
    : dim_(dim),
      blocks_(num_blocks, CMatrix::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim))) {}

AugmentedState AugmentedState::initial(const MultiIndexSet& mset, const CMatrix& rho0) {
    if (rho0.rows() != rho0.cols()) {
        throw std::invalid_argument("AugmentedState::initial: rho0 must be square");
    }
    AugmentedState s(mset.size(), static_cast<std::size_t>(rho0.rows()));
    s[mset.zero_index()] = rho0;
    return s;
}

CVector AugmentedState::stacked() const {
    const auto d2 = static_cast<Eigen::Index>(dim_ * dim_);
    CVector v(d2 * static_cast<Eigen::Index>(blocks_.size()));
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        v.segment(static_cast<Eigen::Index>(k) * d2, d2) = vec(blocks_[k]);
    }
    return v;
}

AugmentedState AugmentedState::from_stacked(const CVector& v, std::size_t num_blocks,
                                            std::size_t dim) {
    const auto d2 = static_cast<Eigen::Index>(dim * dim);
    if (v.size() != d2 * static_cast<Eigen::Index>(num_blocks)) {
        throw std::invalid_argument("AugmentedState::from_stacked: length mismatch");
    }
    AugmentedState s(num_blocks, dim);
    for (std::size_t k = 0; k < num_blocks; ++k) {
        s[k] = unvec(v.segment(static_cast<Eigen::Index>(k) * d2, d2),
                     static_cast<Eigen::Index>(dim));
    }
    return s;
}

double AugmentedState::norm() const {
    double sum = 0.0;
    for (const auto& b : blocks_) {
        sum += b.squaredNorm();
    }
    return std::sqrt(sum);
}

AugmentedState& AugmentedState::operator+=(const AugmentedState& other) {
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
    return *this;
}

AugmentedState& AugmentedState::operator-=(const AugmentedState& other) {
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
    return *this;
}

AugmentedState& AugmentedState::operator*=(Complex s) {
    for (auto& b : blocks_) b *= s;
    return *this;
}

AugmentedState& AugmentedState::add_scaled(Complex s, const AugmentedState& other) {
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += s * other.blocks_[k];
    return *this;
}

void AugmentedState::set_zero() {
    for (auto& b : blocks_) b.setZero();
}

AugmentedState operator+(AugmentedState a, const AugmentedState& b) { return a += b; }
AugmentedState operator-(AugmentedState a, const AugmentedState& b) { return a -= b; }
AugmentedState operator*(Complex s, AugmentedState a) { return a *= s; }

Complex inner(const AugmentedState& a, const AugmentedState& b) {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sum += hs_inner(a[k], b[k]);
    }
    return sum;
}

}  // namespace stgrape
