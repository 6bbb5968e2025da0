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
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stgrape/model.hpp"
#include "stgrape/tensor.hpp"

namespace stgrape {

/// Binomial coefficient C(n, k) computed exactly in integers.
std::size_t binomial(std::size_t n, std::size_t k);

/// Truncated multi-indices (p_1, ..., p_m) with total degree <= n, sorted by
/// descending base-(n+1) value v(p) = sum_j p_j (n+1)^(m-j).
///
/// Indices are 0-based: the first entry is (n, 0, ..., 0) and the last entry
/// (index size()-1) is the zero order. Uncertainty indices j are 0-based too.
class MultiIndexSet {
   public:
    MultiIndexSet(std::size_t m, std::size_t n);

    std::size_t num_params() const { return m_; }
    std::size_t order() const { return n_; }
    std::size_t size() const { return orders_.size(); }
    std::size_t zero_index() const { return orders_.size() - 1; }

    std::span<const int> multi_index(std::size_t k) const {
        return {orders_[k].data(), orders_[k].size()};
    }
    int total_degree(std::size_t k) const;
    std::optional<std::size_t> index_of(std::span<const int> p) const;

    /// Index of (p_1, ..., p_j - 1, ..., p_m) when p_j >= 1.
    std::optional<std::size_t> lower(std::size_t j, std::size_t k) const {
        const auto l = lower_[j][k];
        return l == kNone ? std::nullopt : std::optional<std::size_t>(l);
    }
    /// Inverse of lower: index of (p_1, ..., p_j + 1, ..., p_m) if present.
    std::optional<std::size_t> raise(std::size_t j, std::size_t k) const {
        const auto r = raise_[j][k];
        return r == kNone ? std::nullopt : std::optional<std::size_t>(r);
    }

    /// Number of indices with p_j >= 1 (nonzeros of R_j).
    std::size_t count_with_positive(std::size_t j) const;

    /// Dense integer incidence matrix R_j: (R_j)_{k,l} = 1 iff l = lower_j(k).
    Eigen::MatrixXi incidence(std::size_t j) const;

   private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<int>> orders_;
    std::vector<std::vector<std::size_t>> lower_;
    std::vector<std::vector<std::size_t>> raise_;
};

MultiIndexSet enumerate_orders(std::size_t m, std::size_t n);

/// Stack of N d x d Taylor-coefficient blocks in MultiIndexSet order.
class AugmentedState {
   public:
    AugmentedState() = default;
    AugmentedState(std::size_t num_blocks, std::size_t dim);

    /// rho0 in the zero-order block, all other blocks zero.
    static AugmentedState initial(const MultiIndexSet& mset, const CMatrix& rho0);

    std::size_t size() const { return blocks_.size(); }
    std::size_t dim() const { return dim_; }
    CMatrix& operator[](std::size_t k) { return blocks_[k]; }
    const CMatrix& operator[](std::size_t k) const { return blocks_[k]; }
    std::vector<CMatrix>& blocks() { return blocks_; }
    const std::vector<CMatrix>& blocks() const { return blocks_; }

    /// Concatenation of vec(block_k) in block order (length N d^2).
    CVector stacked() const;
    static AugmentedState from_stacked(const CVector& v, std::size_t num_blocks, std::size_t dim);

    /// sqrt(sum_k ||block_k||_F^2)
    double norm() const;
    AugmentedState& operator+=(const AugmentedState& other);
    AugmentedState& operator-=(const AugmentedState& other);
    AugmentedState& operator*=(Complex s);
    /// this += s * other
    AugmentedState& add_scaled(Complex s, const AugmentedState& other);
    void set_zero();

   private:
    std::size_t dim_ = 0;
    std::vector<CMatrix> blocks_;
};

AugmentedState operator+(AugmentedState a, const AugmentedState& b);
AugmentedState operator-(AugmentedState a, const AugmentedState& b);
AugmentedState operator*(Complex s, AugmentedState a);

/// sum_k tr(a_k^dagger b_k)
Complex inner(const AugmentedState& a, const AugmentedState& b);

/// Lindblad generator for one interval with fixed amplitudes, written as
/// L rho = -i (H_eff rho - rho H_eff^dagger) + sum_i gamma_i c_i rho c_i^dagger
/// with H_eff = H_S - (i/2) sum_i gamma_i c_i^dagger c_i.
class LindbladGenerator {
   public:
    LindbladGenerator(const OpenSystemModel& model, std::span<const double> amplitudes);

    CMatrix apply(const CMatrix& rho) const;
    CMatrix apply_adjoint(const CMatrix& rho) const;
    /// Rough upper bound on the induced norm of the superoperator.
    double norm_bound() const;

    const CMatrix& hamiltonian() const { return h_; }
    const CMatrix& effective_hamiltonian() const { return h_eff_; }

   private:
    CMatrix h_;
    CMatrix h_eff_;
    std::vector<SparseCMatrix> jumps_;      // sqrt(gamma_i) c_i
    std::vector<SparseCMatrix> jumps_adj_;  // sqrt(gamma_i) c_i^dagger
};

/// Block-wise L: every block maps to L(block); blocks do not mix.
AugmentedState apply_L(const OpenSystemModel& model, std::span<const double> amplitudes,
                       const AugmentedState& state);
AugmentedState apply_L_adjoint(const OpenSystemModel& model, std::span<const double> amplitudes,
                               const AugmentedState& state);

/// (E_j rho)_[k] = -i [E_j, rho_[lower_j(k)]] when p_j(k) >= 1, else 0.
AugmentedState apply_Ej(const OpenSystemModel& model, std::size_t j, const MultiIndexSet& mset,
                        const AugmentedState& state);
/// Adjoint: +i [E_j, .] routed along R_j^T.
AugmentedState apply_Ej_adjoint(const OpenSystemModel& model, std::size_t j,
                                const MultiIndexSet& mset, const AugmentedState& state);

/// mat(L) under column-stacking vectorization.
CMatrix lindblad_supermatrix(const OpenSystemModel& model, std::span<const double> amplitudes);
/// mat(-i[E, .]) = -i (I (x) E - E^T (x) I)
CMatrix commutator_supermatrix(const CMatrix& e);

class SupermatrixCapExceeded : public std::length_error {
   public:
    using std::length_error::length_error;
};

inline constexpr std::size_t kDefaultSupermatrixCap = 20000;

/// I_N (x) mat(L) + sum_j R_j (x) mat(E_j), of size N d^2.
/// Throws SupermatrixCapExceeded when N d^2 > cap.
CMatrix assemble_supermatrix(const OpenSystemModel& model, const MultiIndexSet& mset,
                             std::span<const double> amplitudes,
                             std::size_t cap = kDefaultSupermatrixCap);

}  // namespace stgrape
