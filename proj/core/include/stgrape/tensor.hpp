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

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace stgrape {

using Complex = std::complex<double>;

/// Dense complex matrix with entries stored in row-major order.
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr Complex kI{0.0, 1.0};

/// Default tolerance for Hermiticity checks on model operators.
inline constexpr double kHermitianTol = 1e-12;

CMatrix identity(Eigen::Index dim);

/// Kronecker product; the result has dims (rA*rB, cA*cB).
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Column-stacking vectorization: vec(A)[i + j*rows] = A(i, j).
CVector vec(const CMatrix& a);

/// Inverse of vec for a square d x d matrix. Throws std::invalid_argument
/// when v.size() != d*d.
CMatrix unvec(const CVector& v, Eigen::Index dim);

/// Matrix exponential by scaling and squaring around a degree-13 Pade
/// approximant. Throws std::invalid_argument for non-square input.
CMatrix expm(const CMatrix& a);

double frobenius_norm(const CMatrix& a);
Complex trace(const CMatrix& a);
CMatrix dagger(const CMatrix& a);

/// Checked product; throws std::invalid_argument on inner-dimension mismatch.
CMatrix matmul(const CMatrix& a, const CMatrix& b);

/// max |A - A^dagger| entrywise.
double hermiticity_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double tol = kHermitianTol);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// Hilbert-Schmidt inner product tr(a^dagger b).
Complex hs_inner(const CMatrix& a, const CMatrix& b);

/// Induced 1-norm (max absolute column sum).
double one_norm(const CMatrix& a);

SparseCMatrix to_sparse(const CMatrix& a);

namespace pauli {
CMatrix x();
CMatrix y();
CMatrix z();
/// |0><1|
CMatrix lowering();
}  // namespace pauli

/// Embeds a single-qubit operator on `qubit` (0-based, qubit 0 is the
/// leftmost tensor factor) of an n-qubit register.
CMatrix embed_qubit_operator(const CMatrix& op, std::size_t qubit, std::size_t num_qubits);

}  // namespace stgrape
