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

#include "stgrape/tensor.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace stgrape {

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const Eigen::Index br = b.rows();
    const Eigen::Index bc = b.cols();
    CMatrix out(a.rows() * br, a.cols() * bc);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
        }
    }
    return out;
}

CVector vec(const CMatrix& a) {
    CVector v(a.size());
    const Eigen::Index rows = a.rows();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            v[i + j * rows] = a(i, j);
        }
    }
    return v;
}

CMatrix unvec(const CVector& v, Eigen::Index dim) {
    if (dim < 1 || v.size() != dim * dim) {
        throw std::invalid_argument("unvec: vector length " + std::to_string(v.size()) +
                                    " is not " + std::to_string(dim) + "^2");
    }
    CMatrix a(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            a(i, j) = v[i + j * dim];
        }
    }
    return a;
}

double frobenius_norm(const CMatrix& a) { return a.norm(); }

Complex trace(const CMatrix& a) { return a.trace(); }

CMatrix dagger(const CMatrix& a) { return a.adjoint(); }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                    " and " + std::to_string(b.rows()) + " differ");
    }
    CMatrix out(a.rows(), b.cols());
    out.noalias() = a * b;
    return out;
}

double hermiticity_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a, double tol) { return hermiticity_defect(a) <= tol; }

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows(), b.cols());
    out.noalias() = a * b;
    out.noalias() -= b * a;
    return out;
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
    // tr(a^dagger b) = sum_ij conj(a_ij) b_ij
    return (a.array().conjugate() * b.array()).sum();
}

double one_norm(const CMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

SparseCMatrix to_sparse(const CMatrix& a) {
    SparseCMatrix s = a.sparseView(Complex(0.0), 0.0);
    s.makeCompressed();
    return s;
}

namespace pauli {

CMatrix x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

CMatrix y() {
    CMatrix m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return m;
}

CMatrix z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

CMatrix lowering() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

}  // namespace pauli

CMatrix embed_qubit_operator(const CMatrix& op, std::size_t qubit, std::size_t num_qubits) {
    if (qubit >= num_qubits) {
        throw std::invalid_argument("embed_qubit_operator: qubit index out of range");
    }
    CMatrix out = identity(1);
    for (std::size_t q = 0; q < num_qubits; ++q) {
        out = kron(out, q == qubit ? op : identity(op.rows()));
    }
    return out;
}

}  // namespace stgrape
