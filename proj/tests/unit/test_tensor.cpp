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

#include "stgrape/tensor.hpp"
#include "test_support.hpp"

namespace stgrape {
namespace {

using testing::random_hermitian;
using testing::random_matrix;

TEST(Kron, IdentityTimesIdentity) {
    EXPECT_TRUE(kron(identity(2), identity(2)).isApprox(identity(4)));
}

TEST(Kron, PauliXCornerEntry) {
    const CMatrix k = kron(pauli::x(), pauli::x());
    EXPECT_EQ(k.rows(), 4);
    EXPECT_EQ(k(0, 3), Complex(1.0, 0.0));
    EXPECT_EQ(k(3, 0), Complex(1.0, 0.0));
    EXPECT_EQ(k(1, 2), Complex(1.0, 0.0));
    EXPECT_EQ(k(0, 0), Complex(0.0, 0.0));
}

TEST(Kron, DiagonalTimesIdentity) {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = Complex(0.0, 3.0);
    const CMatrix k = kron(d, identity(2));
    CVector expect(4);
    expect << 2.0, 2.0, Complex(0, 3), Complex(0, 3);
    EXPECT_TRUE(k.isApprox(CMatrix(expect.asDiagonal())));
}

TEST(Kron, NonSquareDims) {
    Rng rng(1);
    const CMatrix a = CMatrix::Random(2, 3);
    const CMatrix b = CMatrix::Random(4, 1);
    const CMatrix k = kron(a, b);
    EXPECT_EQ(k.rows(), 8);
    EXPECT_EQ(k.cols(), 3);
    EXPECT_EQ(k(5, 2), a(1, 2) * b(1, 0));
}

TEST(Kron, Associative) {
    Rng rng(2);
    const CMatrix a = random_matrix(2, rng);
    const CMatrix b = random_matrix(3, rng);
    const CMatrix c = random_matrix(2, rng);
    EXPECT_LT((kron(kron(a, b), c) - kron(a, kron(b, c))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Vec, ColumnStacking) {
    CMatrix a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    const CVector v = vec(a);
    ASSERT_EQ(v.size(), 4);
    EXPECT_EQ(v(0), Complex(1.0));
    EXPECT_EQ(v(1), Complex(3.0));
    EXPECT_EQ(v(2), Complex(2.0));
    EXPECT_EQ(v(3), Complex(4.0));
}

TEST(Vec, RoundTripIsBitwise) {
    Rng rng(3);
    for (Eigen::Index d : {1, 2, 3, 8}) {
        const CMatrix a = random_matrix(d, rng);
        EXPECT_TRUE(unvec(vec(a), d) == a) << d;
    }
}

TEST(Vec, UnvecRejectsLengthMismatch) {
    EXPECT_THROW(unvec(CVector::Zero(5), 2), std::invalid_argument);
}

TEST(Vec, SandwichIdentity) {
    Rng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix a = random_matrix(2, rng);
        const CMatrix x = random_matrix(2, rng);
        const CMatrix b = random_matrix(2, rng);
        const CVector lhs = vec(a * x * b);
        const CVector rhs = kron(b.transpose(), a) * vec(x);
        EXPECT_LT((lhs - rhs).norm(), 1e-12);
    }
}

TEST(Expm, ZeroIsIdentity) {
    EXPECT_TRUE(expm(CMatrix::Zero(3, 3)) == identity(3));
}

TEST(Expm, Diagonal) {
    CMatrix d = CMatrix::Zero(2, 2);
    const Complex z1(0.3, -1.2);
    const Complex z2(-2.0, 0.5);
    d(0, 0) = z1;
    d(1, 1) = z2;
    const CMatrix e = expm(d);
    EXPECT_LT(std::abs(e(0, 0) - std::exp(z1)), 1e-14);
    EXPECT_LT(std::abs(e(1, 1) - std::exp(z2)), 1e-14);
    EXPECT_EQ(e(0, 1), Complex(0.0));
}

TEST(Expm, HalfPiRotation) {
    const CMatrix e = expm(Complex(0, -std::numbers::pi / 2) * pauli::x());
    CMatrix expect(2, 2);
    expect << 0.0, Complex(0, -1), Complex(0, -1), 0.0;
    EXPECT_LT((e - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Expm, RejectsNonSquare) {
    EXPECT_THROW(expm(CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST(Expm, InverseProduct) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        CMatrix a = random_matrix(4, rng);
        a *= rng.uniform(0.1, 5.0) / a.norm();
        EXPECT_LT((expm(a) * expm(-a) - identity(4)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Expm, MatchesDoubledStep) {
    Rng rng(6);
    for (double scale : {0.01, 1.0, 20.0}) {
        CMatrix a = random_matrix(6, rng);
        a *= scale / one_norm(a);
        const CMatrix half = expm(0.5 * a);
        const CMatrix full = expm(a);
        EXPECT_LT((half * half - full).norm() / full.norm(), 1e-10) << scale;
    }
}

TEST(Expm, HermitianGeneratesUnitary) {
    Rng rng(7);
    const CMatrix h = random_hermitian(5, rng);
    for (double theta : {0.0, 0.5, 3.0, 10.0}) {
        const CMatrix u = expm(Complex(0, -theta) * h);
        EXPECT_LT((u.adjoint() * u - identity(5)).cwiseAbs().maxCoeff(), 1e-9) << theta;
    }
}

TEST(Basics, NormsTracesDaggers) {
    EXPECT_DOUBLE_EQ(frobenius_norm(identity(2)), std::sqrt(2.0));
    EXPECT_EQ(trace(pauli::x()), Complex(0.0));
    Rng rng(8);
    const CMatrix a = random_matrix(3, rng);
    EXPECT_TRUE(dagger(dagger(a)) == a);
    EXPECT_THROW(matmul(CMatrix::Zero(2, 3), CMatrix::Zero(2, 3)), std::invalid_argument);
    EXPECT_TRUE(matmul(a, identity(3)).isApprox(a));
}

TEST(Basics, Hermiticity) {
    Rng rng(9);
    EXPECT_TRUE(is_hermitian(random_hermitian(4, rng)));
    EXPECT_FALSE(is_hermitian(random_matrix(4, rng)));
}

TEST(Basics, EmbedQubitOperator) {
    const CMatrix z0 = embed_qubit_operator(pauli::z(), 0, 2);
    EXPECT_TRUE(z0.isApprox(kron(pauli::z(), identity(2))));
    const CMatrix x1 = embed_qubit_operator(pauli::x(), 1, 3);
    EXPECT_TRUE(x1.isApprox(kron(kron(identity(2), pauli::x()), identity(2))));
}

}  // namespace
}  // namespace stgrape
