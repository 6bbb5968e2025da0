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

#include <array>
#include <cmath>
#include <stdexcept>

#include "stgrape/tensor.hpp"

namespace stgrape {
namespace {

// Coefficients of the [13/13] Pade approximant to exp (Higham 2005).
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norm for which the unscaled degree-13 approximant meets unit roundoff.
constexpr double kTheta13 = 5.371920351148152;

CMatrix pade13(const CMatrix& a) {
    const auto& b = kPade13;
    const Eigen::Index n = a.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    CMatrix a2 = a * a;
    CMatrix a4 = a2 * a2;
    CMatrix a6 = a4 * a2;

    CMatrix inner_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
    CMatrix u_poly(n, n);
    u_poly.noalias() = a6 * inner_u;
    u_poly += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    CMatrix u(n, n);
    u.noalias() = a * u_poly;

    CMatrix inner_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
    CMatrix v(n, n);
    v.noalias() = a6 * inner_v;
    v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    CMatrix denom = v - u;
    CMatrix numer = v + u;
    return denom.partialPivLu().solve(numer);
}

}  // namespace

CMatrix expm(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    if (a.rows() == 0) {
        return a;
    }
    const double norm = one_norm(a);
    if (norm == 0.0) return CMatrix::Identity(a.rows(), a.cols());
    int squarings = 0;
    if (norm > kTheta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    }
    CMatrix scaled = a * std::ldexp(1.0, -squarings);
    CMatrix r = pade13(scaled);
    CMatrix tmp(r.rows(), r.cols());
    for (int s = 0; s < squarings; ++s) {
        tmp.noalias() = r * r;
        r.swap(tmp);
    }
    return r;
}

}  // namespace stgrape
