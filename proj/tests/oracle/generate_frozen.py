# Copyright 2026 The stgrape Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent NumPy/SciPy reference values for tests/support/frozen_values.hpp.

Run once; the printed header is checked in and never regenerated by the build.
"""
import itertools

import numpy as np
from scipy.linalg import expm

TWO_PI = 2.0 * np.pi
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)
EXCITED = np.array([[0, 0], [0, 1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def embed(op, q, n):
    out = np.array([[1.0 + 0j]])
    for i in range(n):
        out = np.kron(out, op if i == q else I2)
    return out


def chain(n, jxy_mhz, t1_us, t2_us):
    j = TWO_PI * jxy_mhz * 1e-3
    d = 2**n
    h0 = np.zeros((d, d), dtype=complex)
    for q in range(n - 1):
        h0 += j * (embed(X, q, n) @ embed(X, q + 1, n) + embed(Y, q, n) @ embed(Y, q + 1, n))
    controls = []
    for q in range(n):
        controls += [embed(X, q, n), embed(Y, q, n)]
    lind = []
    for q in range(n):
        lind.append((embed(LOWER, q, n), 1.0 / (t1_us * 1e3)))
        lind.append((embed(EXCITED, q, n), 1.0 / (t2_us * 1e3)))
    edges = [embed(X, 0, n), embed(X, n - 1, n)]
    return h0, controls, lind, edges


def vec(a):
    return a.reshape(-1, order="F")


def unvec(v, d):
    return v.reshape(d, d, order="F")


def lindblad_super(h, lind):
    d = h.shape[0]
    eye = np.eye(d)
    s = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c, g in lind:
        cdc = c.conj().T @ c
        s += g * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye))
    return s


def comm_super(e):
    d = e.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, e) - np.kron(e.T, eye))


def orders(m, n):
    idx = [p for p in itertools.product(range(n + 1), repeat=m) if sum(p) <= n]
    return sorted(idx, key=lambda p: -sum(pj * (n + 1) ** (m - 1 - j) for j, pj in enumerate(p)))


def pulse(nc, steps):
    # deterministic amplitudes in rad/ns
    return np.array([[0.2 * np.sin(0.7 * k + 1.3 * c) for c in range(nc)] for k in range(steps)])


def augmented_final(h0, controls, lind, es, n, amps, dt, rho0):
    m = len(es)
    ords = orders(m, n)
    pos = {p: i for i, p in enumerate(ords)}
    nb = len(ords)
    d = h0.shape[0]
    v = np.zeros(nb * d * d, dtype=complex)
    v[(nb - 1) * d * d:] = vec(rho0)
    for u in amps:
        h = h0 + sum(a * c for a, c in zip(u, controls))
        big = np.kron(np.eye(nb), lindblad_super(h, lind))
        for j, e in enumerate(es):
            r = np.zeros((nb, nb))
            for p in ords:
                if p[j] >= 1:
                    q = list(p)
                    q[j] -= 1
                    r[pos[p], pos[tuple(q)]] = 1.0
            big += np.kron(r, comm_super(e))
        v = expm(dt * big) @ v
    return [unvec(v[k * d * d:(k + 1) * d * d], d) for k in range(nb)], ords


def channel(h0, controls, lind, es, eps, amps, dt):
    d = h0.shape[0]
    out = np.eye(d * d, dtype=complex)
    for u in amps:
        h = h0 + sum(a * c for a, c in zip(u, controls)) + sum(x * e for x, e in zip(eps, es))
        out = expm(dt * lindblad_super(h, lind)) @ out
    return out


def agf(ch, u):
    d = u.shape[0]
    su = np.kron(u.conj(), u)
    fpro = np.real(np.trace(su.conj().T @ ch)) / d**2
    return (d * fpro + 1) / (d + 1)


def main():
    h0, controls, lind, es = chain(2, 30.0, 1.0, 0.5)
    dt, steps = 0.5, 6
    amps = pulse(len(controls), steps)
    rho0 = np.full((4, 4), 0.25, dtype=complex)
    blocks, ords = augmented_final(h0, controls, lind, es, 2, amps, dt, rho0)
    target = np.zeros((4, 4), dtype=complex)
    target[3, 3] = 1.0
    vals = {}
    vals["kOverlapZeroBlock"] = np.real(np.trace(blocks[-1] @ target))
    for k, p in enumerate(ords[:-1]):
        vals["kBlockNorm_%d%d" % p] = np.linalg.norm(blocks[k])
    vals["kBlockTrace10Imag"] = np.imag(np.trace(blocks[ords.index((1, 0))] @ target))
    vals["kBlock10Entry03Real"] = np.real(blocks[ords.index((1, 0))][0, 3])
    vals["kBlock11Entry12Imag"] = np.imag(blocks[ords.index((1, 1))][1, 2])
    cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    ch = channel(h0, controls, lind, es, [0.01, -0.02], amps, dt)
    vals["kAgfCnotNoisy"] = agf(ch, cnot)
    vals["kAgfIdentityNoiseless"] = agf(channel(h0, controls, lind, es, [0.0, 0.0], amps, dt), np.eye(4))
    with open(__file__) as f:
        for line in itertools.takewhile(lambda s: s.startswith("#"), f):
            print("//" + line.rstrip("\n")[1:])
    print()
    print("#pragma once\n")
    print("// Generated by tests/oracle/generate_frozen.py (NumPy/SciPy); do not edit.")
    print("// Setup: 2-qubit chain, 30 MHz coupling, T1 = 1 us, T2 = 0.5 us, edge")
    print("// uncertainties, n = 2, dt = 0.5 ns, 6 steps, u_c(k) = 0.2 sin(0.7 k + 1.3 c),")
    print("// rho0 = all-1/4, target |11><11|.\n")
    print("namespace stgrape::frozen {\n")
    for k, v in vals.items():
        print("inline constexpr double %s = %.17g;" % (k, v))
    print("\n}  // namespace stgrape::frozen")


if __name__ == "__main__":
    main()
