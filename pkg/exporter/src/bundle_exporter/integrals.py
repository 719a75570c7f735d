"""Molecular integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: Hermite expansion coefficients (E) for overlap,
kinetic and charge distributions, Hermite Coulomb integrals (R) built on
Boys functions for nuclear-attraction and electron-repulsion integrals.
Adequate for s/p shells; no angular-momentum ceiling is hard-coded.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import hyp1f1

from .basis import BasisFunction


def boys(n: int, t: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -t) / (2.0 * n + 1.0)


@lru_cache(maxsize=400_000)
def _E(i: int, j: int, t: int, Q: float, a: float, b: float) -> float:
    """Hermite expansion coefficient E_t^{ij} for a 1D Gaussian product."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return float(np.exp(-q * Q * Q))
    if j == 0:
        return (
            _E(i - 1, j, t - 1, Q, a, b) / (2 * p)
            - (q * Q / a) * _E(i - 1, j, t, Q, a, b)
            + (t + 1) * _E(i - 1, j, t + 1, Q, a, b)
        )
    return (
        _E(i, j - 1, t - 1, Q, a, b) / (2 * p)
        + (q * Q / b) * _E(i, j - 1, t, Q, a, b)
        + (t + 1) * _E(i, j - 1, t + 1, Q, a, b)
    )


def _overlap_prim(a, lmn1, A, b, lmn2, B) -> float:
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    s1 = _E(l1, l2, 0, A[0] - B[0], a, b)
    s2 = _E(m1, m2, 0, A[1] - B[1], a, b)
    s3 = _E(n1, n2, 0, A[2] - B[2], a, b)
    return s1 * s2 * s3 * (np.pi / (a + b)) ** 1.5


def _kinetic_prim(a, lmn1, A, b, lmn2, B) -> float:
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * _overlap_prim(a, lmn1, A, b, lmn2, B)
    term1 = (
        -2.0
        * b**2
        * (
            _overlap_prim(a, lmn1, A, b, (l2 + 2, m2, n2), B)
            + _overlap_prim(a, lmn1, A, b, (l2, m2 + 2, n2), B)
            + _overlap_prim(a, lmn1, A, b, (l2, m2, n2 + 2), B)
        )
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * _overlap_prim(a, lmn1, A, b, (l2 - 2, m2, n2), B)
        + m2 * (m2 - 1) * _overlap_prim(a, lmn1, A, b, (l2, m2 - 2, n2), B)
        + n2 * (n2 - 1) * _overlap_prim(a, lmn1, A, b, (l2, m2, n2 - 2), B)
    )
    return term0 + term1 + term2


@lru_cache(maxsize=400_000)
def _R(t: int, u: int, v: int, n: int, p: float, X: float, Y: float, Z: float, T: float) -> float:
    """Hermite Coulomb integral R^n_{tuv}."""
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, T)
    if t > 0:
        val = X * _R(t - 1, u, v, n + 1, p, X, Y, Z, T)
        if t > 1:
            val += (t - 1) * _R(t - 2, u, v, n + 1, p, X, Y, Z, T)
        return val
    if u > 0:
        val = Y * _R(t, u - 1, v, n + 1, p, X, Y, Z, T)
        if u > 1:
            val += (u - 1) * _R(t, u - 2, v, n + 1, p, X, Y, Z, T)
        return val
    val = Z * _R(t, u, v - 1, n + 1, p, X, Y, Z, T)
    if v > 1:
        val += (v - 1) * _R(t, u, v - 2, n + 1, p, X, Y, Z, T)
    return val


def _nuclear_prim(a, lmn1, A, b, lmn2, B, C) -> float:
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    P = (a * A + b * B) / p
    PC = P - C
    rpc2 = float(PC @ PC)
    val = 0.0
    for t in range(l1 + l2 + 1):
        Et = _E(l1, l2, t, A[0] - B[0], a, b)
        if Et == 0.0:
            continue
        for u in range(m1 + m2 + 1):
            Eu = _E(m1, m2, u, A[1] - B[1], a, b)
            if Eu == 0.0:
                continue
            for v in range(n1 + n2 + 1):
                Ev = _E(n1, n2, v, A[2] - B[2], a, b)
                if Ev == 0.0:
                    continue
                val += Et * Eu * Ev * _R(t, u, v, 0, p, PC[0], PC[1], PC[2], p * rpc2)
    return 2.0 * np.pi / p * val


def _eri_prim(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D) -> float:
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    l3, m3, n3 = lmn3
    l4, m4, n4 = lmn4
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * A + b * B) / p
    Q = (c * C + d * D) / q
    PQ = P - Q
    rpq2 = float(PQ @ PQ)

    e_ab = [
        [
            [_E(l1, l2, t, A[0] - B[0], a, b) for t in range(l1 + l2 + 1)],
            [_E(m1, m2, u, A[1] - B[1], a, b) for u in range(m1 + m2 + 1)],
            [_E(n1, n2, v, A[2] - B[2], a, b) for v in range(n1 + n2 + 1)],
        ]
    ][0]
    e_cd = [
        [
            [_E(l3, l4, t, C[0] - D[0], c, d) for t in range(l3 + l4 + 1)],
            [_E(m3, m4, u, C[1] - D[1], c, d) for u in range(m3 + m4 + 1)],
            [_E(n3, n4, v, C[2] - D[2], c, d) for v in range(n3 + n4 + 1)],
        ]
    ][0]

    val = 0.0
    for t, Et in enumerate(e_ab[0]):
        if Et == 0.0:
            continue
        for u, Eu in enumerate(e_ab[1]):
            if Eu == 0.0:
                continue
            for v, Ev in enumerate(e_ab[2]):
                if Ev == 0.0:
                    continue
                for tt, Ett in enumerate(e_cd[0]):
                    if Ett == 0.0:
                        continue
                    for uu, Euu in enumerate(e_cd[1]):
                        if Euu == 0.0:
                            continue
                        for vv, Evv in enumerate(e_cd[2]):
                            if Evv == 0.0:
                                continue
                            val += (
                                Et
                                * Eu
                                * Ev
                                * Ett
                                * Euu
                                * Evv
                                * (-1.0) ** (tt + uu + vv)
                                * _R(t + tt, u + uu, v + vv, 0, alpha, PQ[0], PQ[1], PQ[2], alpha * rpq2)
                            )
    val *= 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))
    return val


def _contract2(prim, f1: BasisFunction, f2: BasisFunction, *extra) -> float:
    val = 0.0
    for a, ca in zip(f1.exponents, f1.coefficients):
        for b, cb in zip(f2.exponents, f2.coefficients):
            val += ca * cb * prim(a, f1.lmn, f1.center, b, f2.lmn, f2.center, *extra)
    return val


def overlap_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            S[i, j] = S[j, i] = _contract2(_overlap_prim, basis[i], basis[j])
    return S


def kinetic_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    T = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            T[i, j] = T[j, i] = _contract2(_kinetic_prim, basis[i], basis[j])
    return T


def nuclear_matrix(basis: list[BasisFunction], atoms, charges) -> np.ndarray:
    n = len(basis)
    V = np.zeros((n, n))
    for center, charge in zip(atoms, charges):
        for i in range(n):
            for j in range(i + 1):
                v = _contract2(_nuclear_prim, basis[i], basis[j], np.asarray(center, dtype=float))
                V[i, j] -= charge * v
                if i != j:
                    V[j, i] -= charge * v
    return V


def eri_tensor(basis: list[BasisFunction]) -> np.ndarray:
    """Two-electron repulsion integrals (chemist notation (ij|kl)), 8-fold symmetry."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if ij < kl:
                        continue
                    val = 0.0
                    fi, fj, fk, fl = basis[i], basis[j], basis[k], basis[l]
                    for a, ca in zip(fi.exponents, fi.coefficients):
                        for b, cb in zip(fj.exponents, fj.coefficients):
                            for c, cc in zip(fk.exponents, fk.coefficients):
                                for d, cd in zip(fl.exponents, fl.coefficients):
                                    val += ca * cb * cc * cd * _eri_prim(
                                        a, fi.lmn, fi.center,
                                        b, fj.lmn, fj.center,
                                        c, fk.lmn, fk.center,
                                        d, fl.lmn, fl.center,
                                    )
                    for p, q in ((i, j), (j, i)):
                        for r, s in ((k, l), (l, k)):
                            eri[p, q, r, s] = eri[r, s, p, q] = val
    return eri


def nuclear_repulsion(atoms, charges) -> float:
    e = 0.0
    for i in range(len(atoms)):
        for j in range(i):
            rij = np.linalg.norm(np.asarray(atoms[i]) - np.asarray(atoms[j]))
            e += charges[i] * charges[j] / rij
    return e
