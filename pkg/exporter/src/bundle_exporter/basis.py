"""STO-3G basis data and contracted-shell expansion.

Exponents and contraction coefficients are the published STO-3G values
(Hehre, Stewart, Pople fits); 2s and 2p share exponents (sp shells).
Cartesian p functions are used (identical to spherical for l <= 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.52917721092

_S_COEFF_1S = [0.1543289673, 0.5353281423, 0.4446345422]
_S_COEFF_2S = [-0.09996722919, 0.3995128261, 0.7001154689]
_P_COEFF_2P = [0.1559162750, 0.6076837186, 0.3919573931]

# element -> list of (shell_type, exponents, coefficients)
STO3G = {
    "H": [
        ("S", [3.42525091, 0.62391373, 0.16885540], _S_COEFF_1S),
    ],
    "Li": [
        ("S", [16.1195750, 2.9362007, 0.7946505], _S_COEFF_1S),
        ("S", [0.6362897, 0.1478601, 0.0480887], _S_COEFF_2S),
        ("P", [0.6362897, 0.1478601, 0.0480887], _P_COEFF_2P),
    ],
    "Be": [
        ("S", [30.1678710, 5.4951153, 1.4871927], _S_COEFF_1S),
        ("S", [1.3148331, 0.3055389, 0.0993707], _S_COEFF_2S),
        ("P", [1.3148331, 0.3055389, 0.0993707], _P_COEFF_2P),
    ],
    "O": [
        ("S", [130.7093200, 23.8088610, 6.4436083], _S_COEFF_1S),
        ("S", [5.0331513, 1.1695961, 0.3803890], _S_COEFF_2S),
        ("P", [5.0331513, 1.1695961, 0.3803890], _P_COEFF_2P),
    ],
}

NUCLEAR_CHARGE = {"H": 1, "Li": 3, "Be": 4, "O": 8}


@dataclass
class BasisFunction:
    """One contracted Cartesian Gaussian."""

    center: np.ndarray  # Bohr
    lmn: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # includes primitive norms and contraction norm


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _primitive_norm(alpha: float, lmn: tuple[int, int, int]) -> float:
    l, m, n = lmn
    num = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** ((l + m + n) / 2.0)
    den = np.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return num / den


def _contracted_self_overlap(exps, coefs, lmn) -> float:
    l, m, n = lmn
    L = l + m + n
    pref = (
        np.pi**1.5
        * _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
        / 2.0**L
    )
    s = 0.0
    for ai, ci in zip(exps, coefs):
        for aj, cj in zip(exps, coefs):
            s += ci * cj / (ai + aj) ** (L + 1.5)
    return pref * s


def build_basis(atoms: list[tuple[str, np.ndarray]]) -> list[BasisFunction]:
    """Expand atoms (symbol, position in Bohr) into contracted basis functions."""
    funcs: list[BasisFunction] = []
    for symbol, center in atoms:
        for shell, exps, coefs in STO3G[symbol]:
            exps = np.asarray(exps, dtype=float)
            coefs = np.asarray(coefs, dtype=float)
            lmns = [(0, 0, 0)] if shell == "S" else [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
            for lmn in lmns:
                c = coefs * np.array([_primitive_norm(a, lmn) for a in exps])
                c = c / np.sqrt(_contracted_self_overlap(exps, c, lmn))
                funcs.append(
                    BasisFunction(
                        center=np.asarray(center, dtype=float),
                        lmn=lmn,
                        exponents=exps,
                        coefficients=c,
                    )
                )
    return funcs
