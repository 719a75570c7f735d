"""Shared fixtures: committed molecule bundles and dense test oracles."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from ansatzforge import load_bundle

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def fixture_path(name: str) -> Path:
    path = FIXTURE_DIR / name
    if not path.exists():
        pytest.skip(f"fixture {name} not committed")
    return path


@pytest.fixture(scope="session")
def h2_bundle():
    return load_bundle(fixture_path("h2_0.74.json"))


@pytest.fixture(scope="session")
def h4_bundle():
    return load_bundle(fixture_path("h4_0.80.json"))


@pytest.fixture(scope="session")
def lih_bundle():
    return load_bundle(fixture_path("lih_2.20.json"))


@pytest.fixture(scope="session")
def lih_eq_bundle():
    return load_bundle(fixture_path("lih_1.50.json"))


def dense_word(word: str, n_qubits: int) -> np.ndarray:
    """Dense matrix of one Pauli word (independent of the package's matricize)."""
    letters = {int(tok[1:]): tok[0] for tok in word.split()}
    mat = np.ones((1, 1), dtype=complex)
    for q in range(n_qubits - 1, -1, -1):
        mat = np.kron(mat, PAULI[letters.get(q, "I")])
    return mat


def dense_pauli_sum(ps, n_qubits: int) -> np.ndarray:
    out = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for coeff, word in ps.to_terms():
        out += coeff * dense_word(word, n_qubits)
    return out


def ladder_matrix(j: int, n_qubits: int, dagger: bool) -> np.ndarray:
    """Brute-force fermionic ladder operator via explicit JW matrices."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # a on one mode: |1> -> |0>
    op = lower.conj().T if dagger else lower
    mat = np.ones((1, 1), dtype=complex)
    for q in range(n_qubits - 1, -1, -1):
        if q == j:
            factor = op
        elif q < j:
            factor = PAULI["Z"]
        else:
            factor = PAULI["I"]
        mat = np.kron(mat, factor)
    return mat
