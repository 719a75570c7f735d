"""Pauli-string algebra, fermionic/qubit excitation generators, and CNOT cost accounting.

Pauli words are stored in symplectic form: a pair of bitmasks ``(x, z)``
where bit ``j`` of ``x`` flags an X component and bit ``j`` of ``z`` a Z
component on qubit ``j`` (both set means Y).  The operator represented by
``PauliString(c, x, z)`` is ``c * i**n_y * X^x Z^z`` with ``n_y`` the number
of Y letters, which makes every word itself Hermitian and keeps products a
two-line phase computation.

Basis-state convention: bit ``j`` of a computational-basis index is the
occupation of spin-orbital ``j`` (qubit 0 = least significant bit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "PauliString",
    "PauliSum",
    "ExcitationOp",
    "CostModel",
    "DEFAULT_COST_MODEL",
    "jw_excitation",
    "qeb_excitation",
    "cnot_cost",
    "matricize",
    "diagonal_expectation",
    "load_cost_model",
]

_LETTER_TO_XZ = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_LETTER = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_DENSE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _parse_word(word: str) -> tuple[int, int]:
    """Parse a text word like ``"X0 Z1 Y3"`` (empty string = identity)."""
    x = z = 0
    seen = set()
    for token in word.split():
        letter, idx = token[0].upper(), token[1:]
        if letter not in _LETTER_TO_XZ or not idx.isdigit():
            raise ValueError(f"bad Pauli token {token!r}")
        q = int(idx)
        if q in seen:
            raise ValueError(f"duplicate qubit {q} in word {word!r}")
        seen.add(q)
        lx, lz = _LETTER_TO_XZ[letter]
        x |= lx << q
        z |= lz << q
    return x, z


def _format_word(x: int, z: int) -> str:
    parts = []
    support = x | z
    q = 0
    while support >> q:
        lx, lz = (x >> q) & 1, (z >> q) & 1
        if lx or lz:
            parts.append(f"{_XZ_TO_LETTER[(lx, lz)]}{q}")
        q += 1
    return " ".join(parts)


class PauliString:
    """A single weighted Pauli word."""

    __slots__ = ("coeff", "x", "z")

    def __init__(self, coeff: complex, x: int = 0, z: int = 0):
        self.coeff = complex(coeff)
        self.x = x
        self.z = z

    @classmethod
    def from_word(cls, coeff: complex, word: str) -> PauliString:
        return cls(coeff, *_parse_word(word))

    @property
    def word(self) -> str:
        return _format_word(self.x, self.z)

    @property
    def n_y(self) -> int:
        return (self.x & self.z).bit_count()

    def max_qubit(self) -> int:
        return max((self.x | self.z).bit_length() - 1, -1)

    def __matmul__(self, other: PauliString) -> PauliString:
        x = self.x ^ other.x
        z = self.z ^ other.z
        # i^(ny1+ny2-ny12) from Y bookkeeping, sign from commuting Z past X.
        k = (self.n_y + other.n_y - (x & z).bit_count()) % 4
        sign = -1.0 if (self.z & other.x).bit_count() & 1 else 1.0
        return PauliString(self.coeff * other.coeff * sign * 1j**k, x, z)

    def __mul__(self, scalar: complex) -> PauliString:
        return PauliString(self.coeff * scalar, self.x, self.z)

    __rmul__ = __mul__

    def dagger(self) -> PauliString:
        return PauliString(self.coeff.conjugate(), self.x, self.z)

    def __repr__(self) -> str:
        return f"PauliString({self.coeff!r}, {self.word!r})"


class PauliSum:
    """A weighted sum of Pauli words, canonicalized by merging duplicates."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[tuple[int, int], complex] | None = None):
        self._terms: dict[tuple[int, int], complex] = dict(terms or {})

    @classmethod
    def from_strings(cls, strings) -> PauliSum:
        out = cls()
        for s in strings:
            out._add_term(s.x, s.z, s.coeff)
        return out

    @classmethod
    def from_terms(cls, pairs) -> PauliSum:
        """Build from ``[(coeff, word), ...]`` text pairs."""
        out = cls()
        for coeff, word in pairs:
            x, z = _parse_word(word)
            out._add_term(x, z, coeff)
        return out

    def _add_term(self, x: int, z: int, coeff: complex) -> None:
        key = (x, z)
        c = self._terms.get(key, 0.0) + coeff
        if abs(c) < 1e-15:
            self._terms.pop(key, None)
        else:
            self._terms[key] = c

    # -- container protocol ------------------------------------------------
    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        for (x, z), c in sorted(self._terms.items()):
            yield PauliString(c, x, z)

    def items(self):
        return self._terms.items()

    # -- algebra -----------------------------------------------------------
    def __add__(self, other: PauliSum) -> PauliSum:
        out = PauliSum(self._terms)
        for (x, z), c in other._terms.items():
            out._add_term(x, z, c)
        return out

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> PauliSum:
        return PauliSum({k: c * scalar for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: PauliSum) -> PauliSum:
        out = PauliSum()
        for (x1, z1), c1 in self._terms.items():
            a = PauliString(c1, x1, z1)
            for (x2, z2), c2 in other._terms.items():
                p = a @ PauliString(c2, x2, z2)
                out._add_term(p.x, p.z, p.coeff)
        return out

    def dagger(self) -> PauliSum:
        return PauliSum({k: c.conjugate() for k, c in self._terms.items()})

    # -- queries -----------------------------------------------------------
    def max_qubit(self) -> int:
        if not self._terms:
            return -1
        return max(((x | z).bit_length() - 1) for x, z in self._terms)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) < tol for c in self._terms.values())

    def is_antihermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.real) < tol for c in self._terms.values())

    def to_terms(self) -> list[tuple[complex, str]]:
        """Canonical ``[(coeff, word)]`` list, sorted by word masks."""
        return [(c, _format_word(x, z)) for (x, z), c in sorted(self._terms.items())]

    def __repr__(self) -> str:
        inner = " + ".join(f"({c:.6g})*{_format_word(x, z) or 'I'}" for (x, z), c in sorted(self._terms.items()))
        return f"PauliSum[{inner}]"


def matricize(ps: PauliSum, n_qubits: int) -> np.ndarray:
    """Dense matrix of a Pauli sum (test oracle; qubit 0 = least significant bit)."""
    if n_qubits > 6:
        raise ValueError(f"matricize limited to 6 qubits, got {n_qubits}")
    dim = 2**n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for term in ps:
        if term.max_qubit() >= n_qubits:
            raise ValueError("term acts outside the register")
        word = dict()
        for token in term.word.split():
            word[int(token[1:])] = token[0]
        mat = np.ones((1, 1), dtype=complex)
        for q in range(n_qubits - 1, -1, -1):
            mat = np.kron(mat, _DENSE[word.get(q, "I")])
        out += term.coeff * mat
    return out


def diagonal_expectation(ps: PauliSum, occupation_bits: int) -> float:
    """Expectation ``<b|P|b>`` of a Pauli sum in a computational-basis state."""
    val = 0.0 + 0.0j
    for (x, z), c in ps.items():
        if x == 0:
            val += c * (-1.0 if (occupation_bits & z).bit_count() & 1 else 1.0)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"non-real diagonal expectation (imag={val.imag:.3e})")
    return val.real


# ---------------------------------------------------------------------------
# Ladder operators and excitation generators
# ---------------------------------------------------------------------------


def _ladder(j: int, dagger: bool, z_string: bool) -> PauliSum:
    """Annihilation (or creation) operator on spin-orbital j.

    Jordan-Wigner form ``(X_j +/- i Y_j)/2 * Z_{j-1}...Z_0``; the qubit
    (Z-string-free) form drops the parity string.
    """
    zmask = (1 << j) - 1 if z_string else 0
    sign = -1j if dagger else 1j
    return PauliSum.from_strings(
        [
            PauliString(0.5, 1 << j, zmask),
            PauliString(0.5 * sign, 1 << j, zmask | (1 << j)),
        ]
    )


def _excitation_generator(indices: tuple[int, ...], kind: str, z_string: bool) -> PauliSum:
    if kind == "single":
        p, q = indices
        a = _ladder(p, True, z_string) @ _ladder(q, False, z_string)
    elif kind == "double":
        p, q, r, s = indices
        a = (
            _ladder(p, True, z_string)
            @ _ladder(q, True, z_string)
            @ _ladder(r, False, z_string)
            @ _ladder(s, False, z_string)
        )
    else:
        raise ValueError(f"unknown excitation kind {kind!r}")
    return a - a.dagger()


def z_string_size(indices: tuple[int, ...]) -> int:
    """Number of qubits carrying a parity Z under the JW image."""
    if len(indices) == 2:
        lo, hi = sorted(indices)
        return hi - lo - 1
    i1, i2, i3, i4 = sorted(indices)
    return (i2 - i1 - 1) + (i4 - i3 - 1)


def qubit_span(indices: tuple[int, ...]) -> int:
    return max(indices) - min(indices) + 1


@dataclass(frozen=True)
class CostModel:
    """CNOT cost table for compiled excitation exponentials.

    Fermionic costs follow the gate-efficient construction: a bare (adjacent)
    single costs ``single_base`` and a bare double ``double_base``; parity
    routing adds ``per_z`` CNOTs per staircase qubit, where the staircase
    covers ``max(0, z - 1)`` qubits for singles (z = JW Z-string length) and
    the full interior ``span - 4`` for doubles.  The defaults are calibrated
    against published pool-average costs; override via a JSON table.
    Qubit-excitation (Z-string-free) operators have fixed span-independent
    costs.
    """

    single_base: int = 2
    double_base: int = 8
    per_z: int = 2
    qeb_single: int = 2
    qeb_double: int = 14

    def cost(self, kind: str, flavor: str, indices: tuple[int, ...]) -> int:
        if flavor == "qeb":
            return self.qeb_single if kind == "single" else self.qeb_double
        if kind == "single":
            return self.single_base + self.per_z * max(0, z_string_size(indices) - 1)
        return self.double_base + self.per_z * (qubit_span(indices) - 4)


DEFAULT_COST_MODEL = CostModel()


def load_cost_model(path: str | Path) -> CostModel:
    """Read a cost-model override file: JSON with the CostModel field names."""
    data = json.loads(Path(path).read_text())
    known = {f for f in CostModel.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown cost-model keys: {sorted(unknown)}")
    return CostModel(**{k: int(v) for k, v in data.items()})


@dataclass(frozen=True)
class ExcitationOp:
    """One excitation generator with its qubit image and gate cost.

    ``indices`` uses the (p, q) / (p, q, r, s) tuple convention with
    virtual spin-orbitals first, occupied last; the generator is the
    anti-Hermitian ``a+_p a_q - a+_q a_p`` (singles) or
    ``a+_p a+_q a_r a_s - a+_s a+_r a_q a_p`` (doubles).
    """

    kind: str
    indices: tuple[int, ...]
    flavor: str
    generator: PauliSum
    n_qubits: int
    cnot_cost: int
    qubit_span: int

    @property
    def z_string(self) -> int:
        return z_string_size(self.indices)


def _validate_indices(indices: tuple[int, ...], kind: str, n_qubits: int) -> tuple[int, ...]:
    indices = tuple(int(i) for i in indices)
    want = 2 if kind == "single" else 4
    if len(indices) != want:
        raise ValueError(f"{kind} excitation needs {want} indices, got {indices}")
    if len(set(indices)) != len(indices):
        raise ValueError(f"repeated spin-orbital index in {indices}")
    if min(indices) < 0 or max(indices) >= n_qubits:
        raise ValueError(f"index out of range in {indices} for {n_qubits} qubits")
    return indices


def jw_excitation(indices, kind: str, n_qubits: int, model: CostModel = DEFAULT_COST_MODEL) -> ExcitationOp:
    """Jordan-Wigner image of a fermionic excitation generator."""
    indices = _validate_indices(indices, kind, n_qubits)
    gen = _excitation_generator(indices, kind, z_string=True)
    return ExcitationOp(
        kind=kind,
        indices=indices,
        flavor="fermionic",
        generator=gen,
        n_qubits=n_qubits,
        cnot_cost=model.cost(kind, "fermionic", indices),
        qubit_span=qubit_span(indices),
    )


def qeb_excitation(indices, kind: str, n_qubits: int, model: CostModel = DEFAULT_COST_MODEL) -> ExcitationOp:
    """Qubit-excitation operator: same structure as JW with Z strings removed."""
    indices = _validate_indices(indices, kind, n_qubits)
    gen = _excitation_generator(indices, kind, z_string=False)
    return ExcitationOp(
        kind=kind,
        indices=indices,
        flavor="qeb",
        generator=gen,
        n_qubits=n_qubits,
        cnot_cost=model.cost(kind, "qeb", indices),
        qubit_span=qubit_span(indices),
    )


def cnot_cost(op: ExcitationOp, model: CostModel = DEFAULT_COST_MODEL) -> int:
    """CNOT count of one excitation exponential under a cost model."""
    return model.cost(op.kind, op.flavor, op.indices)
