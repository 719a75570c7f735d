"""Jordan-Wigner mapping of the active-space Hamiltonian to Pauli words.

Deliberately independent of the search engine's Pauli algebra: operators
are words mapping qubit -> letter, multiplied through a letter product
table.  Spin-orbital layout: alpha orbitals 0..No-1, beta No..2No-1.
"""

from __future__ import annotations

import numpy as np

from .scf import ActiveSpaceIntegrals

# (left, right) -> (phase, product letter)
_PROD = {
    ("I", "I"): (1.0, "I"),
    ("I", "X"): (1.0, "X"),
    ("I", "Y"): (1.0, "Y"),
    ("I", "Z"): (1.0, "Z"),
    ("X", "I"): (1.0, "X"),
    ("Y", "I"): (1.0, "Y"),
    ("Z", "I"): (1.0, "Z"),
    ("X", "X"): (1.0, "I"),
    ("Y", "Y"): (1.0, "I"),
    ("Z", "Z"): (1.0, "I"),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}

Word = tuple[tuple[int, str], ...]  # sorted ((qubit, letter), ...)
TermList = list[tuple[complex, Word]]


def _word_mul(w1: Word, w2: Word) -> tuple[complex, Word]:
    letters = dict(w1)
    phase = 1.0 + 0.0j
    for q, letter in w2:
        ph, combined = _PROD[(letters.get(q, "I"), letter)]
        phase *= ph
        if combined == "I":
            letters.pop(q, None)
        else:
            letters[q] = combined
    return phase, tuple(sorted(letters.items()))


def _mul(a: TermList, b: TermList) -> TermList:
    out: dict[Word, complex] = {}
    for ca, wa in a:
        for cb, wb in b:
            phase, w = _word_mul(wa, wb)
            c = out.get(w, 0.0) + ca * cb * phase
            if c == 0.0:
                out.pop(w, None)
            else:
                out[w] = c
    return [(c, w) for w, c in out.items()]


def _ladder(q: int, creation: bool) -> TermList:
    zs = tuple((k, "Z") for k in range(q))
    sign = -1j if creation else 1j
    return [
        (0.5, zs + ((q, "X"),)),
        (0.5 * sign, zs + ((q, "Y"),)),
    ]


def jordan_wigner_hamiltonian(act: ActiveSpaceIntegrals, tol: float = 1e-12) -> dict[str, float]:
    """Map the active-space Hamiltonian to {pauli word string: coefficient}."""
    no_spatial = act.n_active
    n_so = 2 * no_spatial

    def so(p: int, spin: int) -> int:
        return p + spin * no_spatial

    create = [_ladder(q, True) for q in range(n_so)]
    destroy = [_ladder(q, False) for q in range(n_so)]

    acc: dict[Word, complex] = {(): complex(act.e_core)}

    def add(terms: TermList, scale: float) -> None:
        for c, w in terms:
            val = acc.get(w, 0.0) + scale * c
            acc[w] = val

    h1, g2 = act.h1, act.g2
    for p in range(no_spatial):
        for q in range(no_spatial):
            if abs(h1[p, q]) < 1e-14:
                continue
            for spin in (0, 1):
                add(_mul(create[so(p, spin)], destroy[so(q, spin)]), h1[p, q])

    # 1/2 sum_{pqrs,st} (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}
    for p in range(no_spatial):
        for q in range(no_spatial):
            for r in range(no_spatial):
                for s in range(no_spatial):
                    val = g2[p, q, r, s]
                    if abs(val) < 1e-14:
                        continue
                    for spin1 in (0, 1):
                        for spin2 in (0, 1):
                            i1, i2 = so(p, spin1), so(r, spin2)
                            i3, i4 = so(s, spin2), so(q, spin1)
                            if i1 == i2 or i3 == i4:
                                continue
                            term = _mul(
                                _mul(create[i1], create[i2]),
                                _mul(destroy[i3], destroy[i4]),
                            )
                            add(term, 0.5 * val)

    out: dict[str, float] = {}
    for w, c in acc.items():
        if abs(c) < tol:
            continue
        if abs(c.imag) > 1e-10:
            raise ValueError(f"non-real JW coefficient {c} for word {w}")
        out[" ".join(f"{letter}{q}" for q, letter in w)] = c.real
    return out


def hamiltonian_sparse(terms: dict[str, float], n_qubits: int):
    """Sparse matrix of a Pauli dictionary via per-term Kronecker chains."""
    import scipy.sparse as sp

    mats = {
        "I": sp.identity(2, format="csr", dtype=complex),
        "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
        "Y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
        "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
    }
    chunks = []
    chunk = None
    for word, coeff in sorted(terms.items()):
        letters = {int(tok[1:]): tok[0] for tok in word.split()}
        mat = sp.identity(1, format="csr", dtype=complex)
        for q in range(n_qubits - 1, -1, -1):
            mat = sp.kron(mat, mats[letters.get(q, "I")], format="csr")
        mat = coeff * mat
        chunk = mat if chunk is None else chunk + mat
        if chunk.nnz > 2_000_000:
            chunks.append(chunk)
            chunk = None
    if chunk is not None:
        chunks.append(chunk)
    total = chunks[0]
    for extra in chunks[1:]:
        total = total + extra
    return total


def ground_state_energy(terms: dict[str, float], n_qubits: int, hf_index: int) -> float:
    """Lowest eigenvalue of the qubit Hamiltonian (sparse diagonalization)."""
    import scipy.sparse.linalg as spla

    H = hamiltonian_sparse(terms, n_qubits)
    dim = 2**n_qubits
    if dim <= 256:
        vals = np.linalg.eigvalsh(H.toarray())
        return float(vals[0])
    v0 = np.ones(dim)
    v0[hf_index] += 2.0
    v0 /= np.linalg.norm(v0)
    vals = spla.eigsh(H, k=1, which="SA", v0=v0, maxiter=5000, tol=0)[0]
    return float(vals[0])
