"""Dense statevector simulation.

Excitation exponentials use the closed form
``exp(t G) = 1 + sin(t) G + (1 - cos(t)) G^2`` (valid because every
excitation generator satisfies ``G^3 = -G``), applied member-by-member in
the group's canonical member order.  Every generator flips one fixed set of
qubits, so its action reduces to a single gather with a precomputed real
amplitude vector; ``G^2`` is diagonal.  The Hamiltonian is materialized once
per context as a sparse CSR matrix for energy evaluation, adjoint seeds and
the Lanczos eigensolver.

Gradients are exact adjoint-sweep gradients: one forward pass, one
Hamiltonian application, and one backward pass, independent of the number
of parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .bundle import MoleculeBundle
from .pauli import PauliSum
from .pool import OperatorGroup, OperatorPool

__all__ = ["Circuit", "SimContext", "hf_state", "pauli_sum_to_csr"]

NORM_TOL = 1e-10


def _term_arrays(n_qubits: int, x: int, z: int, coeff: complex, basis: np.ndarray) -> np.ndarray:
    """Per-basis-state amplitude of ``coeff * word`` acting as |b> -> amp * |b^x>.

    With the i^{n_y} X^x Z^z word convention: amp(target b) is evaluated on
    the source state b^x.
    """
    ny = (x & z).bit_count()
    src = basis ^ x
    signs = 1.0 - 2.0 * (np.bitwise_count(src & z) & 1).astype(np.float64)
    return (coeff * 1j**ny) * signs


class GeneratorAction:
    """Fast action of one excitation generator on statevectors."""

    __slots__ = ("flip", "perm", "g", "d")

    def __init__(self, generator: PauliSum, n_qubits: int, perm_cache: dict):
        dim = 1 << n_qubits
        basis = np.arange(dim, dtype=np.int64)
        flips = {x for (x, _z), _c in generator.items()}
        if len(flips) != 1:
            raise ValueError("generator terms must share one flip mask")
        (self.flip,) = flips
        if self.flip not in perm_cache:
            perm_cache[self.flip] = basis ^ self.flip
        self.perm = perm_cache[self.flip]
        g = np.zeros(dim, dtype=complex)
        for (x, z), c in generator.items():
            g += _term_arrays(n_qubits, x, z, c, basis)
        if np.abs(g.imag).max() > 1e-12:
            raise ValueError("excitation generator has non-real matrix elements")
        self.g = np.ascontiguousarray(g.real)
        d = self.g * self.g
        if not np.all((d < 1e-20) | (np.abs(d - 1.0) < 1e-12)):
            raise ValueError("generator does not satisfy G^3 = -G")
        self.d = d

    def apply(self, v: np.ndarray, theta: float) -> np.ndarray:
        """exp(theta G) |v> (new array)."""
        out = v - (1.0 - np.cos(theta)) * (self.d * v)
        out += np.sin(theta) * (self.g * v[self.perm])
        return out

    def act(self, v: np.ndarray) -> np.ndarray:
        """G |v>."""
        return self.g * v[self.perm]


def pauli_sum_to_csr(ps: PauliSum, n_qubits: int, drop_tol: float = 1e-14) -> sp.csr_matrix:
    """Sparse matrix of a Pauli sum, grouping terms by flip mask."""
    dim = 1 << n_qubits
    basis = np.arange(dim, dtype=np.int64)
    by_flip: dict[int, list[tuple[int, complex]]] = {}
    for (x, z), c in ps.items():
        by_flip.setdefault(x, []).append((z, c))
    rows, cols, data = [], [], []
    for x, terms in sorted(by_flip.items()):
        amp = np.zeros(dim, dtype=complex)
        for z, c in terms:
            amp += _term_arrays(n_qubits, x, z, c, basis)
        keep = np.abs(amp) > drop_tol
        if not keep.any():
            continue
        rows.append(basis[keep])
        cols.append(basis[keep] ^ x)
        data.append(amp[keep])
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    mat = sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    mat.sum_duplicates()
    return mat


def hf_state(bundle: MoleculeBundle) -> np.ndarray:
    """Computational-basis state of the stored reference determinant."""
    v = np.zeros(1 << bundle.n_qubits, dtype=complex)
    v[bundle.hf_bits] = 1.0
    return v


@dataclass(frozen=True)
class Circuit:
    """An ordered selection of operator groups with parameter slots.

    ``slots[l][m]`` is the parameter index driven by member ``m`` of layer
    ``l``; members of a shared-parameter group point at the same slot, and
    slots may be tied across layers (gradients accumulate).
    """

    pool: OperatorPool
    group_ids: tuple[int, ...]
    slots: tuple[tuple[int, ...], ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.slots is None:
            slots = []
            next_slot = 0
            for gid in self.group_ids:
                group = self.pool[gid]
                if group.shared_parameter:
                    slots.append((next_slot,) * len(group.members))
                    next_slot += 1
                else:
                    slots.append(tuple(range(next_slot, next_slot + len(group.members))))
                    next_slot += len(group.members)
            object.__setattr__(self, "slots", tuple(slots))

    @property
    def n_layers(self) -> int:
        return len(self.group_ids)

    @property
    def n_params(self) -> int:
        return max((s for layer in self.slots for s in layer), default=-1) + 1

    @property
    def n_qubits(self) -> int:
        return self.pool.n_qubits

    def gates(self):
        """Flat (group member, slot) sequence in application order."""
        for gid, layer_slots in zip(self.group_ids, self.slots):
            yield from zip(self.pool[gid].members, layer_slots)

    def cnot_total(self) -> int:
        return sum(self.pool[gid].cnot_cost_total for gid in self.group_ids)


class SimContext:
    """Per-bundle simulation workspace: cached Hamiltonian and generator actions.

    Contexts are single-owner mutable caches; concurrent searches should each
    construct their own (bundles and pools themselves are immutable).
    """

    def __init__(self, bundle: MoleculeBundle):
        self.bundle = bundle
        self.n_qubits = bundle.n_qubits
        self.dim = 1 << self.n_qubits
        self._perm_cache: dict[int, np.ndarray] = {}
        self._action_cache: dict[tuple, GeneratorAction] = {}
        self._hmat: sp.csr_matrix | None = None

    @property
    def hamiltonian(self) -> sp.csr_matrix:
        if self._hmat is None:
            self._hmat = pauli_sum_to_csr(self.bundle.hamiltonian, self.n_qubits)
        return self._hmat

    def action(self, op) -> GeneratorAction:
        key = (op.flavor, op.kind, op.indices)
        act = self._action_cache.get(key)
        if act is None:
            act = GeneratorAction(op.generator, self.n_qubits, self._perm_cache)
            self._action_cache[key] = act
        return act

    def hf_state(self) -> np.ndarray:
        return hf_state(self.bundle)

    # -- state evolution ----------------------------------------------------
    def apply_group(self, state: np.ndarray, group: OperatorGroup, theta) -> np.ndarray:
        """exp-apply one group; theta is a scalar (shared) or per-member array."""
        thetas = np.broadcast_to(np.asarray(theta, dtype=float), (len(group.members),))
        for op, t in zip(group.members, thetas):
            state = self.action(op).apply(state, t)
        return state

    def apply_circuit(self, circuit: Circuit, theta: np.ndarray, state: np.ndarray | None = None) -> np.ndarray:
        state = self.hf_state() if state is None else state
        for op, slot in circuit.gates():
            state = self.action(op).apply(state, theta[slot])
        return state

    # -- measurement ----------------------------------------------------------
    def energy(self, state: np.ndarray) -> float:
        hv = self.hamiltonian @ state
        val = np.vdot(state, hv)
        if abs(val.imag) > 1e-10:
            raise ValueError(f"non-real energy (imag={val.imag:.3e}); Hamiltonian not Hermitian?")
        self._check_bound(val.real)
        return float(val.real)

    def energies_and_seeds(self, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Batched energies and H|psi> seeds for adjoint sweeps (states: (B, dim))."""
        seeds = (self.hamiltonian @ states.T).T
        energies = np.einsum("bi,bi->b", states.conj(), seeds).real
        for e in energies:
            self._check_bound(e)
        return energies, seeds

    def _check_bound(self, energy: float) -> None:
        fci = self.bundle.fci_energy
        if fci is not None and energy < fci - 1e-9:
            raise RuntimeError(
                f"variational bound violated: E={energy!r} < FCI={fci!r}"
            )

    # -- gradients ------------------------------------------------------------
    def energy_and_grad(
        self,
        circuit: Circuit,
        theta: np.ndarray,
        init_state: np.ndarray | None = None,
        seed: np.ndarray | None = None,
        final_state: np.ndarray | None = None,
    ) -> tuple[float, np.ndarray]:
        """Adjoint-sweep gradient of <psi|H|psi> w.r.t. the parameter slots.

        One forward pass, one Hamiltonian application, one backward pass;
        tied slots accumulate their members' contributions.  ``init_state``
        defaults to the reference determinant and is treated as frozen.
        """
        gates = list(circuit.gates())
        if final_state is None:
            final_state = self.apply_circuit(circuit, theta, None if init_state is None else init_state.copy())
        phi = final_state.copy()
        if seed is None:
            lam = self.hamiltonian @ phi
        else:
            lam = seed.copy()
        energy = float(np.vdot(phi, lam).real)
        self._check_bound(energy)
        grad = np.zeros(circuit.n_params)
        for op, slot in reversed(gates):
            act = self.action(op)
            grad[slot] += 2.0 * np.vdot(lam, act.act(phi)).real
            phi = act.apply(phi, -theta[slot])
            lam = act.apply(lam, -theta[slot])
        return energy, grad
