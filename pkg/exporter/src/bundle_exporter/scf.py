"""Restricted Hartree-Fock with DIIS, MO integral transformation, MP2, and
active-space reduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import build_basis
from .integrals import (
    eri_tensor,
    kinetic_matrix,
    nuclear_matrix,
    nuclear_repulsion,
    overlap_matrix,
)


class SCFError(RuntimeError):
    """SCF failed to converge."""


@dataclass
class RHFResult:
    energy: float  # total electronic + nuclear
    mo_coeff: np.ndarray  # AO x MO
    mo_energy: np.ndarray
    hcore: np.ndarray
    eri_ao: np.ndarray
    e_nuc: float
    n_electrons: int


def run_rhf(
    atoms: list[tuple[str, np.ndarray]],
    charges: list[int],
    max_iter: int = 300,
    conv_tol: float = 1e-11,
) -> RHFResult:
    basis = build_basis(atoms)
    coords = [pos for _, pos in atoms]
    S = overlap_matrix(basis)
    T = kinetic_matrix(basis)
    V = nuclear_matrix(basis, coords, charges)
    eri = eri_tensor(basis)
    e_nuc = nuclear_repulsion(coords, charges)
    hcore = T + V
    n_electrons = int(sum(charges))
    if n_electrons % 2:
        raise ValueError("restricted HF needs an even electron count")
    nocc = n_electrons // 2

    # symmetric orthogonalization
    s_val, s_vec = np.linalg.eigh(S)
    if s_val.min() < 1e-8:
        raise SCFError(f"near-singular overlap (min eigenvalue {s_val.min():.2e})")
    X = s_vec @ np.diag(s_val**-0.5) @ s_vec.T

    def build_fock(D):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        return hcore + J - 0.5 * K

    def density(C):
        Cocc = C[:, :nocc]
        return 2.0 * Cocc @ Cocc.T

    # core-Hamiltonian guess
    _, C = np.linalg.eigh(X.T @ hcore @ X)
    C = X @ C
    D = density(C)
    energy = 0.0
    diis_err, diis_fock = [], []
    for iteration in range(max_iter):
        F = build_fock(D)
        err = X.T @ (F @ D @ S - S @ D @ F) @ X
        diis_err.append(err)
        diis_fock.append(F)
        if len(diis_err) > 8:
            diis_err.pop(0)
            diis_fock.pop(0)
        if len(diis_err) > 1:
            m = len(diis_err)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    B[i, j] = np.sum(diis_err[i] * diis_err[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(B, rhs)[:m]
                F = sum(wi * Fi for wi, Fi in zip(w, diis_fock))
            except np.linalg.LinAlgError:
                pass
        eps, C = np.linalg.eigh(X.T @ F @ X)
        C = X @ C
        D_new = density(C)
        e_new = 0.5 * np.sum(D_new * (hcore + build_fock(D_new))) + e_nuc
        d_rms = np.sqrt(np.mean((D_new - D) ** 2))
        converged = abs(e_new - energy) < conv_tol and d_rms < 1e-8
        D, energy = D_new, e_new
        if converged and iteration > 1:
            F = build_fock(D)
            eps, C = np.linalg.eigh(X.T @ F @ X)
            C = X @ C
            return RHFResult(
                energy=energy,
                mo_coeff=C,
                mo_energy=eps,
                hcore=hcore,
                eri_ao=eri,
                e_nuc=e_nuc,
                n_electrons=n_electrons,
            )
    raise SCFError(f"SCF not converged after {max_iter} iterations (E={energy:.10f})")


def mo_integrals(res: RHFResult) -> tuple[np.ndarray, np.ndarray]:
    """One- and two-electron integrals in the MO basis (chemist (pq|rs))."""
    C = res.mo_coeff
    h = C.T @ res.hcore @ C
    g = np.einsum("pi,qj,pqrs,rk,sl->ijkl", C, C, res.eri_ao, C, C, optimize=True)
    return h, g


@dataclass
class ActiveSpaceIntegrals:
    """Spatial integrals reduced to an active window with core folded in."""

    h1: np.ndarray
    g2: np.ndarray  # (pq|rs)
    e_core: float  # nuclear repulsion + frozen-core energy
    orbital_energies: np.ndarray  # active MOs
    n_active_electrons: int

    @property
    def n_active(self) -> int:
        return self.h1.shape[0]


def reduce_to_active(
    res: RHFResult, n_active_electrons: int, active_orbitals: list[int]
) -> ActiveSpaceIntegrals:
    h, g = mo_integrals(res)
    nocc_total = res.n_electrons // 2
    n_frozen = (res.n_electrons - n_active_electrons) // 2
    core = [o for o in range(nocc_total) if o not in active_orbitals]
    if len(core) != n_frozen:
        raise ValueError(
            f"active window {active_orbitals} incompatible with "
            f"{n_active_electrons} active electrons"
        )
    e_core = res.e_nuc
    for c in core:
        e_core += 2.0 * h[c, c]
        for c2 in core:
            e_core += 2.0 * g[c, c, c2, c2] - g[c, c2, c2, c]
    act = list(active_orbitals)
    h_eff = h[np.ix_(act, act)].copy()
    for c in core:
        h_eff += 2.0 * g[np.ix_(act, act, [c], [c])][:, :, 0, 0]
        h_eff -= g[np.ix_(act, [c], [c], act)][:, 0, 0, :]
    g_act = g[np.ix_(act, act, act, act)]
    return ActiveSpaceIntegrals(
        h1=h_eff,
        g2=g_act,
        e_core=e_core,
        orbital_energies=res.mo_energy[act],
        n_active_electrons=n_active_electrons,
    )


def mp2_amplitudes(act: ActiveSpaceIntegrals) -> np.ndarray:
    """Restricted MP2 t2[i,j,a,b] (i -> a, j -> b) within the active window."""
    no = act.n_active_electrons // 2
    nv = act.n_active - no
    eps = act.orbital_energies
    t2 = np.zeros((no, no, nv, nv))
    for i in range(no):
        for j in range(no):
            for a in range(nv):
                for b in range(nv):
                    denom = eps[i] + eps[j] - eps[no + a] - eps[no + b]
                    t2[i, j, a, b] = act.g2[i, no + a, j, no + b] / denom
    return t2


def mp2_energy(act: ActiveSpaceIntegrals, t2: np.ndarray) -> float:
    no = act.n_active_electrons // 2
    e = 0.0
    for i in range(no):
        for j in range(no):
            for a in range(t2.shape[2]):
                for b in range(t2.shape[3]):
                    ovov = act.g2[i, no + a, j, no + b]
                    ovvo = act.g2[i, no + b, j, no + a]
                    e += t2[i, j, a, b] * (2.0 * ovov - ovvo)
    return e
