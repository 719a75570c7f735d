"""Reference methods: exact ground state by Lanczos iteration, ADAPT-VQE
greedy growth, and the MP2-ordered truncated-UCCSD baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bundle import MoleculeBundle
from .numerics import QuasiNewtonConfig, quasi_newton_minimize
from .pool import OperatorPool, mp2_order
from .results import SearchResult
from .sim import Circuit, SimContext

__all__ = ["fci_ground", "adapt_vqe", "truncated_uccsd", "LanczosError"]


class LanczosError(RuntimeError):
    """Eigensolver failed to reach the requested residual."""


def fci_ground(
    hamiltonian,
    n_qubits: int,
    tol: float = 1e-8,
    seed: int = 7,
    max_dim: int = 500,
) -> tuple[float, np.ndarray]:
    """Lowest eigenpair via Lanczos with full reorthogonalization.

    ``hamiltonian`` is anything with a matvec ``@`` (a sparse matrix or a
    SimContext's Hamiltonian).  The returned pair satisfies
    ``||H v - E v|| <= tol``.
    """
    dim = 1 << n_qubits
    rng = np.random.default_rng(seed)
    real = not np.iscomplexobj(hamiltonian @ np.ones(dim))
    dtype = np.float64 if real else np.complex128
    v = rng.standard_normal(dim).astype(dtype)
    v /= np.linalg.norm(v)
    max_dim = min(max_dim, dim)
    basis = np.empty((max_dim, dim), dtype=dtype)
    basis[0] = v
    alphas: list[float] = []
    betas: list[float] = []
    for m in range(max_dim):
        w = hamiltonian @ basis[m]
        alphas.append(float(np.vdot(basis[m], w).real))
        # full reorthogonalization, twice for numerical safety
        for _ in range(2):
            w -= basis[: m + 1].T @ (basis[: m + 1].conj() @ w)
        beta = float(np.linalg.norm(w))
        evals, evecs = scipy.linalg.eigh_tridiagonal(alphas, betas)
        residual = abs(beta * evecs[-1, 0])
        if residual <= tol or m == max_dim - 1 or beta < 1e-13:
            ground = evecs[:, 0] @ basis[: m + 1]
            ground /= np.linalg.norm(ground)
            true_residual = float(np.linalg.norm(hamiltonian @ ground - evals[0] * ground))
            if true_residual <= tol:
                return float(evals[0]), ground.astype(complex)
            if m == max_dim - 1 or beta < 1e-13:
                raise LanczosError(
                    f"residual {true_residual:.2e} > {tol} after {m + 1} iterations"
                )
        betas.append(beta)
        basis[m + 1] = w / beta
    raise LanczosError("unreachable")


def fci_ground_of_bundle(bundle: MoleculeBundle, tol: float = 1e-8) -> tuple[float, np.ndarray]:
    ctx = SimContext(bundle)
    h = ctx.hamiltonian
    if np.abs(h.data.imag).max(initial=0.0) < 1e-14:
        h = h.real
    return fci_ground(h, bundle.n_qubits, tol=tol)


@dataclass
class AdaptStep:
    step: int
    group_id: int
    abs_gradient: float
    energy: float
    error_vs_fci_mha: float | None
    cnot_total: int


def _selection_gradients(ctx: SimContext, pool: OperatorPool, state: np.ndarray) -> np.ndarray:
    """Group-level ADAPT signal <psi|[H, G]|psi> = 2 Re <H psi|G psi>
    summed over the group's members (the shared-parameter derivative at 0)."""
    chi = ctx.hamiltonian @ state
    grads = np.empty(len(pool))
    for gid, group in enumerate(pool):
        g = 0.0
        for op in group.members:
            g += 2.0 * np.vdot(chi, ctx.action(op).act(state)).real
        grads[gid] = g
    return grads


def adapt_vqe(
    bundle: MoleculeBundle,
    pool: OperatorPool,
    max_groups: int,
    grad_threshold: float = 1e-6,
    qn_config: QuasiNewtonConfig | None = None,
) -> SearchResult:
    """Greedy ansatz growth: append the largest-|gradient| group, re-optimize
    all parameters from the previous optimum with the new angle at zero."""
    if max_groups > len(pool):
        raise ValueError(f"max_groups {max_groups} exceeds pool size {len(pool)}")
    qn_config = qn_config or QuasiNewtonConfig()
    ctx = SimContext(bundle)
    fci = bundle.fci_energy
    structure: list[int] = []
    theta = np.zeros(0)
    energy = ctx.energy(ctx.hf_state())
    steps: list[AdaptStep] = []
    state = ctx.hf_state()
    for step in range(max_groups):
        grads = _selection_gradients(ctx, pool, state)
        best = int(np.argmax(np.abs(grads)))
        if abs(grads[best]) < grad_threshold:
            break
        structure.append(best)
        circuit = Circuit(pool, tuple(structure))
        theta = np.concatenate([theta, np.zeros(pool[best].n_params)])
        res = quasi_newton_minimize(
            lambda th: ctx.energy_and_grad(circuit, th), theta, qn_config
        )
        theta, energy = res.x, float(res.fun)
        state = ctx.apply_circuit(circuit, theta)
        steps.append(
            AdaptStep(
                step=step + 1,
                group_id=best,
                abs_gradient=float(abs(grads[best])),
                energy=energy,
                error_vs_fci_mha=None if fci is None else (energy - fci) * 1000.0,
                cnot_total=circuit.cnot_total(),
            )
        )
    circuit = Circuit(pool, tuple(structure))
    return SearchResult(
        method="adapt",
        bundle_name=bundle.name,
        geometry_label=bundle.geometry_label,
        pool_flavor=pool.flavor,
        structure=tuple(structure),
        theta=tuple(float(t) for t in theta),
        energy=energy,
        hf_energy=bundle.hf_energy,
        fci_energy=fci,
        cnot_total=circuit.cnot_total(),
        restarts_used=1,
        config={"max_groups": max_groups, "grad_threshold": grad_threshold},
        energy_trace=tuple(s.energy for s in steps),
        tables={"adapt_steps": [vars(s) for s in steps]},
    )


def truncated_uccsd(
    bundle: MoleculeBundle,
    pool: OperatorPool,
    k_groups: int,
    qn_config: QuasiNewtonConfig | None = None,
) -> SearchResult:
    """Fixed-ordering baseline: top-k MP2-ordered groups, angles from zero."""
    if k_groups > len(pool):
        raise ValueError(f"k_groups {k_groups} exceeds pool size {len(pool)}")
    qn_config = qn_config or QuasiNewtonConfig()
    ctx = SimContext(bundle)
    structure = tuple(mp2_order(pool)[:k_groups])
    circuit = Circuit(pool, structure)
    theta0 = np.zeros(circuit.n_params)
    if k_groups == 0:
        energy = ctx.energy(ctx.hf_state())
        theta = theta0
    else:
        res = quasi_newton_minimize(lambda th: ctx.energy_and_grad(circuit, th), theta0, qn_config)
        theta, energy = res.x, float(res.fun)
    return SearchResult(
        method="truncated",
        bundle_name=bundle.name,
        geometry_label=bundle.geometry_label,
        pool_flavor=pool.flavor,
        structure=structure,
        theta=tuple(float(t) for t in theta),
        energy=energy,
        hf_energy=bundle.hf_energy,
        fci_energy=bundle.fci_energy,
        cnot_total=circuit.cnot_total(),
        restarts_used=1,
        config={"k_groups": k_groups},
    )
