"""Global architecture search: continuous relaxation over a fixed L-layer
template, joint Monte-Carlo optimization of per-layer selection logits and a
per-layer per-candidate parameter table, discrete extraction, quasi-Newton
fine-tuning, and multi-restart orchestration.

The selection logits alpha (L x M) define independent per-layer softmax
distributions; sampled structures are evaluated exactly and the logit
gradient uses the score-function estimator with the batch-mean baseline:

    d/d alpha[l, i] = mean_b (E_b - Ebar) * (1[k_b(l) == i] - p[l, i])

Identical samples within a batch are collapsed to unique structures with
multiplicities before evaluation (exact, and much faster once the
distribution concentrates).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import MoleculeBundle
from .numerics import AdamState, QuasiNewtonConfig, adam_step, quasi_newton_minimize
from .pool import OperatorPool
from .results import SearchResult
from .sim import Circuit, SimContext
from .utils import resolve_workers, run_parallel

__all__ = [
    "GlobalSearchConfig",
    "ArchState",
    "RestartFailed",
    "sample_batch",
    "batch_loss_and_grads",
    "train_global",
    "extract_discrete",
    "finetune_structure",
    "run_global",
]

CHECKPOINT_EPOCHS = (0, 10, 100, 400)


class RestartFailed(RuntimeError):
    """One stochastic restart diverged; the run may continue with the rest."""


@dataclass
class GlobalSearchConfig:
    epochs: int = 2000
    batch_size: int = 16
    restarts: int = 4
    alpha_lr: float = 0.1
    theta_lr: float = 0.05
    sigma: float = 0.01
    seed: int = 0
    checkpoint_epochs: tuple[int, ...] = CHECKPOINT_EPOCHS
    # stop once every layer is locked (max prob > 0.999) and the batch has
    # collapsed to one structure for this many consecutive epochs; identical
    # batches carry zero selection gradient, so nothing can change after that
    saturation_patience: int = 50
    finetune: QuasiNewtonConfig = field(default_factory=QuasiNewtonConfig)
    workers: int | None = None


@dataclass
class ArchState:
    """Architecture logits and the parameter table of one restart."""

    alpha: np.ndarray  # (L, M)
    theta: np.ndarray  # (L, M, P)
    seed: int
    epoch: int = 0

    @property
    def n_layers(self) -> int:
        return self.alpha.shape[0]

    def probabilities(self) -> np.ndarray:
        return softmax_rows(self.alpha)


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def init_arch(pool: OperatorPool, n_layers: int, sigma: float, seed: int) -> ArchState:
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0xA]))
    alpha = sigma * rng.standard_normal((n_layers, len(pool)))
    theta = np.zeros((n_layers, len(pool), pool.max_params_per_group))
    return ArchState(alpha=alpha, theta=theta, seed=int(seed))


def sample_batch(arch: ArchState, batch_size: int) -> np.ndarray:
    """Sample (batch_size, L) structures; deterministic in (seed, epoch, index)."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    probs = arch.probabilities()
    rng = np.random.default_rng(np.random.SeedSequence([arch.seed, 0xB, arch.epoch]))
    u = rng.random((batch_size, arch.n_layers))
    out = np.empty((batch_size, arch.n_layers), dtype=np.int64)
    for layer in range(arch.n_layers):
        cdf = np.cumsum(probs[layer])
        out[:, layer] = np.minimum(np.searchsorted(cdf, u[:, layer], side="right"), len(cdf) - 1)
    return out


def structure_theta(pool: OperatorPool, structure, table: np.ndarray) -> np.ndarray:
    """Flatten the table entries used by one structure into a parameter vector."""
    parts = [table[l, gid, : pool[gid].n_params] for l, gid in enumerate(structure)]
    return np.concatenate(parts) if parts else np.zeros(0)


def _scatter_structure_grad(pool, structure, grad_vec, out_table, weight: float) -> None:
    offset = 0
    for l, gid in enumerate(structure):
        n = pool[gid].n_params
        out_table[l, gid, :n] += weight * grad_vec[offset : offset + n]
        offset += n


def batch_loss_and_grads(
    ctx: SimContext,
    pool: OperatorPool,
    arch: ArchState,
    structures: np.ndarray,
    init_state: np.ndarray | None = None,
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Mean batch energy with score-function logit gradient and exact
    adjoint gradients accumulated into the parameter table slots in use.

    Returns (mean_energy, grad_alpha, grad_theta_table, per-sample energies).
    """
    batch_size = structures.shape[0]
    unique, inverse, counts = np.unique(
        structures, axis=0, return_inverse=True, return_counts=True
    )
    n_unique = unique.shape[0]
    states = np.empty((n_unique, ctx.dim), dtype=complex)
    circuits, thetas = [], []
    for u in range(n_unique):
        circ = Circuit(pool, tuple(int(g) for g in unique[u]))
        th = structure_theta(pool, circ.group_ids, arch.theta)
        start = None if init_state is None else init_state.copy()
        states[u] = ctx.apply_circuit(circ, th, start)
        circuits.append(circ)
        thetas.append(th)
    energies_u, seeds = ctx.energies_and_seeds(states)

    grad_theta = np.zeros_like(arch.theta)
    for u in range(n_unique):
        _, grad_vec = ctx.energy_and_grad(
            circuits[u], thetas[u], seed=seeds[u], final_state=states[u]
        )
        _scatter_structure_grad(
            pool, circuits[u].group_ids, grad_vec, grad_theta, counts[u] / batch_size
        )

    mean_energy = float(energies_u @ counts / batch_size)
    probs = arch.probabilities()
    grad_alpha = np.zeros_like(arch.alpha)
    layer_idx = np.arange(arch.n_layers)
    for u in range(n_unique):
        c = counts[u] * (energies_u[u] - mean_energy) / batch_size
        grad_alpha -= c * probs
        grad_alpha[layer_idx, unique[u]] += c
    return mean_energy, grad_alpha, grad_theta, energies_u[inverse]


def train_global(
    ctx: SimContext,
    pool: OperatorPool,
    n_layers: int,
    config: GlobalSearchConfig,
    seed: int,
    init_state: np.ndarray | None = None,
    warm_arch: ArchState | None = None,
) -> tuple[ArchState, dict]:
    """Run the stochastic search phase; returns the trained state and traces."""
    arch = warm_arch if warm_arch is not None else init_arch(pool, n_layers, config.sigma, seed)
    adam_alpha = AdamState(learning_rate=config.alpha_lr)
    adam_theta = AdamState(learning_rate=config.theta_lr)
    checkpoints = sorted({e for e in (*config.checkpoint_epochs, config.epochs) if e <= config.epochs})
    traces = {"energy": [], "diversity": [], "max_prob": {}}
    saturated_for = 0
    epochs_run = 0
    for epoch in range(config.epochs):
        if epoch in checkpoints:
            traces["max_prob"][epoch] = tuple(arch.probabilities().max(axis=1))
        structures = sample_batch(arch, config.batch_size)
        mean_energy, grad_alpha, grad_theta, _ = batch_loss_and_grads(
            ctx, pool, arch, structures, init_state
        )
        if not np.isfinite(mean_energy):
            raise RestartFailed(f"non-finite batch energy at epoch {epoch}")
        traces["energy"].append(mean_energy)
        distinct_structures = np.unique(structures, axis=0).shape[0]
        traces["diversity"].append(int(np.unique(structures).size))
        arch.alpha = adam_step(adam_alpha, arch.alpha, grad_alpha)
        arch.theta = adam_step(adam_theta, arch.theta, grad_theta)
        arch.epoch += 1
        epochs_run = epoch + 1
        if distinct_structures == 1 and arch.probabilities().max(axis=1).min() > 0.999:
            saturated_for += 1
            if config.saturation_patience and saturated_for >= config.saturation_patience:
                break
        else:
            saturated_for = 0
    traces["max_prob"][epochs_run] = tuple(arch.probabilities().max(axis=1))
    return arch, traces


def extract_discrete(arch: ArchState) -> tuple[int, ...]:
    """Per-layer argmax of the logits; ties break toward the lowest index."""
    return tuple(int(i) for i in np.argmax(arch.alpha, axis=1))


def finetune_structure(
    ctx: SimContext,
    pool: OperatorPool,
    structure: tuple[int, ...],
    theta0: np.ndarray,
    qn_config: QuasiNewtonConfig,
    init_state: np.ndarray | None = None,
) -> tuple[Circuit, np.ndarray, float]:
    """Quasi-Newton re-optimization of a discrete circuit's parameters.

    Each layer occurrence keeps its own parameter slot(s); repeated group
    selections stay independent parameters.
    """
    circuit = Circuit(pool, tuple(structure))

    def fun_grad(th):
        start = None if init_state is None else init_state.copy()
        return ctx.energy_and_grad(circuit, th, init_state=start)

    res = quasi_newton_minimize(fun_grad, theta0, qn_config)
    return circuit, res.x, float(res.fun)


def _run_one_restart(ctx, pool, n_layers, config, restart_seed):
    arch, traces = train_global(ctx, pool, n_layers, config, restart_seed)
    structure = extract_discrete(arch)
    theta0 = structure_theta(pool, structure, arch.theta)
    circuit, theta, energy = finetune_structure(
        ctx, pool, structure, theta0, config.finetune
    )
    check = ctx.energy(ctx.apply_circuit(circuit, theta))
    if abs(check - energy) > 1e-10:
        energy = check
    return {
        "structure": structure,
        "theta": theta,
        "energy": energy,
        "cnot": circuit.cnot_total(),
        "traces": traces,
    }


def run_global(
    bundle: MoleculeBundle,
    pool: OperatorPool,
    n_layers: int,
    config: GlobalSearchConfig,
) -> SearchResult:
    """Full multi-restart global search on one bundle."""
    if n_layers < 0:
        raise ValueError("layer count must be non-negative")
    if not len(pool) and n_layers:
        raise ValueError("empty operator pool")
    ctx = SimContext(bundle)
    if n_layers == 0:
        hf_energy = ctx.energy(ctx.hf_state())
        return SearchResult(
            method="global",
            bundle_name=bundle.name,
            geometry_label=bundle.geometry_label,
            pool_flavor=pool.flavor,
            structure=(),
            theta=(),
            energy=hf_energy,
            hf_energy=bundle.hf_energy,
            fci_energy=bundle.fci_energy,
            cnot_total=0,
            restarts_used=0,
            config=_config_dict(config, n_layers),
        )
    restart_seeds = [int(s) for s in np.random.SeedSequence(config.seed).generate_state(config.restarts)]
    workers = resolve_workers(config.workers, config.restarts)
    outcomes = run_parallel(
        _run_one_restart,
        [(ctx, pool, n_layers, config, s) for s in restart_seeds],
        workers=workers,
        catch=RestartFailed,
    )
    failures = [o for o in outcomes if isinstance(o, Exception)]
    successes = [o for o in outcomes if not isinstance(o, Exception)]
    if not successes:
        raise RuntimeError(f"all {config.restarts} restarts failed: {failures[:3]}")
    best = min(successes, key=lambda o: o["energy"])
    return SearchResult(
        method="global",
        bundle_name=bundle.name,
        geometry_label=bundle.geometry_label,
        pool_flavor=pool.flavor,
        structure=tuple(best["structure"]),
        theta=tuple(float(t) for t in best["theta"]),
        energy=best["energy"],
        hf_energy=bundle.hf_energy,
        fci_energy=bundle.fci_energy,
        cnot_total=best["cnot"],
        restarts_used=config.restarts,
        config=_config_dict(config, n_layers),
        energy_trace=tuple(best["traces"]["energy"]),
        diversity_trace=tuple(best["traces"]["diversity"]),
        max_prob_trace={k: tuple(v) for k, v in best["traces"]["max_prob"].items()},
    )


def _config_dict(config: GlobalSearchConfig, n_layers: int) -> dict:
    return {
        "layers": n_layers,
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "restarts": config.restarts,
        "alpha_lr": config.alpha_lr,
        "theta_lr": config.theta_lr,
        "sigma": config.sigma,
        "seed": config.seed,
        "checkpoint_epochs": list(config.checkpoint_epochs),
        "finetune_gtol": config.finetune.gtol,
        "finetune_max_iter": config.finetune.max_iter,
    }
