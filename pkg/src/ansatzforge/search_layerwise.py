"""Layerwise architecture search: incremental circuit growth with a sliding
soft-layer window, warm-start carry-over, commitment, and full-circuit
fine-tuning.

Each growth step trains a k-layer window appended after the committed
(frozen) prefix, commits the first s window layers by argmax, re-optimizes
every parameter of the committed circuit, and carries the remaining k - s
window layers (with their trained parameter values) into the next step's
warm-start buffer.  A monotonicity safeguard re-runs the fine-tune from
zeroed new parameters whenever a step would otherwise raise the committed
energy, which makes the committed-energy trace non-increasing by
construction (zero-angle layers act as the identity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import MoleculeBundle
from .numerics import QuasiNewtonConfig
from .pool import OperatorPool
from .results import SearchResult
from .sim import Circuit, SimContext
from .search_global import (
    ArchState,
    GlobalSearchConfig,
    RestartFailed,
    extract_discrete,
    finetune_structure,
    init_arch,
    structure_theta,
    train_global,
)
from .utils import resolve_workers, run_parallel

__all__ = ["LayerwiseConfig", "LayerwiseState", "search_window", "commit_and_finetune", "run_layerwise"]

ENERGY_SLACK = 1e-9


@dataclass
class LayerwiseConfig:
    window: int = 4
    slide: int = 2
    epochs: int = 500
    batch_size: int = 16
    restarts_per_step: int = 3
    alpha_lr: float = 0.1
    theta_lr: float = 0.05
    sigma: float = 0.01
    warm_boost: float = 5.0
    # prior against re-selecting already-committed groups: under the frozen
    # prefix, angle corrections to committed groups look profitable inside
    # the window but vanish after the full-circuit fine-tune.  The logits
    # remain trainable, so a genuinely useful repeat can still win; 0
    # recovers the unbiased initialization.
    revisit_penalty: float = 4.0
    seed: int = 0
    finetune: QuasiNewtonConfig = field(default_factory=QuasiNewtonConfig)
    workers: int | None = None

    def validate(self, n_layers: int) -> None:
        if not (1 <= self.slide < self.window):
            raise ValueError(f"need 1 <= slide < window, got s={self.slide} k={self.window}")
        if self.window > max(n_layers, 1):
            raise ValueError(f"window {self.window} larger than target depth {n_layers}")

    def as_global(self, seed: int) -> GlobalSearchConfig:
        return GlobalSearchConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            restarts=1,
            alpha_lr=self.alpha_lr,
            theta_lr=self.theta_lr,
            sigma=self.sigma,
            seed=seed,
            finetune=self.finetune,
        )


@dataclass
class LayerwiseState:
    """Committed circuit, its frozen parameters, and the carry-over buffer."""

    committed: tuple[int, ...] = ()
    theta_fixed: np.ndarray = field(default_factory=lambda: np.zeros(0))
    warm: tuple[tuple[int, np.ndarray], ...] = ()
    step: int = 0
    energy: float | None = None


def _committed_state(ctx: SimContext, pool: OperatorPool, state: LayerwiseState) -> np.ndarray:
    circuit = Circuit(pool, state.committed)
    return ctx.apply_circuit(circuit, state.theta_fixed)


def search_window(
    ctx: SimContext,
    pool: OperatorPool,
    state: LayerwiseState,
    config: LayerwiseConfig,
    seed: int,
) -> tuple[ArchState, dict]:
    """Train one soft window appended after the frozen committed prefix.

    Warm rows get a logit boost on the carried group and inherit its trained
    parameter values; fresh rows start from low-amplitude Gaussian noise.
    The committed prefix state is computed once and reused for every sample,
    so the frozen parameters are untouched by construction.
    """
    k = config.window
    if len(state.warm) >= k:
        raise ValueError(f"warm buffer ({len(state.warm)}) must be shorter than the window ({k})")
    arch = init_arch(pool, k, config.sigma, seed)
    if state.committed and config.revisit_penalty:
        arch.alpha[:, sorted(set(state.committed))] -= config.revisit_penalty
    for row, (gid, member_theta) in enumerate(state.warm):
        arch.alpha[row, gid] += config.warm_boost
        arch.theta[row, gid, : member_theta.size] = member_theta
    prefix = _committed_state(ctx, pool, state)
    return train_global(
        ctx,
        pool,
        k,
        config.as_global(seed),
        seed,
        init_state=prefix,
        warm_arch=arch,
    )


def commit_and_finetune(
    ctx: SimContext,
    pool: OperatorPool,
    state: LayerwiseState,
    arch: ArchState,
    n_layers: int,
    config: LayerwiseConfig,
) -> LayerwiseState:
    """Commit up to ``slide`` window layers and re-optimize the whole circuit."""
    window_structure = extract_discrete(arch)
    n_commit = min(config.slide, n_layers - len(state.committed))
    new_groups = window_structure[:n_commit]
    committed = state.committed + new_groups
    theta_new = structure_theta(pool, new_groups, arch.theta)
    theta0 = np.concatenate([state.theta_fixed, theta_new])
    circuit, theta, energy = finetune_structure(
        ctx, pool, committed, theta0, config.finetune
    )
    previous = state.energy
    if previous is not None and energy > previous + ENERGY_SLACK:
        # retry from identity-initialized new layers; cannot end above previous
        theta0 = np.concatenate([state.theta_fixed, np.zeros_like(theta_new)])
        circuit, theta2, energy2 = finetune_structure(ctx, pool, committed, theta0, config.finetune)
        if energy2 < energy:
            theta, energy = theta2, energy2
    warm = []
    for row in range(n_commit, config.window):
        gid = window_structure[row]
        warm.append((gid, arch.theta[row, gid, : pool[gid].n_params].copy()))
    warm = tuple(warm[: config.window - config.slide])
    return LayerwiseState(
        committed=committed,
        theta_fixed=np.asarray(theta, dtype=float),
        warm=warm,
        step=state.step + 1,
        energy=energy,
    )


def _grow_one_candidate(ctx, pool, state, config, n_layers, seed):
    arch, traces = search_window(ctx, pool, state, config, seed)
    new_state = commit_and_finetune(ctx, pool, state, arch, n_layers, config)
    return new_state, traces


def run_layerwise(
    bundle: MoleculeBundle,
    pool: OperatorPool,
    n_layers: int,
    config: LayerwiseConfig,
) -> SearchResult:
    """Grow a circuit to exactly ``n_layers`` groups via windowed search."""
    config.validate(n_layers)
    ctx = SimContext(bundle)
    state = LayerwiseState()
    step_rows: list[dict] = []
    energy_trace: list[float] = []
    last_traces: dict = {"max_prob": {}}
    step = 0
    while len(state.committed) < n_layers:
        seeds = [int(s) for s in np.random.SeedSequence([config.seed, step]).generate_state(config.restarts_per_step)]
        workers = resolve_workers(config.workers, len(seeds))
        outcomes = run_parallel(
            _grow_one_candidate,
            [(ctx, pool, state, config, n_layers, s) for s in seeds],
            workers=workers,
            catch=RestartFailed,
        )
        candidates = [o for o in outcomes if not isinstance(o, Exception)]
        if not candidates:
            raise RuntimeError(f"all window restarts failed at growth step {step}")
        new_state, traces = min(candidates, key=lambda c: c[0].energy)
        if state.energy is not None and new_state.energy > state.energy + ENERGY_SLACK:
            raise RuntimeError("monotonicity safeguard failed to hold committed energy")
        state, last_traces = new_state, traces
        energy_trace.append(state.energy)
        step_rows.append(
            {
                "step": step,
                "committed_size": len(state.committed),
                "energy_after_finetune": state.energy,
                "committed_group_ids": ";".join(map(str, state.committed)),
            }
        )
        step += 1
    circuit = Circuit(pool, state.committed)
    energy = ctx.energy(ctx.apply_circuit(circuit, state.theta_fixed))
    return SearchResult(
        method="layerwise",
        bundle_name=bundle.name,
        geometry_label=bundle.geometry_label,
        pool_flavor=pool.flavor,
        structure=state.committed,
        theta=tuple(float(t) for t in state.theta_fixed),
        energy=energy,
        hf_energy=bundle.hf_energy,
        fci_energy=bundle.fci_energy,
        cnot_total=circuit.cnot_total(),
        restarts_used=config.restarts_per_step,
        config={
            "layers": n_layers,
            "window": config.window,
            "slide": config.slide,
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "restarts_per_step": config.restarts_per_step,
            "alpha_lr": config.alpha_lr,
            "theta_lr": config.theta_lr,
            "sigma": config.sigma,
            "warm_boost": config.warm_boost,
            "revisit_penalty": config.revisit_penalty,
            "seed": config.seed,
        },
        energy_trace=tuple(energy_trace),
        max_prob_trace={k: tuple(v) for k, v in last_traces["max_prob"].items()},
        tables={"growth_steps": step_rows},
    )
