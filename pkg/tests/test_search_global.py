"""Global search: sampling statistics, the score-function estimator against
exact enumeration, training bookkeeping, extraction, and reproducibility."""

import itertools

import numpy as np
import pytest
from scipy.stats import chisquare

from ansatzforge import Circuit, SimContext, build_uccsd_pool
from ansatzforge.pool import OperatorPool
from ansatzforge.search_global import (
    ArchState,
    GlobalSearchConfig,
    batch_loss_and_grads,
    extract_discrete,
    init_arch,
    run_global,
    sample_batch,
    softmax_rows,
    structure_theta,
    train_global,
)


def toy_pool(h4_bundle, n_groups=3) -> OperatorPool:
    """A small enumerable pool: the first n groups of the H4 pool."""
    full = build_uccsd_pool(h4_bundle)
    from dataclasses import replace

    groups = tuple(replace(full[g], id=i) for i, g in enumerate([3, 4, 8][:n_groups]))
    return OperatorPool(groups=groups, flavor="uccsd", active_space=full.active_space)


class TestSampling:
    def test_uniform_at_zero_logits(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        M = len(pool)
        arch = ArchState(alpha=np.zeros((1, M)), theta=np.zeros((1, M, 1)), seed=5)
        counts = np.zeros(M)
        draws = 0
        for epoch in range(10):
            arch.epoch = epoch
            s = sample_batch(arch, 10_000)
            for k in range(M):
                counts[k] += np.sum(s == k)
            draws += s.size
        freq = counts / draws
        sigma = np.sqrt((1 / M) * (1 - 1 / M) / draws)
        assert np.abs(freq - 1 / M).max() < 4 * sigma

    def test_saturated_logit_always_selected(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        M = len(pool)
        alpha = np.zeros((2, M))
        alpha[:, 3] = 20.0
        arch = ArchState(alpha=alpha, theta=np.zeros((2, M, 1)), seed=1)
        s = sample_batch(arch, 10_000)
        assert np.all(s == 3)

    def test_joint_distribution_chi2(self, h4_bundle):
        """M=3, L=2 empirical joint vs product of per-layer softmax."""
        pool = toy_pool(h4_bundle)
        rng = np.random.default_rng(0)
        alpha = rng.normal(scale=0.7, size=(2, 3))
        arch = ArchState(alpha=alpha, theta=np.zeros((2, 3, 1)), seed=123)
        probs = softmax_rows(alpha)
        expected_joint = np.outer(probs[0], probs[1])
        counts = np.zeros((3, 3))
        total = 0
        for epoch in range(20):
            arch.epoch = epoch
            s = sample_batch(arch, 5000)
            for a, b in s:
                counts[a, b] += 1
            total += len(s)
        stat, pvalue = chisquare(counts.ravel(), expected_joint.ravel() * total)
        assert pvalue > 0.001

    def test_deterministic_given_seed_epoch(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        arch1 = init_arch(pool, 3, 0.01, seed=9)
        arch2 = init_arch(pool, 3, 0.01, seed=9)
        arch1.epoch = arch2.epoch = 17
        assert np.array_equal(sample_batch(arch1, 64), sample_batch(arch2, 64))


class TestEstimator:
    def test_k1_alpha_gradient_vanishes(self, h4_bundle):
        pool = toy_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        arch = init_arch(pool, 2, 0.01, seed=3)
        structures = sample_batch(arch, 1)
        _, g_alpha, _, _ = batch_loss_and_grads(ctx, pool, arch, structures)
        assert np.abs(g_alpha).max() == 0.0

    def test_rows_sum_to_zero(self, h4_bundle):
        pool = toy_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        arch = init_arch(pool, 2, 0.5, seed=4)
        arch.theta += 0.05
        structures = sample_batch(arch, 32)
        _, g_alpha, _, _ = batch_loss_and_grads(ctx, pool, arch, structures)
        scale = max(np.abs(g_alpha).max(), 1.0)
        assert np.abs(g_alpha.sum(axis=1)).max() < 1e-14 * scale

    def test_matches_exact_enumeration(self, h4_bundle):
        """NMF gradient at K=4096 vs the exact gradient of sum_k P(k) E(k)."""
        pool = toy_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        M, L = 3, 2
        rng = np.random.default_rng(8)
        alpha = rng.normal(scale=0.4, size=(L, M))
        theta = rng.normal(scale=0.15, size=(L, M, 1))
        arch = ArchState(alpha=alpha.copy(), theta=theta.copy(), seed=77)

        probs = softmax_rows(alpha)
        energies = {}
        for k in itertools.product(range(M), repeat=L):
            circ = Circuit(pool, k)
            th = structure_theta(pool, k, theta)
            energies[k] = ctx.energy(ctx.apply_circuit(circ, th))
        # exact d/d alpha of E_k~P [E(k)]: sum_k E(k) P(k) (1[k_l=i] - p_li)
        exact = np.zeros((L, M))
        for k, e in energies.items():
            p_k = probs[0, k[0]] * probs[1, k[1]]
            for l in range(L):
                for i in range(M):
                    exact[l, i] += e * p_k * ((k[l] == i) - probs[l, i])

        estimate = np.zeros((L, M))
        n_rep = 16
        for rep in range(n_rep):
            arch.epoch = rep
            structures = sample_batch(arch, 4096)
            _, g_alpha, _, _ = batch_loss_and_grads(ctx, pool, arch, structures)
            estimate += g_alpha / n_rep
        mask = np.abs(exact) > 1e-6
        rel = np.abs(estimate[mask] - exact[mask]) / np.abs(exact[mask])
        assert rel.max() < 0.05

    def test_theta_gradient_scatter(self, h4_bundle):
        pool = toy_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        arch = init_arch(pool, 2, 0.01, seed=6)
        structures = np.array([[0, 1], [0, 1], [2, 1], [2, 1]])
        _, _, g_theta, _ = batch_loss_and_grads(ctx, pool, arch, structures)
        used = {(0, 0), (1, 1), (0, 2)}
        for l in range(2):
            for g in range(3):
                if (l, g) not in used:
                    assert g_theta[l, g, 0] == 0.0


class TestTraining:
    def test_t0_leaves_arch_at_init(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        config = GlobalSearchConfig(epochs=0, batch_size=4, seed=2)
        arch, traces = train_global(ctx, pool, 3, config, seed=42)
        fresh = init_arch(pool, 3, config.sigma, seed=42)
        assert np.array_equal(arch.alpha, fresh.alpha)
        assert np.array_equal(arch.theta, fresh.theta)
        assert traces["energy"] == []
        assert list(traces["max_prob"]) == [0]

    def test_checkpoints_recorded(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        config = GlobalSearchConfig(epochs=15, batch_size=4, seed=2)
        _, traces = train_global(ctx, pool, 2, config, seed=1)
        assert sorted(traces["max_prob"]) == [0, 10, 15]
        assert len(traces["energy"]) == 15
        assert len(traces["diversity"]) == 15

    def test_initial_diversity_near_uniform(self, h4_bundle):
        """With sigma -> 0 the first batch samples like the uniform distribution."""
        pool = build_uccsd_pool(h4_bundle)
        M = len(pool)
        rng = np.random.default_rng(0)
        draws = []
        for seed in range(200):
            arch = init_arch(pool, 4, 1e-8, seed=seed)
            draws.append(np.unique(sample_batch(arch, 16)).size)
        # expected distinct count when drawing 64 uniform values from M=11
        sim = [
            np.unique(rng.integers(M, size=64)).size for _ in range(2000)
        ]
        assert abs(np.mean(draws) - np.mean(sim)) < 3 * np.std(sim) / np.sqrt(len(draws)) + 3 * np.std(sim) / np.sqrt(len(sim))


class TestExtraction:
    def test_argmax(self):
        arch = ArchState(alpha=np.array([[0.1, 2.0, -1.0]]), theta=np.zeros((1, 3, 1)), seed=0)
        assert extract_discrete(arch) == (1,)

    def test_tie_breaks_low_index(self):
        arch = ArchState(alpha=np.array([[1.0, 1.0, 0.0]]), theta=np.zeros((1, 3, 1)), seed=0)
        assert extract_discrete(arch) == (0,)

    def test_saturated_run_extraction_matches_mode(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        config = GlobalSearchConfig(epochs=400, batch_size=8, seed=5)
        arch, _ = train_global(ctx, pool, 2, config, seed=11)
        samples = sample_batch(arch, 64)
        vals, counts = np.unique(samples, axis=0, return_counts=True)
        mode = tuple(vals[np.argmax(counts)])
        assert extract_discrete(arch) == mode


class TestRunGlobal:
    def test_l0_returns_hf(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        res = run_global(h4_bundle, pool, 0, GlobalSearchConfig(epochs=5, restarts=1))
        assert res.energy == pytest.approx(h4_bundle.hf_energy, abs=1e-10)
        assert res.structure == ()

    def test_reproducible(self, h2_bundle):
        pool = build_uccsd_pool(h2_bundle)
        config = GlobalSearchConfig(epochs=50, batch_size=8, restarts=2, seed=13)
        r1 = run_global(h2_bundle, pool, 2, config)
        r2 = run_global(h2_bundle, pool, 2, config)
        assert r1.energy == r2.energy
        assert r1.structure == r2.structure
        assert r1.theta == r2.theta
        assert r1.energy_trace == r2.energy_trace

    def test_finetune_not_worse_than_discrete(self, h4_bundle):
        from ansatzforge.search_global import finetune_structure
        from ansatzforge.numerics import QuasiNewtonConfig

        pool = build_uccsd_pool(h4_bundle)
        ctx = SimContext(h4_bundle)
        config = GlobalSearchConfig(epochs=150, batch_size=8, seed=3)
        arch, _ = train_global(ctx, pool, 3, config, seed=21)
        structure = extract_discrete(arch)
        theta0 = structure_theta(pool, structure, arch.theta)
        circ = Circuit(pool, structure)
        pre = ctx.energy(ctx.apply_circuit(circ, theta0))
        _, _, post = finetune_structure(ctx, pool, structure, theta0, QuasiNewtonConfig())
        assert post <= pre + 1e-12

    def test_variational_bound(self, h4_bundle):
        pool = build_uccsd_pool(h4_bundle)
        res = run_global(h4_bundle, pool, 4, GlobalSearchConfig(epochs=120, batch_size=8, restarts=2, seed=1))
        assert res.energy >= h4_bundle.fci_energy - 1e-9
