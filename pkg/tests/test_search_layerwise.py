"""Layerwise growth: warm-start mechanics, freezing, commitment arithmetic,
monotonicity, and the reduction to global search."""

import numpy as np
import pytest

from ansatzforge import SimContext, build_uccsd_pool
from ansatzforge.search_global import GlobalSearchConfig, init_arch, sample_batch, train_global
from ansatzforge.search_layerwise import (
    LayerwiseConfig,
    LayerwiseState,
    commit_and_finetune,
    run_layerwise,
    search_window,
)


@pytest.fixture(scope="module")
def h4_pool(h4_bundle):
    return build_uccsd_pool(h4_bundle)


class TestSearchWindow:
    def test_empty_committed_equals_global(self, h4_bundle, h4_pool):
        """With nothing committed the window phase is exactly a global run."""
        ctx = SimContext(h4_bundle)
        config = LayerwiseConfig(window=3, slide=1, epochs=40, batch_size=8, seed=5)
        arch_w, traces_w = search_window(ctx, h4_pool, LayerwiseState(), config, seed=99)
        arch_g, traces_g = train_global(ctx, h4_pool, 3, config.as_global(99), seed=99)
        assert np.array_equal(arch_w.alpha, arch_g.alpha)
        assert np.array_equal(arch_w.theta, arch_g.theta)
        assert traces_w["energy"] == traces_g["energy"]

    def test_frozen_parameters_untouched(self, h4_bundle, h4_pool):
        ctx = SimContext(h4_bundle)
        theta_fixed = np.array([0.21, -0.07])
        state = LayerwiseState(committed=(8, 6), theta_fixed=theta_fixed.copy(), warm=(), energy=None)
        config = LayerwiseConfig(window=2, slide=1, epochs=30, batch_size=8, seed=3)
        search_window(ctx, h4_pool, state, config, seed=4)
        assert np.array_equal(state.theta_fixed, theta_fixed)

    def test_warm_layer_dominates_epoch0_sampling(self, h4_bundle, h4_pool):
        """Boost gamma=5 on the carried group: epoch-0 frequency > 0.9 (M=11)."""
        ctx = SimContext(h4_bundle)
        carried = 6
        state = LayerwiseState(
            committed=(8,),
            theta_fixed=np.array([0.1]),
            warm=((carried, np.array([0.05])),),
            energy=None,
        )
        config = LayerwiseConfig(window=3, slide=1, epochs=0, batch_size=8, seed=1, warm_boost=5.0)
        arch, _ = search_window(ctx, h4_pool, state, config, seed=123)
        arch.epoch = 0
        counts = 0
        n = 0
        for epoch in range(30):
            arch.epoch = epoch
            s = sample_batch(arch, 300)
            counts += int(np.sum(s[:, 0] == carried))
            n += 300
        assert counts / n > 0.9
        assert arch.theta[0, carried, 0] == 0.05

    def test_rejects_oversized_warm_buffer(self, h4_bundle, h4_pool):
        ctx = SimContext(h4_bundle)
        warm = tuple((g, np.zeros(1)) for g in (1, 2, 3))
        state = LayerwiseState(committed=(), theta_fixed=np.zeros(0), warm=warm)
        with pytest.raises(ValueError, match="warm buffer"):
            search_window(ctx, h4_pool, state, LayerwiseConfig(window=3, slide=1, epochs=1), seed=0)


class TestCommit:
    def test_buffer_arithmetic_s2_k4(self, h4_bundle, h4_pool):
        ctx = SimContext(h4_bundle)
        config = LayerwiseConfig(window=4, slide=2, epochs=25, batch_size=8, seed=7)
        state = LayerwiseState()
        for _ in range(2):
            arch, _ = search_window(ctx, h4_pool, state, config, seed=int(state.step) + 5)
            state = commit_and_finetune(ctx, h4_pool, state, arch, n_layers=8, config=config)
            assert len(state.warm) == 2
        assert len(state.committed) == 4

    def test_committed_energy_nonincreasing(self, h4_bundle, h4_pool):
        ctx = SimContext(h4_bundle)
        config = LayerwiseConfig(window=3, slide=1, epochs=30, batch_size=8, seed=2)
        state = LayerwiseState()
        energies = []
        for step in range(5):
            arch, _ = search_window(ctx, h4_pool, state, config, seed=step)
            state = commit_and_finetune(ctx, h4_pool, state, arch, n_layers=5, config=config)
            energies.append(state.energy)
        for a, b in zip(energies, energies[1:]):
            assert b <= a + 1e-9

    def test_prefix_append_only(self, h4_bundle, h4_pool):
        ctx = SimContext(h4_bundle)
        config = LayerwiseConfig(window=3, slide=2, epochs=25, batch_size=8, seed=4)
        state = LayerwiseState()
        prefixes = [()]
        while len(state.committed) < 6:
            arch, _ = search_window(ctx, h4_pool, state, config, seed=len(prefixes))
            state = commit_and_finetune(ctx, h4_pool, state, arch, n_layers=6, config=config)
            assert state.committed[: len(prefixes[-1])] == prefixes[-1]
            prefixes.append(state.committed)


class TestRunLayerwise:
    def test_final_length_and_clamp(self, h4_bundle, h4_pool):
        config = LayerwiseConfig(window=4, slide=3, epochs=20, batch_size=8, restarts_per_step=1, seed=6)
        res = run_layerwise(h4_bundle, h4_pool, 7, config)
        assert len(res.structure) == 7
        steps = res.tables["growth_steps"]
        assert [s["committed_size"] for s in steps] == [3, 6, 7]

    def test_single_window_plus_remainder(self, h4_bundle, h4_pool):
        """window = L with slide = L-1: one step commits L-1, the next the rest."""
        config = LayerwiseConfig(window=4, slide=3, epochs=15, batch_size=8, restarts_per_step=1, seed=1)
        res = run_layerwise(h4_bundle, h4_pool, 4, config)
        steps = res.tables["growth_steps"]
        assert [s["committed_size"] for s in steps] == [3, 4]

    def test_invalid_slide_rejected(self, h4_bundle, h4_pool):
        with pytest.raises(ValueError, match="slide"):
            run_layerwise(h4_bundle, h4_pool, 6, LayerwiseConfig(window=3, slide=3, epochs=5))

    def test_reproducible(self, h4_bundle, h4_pool):
        config = LayerwiseConfig(window=3, slide=2, epochs=25, batch_size=8, restarts_per_step=2, seed=12)
        r1 = run_layerwise(h4_bundle, h4_pool, 4, config)
        r2 = run_layerwise(h4_bundle, h4_pool, 4, config)
        assert r1.energy == r2.energy
        assert r1.structure == r2.structure
        assert r1.theta == r2.theta

    def test_energy_trace_monotone(self, h4_bundle, h4_pool):
        config = LayerwiseConfig(window=3, slide=2, epochs=30, batch_size=8, restarts_per_step=2, seed=3)
        res = run_layerwise(h4_bundle, h4_pool, 6, config)
        trace = list(res.energy_trace)
        for a, b in zip(trace, trace[1:]):
            assert b <= a + 1e-9
        assert res.energy == pytest.approx(trace[-1], abs=1e-10)
        assert res.energy >= h4_bundle.fci_energy - 1e-9
