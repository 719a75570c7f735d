"""Scikit-learn-style estimator front ends for the search strategies.

Each estimator takes its hyperparameters in the constructor (so
``get_params`` yields the full effective configuration recorded in result
files), runs on a loaded molecule bundle via ``fit``, and exposes the
outcome through trailing-underscore attributes::

    search = GlobalSearch(layers=6, restarts=8, seed=7).fit(bundle)
    search.energy_, search.structure_, search.result_

``fit`` accepts an optional prebuilt pool; otherwise one is generated from
the bundle according to ``pool_flavor``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .baselines import adapt_vqe, truncated_uccsd
from .bundle import MoleculeBundle
from .pauli import CostModel, DEFAULT_COST_MODEL, load_cost_model
from .pool import DOUBLES_AMPLITUDE_EPS, OperatorPool, build_pool
from .results import SearchResult
from .search_global import GlobalSearchConfig, run_global
from .search_layerwise import LayerwiseConfig, run_layerwise

__all__ = ["AnsatzSearch", "GlobalSearch", "LayerwiseSearch", "AdaptVQE", "TruncatedUCCSD"]


def _resolve_cost_model(cost_model) -> CostModel:
    if cost_model is None:
        return DEFAULT_COST_MODEL
    if isinstance(cost_model, CostModel):
        return cost_model
    return load_cost_model(cost_model)


class AnsatzSearch(BaseEstimator):
    """Common fit plumbing: bundle validation, pool construction, bookkeeping."""

    def _validate_bundle(self, bundle) -> MoleculeBundle:
        if not isinstance(bundle, MoleculeBundle):
            raise TypeError(f"fit expects a MoleculeBundle, got {type(bundle).__name__}")
        bundle.validate()
        return bundle

    def fit(self, bundle: MoleculeBundle, pool: OperatorPool | None = None):
        bundle = self._validate_bundle(bundle)
        if pool is None:
            pool = build_pool(
                bundle,
                flavor=getattr(self, "pool_flavor", "uccsd"),
                model=_resolve_cost_model(getattr(self, "cost_model", None)),
                amplitude_eps=getattr(self, "amplitude_eps", DOUBLES_AMPLITUDE_EPS),
            )
        result = self._run(bundle, pool)
        result.config.update({"method": result.method, **_jsonable(self.get_params())})
        self.pool_ = pool
        self.result_ = result
        self.structure_ = result.structure
        self.theta_ = np.asarray(result.theta)
        self.energy_ = result.energy
        self.cnot_total_ = result.cnot_total
        self.error_mha_ = result.error_mha
        return self

    def _run(self, bundle: MoleculeBundle, pool: OperatorPool) -> SearchResult:
        raise NotImplementedError


def _jsonable(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if isinstance(val, CostModel):
            out[key] = dict(vars(val))
        elif isinstance(val, tuple):
            out[key] = list(val)
        else:
            out[key] = val
    return out


class GlobalSearch(AnsatzSearch):
    """Joint stochastic optimization of all layer selections at once."""

    def __init__(
        self,
        layers: int = 6,
        pool_flavor: str = "uccsd",
        epochs: int = 2000,
        batch_size: int = 16,
        restarts: int = 4,
        alpha_lr: float = 0.1,
        theta_lr: float = 0.05,
        sigma: float = 0.01,
        seed: int = 0,
        amplitude_eps: float = DOUBLES_AMPLITUDE_EPS,
        cost_model=None,
        workers: int | None = None,
    ):
        self.layers = layers
        self.pool_flavor = pool_flavor
        self.epochs = epochs
        self.batch_size = batch_size
        self.restarts = restarts
        self.alpha_lr = alpha_lr
        self.theta_lr = theta_lr
        self.sigma = sigma
        self.seed = seed
        self.amplitude_eps = amplitude_eps
        self.cost_model = cost_model
        self.workers = workers

    def _run(self, bundle, pool):
        config = GlobalSearchConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            restarts=self.restarts,
            alpha_lr=self.alpha_lr,
            theta_lr=self.theta_lr,
            sigma=self.sigma,
            seed=self.seed,
            workers=self.workers,
        )
        return run_global(bundle, pool, self.layers, config)


class LayerwiseSearch(AnsatzSearch):
    """Incremental growth with a sliding soft window and frozen prefix."""

    def __init__(
        self,
        layers: int = 8,
        window: int = 4,
        slide: int = 2,
        pool_flavor: str = "uccsd",
        epochs: int = 500,
        batch_size: int = 16,
        restarts_per_step: int = 3,
        alpha_lr: float = 0.1,
        theta_lr: float = 0.05,
        sigma: float = 0.01,
        warm_boost: float = 5.0,
        revisit_penalty: float = 4.0,
        seed: int = 0,
        amplitude_eps: float = DOUBLES_AMPLITUDE_EPS,
        cost_model=None,
        workers: int | None = None,
    ):
        self.layers = layers
        self.window = window
        self.slide = slide
        self.pool_flavor = pool_flavor
        self.epochs = epochs
        self.batch_size = batch_size
        self.restarts_per_step = restarts_per_step
        self.alpha_lr = alpha_lr
        self.theta_lr = theta_lr
        self.sigma = sigma
        self.warm_boost = warm_boost
        self.revisit_penalty = revisit_penalty
        self.seed = seed
        self.amplitude_eps = amplitude_eps
        self.cost_model = cost_model
        self.workers = workers

    def _run(self, bundle, pool):
        config = LayerwiseConfig(
            window=self.window,
            slide=self.slide,
            epochs=self.epochs,
            batch_size=self.batch_size,
            restarts_per_step=self.restarts_per_step,
            alpha_lr=self.alpha_lr,
            theta_lr=self.theta_lr,
            sigma=self.sigma,
            warm_boost=self.warm_boost,
            revisit_penalty=self.revisit_penalty,
            seed=self.seed,
            workers=self.workers,
        )
        return run_layerwise(bundle, pool, self.layers, config)


class AdaptVQE(AnsatzSearch):
    """Greedy gradient-guided growth (reference method)."""

    def __init__(
        self,
        max_groups: int = 8,
        pool_flavor: str = "uccsd",
        grad_threshold: float = 1e-6,
        amplitude_eps: float = DOUBLES_AMPLITUDE_EPS,
        cost_model=None,
    ):
        self.max_groups = max_groups
        self.pool_flavor = pool_flavor
        self.grad_threshold = grad_threshold
        self.amplitude_eps = amplitude_eps
        self.cost_model = cost_model

    def _run(self, bundle, pool):
        return adapt_vqe(bundle, pool, self.max_groups, self.grad_threshold)


class TruncatedUCCSD(AnsatzSearch):
    """MP2-ordered fixed-selection baseline."""

    def __init__(
        self,
        k_groups: int = 8,
        pool_flavor: str = "uccsd",
        amplitude_eps: float = DOUBLES_AMPLITUDE_EPS,
        cost_model=None,
    ):
        self.k_groups = k_groups
        self.pool_flavor = pool_flavor
        self.amplitude_eps = amplitude_eps
        self.cost_model = cost_model

    def _run(self, bundle, pool):
        return truncated_uccsd(bundle, pool, self.k_groups)
