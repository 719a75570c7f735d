"""Differentiable architecture search for compact VQE circuits over
UCCSD/QEB operator pools, with ADAPT-VQE and truncated-UCCSD baselines and
exact statevector simulation."""

from .bundle import ActiveSpace, BundleError, MoleculeBundle, hf_energy_check, load_bundle, write_bundle
from .pauli import (
    CostModel,
    DEFAULT_COST_MODEL,
    ExcitationOp,
    PauliString,
    PauliSum,
    cnot_cost,
    jw_excitation,
    load_cost_model,
    matricize,
    qeb_excitation,
)
from .pool import OperatorGroup, OperatorPool, build_pool, build_qeb_pool, build_uccsd_pool, mp2_order
from .sim import Circuit, SimContext, hf_state
from .numerics import AdamState, QuasiNewtonConfig, adam_step, quasi_newton_minimize
from .baselines import adapt_vqe, fci_ground, fci_ground_of_bundle, truncated_uccsd
from .search_global import GlobalSearchConfig, run_global
from .search_layerwise import LayerwiseConfig, run_layerwise
from .analysis import composition, cnot_total, delta_cnot_decomposition
from .results import SearchResult, write_result_json
from .estimators import AdaptVQE, GlobalSearch, LayerwiseSearch, TruncatedUCCSD

__version__ = "0.1.0"

__all__ = [
    "ActiveSpace",
    "AdamState",
    "AdaptVQE",
    "BundleError",
    "Circuit",
    "CostModel",
    "DEFAULT_COST_MODEL",
    "ExcitationOp",
    "GlobalSearch",
    "GlobalSearchConfig",
    "LayerwiseConfig",
    "LayerwiseSearch",
    "MoleculeBundle",
    "OperatorGroup",
    "OperatorPool",
    "PauliString",
    "PauliSum",
    "QuasiNewtonConfig",
    "SearchResult",
    "SimContext",
    "TruncatedUCCSD",
    "adam_step",
    "adapt_vqe",
    "build_pool",
    "build_qeb_pool",
    "build_uccsd_pool",
    "cnot_cost",
    "cnot_total",
    "composition",
    "delta_cnot_decomposition",
    "fci_ground",
    "fci_ground_of_bundle",
    "hf_energy_check",
    "hf_state",
    "jw_excitation",
    "load_bundle",
    "load_cost_model",
    "matricize",
    "mp2_order",
    "qeb_excitation",
    "quasi_newton_minimize",
    "run_global",
    "run_layerwise",
    "truncated_uccsd",
    "write_bundle",
    "write_result_json",
]
