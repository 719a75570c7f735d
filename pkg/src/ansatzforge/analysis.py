"""Post-search accounting: circuit composition at the individual-operator
level, CNOT totals, the additive two-part decomposition of CNOT differences,
and sweep table assembly (potential-energy curves, operator scaling).

The decomposition splits a CNOT difference between two circuits into an
operator-count part (what the composition change would cost at pool-average
prices) and an operator-complexity residual (qubit-span effects).  Pool
averages are kept as exact rationals so the two parts add up to the total
identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .pauli import CostModel, cnot_cost
from .pool import OperatorPool
from .results import write_table_csv

__all__ = [
    "Composition",
    "composition",
    "cnot_total",
    "delta_cnot_decomposition",
    "pec_rows",
    "scaling_rows",
    "CHEMICAL_ACCURACY_MHA",
]

CHEMICAL_ACCURACY_MHA = 1.6


@dataclass(frozen=True)
class Composition:
    n_singles: int
    n_doubles: int
    spans: tuple[int, ...]

    @property
    def n_operators(self) -> int:
        return self.n_singles + self.n_doubles


def composition(structure, pool: OperatorPool) -> Composition:
    """Operator-level composition of a circuit (groups decomposed into members)."""
    n_s = n_d = 0
    spans = []
    for gid in structure:
        for op in pool[gid].members:
            if op.kind == "single":
                n_s += 1
            else:
                n_d += 1
            spans.append(op.qubit_span)
    return Composition(n_singles=n_s, n_doubles=n_d, spans=tuple(spans))


def cnot_total(structure, pool: OperatorPool, model: CostModel | None = None) -> int:
    total = 0
    for gid in structure:
        for op in pool[gid].members:
            total += op.cnot_cost if model is None else cnot_cost(op, model)
    return total


def _pool_mean_costs(pool: OperatorPool, model: CostModel | None) -> dict[str, Fraction]:
    if model is None:
        return pool.mean_costs()
    sums = {"single": [0, 0], "double": [0, 0]}
    for op in pool.operators():
        sums[op.kind][0] += cnot_cost(op, model)
        sums[op.kind][1] += 1
    return {k: (Fraction(t, c) if c else Fraction(0)) for k, (t, c) in sums.items()}


def delta_cnot_decomposition(
    structure_a,
    structure_b,
    pool: OperatorPool,
    model: CostModel | None = None,
) -> tuple[int, Fraction, Fraction]:
    """(delta_total, delta_count, delta_complexity) between two circuits.

    delta_total = cnots(B) - cnots(A); delta_count prices the composition
    change at pool-average per-operator costs; delta_complexity is the exact
    remainder.  delta_count + delta_complexity == delta_total identically.
    """
    comp_a = composition(structure_a, pool)
    comp_b = composition(structure_b, pool)
    means = _pool_mean_costs(pool, model)
    delta_total = cnot_total(structure_b, pool, model) - cnot_total(structure_a, pool, model)
    delta_count = means["single"] * (comp_b.n_singles - comp_a.n_singles) + means["double"] * (
        comp_b.n_doubles - comp_a.n_doubles
    )
    delta_complexity = Fraction(delta_total) - delta_count
    return delta_total, delta_count, delta_complexity


def pec_rows(results) -> list[dict]:
    """Potential-energy-curve table rows from a list of SearchResults."""
    rows = []
    for res in results:
        comp = res.tables.get("composition")
        err = res.error_mha
        rows.append(
            {
                "geometry": res.geometry_label,
                "method": res.method,
                "L": len(res.structure),
                "energy_ha": res.energy,
                "fci_ha": res.fci_energy,
                "error_mha": err,
                "chemical_accuracy": "" if err is None else int(abs(err) < CHEMICAL_ACCURACY_MHA),
                "cnot": res.cnot_total,
                "n_singles": comp[0]["n_singles"] if comp else "",
                "n_doubles": comp[0]["n_doubles"] if comp else "",
            }
        )
    return rows


def scaling_rows(results) -> list[dict]:
    """Operator-scaling table (one geometry, varying L) from SearchResults."""
    rows = []
    for res in results:
        rows.append(
            {
                "L": len(res.structure),
                "method": res.method,
                "energy_ha": res.energy,
                "error_mha": res.error_mha,
                "cnot": res.cnot_total,
            }
        )
    return rows


def write_delta_csv(rows: list[dict], path: str | Path) -> None:
    write_table_csv(rows, path)
