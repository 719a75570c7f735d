"""Operator pools: UCCSD and QEB generation with spin-pair grouping, the
MP2-based doubles restriction, and MP2 ordering.

Spatial excitations are enumerated from the active space (occupied spatial
orbitals ``0..no-1``, virtuals ``no..No-1``); each spatial excitation yields
an alpha/beta pair of spin-resolved operators collected into one selectable
group.  Doubles with (numerically) vanishing MP2 amplitude are dropped,
which reproduces the published pool sizes; the retention threshold is
configurable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .bundle import ActiveSpace, BundleError, MoleculeBundle
from .pauli import CostModel, DEFAULT_COST_MODEL, ExcitationOp, jw_excitation, qeb_excitation

__all__ = [
    "OperatorGroup",
    "OperatorPool",
    "build_uccsd_pool",
    "build_qeb_pool",
    "build_pool",
    "mp2_order",
    "spin_flip_tuple",
    "DOUBLES_AMPLITUDE_EPS",
]

DOUBLES_AMPLITUDE_EPS = 1e-10


@dataclass(frozen=True)
class OperatorGroup:
    """A spin-paired excitation (or one self-symmetric excitation)."""

    id: int
    members: tuple[ExcitationOp, ...]
    shared_parameter: bool
    mp2_weight: float
    cnot_cost_total: int

    @property
    def kind(self) -> str:
        return self.members[0].kind

    @property
    def n_params(self) -> int:
        return 1 if self.shared_parameter else len(self.members)


@dataclass(frozen=True)
class OperatorPool:
    groups: tuple[OperatorGroup, ...]
    flavor: str  # "uccsd" | "qeb"
    active_space: ActiveSpace

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def __getitem__(self, gid: int) -> OperatorGroup:
        return self.groups[gid]

    @property
    def n_qubits(self) -> int:
        return self.active_space.n_qubits

    @property
    def max_params_per_group(self) -> int:
        return max(g.n_params for g in self.groups)

    def operators(self):
        for g in self.groups:
            yield from g.members

    def mean_costs(self):
        """Pool-average CNOT cost per single and per double operator, exact."""
        from fractions import Fraction

        sums = {"single": [0, 0], "double": [0, 0]}
        for op in self.operators():
            sums[op.kind][0] += op.cnot_cost
            sums[op.kind][1] += 1
        return {
            kind: (Fraction(tot, cnt) if cnt else Fraction(0))
            for kind, (tot, cnt) in sums.items()
        }

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["group_id", "kind", "member_tuples", "qubit_spans", "cnot_cost_total", "mp2_weight"]
            )
            for g in self.groups:
                writer.writerow(
                    [
                        g.id,
                        g.kind,
                        ";".join("(" + ",".join(map(str, m.indices)) + ")" for m in g.members),
                        ";".join(str(m.qubit_span) for m in g.members),
                        g.cnot_cost_total,
                        repr(g.mp2_weight),
                    ]
                )


def spin_flip_tuple(indices: tuple[int, ...], n_spatial: int) -> tuple[int, ...]:
    """Global alpha<->beta flip of a spin-orbital index tuple."""
    return tuple(i + n_spatial if i < n_spatial else i - n_spatial for i in indices)


def _canonical_double(tup: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    """(p,q,r,s) and (q,p,s,r) denote the same operator; pick the smaller."""
    p, q, r, s = tup
    return min(tup, (q, p, s, r))


def _enumerate_candidates(space: ActiveSpace):
    """Yield (kind, member tuples) for every candidate spatial excitation group."""
    no, No = space.n_occupied, space.n_spatial_orbitals
    for i in range(no):
        for a in range(no, No):
            yield "single", ((a, i), (a + No, i + No))
    seen: set[frozenset] = set()
    for i in range(no):
        for j in range(no):
            for a in range(no, No):
                for b in range(no, No):
                    m1 = (a, b + No, j + No, i)
                    m2 = _canonical_double((b, a + No, i + No, j))
                    key = frozenset((m1, m2))
                    if key in seen:
                        continue
                    seen.add(key)
                    members = (m1,) if m1 == m2 else tuple(sorted((m1, m2)))
                    yield "double", members
    for i in range(no):
        for j in range(i + 1, no):
            for a in range(no, No):
                for b in range(a + 1, No):
                    yield "double", ((a, b, j, i), (a + No, b + No, j + No, i + No))


def build_pool(
    bundle: MoleculeBundle,
    flavor: str = "uccsd",
    model: CostModel = DEFAULT_COST_MODEL,
    amplitude_eps: float = DOUBLES_AMPLITUDE_EPS,
) -> OperatorPool:
    """Build the operator pool for a bundle.

    UCCSD: Jordan-Wigner generators, one shared parameter per group.
    QEB: Z-string-free generators, one parameter per member.
    """
    if flavor not in ("uccsd", "qeb"):
        raise ValueError(f"unknown pool flavor {flavor!r}")
    space = bundle.active_space
    nq = space.n_qubits
    make = jw_excitation if flavor == "uccsd" else qeb_excitation

    def amplitude(tup: tuple[int, ...]) -> float:
        try:
            return bundle.mp2_amplitudes[tup]
        except KeyError:
            raise BundleError(
                f"bundle lacks an MP2 amplitude for excitation {tup}"
            ) from None

    singles: list[tuple[tuple, ...]] = []
    doubles: list[tuple[tuple, ...]] = []
    weights: dict[tuple[tuple, ...], float] = {}
    for kind, members in _enumerate_candidates(space):
        weight = max(abs(amplitude(m)) for m in members)
        if kind == "double" and weight <= amplitude_eps:
            continue
        weights[members] = weight
        (singles if kind == "single" else doubles).append(members)

    groups = []
    for members in sorted(singles) + sorted(doubles):
        kind = "single" if len(members[0]) == 2 else "double"
        ops = tuple(make(m, kind, nq, model) for m in members)
        groups.append(
            OperatorGroup(
                id=len(groups),
                members=ops,
                shared_parameter=(flavor == "uccsd"),
                mp2_weight=weights[members],
                cnot_cost_total=sum(op.cnot_cost for op in ops),
            )
        )
    return OperatorPool(groups=tuple(groups), flavor=flavor, active_space=space)


def build_uccsd_pool(bundle: MoleculeBundle, **kwargs) -> OperatorPool:
    return build_pool(bundle, "uccsd", **kwargs)


def build_qeb_pool(bundle: MoleculeBundle, **kwargs) -> OperatorPool:
    return build_pool(bundle, "qeb", **kwargs)


def mp2_order(pool: OperatorPool) -> list[int]:
    """Group ids sorted by decreasing |MP2 weight|; ties by ascending id."""
    return sorted(range(len(pool)), key=lambda gid: (-pool[gid].mp2_weight, gid))
