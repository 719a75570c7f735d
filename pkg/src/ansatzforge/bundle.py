"""Molecule-bundle file format: the contract between the search engine and
electronic-structure exporters.

A bundle is a JSON document (schema_version 1) carrying the qubit
Hamiltonian as ``[coefficient, word]`` pairs, the Hartree-Fock reference
determinant, MP2 amplitudes keyed by excitation tuple, and reference
energies.  Spin-orbital convention: alpha orbitals occupy indices
``0..N_o-1`` and beta orbitals ``N_o..2N_o-1``; character ``j`` of the
``hf_occupation`` bitstring is the occupation of spin-orbital ``j``.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .pauli import PauliSum, diagonal_expectation

__all__ = [
    "ActiveSpace",
    "MoleculeBundle",
    "BundleError",
    "load_bundle",
    "write_bundle",
    "hf_energy_check",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1

_SCHEMA_FIELDS = {
    "schema_version",
    "name",
    "geometry_label",
    "n_electrons",
    "n_spatial_orbitals",
    "hamiltonian",
    "hf_occupation",
    "hf_energy",
    "mp2_amplitudes",
    "fci_energy",
}

HF_ENERGY_TOL = 1e-8
COEFF_DROP_TOL = 1e-12


class BundleError(ValueError):
    """Malformed or inconsistent bundle file."""


@dataclass(frozen=True)
class ActiveSpace:
    n_electrons: int
    n_spatial_orbitals: int

    def __post_init__(self):
        ne, no = self.n_electrons, self.n_spatial_orbitals
        if no <= 0:
            raise BundleError(f"need at least one spatial orbital, got {no}")
        if ne % 2 != 0 or not (0 < ne <= 2 * no):
            raise BundleError(f"electron count {ne} invalid for {no} spatial orbitals")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial_orbitals

    @property
    def n_occupied(self) -> int:
        """Doubly occupied spatial orbitals in the reference determinant."""
        return self.n_electrons // 2

    @property
    def n_virtual(self) -> int:
        return self.n_spatial_orbitals - self.n_occupied

    def label(self) -> str:
        return f"({self.n_electrons}e,{self.n_spatial_orbitals}o)"


def parse_amplitude_key(key: str) -> tuple[int, ...]:
    key = key.strip()
    if not (key.startswith("(") and key.endswith(")")):
        raise BundleError(f"bad amplitude key {key!r}")
    try:
        tup = tuple(int(t) for t in key[1:-1].split(","))
    except ValueError as exc:
        raise BundleError(f"bad amplitude key {key!r}") from exc
    if len(tup) not in (2, 4):
        raise BundleError(f"amplitude key {key!r} must have 2 or 4 indices")
    return tup


def format_amplitude_key(indices: tuple[int, ...]) -> str:
    return "(" + ",".join(str(i) for i in indices) + ")"


@dataclass(frozen=True)
class MoleculeBundle:
    """Immutable per-geometry problem instance."""

    name: str
    geometry_label: str
    active_space: ActiveSpace
    hamiltonian: PauliSum
    hf_occupation: str
    hf_energy: float
    mp2_amplitudes: dict[tuple[int, ...], float] = field(repr=False)
    fci_energy: float | None = None
    schema_version: int = SCHEMA_VERSION

    @property
    def n_qubits(self) -> int:
        return self.active_space.n_qubits

    @property
    def hf_bits(self) -> int:
        """Occupation bitstring as a basis-state index (bit j = orbital j)."""
        return sum(1 << j for j, c in enumerate(self.hf_occupation) if c == "1")

    def validate(self) -> None:
        nq = self.n_qubits
        if self.schema_version != SCHEMA_VERSION:
            raise BundleError(f"unknown schema_version {self.schema_version}")
        if len(self.hf_occupation) != nq or set(self.hf_occupation) - {"0", "1"}:
            raise BundleError(f"hf_occupation must be a {nq}-character bitstring")
        if self.hf_occupation.count("1") != self.active_space.n_electrons:
            raise BundleError(
                f"occupation has {self.hf_occupation.count('1')} electrons, "
                f"expected {self.active_space.n_electrons}"
            )
        if self.hamiltonian.max_qubit() >= nq:
            raise BundleError("Hamiltonian acts outside the qubit register")
        if not self.hamiltonian.is_hermitian(tol=COEFF_DROP_TOL):
            raise BundleError("Hamiltonian is not Hermitian (complex coefficients)")
        if self.fci_energy is not None and self.fci_energy > self.hf_energy + 1e-9:
            raise BundleError(
                f"fci_energy {self.fci_energy} above hf_energy {self.hf_energy}"
            )
        for tup in self.mp2_amplitudes:
            if min(tup) < 0 or max(tup) >= nq:
                raise BundleError(f"amplitude key {tup} out of range")


def _canonical_hamiltonian(pairs) -> PauliSum:
    try:
        ham = PauliSum.from_terms((float(c), w) for c, w in pairs)
    except (TypeError, ValueError) as exc:
        raise BundleError(f"malformed hamiltonian term list: {exc}") from exc
    # bundle-level canonicalization drops numerically dead terms
    kept = PauliSum()
    for term in ham:
        if abs(term.coeff) >= COEFF_DROP_TOL:
            kept._add_term(term.x, term.z, term.coeff)
    return kept


def load_bundle(path: str | Path) -> MoleculeBundle:
    """Load and validate a molecule bundle file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleError(f"cannot parse bundle {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise BundleError(f"bundle {path} is not a JSON object")
    missing = _SCHEMA_FIELDS - set(data)
    unknown = set(data) - _SCHEMA_FIELDS
    if missing or unknown:
        raise BundleError(
            f"bundle {path}: missing fields {sorted(missing)}, unknown fields {sorted(unknown)}"
        )
    if data["schema_version"] != SCHEMA_VERSION:
        raise BundleError(f"unknown schema_version {data['schema_version']!r}")
    space = ActiveSpace(int(data["n_electrons"]), int(data["n_spatial_orbitals"]))
    amplitudes = {
        parse_amplitude_key(k): float(v) for k, v in data["mp2_amplitudes"].items()
    }
    bundle = MoleculeBundle(
        name=str(data["name"]),
        geometry_label=str(data["geometry_label"]),
        active_space=space,
        hamiltonian=_canonical_hamiltonian(data["hamiltonian"]),
        hf_occupation=str(data["hf_occupation"]),
        hf_energy=float(data["hf_energy"]),
        mp2_amplitudes=amplitudes,
        fci_energy=None if data["fci_energy"] is None else float(data["fci_energy"]),
    )
    bundle.validate()
    return bundle


def write_bundle(bundle: MoleculeBundle, path: str | Path) -> None:
    """Write a bundle in canonical form (atomic: temp file + rename)."""
    bundle.validate()
    doc = {
        "schema_version": bundle.schema_version,
        "name": bundle.name,
        "geometry_label": bundle.geometry_label,
        "n_electrons": bundle.active_space.n_electrons,
        "n_spatial_orbitals": bundle.active_space.n_spatial_orbitals,
        "hamiltonian": [
            [c.real, w] for c, w in bundle.hamiltonian.to_terms() if abs(c) >= COEFF_DROP_TOL
        ],
        "hf_occupation": bundle.hf_occupation,
        "hf_energy": bundle.hf_energy,
        "mp2_amplitudes": {
            format_amplitude_key(k): v for k, v in sorted(bundle.mp2_amplitudes.items())
        },
        "fci_energy": bundle.fci_energy,
    }
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def hf_energy_check(bundle: MoleculeBundle) -> float:
    """Recompute <HF|H|HF> from the Pauli sum and stored determinant.

    Raises BundleError if it disagrees with the stored hf_energy beyond
    1e-8 Ha (a corrupted-bundle signal).
    """
    energy = diagonal_expectation(bundle.hamiltonian, bundle.hf_bits)
    if abs(energy - bundle.hf_energy) > HF_ENERGY_TOL:
        raise BundleError(
            f"<HF|H|HF> = {energy!r} disagrees with stored hf_energy "
            f"{bundle.hf_energy!r} beyond {HF_ENERGY_TOL}"
        )
    return energy
