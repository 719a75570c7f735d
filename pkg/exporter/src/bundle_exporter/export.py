"""Molecule-bundle export: geometry builders, active spaces, bundle assembly.

Emits schema_version=1 bundle JSON files consumed by the search engine.
Active spaces follow the benchmark set: hydrogen chains, LiH and H2O use
the full STO-3G orbital space; BeH2 freezes the core orbital (and, for the
5-orbital space, drops the highest virtual).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import ANGSTROM_TO_BOHR, NUCLEAR_CHARGE
from .qubit import ground_state_energy, jordan_wigner_hamiltonian
from .scf import SCFError, mp2_amplitudes, reduce_to_active, run_rhf

H2O_ANGLE_DEG = 104.52


class ExportError(RuntimeError):
    pass


@dataclass(frozen=True)
class SystemSpec:
    name: str
    n_active_electrons: int
    n_active_orbitals: int

    def geometry(self, d: float) -> list[tuple[str, np.ndarray]]:
        b = ANGSTROM_TO_BOHR
        if self.name in ("h2", "h4", "h6"):
            n = int(self.name[1])
            return [("H", np.array([0.0, 0.0, k * d * b])) for k in range(n)]
        if self.name == "lih":
            return [("Li", np.zeros(3)), ("H", np.array([0.0, 0.0, d * b]))]
        if self.name.startswith("beh2"):
            return [
                ("Be", np.zeros(3)),
                ("H", np.array([0.0, 0.0, d * b])),
                ("H", np.array([0.0, 0.0, -d * b])),
            ]
        if self.name == "h2o":
            theta = np.deg2rad(H2O_ANGLE_DEG) / 2.0
            return [
                ("O", np.zeros(3)),
                ("H", np.array([d * np.sin(theta), 0.0, d * np.cos(theta)]) * b),
                ("H", np.array([-d * np.sin(theta), 0.0, d * np.cos(theta)]) * b),
            ]
        raise ExportError(f"unknown system {self.name!r}")

    def geometry_label(self, d: float) -> str:
        label = f"d={d:.2f}A"
        if self.name == "h2o":
            label += f",angle={H2O_ANGLE_DEG}deg"
        if self.name in ("h4", "h6"):
            label += ",linear-chain"
        return label

    def active_orbitals(self, n_orbitals_total: int, n_electrons_total: int) -> list[int]:
        n_frozen_occ = (n_electrons_total - self.n_active_electrons) // 2
        return list(range(n_frozen_occ, n_frozen_occ + self.n_active_orbitals))


SYSTEMS = {
    "h2": SystemSpec("h2", 2, 2),
    "h4": SystemSpec("h4", 4, 4),
    "lih": SystemSpec("lih", 4, 6),
    "beh2_5o": SystemSpec("beh2_5o", 4, 5),
    "beh2_6o": SystemSpec("beh2_6o", 4, 6),
    "h6": SystemSpec("h6", 6, 6),
    "h2o": SystemSpec("h2o", 10, 7),
}

# Table-1 benchmark set: one geometry grid per system/space combination.
SUITE_GRIDS = {
    "h4": [0.60, 0.80, 1.00, 1.20, 1.50],
    "beh2_5o": [1.00, 1.30, 1.60],
    "lih": [1.00, 1.50, 2.20],
    "beh2_6o": [1.00, 1.30, 1.60],
    "h6": [0.50, 0.70, 0.90],
    "h2o": [0.80, 1.00, 1.50],
}


def _diagonal_energy(terms: dict[str, float], occupied: set[int]) -> float:
    val = 0.0
    for word, coeff in terms.items():
        tokens = word.split()
        if any(tok[0] != "Z" for tok in tokens):
            continue
        sign = 1.0
        for tok in tokens:
            if int(tok[1:]) in occupied:
                sign = -sign
        val += sign * coeff
    return val


def build_bundle(system: str, d: float, compute_fci: bool = True) -> dict:
    """Run the electronic-structure pipeline and assemble a bundle document."""
    spec = SYSTEMS[system]
    atoms = spec.geometry(d)
    charges = [NUCLEAR_CHARGE[sym] for sym, _ in atoms]
    rhf = run_rhf(atoms, charges)
    n_orb_total = rhf.mo_coeff.shape[1]
    active = spec.active_orbitals(n_orb_total, rhf.n_electrons)
    if max(active) >= n_orb_total:
        raise ExportError(
            f"active space needs orbital {max(active)} but basis has {n_orb_total}"
        )
    act = reduce_to_active(rhf, spec.n_active_electrons, active)
    t2 = mp2_amplitudes(act)

    no = spec.n_active_electrons // 2
    n_spatial = spec.n_active_orbitals
    nv = n_spatial - no
    n_qubits = 2 * n_spatial

    terms = jordan_wigner_hamiltonian(act)

    occupied = set(range(no)) | set(range(n_spatial, n_spatial + no))
    e_hf_from_terms = _diagonal_energy(terms, occupied)
    if abs(e_hf_from_terms - rhf.energy) > 1e-8:
        raise ExportError(
            f"HF self-check failed: qubit {e_hf_from_terms!r} vs SCF {rhf.energy!r}"
        )

    amplitudes: dict[str, float] = {}

    def put(tup: tuple[int, ...], value: float) -> None:
        amplitudes["(" + ",".join(map(str, tup)) + ")"] = float(value)

    for i in range(no):
        for a in range(no, n_spatial):
            put((a, i), 0.0)
            put((a + n_spatial, i + n_spatial), 0.0)
    for i in range(no):
        for j in range(no):
            for a in range(no, n_spatial):
                for b in range(no, n_spatial):
                    put((a, b + n_spatial, j + n_spatial, i), t2[i, j, a - no, b - no])
    for i in range(no):
        for j in range(i + 1, no):
            for a in range(no, n_spatial):
                for b in range(a + 1, n_spatial):
                    anti = t2[i, j, a - no, b - no] - t2[i, j, b - no, a - no]
                    put((a, b, j, i), anti)
                    put((a + n_spatial, b + n_spatial, j + n_spatial, i + n_spatial), anti)

    hf_bits = "1" * no + "0" * nv + "1" * no + "0" * nv
    hf_index = sum(1 << k for k, c in enumerate(hf_bits) if c == "1")
    fci = ground_state_energy(terms, n_qubits, hf_index) if compute_fci else None

    return {
        "schema_version": 1,
        "name": system,
        "geometry_label": spec.geometry_label(d),
        "n_electrons": spec.n_active_electrons,
        "n_spatial_orbitals": n_spatial,
        "hamiltonian": [[coeff, word] for word, coeff in sorted(terms.items())],
        "hf_occupation": hf_bits,
        "hf_energy": rhf.energy,
        "mp2_amplitudes": amplitudes,
        "fci_energy": fci,
    }


def write_bundle_file(doc: dict, path: Path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(payload.encode()).hexdigest()


def export_bundle(system: str, d: float, out_dir: Path, compute_fci: bool = True) -> Path:
    doc = build_bundle(system, d, compute_fci=compute_fci)
    path = Path(out_dir) / f"{system}_{d:.2f}.json"
    write_bundle_file(doc, path)
    return path


def export_suite(out_dir: Path, grids: dict[str, list[float]] | None = None) -> dict:
    """Emit the benchmark fixture set; per-geometry failures are logged and skipped."""
    out_dir = Path(out_dir)
    grids = grids or SUITE_GRIDS
    manifest = {"systems": sorted(grids), "bundles": [], "failures": []}
    for system in sorted(grids):
        for d in grids[system]:
            try:
                doc = build_bundle(system, d)
                path = out_dir / f"{system}_{d:.2f}.json"
                digest = write_bundle_file(doc, path)
                manifest["bundles"].append(
                    {
                        "path": path.name,
                        "name": system,
                        "geometry_label": doc["geometry_label"],
                        "n_qubits": 2 * doc["n_spatial_orbitals"],
                        "hf_energy": doc["hf_energy"],
                        "fci_energy": doc["fci_energy"],
                        "sha256": digest,
                    }
                )
            except (SCFError, ExportError, ValueError) as exc:
                manifest["failures"].append({"system": system, "d": d, "error": str(exc)})
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return manifest
