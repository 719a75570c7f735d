"""Search results and their on-disk formats (JSON result files, CSV traces).

Result JSON embeds the full effective configuration and never contains
wall-clock data, so identical runs produce byte-identical files; writes are
atomic (temp file + rename).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

__all__ = ["SearchResult", "write_result_json", "write_trace_csv", "write_table_csv"]


@dataclass
class SearchResult:
    method: str
    bundle_name: str
    geometry_label: str
    pool_flavor: str
    structure: tuple[int, ...]
    theta: tuple[float, ...]
    energy: float
    hf_energy: float
    fci_energy: float | None
    cnot_total: int
    restarts_used: int
    config: dict[str, Any]
    energy_trace: tuple[float, ...] = ()
    diversity_trace: tuple[int, ...] = ()
    max_prob_trace: dict[int, tuple[float, ...]] = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)

    @property
    def error_mha(self) -> float | None:
        if self.fci_energy is None:
            return None
        return (self.energy - self.fci_energy) * 1000.0

    def summary(self) -> str:
        err = self.error_mha
        err_s = f"{err:.4f} mHa" if err is not None else "n/a"
        return (
            f"{self.method} {self.bundle_name}[{self.geometry_label}] "
            f"L={len(self.structure)} energy={self.energy:.8f} Ha "
            f"error_vs_fci={err_s} cnots={self.cnot_total}"
        )

    def to_json_dict(self) -> dict:
        doc = asdict(self)
        doc["structure"] = list(self.structure)
        doc["theta"] = list(self.theta)
        doc["energy_trace"] = list(self.energy_trace)
        doc["diversity_trace"] = list(self.diversity_trace)
        doc["max_prob_trace"] = {str(k): list(v) for k, v in self.max_prob_trace.items()}
        doc["error_mha"] = self.error_mha
        return doc


def _atomic_write(path: Path, payload: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_result_json(result: SearchResult, path: str | Path) -> None:
    _atomic_write(Path(path), json.dumps(result.to_json_dict(), indent=1, sort_keys=True) + "\n")


def write_trace_csv(result: SearchResult, path: str | Path) -> None:
    """Per-epoch mean energy and sampling diversity, plus checkpoint rows."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["epoch", "mean_energy", "distinct_groups"])
    for epoch, energy in enumerate(result.energy_trace):
        diversity = result.diversity_trace[epoch] if epoch < len(result.diversity_trace) else ""
        writer.writerow([epoch, repr(energy), diversity])
    writer.writerow([])
    writer.writerow(["checkpoint_epoch", "layer", "max_probability"])
    for epoch in sorted(result.max_prob_trace):
        for layer, prob in enumerate(result.max_prob_trace[epoch]):
            writer.writerow([epoch, layer, repr(prob)])
    _atomic_write(Path(path), buf.getvalue())


def write_table_csv(rows: list[dict], path: str | Path) -> None:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    _atomic_write(Path(path), buf.getvalue())
