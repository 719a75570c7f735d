"""CLI surface: subcommands, determinism of result files, exit codes."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import fixture_path

PKG_ROOT = Path(__file__).resolve().parent.parent


def run_cli(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "ansatzforge.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


class TestFci:
    def test_deterministic_bytes(self, tmp_path):
        bundle = fixture_path("h2_0.74.json")
        for sub in ("a", "b"):
            res = run_cli("fci", "--bundle", str(bundle), "--out-dir", str(tmp_path / sub), cwd=PKG_ROOT)
            assert res.returncode == 0, res.stderr
        f1 = (tmp_path / "a" / "fci_h2_0.74.json").read_bytes()
        f2 = (tmp_path / "b" / "fci_h2_0.74.json").read_bytes()
        assert f1 == f2

    def test_summary_line(self, tmp_path):
        bundle = fixture_path("h2_0.74.json")
        res = run_cli("fci", "--bundle", str(bundle), "--out-dir", str(tmp_path), cwd=PKG_ROOT)
        assert "fci h2" in res.stdout
        assert "energy=" in res.stdout


class TestPool:
    def test_lih_reports_25_groups(self, tmp_path):
        bundle = fixture_path("lih_1.50.json")
        res = run_cli("pool", "--bundle", str(bundle), "--out-dir", str(tmp_path), cwd=PKG_ROOT)
        assert res.returncode == 0, res.stderr
        assert "25 groups" in res.stdout

    def test_csv_has_schema_columns(self, tmp_path):
        bundle = fixture_path("h4_0.80.json")
        run_cli("pool", "--bundle", str(bundle), "--out-dir", str(tmp_path), cwd=PKG_ROOT)
        header = (tmp_path / "pool_h4_0.80_uccsd.csv").read_text().splitlines()[0]
        assert header == "group_id,kind,member_tuples,qubit_spans,cnot_cost_total,mp2_weight"


class TestSearchCommands:
    def test_global_deterministic_result_json(self, tmp_path):
        bundle = fixture_path("h2_0.74.json")
        outs = []
        for sub in ("a", "b"):
            res = run_cli(
                "global", "--bundle", str(bundle), "-L", "2", "--epochs", "40",
                "--batch", "8", "--restarts", "2", "--seed", "7",
                "--out-dir", str(tmp_path / sub), cwd=PKG_ROOT,
            )
            assert res.returncode == 0, res.stderr
            outs.append((tmp_path / sub / "global_h2_0.74_L2_seed7.json").read_bytes())
        assert outs[0] == outs[1]

    def test_adapt_writes_steps_table(self, tmp_path):
        bundle = fixture_path("h4_0.80.json")
        res = run_cli(
            "adapt", "--bundle", str(bundle), "-L", "3", "--out-dir", str(tmp_path), cwd=PKG_ROOT
        )
        assert res.returncode == 0, res.stderr
        steps = (tmp_path / "adapt_h4_0.80_L3_seed0_adapt_steps.csv").read_text().splitlines()
        assert steps[0].startswith("step,group_id,abs_gradient,energy")
        assert len(steps) == 4

    def test_result_embeds_full_config(self, tmp_path):
        bundle = fixture_path("h2_0.74.json")
        run_cli(
            "truncated", "--bundle", str(bundle), "-L", "2", "--out-dir", str(tmp_path), cwd=PKG_ROOT
        )
        doc = json.loads((tmp_path / "truncated_h2_0.74_L2_seed0.json").read_text())
        assert doc["config"]["method"] == "truncated"
        assert doc["config"]["k_groups"] == 2
        assert doc["config"]["pool_flavor"] == "uccsd"
        assert "error_mha" in doc


class TestSweepAndDecompose:
    def test_scan_layers_writes_scaling(self, tmp_path):
        bundle = fixture_path("h2_0.74.json")
        res = run_cli(
            "sweep", "--bundles", str(bundle), "--method", "truncated",
            "--scan-layers", "0:2", "--out-dir", str(tmp_path), cwd=PKG_ROOT,
        )
        assert res.returncode == 0, res.stderr
        rows = (tmp_path / "scaling_h2_0.74_truncated.csv").read_text().splitlines()
        assert rows[0] == "L,method,energy_ha,error_mha,cnot"
        assert len(rows) == 4

    def test_pec_rows(self, tmp_path):
        bundles = [str(fixture_path(n)) for n in ("h4_0.60.json", "h4_0.80.json")]
        res = run_cli(
            "sweep", "--bundles", *bundles, "--method", "truncated", "-L", "3",
            "--out-dir", str(tmp_path), cwd=PKG_ROOT,
        )
        assert res.returncode == 0, res.stderr
        rows = (tmp_path / "pec_truncated.csv").read_text().splitlines()
        assert rows[0].startswith("geometry,method,L,energy_ha,fci_ha,error_mha")
        assert len(rows) == 3

    def test_decompose_identity(self, tmp_path):
        bundle = fixture_path("h4_0.80.json")
        for L, tag in ((2, "a"), (4, "b")):
            run_cli(
                "truncated", "--bundle", str(bundle), "-L", str(L),
                "--out-dir", str(tmp_path / tag), cwd=PKG_ROOT,
            )
        res = run_cli(
            "decompose", "--bundle", str(bundle),
            "--result-a", str(tmp_path / "a" / "truncated_h4_0.80_L2_seed0.json"),
            "--result-b", str(tmp_path / "b" / "truncated_h4_0.80_L4_seed0.json"),
            "--out-dir", str(tmp_path), cwd=PKG_ROOT,
        )
        assert res.returncode == 0, res.stderr
        assert "delta_total=" in res.stdout
        body = (tmp_path / "delta_h4_0.80.csv").read_text().splitlines()
        assert body[0] == "geometry,delta_total,delta_count,delta_complexity"


class TestExitCodes:
    def test_missing_bundle_is_io_or_validation(self, tmp_path):
        res = run_cli("fci", "--bundle", "no_such.json", "--out-dir", str(tmp_path), cwd=PKG_ROOT)
        assert res.returncode == 2

    def test_malformed_bundle(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        res = run_cli("fci", "--bundle", str(bad), "--out-dir", str(tmp_path), cwd=PKG_ROOT)
        assert res.returncode == 2
        assert "validation error" in res.stderr

    def test_oversized_truncation(self, tmp_path):
        bundle = fixture_path("h2_0.74.json")
        res = run_cli(
            "truncated", "--bundle", str(bundle), "-L", "99", "--out-dir", str(tmp_path), cwd=PKG_ROOT
        )
        assert res.returncode == 2
