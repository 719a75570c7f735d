"""Command-line front end.

Subcommands: fci, global, layerwise, adapt, truncated, pool, sweep,
decompose.  Every run writes a result JSON plus CSV traces under --out-dir
and echoes a one-line summary; stochastic runs are fully determined by
--seed.  Exit codes: 0 success, 2 validation error, 3 convergence failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .analysis import (
    composition,
    delta_cnot_decomposition,
    pec_rows,
    scaling_rows,
)
from .baselines import LanczosError, fci_ground_of_bundle
from .bundle import BundleError, load_bundle
from .estimators import AdaptVQE, GlobalSearch, LayerwiseSearch, TruncatedUCCSD
from .pauli import DEFAULT_COST_MODEL, load_cost_model
from .pool import build_pool
from .results import SearchResult, write_result_json, write_table_csv, write_trace_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4


def _add_common(parser: argparse.ArgumentParser, layers_default: int | None = None) -> None:
    parser.add_argument("--bundle", required=True, help="molecule bundle JSON file")
    parser.add_argument("--pool-flavor", choices=("uccsd", "qeb"), default="uccsd")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="runs", help="output directory")
    parser.add_argument("--cost-model", default=None, help="cost-model override JSON")
    if layers_default is not None:
        parser.add_argument("--layers", "-L", type=int, default=layers_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ansatzforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fci", help="exact ground-state energy of a bundle")
    _add_common(p)

    p = sub.add_parser("global", help="global architecture search")
    _add_common(p, layers_default=6)
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--alpha-lr", type=float, default=0.1)
    p.add_argument("--theta-lr", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("layerwise", help="layerwise architecture search")
    _add_common(p, layers_default=8)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--slide", type=int, default=2)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--restarts", type=int, default=3, help="restarts per growth step")
    p.add_argument("--alpha-lr", type=float, default=0.1)
    p.add_argument("--theta-lr", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("adapt", help="ADAPT-VQE baseline")
    _add_common(p, layers_default=8)
    p.add_argument("--grad-threshold", type=float, default=1e-6)

    p = sub.add_parser("truncated", help="MP2-ordered truncated-UCCSD baseline")
    _add_common(p, layers_default=8)

    p = sub.add_parser("pool", help="dump the operator pool")
    _add_common(p)

    p = sub.add_parser("sweep", help="run one method across bundles or layer counts")
    p.add_argument("--bundles", nargs="+", required=True, help="bundle files (PEC rows)")
    p.add_argument("--method", choices=("global", "layerwise", "adapt", "truncated"), required=True)
    p.add_argument("--layers", "-L", type=int, default=6)
    p.add_argument("--scan-layers", default=None, help="LO:HI[:STEP] layer scan (scaling table)")
    p.add_argument("--pool-flavor", choices=("uccsd", "qeb"), default="uccsd")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--out-dir", default="runs")
    p.add_argument("--cost-model", default=None)

    p = sub.add_parser("decompose", help="CNOT-difference decomposition of two result files")
    p.add_argument("--bundle", required=True)
    p.add_argument("--result-a", required=True)
    p.add_argument("--result-b", required=True)
    p.add_argument("--pool-flavor", choices=("uccsd", "qeb"), default="uccsd")
    p.add_argument("--out-dir", default="runs")
    p.add_argument("--cost-model", default=None)
    return parser


def _make_estimator(args, method: str | None = None):
    method = method or args.command
    cost_model = args.cost_model
    if method == "global":
        return GlobalSearch(
            layers=args.layers,
            pool_flavor=args.pool_flavor,
            epochs=getattr(args, "epochs", None) or 2000,
            batch_size=getattr(args, "batch", 16),
            restarts=getattr(args, "restarts", None) or 4,
            alpha_lr=getattr(args, "alpha_lr", 0.1),
            theta_lr=getattr(args, "theta_lr", 0.05),
            seed=args.seed,
            cost_model=cost_model,
            workers=getattr(args, "workers", None),
        )
    if method == "layerwise":
        return LayerwiseSearch(
            layers=args.layers,
            window=getattr(args, "window", 4),
            slide=getattr(args, "slide", 2),
            pool_flavor=args.pool_flavor,
            epochs=getattr(args, "epochs", None) or 500,
            batch_size=getattr(args, "batch", 16),
            restarts_per_step=getattr(args, "restarts", None) or 3,
            alpha_lr=getattr(args, "alpha_lr", 0.1),
            theta_lr=getattr(args, "theta_lr", 0.05),
            seed=args.seed,
            cost_model=cost_model,
            workers=getattr(args, "workers", None),
        )
    if method == "adapt":
        return AdaptVQE(
            max_groups=args.layers,
            pool_flavor=args.pool_flavor,
            grad_threshold=getattr(args, "grad_threshold", 1e-6),
            cost_model=cost_model,
        )
    if method == "truncated":
        return TruncatedUCCSD(k_groups=args.layers, pool_flavor=args.pool_flavor, cost_model=cost_model)
    raise ValueError(method)


def _emit(result: SearchResult, out_dir: Path, stem: str, elapsed: float) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_result_json(result, out_dir / f"{stem}.json")
    write_trace_csv(result, out_dir / f"{stem}_trace.csv")
    for name, rows in result.tables.items():
        write_table_csv(rows, out_dir / f"{stem}_{name}.csv")
    print(f"{result.summary()} wall={elapsed:.1f}s -> {out_dir / (stem + '.json')}")


def _run_single(args) -> int:
    bundle = load_bundle(args.bundle)
    estimator = _make_estimator(args)
    t0 = time.perf_counter()
    estimator.fit(bundle)
    result = estimator.result_
    comp = composition(result.structure, estimator.pool_)
    result.tables.setdefault(
        "composition",
        [{"n_singles": comp.n_singles, "n_doubles": comp.n_doubles, "n_operators": comp.n_operators}],
    )
    stem = f"{args.command}_{Path(args.bundle).stem}_L{args.layers}_seed{args.seed}"
    _emit(result, Path(args.out_dir), stem, time.perf_counter() - t0)
    return EXIT_OK


def _run_fci(args) -> int:
    bundle = load_bundle(args.bundle)
    t0 = time.perf_counter()
    energy, _vec = fci_ground_of_bundle(bundle)
    elapsed = time.perf_counter() - t0
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {
        "method": "fci",
        "bundle_name": bundle.name,
        "geometry_label": bundle.geometry_label,
        "energy": energy,
        "stored_fci_energy": bundle.fci_energy,
        "hf_energy": bundle.hf_energy,
    }
    path = out_dir / f"fci_{Path(args.bundle).stem}.json"
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(
        f"fci {bundle.name}[{bundle.geometry_label}] energy={energy:.8f} Ha "
        f"wall={elapsed:.1f}s -> {path}"
    )
    return EXIT_OK


def _run_pool(args) -> int:
    bundle = load_bundle(args.bundle)
    model = load_cost_model(args.cost_model) if args.cost_model else DEFAULT_COST_MODEL
    pool = build_pool(bundle, flavor=args.pool_flavor, model=model)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"pool_{Path(args.bundle).stem}_{args.pool_flavor}.csv"
    pool.to_csv(path)
    means = pool.mean_costs()
    print(
        f"pool {bundle.name}[{bundle.geometry_label}] {args.pool_flavor}: {len(pool)} groups, "
        f"mean cnots single={float(means['single']):.2f} double={float(means['double']):.2f} -> {path}"
    )
    return EXIT_OK


def _run_sweep(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    if args.scan_layers:
        parts = [int(x) for x in args.scan_layers.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        if len(args.bundles) != 1:
            raise BundleError("--scan-layers expects exactly one bundle")
        bundle = load_bundle(args.bundles[0])
        for n_layers in range(lo, hi + 1, step):
            args.layers = n_layers
            estimator = _make_estimator(args, args.method)
            estimator.fit(bundle)
            results.append(estimator.result_)
            print("  " + estimator.result_.summary())
        path = out_dir / f"scaling_{Path(args.bundles[0]).stem}_{args.method}.csv"
        write_table_csv(scaling_rows(results), path)
        print(f"sweep wrote {path}")
        return EXIT_OK
    for bundle_path in args.bundles:
        bundle = load_bundle(bundle_path)
        estimator = _make_estimator(args, args.method)
        estimator.fit(bundle)
        res = estimator.result_
        comp = composition(res.structure, estimator.pool_)
        res.tables["composition"] = [
            {"n_singles": comp.n_singles, "n_doubles": comp.n_doubles, "n_operators": comp.n_operators}
        ]
        results.append(res)
        print("  " + res.summary())
    path = out_dir / f"pec_{args.method}.csv"
    write_table_csv(pec_rows(results), path)
    print(f"sweep wrote {path}")
    return EXIT_OK


def _run_decompose(args) -> int:
    bundle = load_bundle(args.bundle)
    model = load_cost_model(args.cost_model) if args.cost_model else DEFAULT_COST_MODEL
    pool = build_pool(bundle, flavor=args.pool_flavor, model=model)
    docs = []
    for path in (args.result_a, args.result_b):
        docs.append(json.loads(Path(path).read_text()))
    struct_a = tuple(docs[0]["structure"])
    struct_b = tuple(docs[1]["structure"])
    total, count, complexity = delta_cnot_decomposition(struct_a, struct_b, pool)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [
        {
            "geometry": bundle.geometry_label,
            "delta_total": total,
            "delta_count": float(count),
            "delta_complexity": float(complexity),
        }
    ]
    path = out_dir / f"delta_{Path(args.bundle).stem}.csv"
    write_table_csv(rows, path)
    print(
        f"decompose {bundle.name}[{bundle.geometry_label}]: delta_total={total} "
        f"delta_count={float(count):.2f} delta_complexity={float(complexity):.2f} -> {path}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fci":
            return _run_fci(args)
        if args.command == "pool":
            return _run_pool(args)
        if args.command == "sweep":
            return _run_sweep(args)
        if args.command == "decompose":
            return _run_decompose(args)
        return _run_single(args)
    except (BundleError, ValueError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (LanczosError, RuntimeError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
