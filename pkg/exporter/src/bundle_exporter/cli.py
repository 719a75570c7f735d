"""Exporter command line: single-bundle export and the benchmark suite."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .export import SYSTEMS, export_bundle, export_suite
from .scf import SCFError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bundle-exporter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="export one molecule bundle")
    p.add_argument("--system", choices=sorted(SYSTEMS), required=True)
    p.add_argument("--distance", "-d", type=float, required=True, help="bond length / spacing in Angstrom")
    p.add_argument("--out-dir", default="fixtures")
    p.add_argument("--no-fci", action="store_true", help="skip the exact-diagonalization reference")

    p = sub.add_parser("suite", help="export the full benchmark fixture set")
    p.add_argument("--out-dir", default="fixtures")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "export":
            path = export_bundle(args.system, args.distance, Path(args.out_dir), compute_fci=not args.no_fci)
            print(f"wrote {path}")
            return 0
        manifest = export_suite(Path(args.out_dir))
        print(
            f"wrote {len(manifest['bundles'])} bundles for {len(manifest['systems'])} systems "
            f"({len(manifest['failures'])} failures) under {args.out_dir}"
        )
        for failure in manifest["failures"]:
            print(f"  failed: {failure['system']} d={failure['d']}: {failure['error']}", file=sys.stderr)
        return 0 if not manifest["failures"] else 1
    except (SCFError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
