"""Molecule-bundle exporter: self-contained STO-3G electronic structure
(integrals, RHF, MP2, Jordan-Wigner mapping, exact diagonalization) feeding
the search engine's bundle file format."""

from .export import SUITE_GRIDS, SYSTEMS, build_bundle, export_bundle, export_suite

__all__ = ["SUITE_GRIDS", "SYSTEMS", "build_bundle", "export_bundle", "export_suite"]
