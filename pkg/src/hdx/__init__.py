"""Weighted pure simplicial complexes and numerical certificates for their expansion."""

from __future__ import annotations

from .certificates import Certificate, summarize
from .complex_core import ComplexError, WeightedComplex, build_complex, connectivity_report
from .cochains import Cochain, OperatorMatrix, coboundary, codifferential, inner_product, laplacian
from .generators import complete_multipartite, complete_skeleton, flag_random, random_weights
from .report import GeneratorSpec, ReportOptions, run_full_report

__all__ = [
    "Certificate",
    "Cochain",
    "ComplexError",
    "GeneratorSpec",
    "OperatorMatrix",
    "ReportOptions",
    "WeightedComplex",
    "build_complex",
    "coboundary",
    "codifferential",
    "complete_multipartite",
    "complete_skeleton",
    "connectivity_report",
    "flag_random",
    "inner_product",
    "laplacian",
    "random_weights",
    "run_full_report",
    "summarize",
]
