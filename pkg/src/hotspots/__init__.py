"""Exact polynomial certification and a finite-element oracle for Neumann
eigenfunctions of triangles with a small angle."""

from .bounds import SYM, UNIT, TriParam
from .certifier import Certificate, Rect, certify_nonpos, check_certificate, fold_bound
from .exactq import PiQuad, QSqrt, RatInterval
from .poly import AffineMap, Poly2
from .polytext import format_poly, parse_poly
from .proofs import CASE_IDS, build_case, run_all, run_case

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "CASE_IDS", "Certificate", "PiQuad", "Poly2", "QSqrt", "RatInterval", "Rect", "SYM",
    "TriParam", "UNIT", "build_case", "certify_nonpos", "check_certificate", "fold_bound", "format_poly",
    "parse_poly", "run_all", "run_case",
]
