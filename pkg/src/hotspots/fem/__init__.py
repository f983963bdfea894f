"""Finite-element eigenvalue oracle (P1, nested meshes)."""

from ._kernels import BACKEND
from .analysis import (
    GapResult,
    HotSpotReport,
    ModeTag,
    analyze_hot_spots,
    classify_symmetry,
    crossing_b,
    kite_modes,
    mirror_permutation,
    simplicity_gap,
)
from .mesh import Domain, Mesh, kite, mesh_domain, polygon, refine, rhombus, square, triangle, triangle_from_angles
from .solve import DEFAULT_LEVELS, EigenResult, SolverError, assemble, eigensolve, solve_mixed, solve_neumann

__all__ = [
    "BACKEND", "Domain", "Mesh", "EigenResult", "SolverError", "GapResult", "HotSpotReport", "ModeTag",
    "DEFAULT_LEVELS", "assemble", "eigensolve", "solve_neumann", "solve_mixed", "mesh_domain", "refine",
    "triangle", "kite", "rhombus", "square", "polygon", "triangle_from_angles", "classify_symmetry",
    "analyze_hot_spots", "simplicity_gap", "kite_modes", "crossing_b", "mirror_permutation",
]
