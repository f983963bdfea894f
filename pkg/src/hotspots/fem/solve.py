"""Neumann and mixed Laplace eigenproblems with P1 elements."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import _kernels
from .mesh import Domain, Mesh, mesh_domain

__all__ = ["EigenResult", "SolverError", "assemble", "eigensolve", "solve_neumann", "solve_mixed",
           "DEFAULT_LEVELS", "DENSE_MAX"]

DEFAULT_LEVELS = (5, 6)
# dense solves cost O(n^3); above this size shift-invert Lanczos is much faster
DENSE_MAX = int(os.environ.get("HOTSPOTS_DENSE_MAX", "800"))


class SolverError(RuntimeError):
    pass


@dataclass
class EigenResult:
    """Eigenpairs on the finest mesh plus per-level values.

    ``values`` are Richardson-extrapolated when two levels were solved, and
    ``errors`` estimate the error of the finest discrete values.
    """

    values: np.ndarray
    vectors: np.ndarray
    mesh: Mesh
    errors: np.ndarray | None = None
    kind: str = "neumann"
    dirichlet: tuple = ()
    per_level: dict = field(default_factory=dict)  # level -> discrete values
    coarse: "EigenResult | None" = None

    @property
    def discrete(self) -> np.ndarray:
        return self.per_level[self.mesh.level]

    def error(self, i: int) -> float:
        return float(self.errors[i]) if self.errors is not None else float("nan")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "domain": self.mesh.domain.describe(),
            "dirichlet_sides": list(self.dirichlet),
            "levels": sorted(self.per_level),
            "vertices": int(self.mesh.n_vertices),
            "values": [float(v) for v in self.values],
            "errors": None if self.errors is None else [float(e) for e in self.errors],
            "discrete": {str(k): [float(x) for x in v] for k, v in sorted(self.per_level.items())},
        }


def assemble(m: Mesh, backend: str | None = None) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    rows, cols, kv, mv = _kernels.local_matrices(m.vertices, m.elements, backend)
    n = m.n_vertices
    K = sp.csr_matrix((kv, (rows, cols)), shape=(n, n))
    M = sp.csr_matrix((mv, (rows, cols)), shape=(n, n))
    return K, M


def eigensolve(K, M, k: int, dense_max: int | None = None):
    """Smallest ``k`` eigenpairs of ``K u = mu M u``, M-orthonormal, sign-fixed."""
    n = K.shape[0]
    dense_max = DENSE_MAX if dense_max is None else dense_max
    k = min(k, n)
    if n <= dense_max or k >= n - 1:
        w, v = scipy.linalg.eigh(K.toarray(), M.toarray(), subset_by_index=[0, k - 1])
    else:
        # shift -1 makes K + M positive definite, so the constant Neumann mode is harmless
        try:
            w, v = eigsh(K.tocsc(), k=k, M=M.tocsc(), sigma=-1.0, which="LM", tol=1e-12)
        except ArpackNoConvergence as e:  # pragma: no cover
            raise SolverError(f"eigensolver did not converge: {e}") from e
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    nrm = np.sqrt(np.einsum("ij,ij->j", v, M @ v))
    v = v / nrm
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(v), axis=0)
    v = v * np.sign(v[idx, np.arange(v.shape[1])])
    return w, v


def _solve_mesh(m: Mesh, k: int, dirichlet: tuple, kind: str) -> EigenResult:
    K, M = assemble(m)
    n = m.n_vertices
    if dirichlet:
        fixed = m.boundary_nodes(list(dirichlet))
        free = np.setdiff1d(np.arange(n), fixed)
        w, vf = eigensolve(K[free][:, free], M[free][:, free], k)
        v = np.zeros((n, vf.shape[1]))
        v[free] = vf
    else:
        w, v = eigensolve(K, M, k)
    return EigenResult(w, v, m, None, kind, dirichlet, {m.level: w})


def _solve(target, k: int, levels: Sequence[int], dirichlet: tuple, kind: str) -> EigenResult:
    if isinstance(target, Mesh):
        return _solve_mesh(target, k, dirichlet, kind)
    if not isinstance(target, Domain):
        raise TypeError("expected a Domain or a Mesh")
    levels = sorted(set(int(l) for l in levels))
    if not levels:
        raise ValueError("need at least one refinement level")
    res = [_solve_mesh(mesh_domain(target, l), k, dirichlet, kind) for l in levels]
    fine = res[-1]
    per = {r.mesh.level: r.values for r in res}
    if len(res) == 1:
        return fine
    coarse = res[-2]
    kk = min(len(fine.values), len(coarse.values))
    f, c = fine.values[:kk], coarse.values[:kk]
    # P1 eigenvalues converge like h^2 from above; one level halves h
    diff = f - c
    ext = f + diff / 3.0
    err = np.abs(diff) / 3.0
    return EigenResult(ext, fine.vectors[:, :kk], fine.mesh, err, kind, dirichlet, per, coarse)


def solve_neumann(target, k: int = 6, levels: Sequence[int] = DEFAULT_LEVELS) -> EigenResult:
    """First ``k`` Neumann eigenpairs; ``target`` is a Mesh (single solve) or a Domain."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return _solve(target, k, levels, (), "neumann")


def solve_mixed(target, dirichlet_side, k: int = 4, levels: Sequence[int] = DEFAULT_LEVELS) -> EigenResult:
    """Eigenpairs with Dirichlet conditions on the given side(s), Neumann elsewhere."""
    sides = tuple(sorted(set(np.atleast_1d(dirichlet_side).tolist())))
    dom = target.domain if isinstance(target, Mesh) else target
    nsides = len(dom.corners)
    if not sides or any(s < 0 or s >= nsides for s in sides):
        raise ValueError(f"side ids must lie in 0..{nsides - 1}")
    if k < 1:
        raise ValueError("k must be positive")
    return _solve(target, k, levels, sides, "mixed")
