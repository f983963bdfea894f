"""Post-processing of discrete eigenfunctions: symmetry, extrema, gaps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from ..bounds import TriParam
from .mesh import Domain, Mesh, kite, triangle
from .solve import DEFAULT_LEVELS, EigenResult, solve_mixed, solve_neumann

__all__ = [
    "ModeTag",
    "HotSpotReport",
    "GapResult",
    "mirror_permutation",
    "classify_symmetry",
    "analyze_hot_spots",
    "simplicity_gap",
    "kite_modes",
    "crossing_b",
    "DEGENERATE_RTOL",
]

# two eigenvalues closer than this (relative) count as one double eigenvalue
DEGENERATE_RTOL = 1e-6


def _degenerate(res: EigenResult, i: int, j: int) -> bool:
    vi, vj = float(res.values[i]), float(res.values[j])
    tol = DEGENERATE_RTOL * max(abs(vi), abs(vj), 1.0)
    if res.errors is not None:
        tol = max(tol, 3.0 * float(res.errors[i] + res.errors[j]))
    return abs(vj - vi) <= tol


def _discrete_degenerate(res: EigenResult, i: int, j: int) -> bool:
    d = res.discrete
    return abs(d[j] - d[i]) <= DEGENERATE_RTOL * max(abs(d[i]), abs(d[j]), 1.0)


def mirror_permutation(m: Mesh, axis: str = "x") -> np.ndarray:
    """Index map of the reflection ``y -> -y`` (axis "x") or ``x -> -x`` (axis "y")."""
    key = ("mirror", axis)
    if key not in m._cache:
        V = m.vertices
        R = V * (np.array([1.0, -1.0]) if axis == "x" else np.array([-1.0, 1.0]))
        dist, idx = cKDTree(V).query(R)
        if dist.max() > 1e-9 * max(1.0, np.abs(V).max()):
            raise ValueError("mesh is not symmetric under the reflection")
        m._cache[key] = idx
    return m._cache[key]


@dataclass(frozen=True)
class ModeTag:
    index: int
    value: float
    tag: str  # symmetric | antisymmetric | mixed | degenerate
    sym_residual: float
    anti_residual: float


def classify_symmetry(res: EigenResult, axis: str = "x", tol: float = 1e-5) -> list[ModeTag]:
    """Tag each mode as even or odd under the mesh reflection.

    Modes inside a numerically double eigenvalue are tagged ``degenerate``;
    a simple mode that is neither even nor odd within ``tol`` is ``mixed``.
    """
    perm = mirror_permutation(res.mesh, axis)
    out = []
    n = len(res.values)
    for i in range(n):
        u = res.vectors[:, i]
        nu = np.linalg.norm(u) or 1.0
        rs = float(np.linalg.norm(u - u[perm]) / nu)
        ra = float(np.linalg.norm(u + u[perm]) / nu)
        deg = any(_discrete_degenerate(res, i, j) for j in (i - 1, i + 1) if 0 <= j < n)
        if deg:
            tag = "degenerate"
        elif rs < tol:
            tag = "symmetric"
        elif ra < tol:
            tag = "antisymmetric"
        else:
            tag = "mixed"
        out.append(ModeTag(i, float(res.values[i]), tag, rs, ra))
    return out


@dataclass
class SideTrace:
    side: int
    arc: np.ndarray
    values: np.ndarray
    dtan: np.ndarray  # derivative between consecutive nodes
    critical_points: int  # sign changes of the tangential derivative

    def rows(self):
        mids = 0.5 * (self.arc[1:] + self.arc[:-1])
        for s, v in zip(self.arc, self.values):
            yield self.side, float(s), float(v), float(np.interp(s, mids, self.dtan)) if len(mids) else 0.0


@dataclass
class HotSpotReport:
    status: str  # "ok" | "refused"
    argmax: dict = field(default_factory=dict)
    argmin: dict = field(default_factory=dict)
    critical_points: dict = field(default_factory=dict)
    stable: bool | None = None
    level: int | None = None
    reason: str = ""
    traces: list = field(default_factory=list, repr=False)

    @property
    def extrema_at_vertices(self) -> bool:
        return self.status == "ok" and self.argmax.get("class") == "vertex" and self.argmin.get("class") == "vertex"

    @property
    def interior_extrema(self) -> int:
        return sum(1 for e in (self.argmax, self.argmin) if e.get("class") == "interior")

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "argmax": self.argmax,
            "argmin": self.argmin,
            "critical_points": {str(k): v for k, v in self.critical_points.items()},
            "stable": self.stable,
            "level": self.level,
            "reason": self.reason,
        }


def _locate(m: Mesh, node: int, bnodes: set) -> dict:
    p = m.vertices[node]
    d = np.linalg.norm(m.corners - p, axis=1)
    c = int(np.argmin(d))
    if d[c] <= m.h * (1 + 1e-9):
        cls = "vertex"
    elif node in bnodes:
        cls = "edge"
    else:
        cls = "interior"
    return {"class": cls, "corner": c if cls == "vertex" else None,
            "point": [float(p[0]), float(p[1])]}


def _traces(m: Mesh, u: np.ndarray) -> list[SideTrace]:
    out = []
    scale = float(np.abs(u).max()) or 1.0
    for side in range(len(m.corners)):
        nodes, s = m.side_nodes(side)
        v = u[nodes]
        ds = np.diff(s)
        du = np.diff(v) / ds
        # ignore slopes at rounding level when counting sign changes
        noise = 1e-8 * scale / max(float(s[-1] - s[0]), 1e-300)
        sg = np.sign(np.where(np.abs(du) > noise, du, 0.0))
        sg = sg[sg != 0]
        crit = int(np.count_nonzero(sg[1:] != sg[:-1]))
        out.append(SideTrace(side, s, v, du, crit))
    return out


def _analyze_single(res: EigenResult, mode: int) -> HotSpotReport:
    m = res.mesh
    u = res.vectors[:, mode]
    bnodes = set(m.boundary_nodes().tolist())
    tr = _traces(m, u)
    return HotSpotReport(
        "ok",
        _locate(m, int(np.argmax(u)), bnodes),
        _locate(m, int(np.argmin(u)), bnodes),
        {t.side: t.critical_points for t in tr},
        None,
        m.level,
        traces=tr,
    )


def _same_place(a: dict, b: dict) -> bool:
    return a["class"] == b["class"] and a["corner"] == b["corner"]


def analyze_hot_spots(res: EigenResult, mode: int = 1) -> HotSpotReport:
    """Locate the extrema of eigenfunction ``mode`` (0-based, so 1 is mu_2).

    Refuses when the eigenvalue is numerically double, because the
    eigenfunction is then not determined.  With a two-level result the
    classification is repeated on the coarser mesh; ``stable`` records
    whether both agree (with the max/min pair allowed to swap, since the
    sign of an eigenfunction is arbitrary).
    """
    n = len(res.values)
    if mode < 0 or mode >= n:
        raise IndexError("mode out of range")
    for j in (mode - 1, mode + 1):
        if 0 <= j < n and _degenerate(res, mode, j):
            return HotSpotReport("refused", reason=f"eigenvalue {mode} is not simple within tolerance",
                                 level=res.mesh.level)
    rep = _analyze_single(res, mode)
    if res.coarse is not None:
        c = _analyze_single(res.coarse, mode)
        same = _same_place(rep.argmax, c.argmax) and _same_place(rep.argmin, c.argmin)
        swapped = _same_place(rep.argmax, c.argmin) and _same_place(rep.argmin, c.argmax)
        rep.stable = same or swapped
    return rep


@dataclass(frozen=True)
class GapResult:
    mu2: float
    mu3: float
    gap: float
    error: float

    @property
    def significant(self) -> bool:
        return self.gap > 5 * self.error

    def to_json(self) -> dict:
        return {"mu2": self.mu2, "mu3": self.mu3, "gap": self.gap, "error": self.error,
                "significant": self.significant}


def simplicity_gap(t: TriParam | Domain, levels: Sequence[int] = DEFAULT_LEVELS) -> GapResult:
    """``mu_3 - mu_2`` for the Neumann problem with an error bar."""
    d = t if isinstance(t, Domain) else triangle(t)
    r = solve_neumann(d, 3, levels)
    err = float(r.errors[1] + r.errors[2]) if r.errors is not None else 0.0
    return GapResult(float(r.values[1]), float(r.values[2]), float(r.values[2] - r.values[1]), err)


def kite_modes(t: TriParam, levels: Sequence[int] = DEFAULT_LEVELS, full: bool = False):
    """Lowest nonconstant symmetric and antisymmetric kite eigenvalues.

    By default both come from the half domain (Neumann, and Dirichlet on the
    base).  ``full=True`` solves on the whole kite and sorts modes by symmetry.
    Returns ``(mu_s, mu_a, err_s, err_a)``.
    """
    if not full:
        tri = triangle(t)
        rs = solve_neumann(tri, 2, levels)
        ra = solve_mixed(tri, 0, 1, levels)
        es = rs.error(1) if rs.errors is not None else 0.0
        ea = ra.error(0) if ra.errors is not None else 0.0
        return float(rs.values[1]), float(ra.values[0]), es, ea
    r = solve_neumann(kite(t), 6, levels)
    tags = classify_symmetry(r)
    sym = [g for g in tags[1:] if g.tag == "symmetric"]
    anti = [g for g in tags if g.tag == "antisymmetric"]
    if not sym or not anti:
        raise ValueError("could not find both symmetry classes among the first modes")
    es = r.error(sym[0].index) if r.errors is not None else 0.0
    ea = r.error(anti[0].index) if r.errors is not None else 0.0
    return sym[0].value, anti[0].value, es, ea


def crossing_b(a: float, levels: Sequence[int] = (3, 4), lo: float | None = None, hi: float | None = None,
               xtol: float = 1e-5) -> float:
    """Height ``b`` where the symmetric and antisymmetric kite modes cross, at fixed ``a``."""

    def f(b):
        s, an, _, _ = kite_modes(TriParam(a, b), levels)
        return s - an

    lo = lo if lo is not None else max(math.sqrt(max(a - a * a, 0.0)) + 1e-3, 0.3)
    hi = hi if hi is not None else min(math.sqrt(1 - (1 - a) ** 2), 0.9)
    return float(brentq(f, lo, hi, xtol=xtol))
