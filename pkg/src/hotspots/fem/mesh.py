"""Nested triangular meshes of triangles, kites, rhombi and squares."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import TriParam, rhombus_half_diagonals

__all__ = ["Domain", "Mesh", "triangle", "kite", "rhombus", "square", "polygon",
           "triangle_from_angles", "mesh_domain", "refine"]


@dataclass(frozen=True)
class Domain:
    """A polygon with a seed triangulation.

    ``corners`` are listed so that side ``i`` runs from ``corners[i]`` to
    ``corners[i+1]`` (cyclically); ``seeds`` index into ``corners``.
    """

    kind: str
    corners: tuple[tuple[float, float], ...]
    seeds: tuple[tuple[int, int, int], ...]
    params: tuple = ()

    def describe(self) -> dict:
        return {"kind": self.kind, "params": [str(p) for p in self.params],
                "corners": [list(c) for c in self.corners]}

    def scaled(self, s: float) -> "Domain":
        return Domain(self.kind, tuple((s * x, s * y) for x, y in self.corners), self.seeds,
                      self.params + (f"scale={s}",))


def _signed_area(p, q, r) -> float:
    return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))


def polygon(corners, seeds, kind="polygon", params=()) -> Domain:
    corners = tuple((float(x), float(y)) for x, y in corners)
    scale = max(max(abs(x), abs(y)) for x, y in corners) or 1.0
    for s in seeds:
        if _signed_area(*(corners[i] for i in s)) <= 1e-14 * scale * scale:
            raise ValueError(f"degenerate or clockwise seed triangle {s}")
    return Domain(kind, corners, tuple(tuple(s) for s in seeds), tuple(params))


def triangle(t: TriParam) -> Domain:
    """Triangle with vertices from ``t.vertices()``; sides 0,1,2 are v0v1, v1v2, v2v0."""
    return polygon(t.vertices(), [(0, 1, 2)], "triangle", (t.convention, t.a, t.b))


def kite(t: TriParam) -> Domain:
    """Triangle ``t`` together with its mirror image across the x-axis.

    Corners in boundary order: v1, apex, v0, mirrored apex.  The base of the
    triangle is the interior diagonal.
    """
    v0, v1, (a, b) = t.vertices()
    corners = (v1, (a, b), v0, (a, -b))
    return polygon(corners, [(2, 0, 1), (2, 3, 0)], "kite", (t.convention, t.a, t.b))


def rhombus(h) -> Domain:
    """Side-1 rhombus with half-diagonals from :func:`rhombus_half_diagonals`."""
    p, q = rhombus_half_diagonals(h)
    corners = ((p, 0.0), (0.0, q), (-p, 0.0), (0.0, -q))
    return polygon(corners, [(0, 1, 2), (0, 2, 3)], "rhombus", (h,))


def square(side: float = 1.0) -> Domain:
    s = float(side)
    return polygon(((0, 0), (s, 0), (s, s), (0, s)), [(0, 1, 2), (0, 2, 3)], "square", (side,))


def triangle_from_angles(alpha: float, beta: float) -> TriParam:
    """Unit-placement triangle with angle ``alpha`` at (0,0) and ``beta`` at (1,0)."""
    if alpha <= 0 or beta <= 0 or alpha + beta >= math.pi:
        raise ValueError("angles do not form a triangle")
    ta, tb = math.tan(alpha), math.tan(beta)
    if math.isclose(alpha, math.pi / 2):
        return TriParam(0.0, tb)
    if math.isclose(beta, math.pi / 2):
        return TriParam(1.0, ta)
    x = tb / (ta + tb)
    return TriParam(x, ta * x)


@dataclass
class Mesh:
    vertices: np.ndarray  # (n, 2) float
    elements: np.ndarray  # (m, 3) int, counterclockwise
    bnd_edges: np.ndarray  # (k, 2) int, oriented along the boundary
    bnd_labels: np.ndarray  # (k,) side index
    domain: Domain
    level: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def corners(self) -> np.ndarray:
        return np.asarray(self.domain.corners, dtype=float)

    def areas(self) -> np.ndarray:
        v = self.vertices[self.elements]
        d1 = v[:, 1] - v[:, 0]
        d2 = v[:, 2] - v[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def h(self) -> float:
        """Longest element edge."""
        if "h" not in self._cache:
            v = self.vertices[self.elements]
            e = np.concatenate([v[:, 1] - v[:, 0], v[:, 2] - v[:, 1], v[:, 0] - v[:, 2]])
            self._cache["h"] = float(np.sqrt((e**2).sum(1)).max())
        return self._cache["h"]

    def boundary_nodes(self, labels=None) -> np.ndarray:
        if labels is None:
            sel = self.bnd_edges
        else:
            labels = np.atleast_1d(labels)
            sel = self.bnd_edges[np.isin(self.bnd_labels, labels)]
        return np.unique(sel.ravel())

    def side_nodes(self, label: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes on side ``label`` ordered from its first corner, with arc length."""
        c = self.corners
        p, q = c[label], c[(label + 1) % len(c)]
        nodes = self.boundary_nodes(label)
        s = (self.vertices[nodes] - p) @ (q - p) / np.linalg.norm(q - p)
        order = np.argsort(s)
        return nodes[order], s[order]


def _seed_mesh(d: Domain) -> Mesh:
    verts = np.asarray(d.corners, dtype=float)
    elems = np.asarray(d.seeds, dtype=np.int64)
    nc = len(verts)
    edges = np.array([(i, (i + 1) % nc) for i in range(nc)], dtype=np.int64)
    return Mesh(verts, elems, edges, np.arange(nc), d, 0)


def refine(m: Mesh) -> Mesh:
    """Uniform 4-way split; old vertices keep their indices, so levels nest."""
    V, T = m.vertices, m.elements
    n = len(V)
    e = np.stack([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]], axis=1).reshape(-1, 2)
    es = np.sort(e, axis=1)
    keys = es[:, 0] * n + es[:, 1]
    ukeys, inv = np.unique(keys, return_inverse=True)
    inv = inv.reshape(-1)
    a, b = ukeys // n, ukeys % n
    newV = np.vstack([V, 0.5 * (V[a] + V[b])])
    mid = n + inv.reshape(-1, 3)
    m01, m12, m20 = mid[:, 0], mid[:, 1], mid[:, 2]
    v0, v1, v2 = T[:, 0], T[:, 1], T[:, 2]
    newT = np.concatenate([
        np.stack([v0, m01, m20], 1),
        np.stack([m01, v1, m12], 1),
        np.stack([m20, m12, v2], 1),
        np.stack([m01, m12, m20], 1),
    ])
    be = m.bnd_edges
    bk = np.sort(be, axis=1)
    bm = n + np.searchsorted(ukeys, bk[:, 0] * n + bk[:, 1])
    newE = np.concatenate([np.stack([be[:, 0], bm], 1), np.stack([bm, be[:, 1]], 1)])
    newL = np.concatenate([m.bnd_labels, m.bnd_labels])
    return Mesh(newV, newT, newE, newL, m.domain, m.level + 1)


def mesh_domain(d: Domain, level: int) -> Mesh:
    """Seed mesh of ``d`` refined ``level`` times."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    m = _seed_mesh(d)
    for _ in range(level):
        m = refine(m)
    return m
