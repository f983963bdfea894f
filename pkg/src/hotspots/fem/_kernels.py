"""Element matrices for P1 triangles.

Two interchangeable backends produce COO triplets for the stiffness and mass
matrices.  ``HOTSPOTS_NUMBA=0`` forces the numpy path; otherwise numba is used
when it imports.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised through BACKEND
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def _want_numba() -> bool:
    flag = os.environ.get("HOTSPOTS_NUMBA", "1").strip().lower()
    return _HAVE_NUMBA and flag not in ("0", "false", "no", "off")


BACKEND = "numba" if _want_numba() else "numpy"


def local_matrices_numpy(verts: np.ndarray, elems: np.ndarray):
    """Return ``rows, cols, kvals, mvals`` (length ``9 m``)."""
    x = verts[elems, 0]
    y = verts[elems, 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    det = c[:, 2] * b[:, 1] - c[:, 1] * b[:, 2]  # twice the area
    K = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (2.0 * det)[:, None, None]
    M = (det / 24.0)[:, None, None] * (1.0 + np.eye(3))[None]
    rows = np.repeat(elems, 3, axis=1).ravel()
    cols = np.tile(elems, (1, 3)).ravel()
    return rows, cols, K.ravel(), M.ravel()


def _local_loop(verts, elems, rows, cols, kv, mv):
    m = elems.shape[0]
    b = np.empty(3)
    c = np.empty(3)
    for e in range(m):
        i0, i1, i2 = elems[e, 0], elems[e, 1], elems[e, 2]
        x0, y0 = verts[i0, 0], verts[i0, 1]
        x1, y1 = verts[i1, 0], verts[i1, 1]
        x2, y2 = verts[i2, 0], verts[i2, 1]
        b[0] = y1 - y2
        b[1] = y2 - y0
        b[2] = y0 - y1
        c[0] = x2 - x1
        c[1] = x0 - x2
        c[2] = x1 - x0
        det = c[2] * b[1] - c[1] * b[2]
        s = 1.0 / (2.0 * det)
        w = det / 24.0
        base = 9 * e
        for i in range(3):
            for j in range(3):
                k = base + 3 * i + j
                rows[k] = elems[e, i]
                cols[k] = elems[e, j]
                kv[k] = (b[i] * b[j] + c[i] * c[j]) * s
                mv[k] = 2.0 * w if i == j else w


if _HAVE_NUMBA:
    _local_loop_jit = numba.njit(cache=True)(_local_loop)
else:  # pragma: no cover
    _local_loop_jit = _local_loop


def local_matrices_numba(verts: np.ndarray, elems: np.ndarray):
    m = elems.shape[0]
    rows = np.empty(9 * m, dtype=np.int64)
    cols = np.empty(9 * m, dtype=np.int64)
    kv = np.empty(9 * m)
    mv = np.empty(9 * m)
    _local_loop_jit(np.ascontiguousarray(verts, dtype=np.float64),
                    np.ascontiguousarray(elems, dtype=np.int64), rows, cols, kv, mv)
    return rows, cols, kv, mv


def local_matrices(verts, elems, backend: str | None = None):
    backend = backend or BACKEND
    if backend == "numba":
        return local_matrices_numba(verts, elems)
    if backend == "numpy":
        return local_matrices_numpy(verts, elems)
    raise ValueError(f"unknown backend {backend!r}")
