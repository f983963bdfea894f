"""Time P1 element-matrix assembly with the numba and numpy kernels.

Usage: python benchmarks/bench_assembly.py [max_level]
"""

import sys
import time

import numpy as np

from hotspots.bounds import TriParam
from hotspots.fem import _kernels
from hotspots.fem.mesh import kite, mesh_domain


def best_of(f, n=5):
    ts = []
    for _ in range(n):
        t = time.perf_counter()
        f()
        ts.append(time.perf_counter() - t)
    return min(ts)


def main(max_level=8):
    if not _kernels._HAVE_NUMBA:
        print("numba not importable; only the numpy kernel is timed")
    dom = kite(TriParam(0.25, 0.4))
    # first call compiles (or loads the on-disk cache)
    m0 = mesh_domain(dom, 1)
    t = time.perf_counter()
    if _kernels._HAVE_NUMBA:
        _kernels.local_matrices_numba(m0.vertices, m0.elements)
    print(f"numba warm-up {time.perf_counter() - t:.3f}s")
    print(f"{'level':>5} {'elements':>9} {'numpy [ms]':>11} {'numba [ms]':>11} {'ratio':>6}")
    for lvl in range(4, max_level + 1):
        m = mesh_domain(dom, lvl)
        a = _kernels.local_matrices_numpy(m.vertices, m.elements)
        tn = best_of(lambda: _kernels.local_matrices_numpy(m.vertices, m.elements))
        if _kernels._HAVE_NUMBA:
            b = _kernels.local_matrices_numba(m.vertices, m.elements)
            assert all(np.allclose(x, y) for x, y in zip(a, b))
            tj = best_of(lambda: _kernels.local_matrices_numba(m.vertices, m.elements))
            print(f"{lvl:5d} {m.n_elements:9d} {1e3 * tn:11.2f} {1e3 * tj:11.2f} {tn / tj:6.2f}")
        else:
            print(f"{lvl:5d} {m.n_elements:9d} {1e3 * tn:11.2f} {'-':>11} {'-':>6}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 8)
