import math
from fractions import Fraction as F

import numpy as np
import pytest

from hotspots import fem
from hotspots.bounds import SYM, TriParam
from hotspots.exactq import QSqrt
from hotspots.fem import _kernels

PI2 = math.pi**2
S3 = QSqrt(0, 1, 3)
LV = (4, 5)


# -- meshes


@pytest.mark.parametrize("level", [0, 1, 3, 5])
def test_triangle_mesh_counts(level):
    m = fem.mesh_domain(fem.triangle(TriParam(F(1, 4), F(1, 2))), level)
    n = 2**level
    assert m.n_elements == 4**level
    assert m.n_vertices == (n + 1) * (n + 2) // 2
    assert len(m.bnd_edges) == 3 * n
    assert abs(m.areas().sum() - 0.25) < 1e-14
    assert (m.areas() > 0).all()


def test_refinement_is_nested():
    d = fem.kite(TriParam(F(1, 4), F(2, 5)))
    m3, m4 = fem.mesh_domain(d, 3), fem.mesh_domain(d, 4)
    assert np.array_equal(m4.vertices[: m3.n_vertices], m3.vertices)
    assert abs(m4.h - m3.h / 2) < 1e-12


def test_side_nodes_are_ordered_along_each_side():
    m = fem.mesh_domain(fem.square(2.0), 3)
    for side in range(4):
        nodes, s = m.side_nodes(side)
        assert len(nodes) == 9
        assert np.all(np.diff(s) > 0) and abs(s[-1] - 2.0) < 1e-12


def test_degenerate_seed_rejected():
    with pytest.raises(ValueError):
        fem.polygon(((0, 0), (1, 0), (2, 0)), [(0, 1, 2)])
    with pytest.raises(ValueError):
        fem.polygon(((0, 0), (0, 1), (1, 0)), [(0, 1, 2)])  # clockwise


def test_triangle_from_angles():
    t = fem.triangle_from_angles(math.pi / 7, 2 * math.pi / 5)
    a, b = float(t.a), float(t.b)
    assert abs(math.atan2(b, a) - math.pi / 7) < 1e-12
    assert abs(math.atan2(b, 1 - a) - 2 * math.pi / 5) < 1e-12


# -- assembly


def test_backends_agree():
    m = fem.mesh_domain(fem.kite(TriParam(F(1, 5), F(1, 3))), 4)
    r1 = _kernels.local_matrices(m.vertices, m.elements, "numpy")
    r2 = _kernels.local_matrices(m.vertices, m.elements, "numba")
    for u, v in zip(r1, r2):
        assert np.allclose(u, v, rtol=1e-13, atol=1e-15)


def test_assembled_matrices():
    m = fem.mesh_domain(fem.square(1.0), 3)
    K, M = fem.assemble(m)
    one = np.ones(m.n_vertices)
    assert abs(one @ M @ one - 1.0) < 1e-13  # area
    assert np.abs(K @ one).max() < 1e-12  # constants are in the kernel
    assert abs(K - K.T).max() < 1e-14


# -- spectra


def test_unit_square_neumann():
    r = fem.solve_neumann(fem.square(1.0), 4, LV)
    assert abs(r.values[0]) < 1e-8
    assert abs(r.values[1] / PI2 - 1) < 1e-3 and abs(r.values[2] / PI2 - 1) < 1e-3
    assert abs(r.values[3] / (2 * PI2) - 1) < 2e-3


def test_equilateral_double_eigenvalue():
    r = fem.solve_neumann(fem.triangle(TriParam(0, S3, SYM)), 3, LV)
    assert abs(r.values[1] / (4 * PI2 / 9) - 1) < 1e-3
    assert abs(r.values[2] / (4 * PI2 / 9) - 1) < 1e-3


def test_mixed_half_equilateral():
    r = fem.solve_mixed(fem.triangle(TriParam(0, S3 / 3)), 0, 1, LV)
    assert abs(r.values[0] / (4 * PI2 / 3) - 1) < 1e-3


def test_right_isosceles_sum():
    r = fem.solve_neumann(fem.triangle(TriParam(0, 1, SYM)), 3, LV)
    assert abs((r.values[1] + r.values[2]) / (1.5 * PI2) - 1) < 1e-3


def test_dirichlet_square():
    r = fem.solve_mixed(fem.square(1.0), [0, 1, 2, 3], 2, LV)
    assert abs(r.values[0] / (2 * PI2) - 1) < 1e-3
    assert abs(r.values[1] / (5 * PI2) - 1) < 5e-3


def test_dense_and_sparse_paths_agree():
    m = fem.mesh_domain(fem.triangle(TriParam(F(1, 4), F(1, 2))), 4)
    K, M = fem.assemble(m)
    w1, v1 = fem.eigensolve(K, M, 4, dense_max=10**6)
    w2, v2 = fem.eigensolve(K, M, 4, dense_max=0)
    assert np.allclose(w1, w2, rtol=1e-9, atol=1e-9)
    assert np.allclose(np.abs(v1[:, 1:]), np.abs(v2[:, 1:]), atol=1e-6)


def test_eigenvectors_are_m_orthonormal():
    r = fem.solve_neumann(fem.mesh_domain(fem.triangle(TriParam(F(1, 5), F(2, 5))), 4), 5)
    _, M = fem.assemble(r.mesh)
    G = r.vectors.T @ (M @ r.vectors)
    assert np.allclose(G, np.eye(5), atol=1e-9)


def test_refinement_decreases_eigenvalues():
    # nested conforming spaces give monotonically decreasing upper bounds
    d = fem.triangle(TriParam(F(1, 5), F(2, 5)))
    vals = [fem.solve_neumann(fem.mesh_domain(d, l), 4).values for l in (2, 3, 4)]
    for c, f in zip(vals, vals[1:]):
        assert np.all(f[1:] <= c[1:] + 1e-10)


def test_scaling_law():
    d = fem.triangle(TriParam(F(1, 5), F(2, 5)))
    r1 = fem.solve_neumann(fem.mesh_domain(d, 4), 3)
    r2 = fem.solve_neumann(fem.mesh_domain(d.scaled(3.0), 4), 3)
    assert np.allclose(r2.values[1:], r1.values[1:] / 9.0, rtol=1e-10)


def test_richardson_error_estimate_is_honest():
    r = fem.solve_neumann(fem.square(1.0), 3, (3, 4))
    assert abs(r.values[1] - PI2) <= 3 * r.errors[1]
    assert sorted(r.per_level) == [3, 4] and r.coarse is not None


# -- symmetry and hot spots


def test_kite_modes_half_and_full_agree():
    t = TriParam(F(1, 4), F(2, 5))
    s1, a1, es, ea = fem.kite_modes(t, LV)
    s2, a2, _, _ = fem.kite_modes(t, LV, full=True)
    assert abs(s1 - s2) <= 3 * es + 1e-8 * s1
    assert abs(a1 - a2) <= 3 * ea + 1e-8 * a1


def test_classify_symmetry_examples():
    r = fem.solve_neumann(fem.kite(TriParam(F(1, 4), F(9, 20))), 4, LV)
    tags = [g.tag for g in fem.classify_symmetry(r)]
    assert tags[:3] == ["symmetric", "symmetric", "antisymmetric"]
    # a rhombus is symmetric about both axes; its double-free low modes are even or odd
    r = fem.solve_neumann(fem.rhombus(F(2, 5)), 3, LV)
    assert all(g.tag in ("symmetric", "antisymmetric") for g in fem.classify_symmetry(r))


def test_classify_symmetry_flags_degenerate_pairs():
    # a square centred on the mirror axis has a double mu_2
    d = fem.polygon(((-1, -1), (1, -1), (1, 1), (-1, 1)), [(0, 1, 2), (0, 2, 3)], "square")
    r = fem.solve_neumann(d, 3, LV)
    tags = [g.tag for g in fem.classify_symmetry(r)]
    assert tags[1] == tags[2] == "degenerate"


def test_mirror_requires_symmetric_mesh():
    m = fem.mesh_domain(fem.triangle(TriParam(F(1, 4), F(1, 2))), 2)
    with pytest.raises(ValueError):
        fem.mirror_permutation(m)


def test_hot_spots_at_vertices_for_small_angle():
    t = fem.triangle_from_angles(math.pi / 7, 2 * math.pi / 5)
    r = fem.solve_neumann(fem.triangle(t), 3, LV)
    h = fem.analyze_hot_spots(r)
    assert h.status == "ok" and h.extrema_at_vertices and h.stable
    assert h.interior_extrema == 0
    assert {h.argmax["corner"], h.argmin["corner"]} <= {0, 1, 2}


def test_hot_spots_refused_on_equilateral():
    r = fem.solve_neumann(fem.triangle(TriParam(0, S3, SYM)), 3, LV)
    h = fem.analyze_hot_spots(r)
    assert h.status == "refused" and not h.extrema_at_vertices


def test_boundary_traces_have_few_critical_points():
    t = fem.triangle_from_angles(math.pi / 9, math.pi / 3)
    r = fem.solve_neumann(fem.triangle(t), 3, LV)
    h = fem.analyze_hot_spots(r)
    assert sum(h.critical_points.values()) <= 1
    rows = list(h.traces[0].rows())
    assert len(rows) == 2**5 + 1


def test_simplicity_gap_examples():
    g = fem.simplicity_gap(TriParam(0, S3, SYM), LV)
    assert abs(g.gap) <= g.error + 1e-9 and not g.significant
    g = fem.simplicity_gap(TriParam(F(3, 10), F(4, 5), SYM), LV)
    assert g.significant and g.gap > 5


def test_crossing_matches_tabulated_curve():
    # tabulated (a, b) points of the boundary where the kite's lowest modes swap
    assert abs(fem.crossing_b(0.25) - 0.53578) < 2e-4


def test_solver_argument_checks():
    d = fem.square(1.0)
    with pytest.raises(ValueError):
        fem.solve_neumann(d, 1)
    with pytest.raises(ValueError):
        fem.solve_mixed(d, [7])
    with pytest.raises(TypeError):
        fem.solve_neumann("square", 2)


def test_result_json_round_trip_fields():
    r = fem.solve_neumann(fem.square(1.0), 3, (2, 3))
    j = r.to_json()
    assert j["levels"] == [2, 3] and len(j["values"]) == 3 and j["kind"] == "neumann"
