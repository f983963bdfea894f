import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from _gen import counterexamples, random_poly, random_rect
from hotspots.certifier import (
    CORNERS,
    Certificate,
    FoldPass,
    Rect,
    Split,
    Tactic,
    TacticError,
    anchor,
    apply_tactics,
    certify_nonpos,
    check_certificate,
    eliminate_linear_param,
    fold_bound,
    fold_value,
    iter_leaves,
    tactic_drop_term,
)
from hotspots.exactq import QSqrt
from hotspots.poly import Poly2

x, y = Poly2.var("x"), Poly2.var("y")
a = Poly2.var("a", ("a", "_"))


# -- hand-executed fold values


def test_fold_constant():
    assert fold_bound(Poly2.const(-1), 1, 1).hi == -1


def test_fold_x_minus_one_unit_square():
    # rows [[-1],[1]]: top row 1, then max(1,0)*1 - 1 = 0
    assert fold_bound(x - 1, 1, 1).hi == 0


def test_fold_y_minus_one_tall_box():
    # one row [-1, 1]: o0 = -1, o1 = -1/2 + 1
    assert fold_bound(y - 1, 1, 2).hi == F(1, 2)


def test_fold_x():
    assert fold_bound(x, 1, 1).hi == 1


def test_fold_value_matches_hand_run():
    # p = (1 - 3y) + x(-2 + y) on [0,1] x [0,1/2]
    # row x^1: scan [-2, -2/(1/2) + 1] = [-2, -3]
    # row x^0: [0*1 + 1, 0*1 - 3] = [1, -3], scan [1, -3]; bound 1
    rows = [[F(1), F(-3)], [F(-2), F(1)]]
    assert fold_value(rows, F(1), F(1, 2)) == 1
    # with dy = 1/4 the negative carry is stronger but the constant still wins
    assert fold_value([[F(-1), F(3)]], F(1), F(1, 4)) == F(-1)


def test_fold_rejects_zero_area():
    with pytest.raises(ValueError):
        fold_bound(x, 0, 1)
    with pytest.raises(ValueError):
        fold_bound(x + y, 1, 0)


@given(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=4, max_size=4),
       st.integers(0, 3), st.fractions(0, 3, max_denominator=4))
def test_fold_monotone_in_coefficients(cs, k, bump):
    rows = [cs[:2], cs[2:]]
    bumped = [list(r) for r in rows]
    bumped[k // 2][k % 2] += bump
    assert fold_value(bumped, F(1), F(1)) >= fold_value(rows, F(1), F(1))


@given(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=6, max_size=6),
       st.fractions(F(1, 4), 2, max_denominator=4), st.fractions(F(1, 4), 2, max_denominator=4))
def test_fold_monotone_in_box(cs, dx, dy):
    rows = [cs[:3], cs[3:]]
    assert fold_value(rows, dx, dy) <= fold_value(rows, dx * 2, dy)
    assert fold_value(rows, dx, dy) <= fold_value(rows, dx, dy * 2)


# -- certification


def test_certify_examples():
    unit = Rect(0, 0, 1, 1)
    c = certify_nonpos(x - 1, unit)
    assert c.ok and not c.strict
    assert not certify_nonpos(x, unit).ok
    tall = Rect(0, 0, 1, 2)
    u = certify_nonpos(y - 1, tall, 6)
    assert not u.ok and u.worst is not None
    assert certify_nonpos(Poly2.const(-1), unit).strict


def test_equality_at_far_corner_uses_reflected_anchor():
    # 1 - x vanishes only at x = 1; the corner at x = 1 certifies it in one leaf
    c = certify_nonpos(x - 1, Rect(F(1, 2), 0, F(1, 2), 1), 0)
    assert c.ok
    c2 = certify_nonpos(-x + F(1, 2), Rect(F(1, 2), 0, F(1, 2), 1), 0)
    assert c2.ok


def test_bisection_needed():
    # (x - 1/2)^2 - 1 <= 0 on [0,1] needs no split, but x(1-x) - 1/4 does near 1/2
    p = -(x - F(1, 2)) ** 2 - F(1, 100)
    c = certify_nonpos(p, Rect.interval(0, 1), 12)
    assert c.ok and isinstance(c.root, Split)


def test_certify_surd_rectangle():
    s3 = QSqrt(0, 1, 3)
    c = certify_nonpos(x * x - 3, Rect.from_bounds(0, s3, 0, 1), 8)
    assert c.ok
    assert not certify_nonpos(x * x - 3, Rect.from_bounds(0, s3 + F(1, 100), 0, 1), 8).ok


def test_soundness_random_polynomials():
    rng = random.Random(11)
    certified = 0
    for _ in range(60):
        p, r = random_poly(rng), random_rect(rng)
        c = certify_nonpos(p, r, 8)
        if c.ok:
            certified += 1
            assert not counterexamples(p, r, n_grid=9, n_random=40)
    assert certified > 10


def test_subrect_sharing_the_anchor_also_folds():
    rng = random.Random(5)
    seen = 0
    for _ in range(60):
        p, r = random_poly(rng), random_rect(rng)
        leaf = certify_nonpos(p, r, 0)
        if not leaf.ok:
            continue
        seen += 1
        sx, sy = CORNERS[leaf.root.corner]
        hx, hy = r.dx / 2, r.dy / 2
        sub = Rect(r.x0 if sx > 0 else r.x0 + hx, r.y0 if sy > 0 else r.y0 + hy, hx, hy)
        q = anchor(p, sub, leaf.root.corner).collapse(96)
        assert fold_bound(q, sub.dx, sub.dy).hi <= 0
    assert seen > 5


# -- tactics


def test_drop_accepts_nonpositive_and_rejects_positive():
    p = -a**3 + a - 2
    q, st_ = tactic_drop_term(p, "a", 3)
    assert q == a - 2 and st_.kind == "drop"
    with pytest.raises(TacticError):
        tactic_drop_term(p, "a", 1)
    with pytest.raises(TacticError):
        tactic_drop_term(p, "a", 5)


def test_replace_power_script():
    # a^2 <= a/2 on [0, 1/2], so a^2 + a - 1 <= (3/2) a - 1 <= -1/4
    script = [[Tactic("replace", "a", 2, a * F(1, 2), label="a^2 -> a/2")]]
    c, hist = apply_tactics(a * a + a - 1, Rect.interval(0, F(1, 2)), script)
    assert c.ok and c.strict
    assert hist[-1] == a * F(3, 2) - 1
    assert check_certificate(c.dumps()).ok


def test_replace_rejected_when_side_condition_false():
    script = [[Tactic("replace", "a", 2, a * F(1, 4))]]
    c, _ = apply_tactics(a * a - 1, Rect.interval(0, 1), script)
    assert not c.ok and "side condition" in c.error


def test_replace_rejected_for_negative_coefficient():
    script = [[Tactic("replace", "a", 2, a)]]
    c, _ = apply_tactics(-a * a - 1, Rect.interval(0, 1), script)
    assert not c.ok and "nonnegative" in c.error


def test_tactics_refuse_negative_domain():
    # -a - 3/2 is positive at a = -2; dropping -a there would be unsound
    c, _ = apply_tactics(-a - F(3, 2), Rect.interval(-2, -1), [[Tactic("drop", "a", 1)]])
    assert not c.ok and "nonnegative quadrant" in c.error


def test_eliminate_linear_param():
    p0 = x - 1
    p1 = y
    lo, hi = eliminate_linear_param([p0, p1], 0, 1)
    assert lo == x - 1 and hi == x + y - 1
    with pytest.raises(ValueError):
        eliminate_linear_param([p0, p1, x], 0, 1)
    lo, hi = eliminate_linear_param([p0, p1, Poly2.zero()], F(-1, 2), F(1, 2))
    assert lo == x - y * F(1, 2) - 1
    with pytest.raises(ValueError):
        eliminate_linear_param([p0, p1], 1, 0)


# -- certificates and the checker


def _cert():
    p = -(x - F(1, 2)) ** 2 - y * y - F(1, 100) + x * y * F(1, 10)
    c = certify_nonpos(p, Rect.from_bounds(0, 1, 0, 1), 10)
    assert c.ok and len(c.leaves()) > 1
    return c


def test_json_round_trip():
    c = _cert()
    d = json.loads(c.dumps())
    c2 = Certificate.from_json(d)
    assert c2.dumps() == c.dumps()
    assert c2.poly == c.poly and c2.rect == c.rect


def test_checker_accepts_and_counts_leaves():
    c = _cert()
    res = check_certificate(c.dumps())
    assert res.ok and res.leaves == len(c.leaves())


def _fold_nodes(d):
    if d.get("node") == "fold":
        yield d
    for ch in d.get("children", []):
        yield from _fold_nodes(ch)


def test_checker_rejects_each_mutated_leaf():
    c = _cert()
    base = json.loads(c.dumps())
    n = len(list(_fold_nodes(base["root"])))
    for k in range(n):
        d = json.loads(c.dumps())
        node = list(_fold_nodes(d["root"]))[k]
        lo, hi = (F(s) for s in node["bound"])
        node["bound"] = [f"{lo.numerator}/{lo.denominator}", f"{(hi - F(1, 10**6)).numerator}/{(hi - F(1, 10**6)).denominator}"]
        assert not check_certificate(d).ok


def test_checker_rejects_gaps_and_wrong_polynomial():
    c = _cert()
    d = json.loads(c.dumps())
    # shift the split point so children no longer tile
    root = d["root"]
    assert root["node"] == "split"
    root["at"] = "1/3"
    assert not check_certificate(d).ok
    d = json.loads(c.dumps())
    d["poly"]["coeffs"][0][0] = ["1/1", "0/1", "0/1"]
    assert not check_certificate(d).ok
    assert not check_certificate({"kind": "certificate"}).ok


def test_checker_rejects_truncated_side_condition():
    script = [[Tactic("replace", "a", 2, a * F(1, 2))]]
    c, _ = apply_tactics(a * a + a - 1, Rect.interval(0, F(1, 2)), script)
    d = json.loads(c.dumps())
    d["rect"] = ["0/1", "0/1", "1/1", "0/1"]  # claim [0, 1] while the side proof covers [0, 1/2]
    assert not check_certificate(d).ok


def test_unknown_is_not_checkable():
    u = certify_nonpos(x, Rect(0, 0, 1, 1), 2)
    assert not u.ok
    assert not check_certificate(u.dumps()).ok


def test_leaf_iteration_covers_rectangle():
    c = _cert()
    area = sum(l.rect.dx * l.rect.dy for l in iter_leaves(c.root))
    assert area == 1
    assert all(isinstance(l, FoldPass) for l in iter_leaves(c.root))
