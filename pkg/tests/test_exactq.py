import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from hotspots.exactq import (
    PiQuad,
    QSqrt,
    RatInterval,
    format_scalar,
    parse_scalar,
    pi2_enclosure,
    pi_enclosure,
    piquad_range,
    scalar_enclosure,
    scalar_sign,
    sqrt_enclosure,
    sqrt_exact,
)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=40)
surds = st.builds(lambda p, q, d: QSqrt(p, q, d) if q != 0 else p, rats, rats, st.sampled_from([2, 3, 7]))


def _s3(p, q):
    return QSqrt(p, q, 3) if q != 0 else F(p)


qsqrt3 = st.builds(_s3, rats, rats)


@st.composite
def intervals(draw):
    a, b = draw(rats), draw(rats)
    return RatInterval(min(a, b), max(a, b))


# -- QSqrt field laws


@given(qsqrt3, qsqrt3, qsqrt3)
def test_field_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == 0


@given(qsqrt3, qsqrt3)
def test_division_inverts_multiplication(x, y):
    if y == 0:
        return
    assert (x * y) / y == x


@given(qsqrt3)
def test_sign_matches_float(x):
    s = scalar_sign(x)
    v = float(x)
    if abs(v) > 1e-9:
        assert s == (1 if v > 0 else -1)


def test_zero_collapses_to_fraction():
    r = QSqrt(1, 2, 3) - QSqrt(1, 2, 3)
    assert isinstance(r, F) and r == 0
    assert QSqrt(0, 1, 3) * QSqrt(0, 1, 3) == 3


def test_squarefree_normalization():
    assert QSqrt(0, 1, 12) == QSqrt(0, 2, 3)
    with pytest.raises(ValueError):
        QSqrt(0, 1, 9)
    with pytest.raises(ValueError):
        QSqrt(0, 1, 2) + QSqrt(0, 1, 3)


def test_sqrt_exact():
    assert sqrt_exact(F(9, 4)) == F(3, 2)
    assert sqrt_exact(0) == 0
    assert sqrt_exact(F(3, 4)) == QSqrt(0, F(1, 2), 3)


# -- intervals


@given(intervals(), intervals(), rats, rats)
def test_interval_ops_contain_pointwise_results(x, y, s, t):
    # pick members by clamping
    u = min(max(s, x.lo), x.hi)
    v = min(max(t, y.lo), y.hi)
    assert (x + y).contains(u + v)
    assert (x - y).contains(u - v)
    assert (x * y).contains(u * v)
    assert x.sqr().contains(u * u)
    if not (y.lo <= 0 <= y.hi):
        assert (x / y).contains(u / v)


def test_interval_rejects_empty_and_zero_division():
    with pytest.raises(ValueError):
        RatInterval(1, 0)
    with pytest.raises(ZeroDivisionError):
        RatInterval(1, 2) / RatInterval(-1, 1)


# -- pi and square roots


@pytest.mark.parametrize("bits", [8, 20, 64, 128])
def test_pi2_enclosure_width_and_containment(bits):
    e = pi2_enclosure(bits)
    assert e.width <= F(1, 2**bits)
    assert float(e.lo) - 1e-15 <= math.pi**2 <= float(e.hi) + 1e-15
    p = pi_enclosure(bits)
    assert p.width <= F(1, 2**bits)
    assert F(3141592653589793, 10**15) - F(1, 10**15) <= p.hi and p.lo <= F(3141592653589794, 10**15)


def test_pi2_enclosures_nest():
    prev = pi2_enclosure(8)
    for bits in (12, 20, 40, 96, 160):
        cur = pi2_enclosure(bits)
        assert cur.subset_of(prev)
        prev = cur


def test_pi2_matches_known_digits():
    # pi^2 = 9.8696044010893586188344909998761511353...
    ref = F(98696044010893586188344909998761511353, 10**37)
    e = pi2_enclosure(100)
    assert e.lo <= ref + F(1, 10**37) and ref - F(1, 10**37) <= e.hi


@pytest.mark.parametrize("v", [3, 2, F(7, 5)])
def test_sqrt_enclosure(v):
    e = sqrt_enclosure(v, 40)
    assert e.lo * e.lo <= v <= e.hi * e.hi
    assert e.width <= F(1, 2**40)


def test_sqrt_enclosure_exact_cases():
    assert sqrt_enclosure(0, 10) == RatInterval(0, 0)
    assert sqrt_enclosure(F(9, 4), 10) == RatInterval(F(3, 2), F(3, 2))


def test_scalar_enclosure_of_surd():
    x = QSqrt(1, F(-1, 2), 3)
    e = scalar_enclosure(x, 60)
    assert e.contains(F(1) - F(1, 2) * sqrt_enclosure(3, 80).mid)
    assert e.width < F(1, 2**58)


# -- quadratics in pi^2


def test_piquad_range_examples():
    t = pi2_enclosure(64)
    assert piquad_range(PiQuad(F(5)), t) == RatInterval(5, 5)
    r = piquad_range(PiQuad(F(0), F(1)), t)
    assert r == t
    # vertex of (t - 10)^2 lies outside the enclosure, so endpoints decide
    r = piquad_range(PiQuad(F(100), F(-20), F(1)), t)
    assert r.contains((t.mid - 10) ** 2)
    # a vertex inside the range is included
    wide = RatInterval(9, 11)
    assert piquad_range(PiQuad(F(100), F(-20), F(1)), wide).lo == 0


def test_piquad_range_contains_random_points():
    rng = random.Random(3)
    t = RatInterval(F(9), F(11))
    for _ in range(100):
        q = PiQuad(*(F(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(3)))
        r = piquad_range(q, t)
        x = F(9) + F(rng.randint(0, 1000), 500)
        assert r.contains(q.c0 + q.c1 * x + q.c2 * x * x)


def test_piquad_with_surd_coefficients():
    q = PiQuad(QSqrt(0, 1, 3), F(1))
    r = piquad_range(q, pi2_enclosure(64))
    v = math.sqrt(3) + math.pi**2
    assert float(r.lo) - 1e-12 <= v <= float(r.hi) + 1e-12
    assert r.width < F(1, 2**60)


def test_piquad_degree_overflow():
    with pytest.raises(ValueError):
        PiQuad(F(0), F(0), F(1)) * PiQuad(F(0), F(1))


# -- text form


@given(surds)
def test_scalar_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


def test_parse_scalar_rejects_garbage():
    for s in ("1.5", "sqrt(3)", "1/2*sqrt(3)+", ""):
        with pytest.raises(ValueError):
            parse_scalar(s)
