"""Closed-form eigenvalue bounds for triangles and their parameter regions.

Two placements of a triangle are used:

``unit``
    vertices ``(0,0), (1,0), (a,b)`` with ``0 <= a <= 1/2`` and
    ``(1-a)**2 + b**2 <= 1`` (longest side on the x-axis).
``sym``
    vertices ``(-1,0), (1,0), (a,b)`` with ``a >= 0``, ``a**2 + b**2 >= 1`` and
    ``(a+1)**2 + b**2 <= 4``.

:func:`to_sym` and :func:`to_unit` convert between them.  The map doubles
lengths, so eigenvalues in the ``sym`` placement are a quarter of those in the
``unit`` placement.

All bounds return :class:`RatInterval` enclosures computed from a rational
enclosure of pi**2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactq import (
    PiQuad,
    QSqrt,
    RatInterval,
    as_exact,
    pi2_enclosure,
    piquad_range,
    scalar_enclosure,
    sqrt_enclosure,
)

__all__ = [
    "TriParam",
    "RegionFlags",
    "to_sym",
    "to_unit",
    "EIGEN_SCALE_UNIT_TO_SYM",
    "u1",
    "u2",
    "hooker_protter",
    "mu_a_lower",
    "mu2_upper_lemma",
    "mu2_lemma_margin",
    "kite_upper_ABC",
    "region_classify",
    "invert_isosceles",
    "in_gray_region",
    "chain_holds",
    "A_COEFFS",
    "B_COEFFS",
    "C_COEFFS",
    "P_COEFFS",
    "Q_COEFFS",
    "D_COEFFS",
    "K8_COEFFS",
]

UNIT = "unit"
SYM = "sym"
EIGEN_SCALE_UNIT_TO_SYM = Fraction(1, 4)

F = Fraction


def _pq(c0=0, c1=0, c2=0) -> PiQuad:
    return PiQuad(F(c0), F(c1), F(c2))


# Polynomials in a, lowest degree first; entries are c0 + c1*pi^2 + c2*pi^4.
C_COEFFS = (
    _pq(0, 25200),
    _pq(12 * 72429, -12 * 8400),
    _pq(-12 * 182346, 12 * 15400),
    _pq(12 * 74976, -12 * 5600),
    _pq(0, 67200),
)
B_COEFFS = (
    _pq(0, 127575, 16800),
    _pq(0, 784800, -67200),
    _pq(0, -1867740, 168000),
    _pq(0, 650880, -134400),
    _pq(0, 0, 134400),
)
A_COEFFS = (
    _pq(0, -42525, 5600),
    _pq(0, 227938, -22400),
    _pq(0, -924757, 89600),
    _pq(0, 2105752, -235200),
    _pq(0, -2518620, 369600),
    _pq(0, 650880, -268800),
    _pq(0, 0, 134400),
)
# (12 B - 7 pi^2 C) / (12 pi^2)
D_COEFFS = (
    _pq(127575, 2100),
    _pq(277797, -8400),
    _pq(-591318, 60200),
    _pq(126048, -95200),
    _pq(0, 95200),
)
Q_COEFFS = (
    _pq(0, 2100),
    _pq(72429, -8400),
    _pq(2 * -91173, 2 * 7700),
    _pq(74976, -5600),
    _pq(0, 5600),
)
P_COEFFS = (
    _pq(525 * 347, 525 * 80),
    _pq(-8 * 44211, -8 * 2450),
    _pq(480 * 2682, -480 * 665),
    _pq(-2869464, 868000),
    _pq(504192, -761600),
    _pq(0, 380800),
)
# degree-8 polynomial left after removing the double root at a = 1/2 and
# substituting a -> 1/2 - a; must be <= 0 on [0, 1/2]
K8_COEFFS = (
    _pq(0, -36985183200, 3669120000),
    _pq(-1418249685780, 311172170400, -20603520000),
    _pq(4864275678312, -1107844970400, 70309120000),
    _pq(-1682712947520, 1404232972800, -139740160000),
    _pq(-3554482258800, -300435206400, 121433760000),
    _pq(-1352162962944, 582294182400, -149461760000),
    _pq(63552393216, -34277644800, 83354880000),
    _pq(0, -95998156800, -46412800000),
    _pq(0, 0, 36252160000),
)


@dataclass(frozen=True)
class TriParam:
    """Apex ``(a, b)`` of a triangle in one of the two placements."""

    a: object
    b: object
    convention: str = UNIT

    def __post_init__(self):
        # floats are taken at their exact binary value
        for k in ("a", "b"):
            v = getattr(self, k)
            object.__setattr__(self, k, Fraction(v) if isinstance(v, float) else as_exact(v))
        if self.convention not in (UNIT, SYM):
            raise ValueError(f"unknown convention {self.convention!r}")

    def admissible(self) -> bool:
        a, b = self.a, self.b
        if not b > 0:
            return False
        if self.convention == UNIT:
            return a >= 0 and a <= F(1, 2) and (1 - a) ** 2 + b * b <= 1
        return a >= 0 and a * a + b * b >= 1 and (a + 1) ** 2 + b * b <= 4

    def vertices(self) -> tuple[tuple[float, float], ...]:
        a, b = float(self.a), float(self.b)
        if self.convention == UNIT:
            return ((0.0, 0.0), (1.0, 0.0), (a, b))
        return ((-1.0, 0.0), (1.0, 0.0), (a, b))


def to_sym(t: TriParam) -> TriParam:
    """Unit placement -> symmetric placement via ``x -> 1 - 2x``, ``y -> 2y``.

    The reflection keeps the apex abscissa nonnegative.  Lengths double, so
    eigenvalues scale by 1/4.
    """
    if t.convention != UNIT:
        raise ValueError("expected a unit-placement triangle")
    return TriParam(1 - 2 * t.a, 2 * t.b, SYM)


def to_unit(t: TriParam) -> TriParam:
    if t.convention != SYM:
        raise ValueError("expected a symmetric-placement triangle")
    return TriParam((1 - t.a) / 2, t.b / 2, UNIT)


def _iv(x, bits: int) -> RatInterval:
    return scalar_enclosure(x, bits + 32)


def _isqrt(x: RatInterval, bits: int) -> RatInterval:
    if x.lo < 0:
        raise ValueError("square root of an interval reaching below zero")
    return RatInterval(sqrt_enclosure(x.lo, bits).lo, sqrt_enclosure(x.hi, bits).hi)


def _horner(coeffs, a: RatInterval, t: RatInterval) -> RatInterval:
    acc = RatInterval.point(0)
    for c in reversed(coeffs):
        cv = RatInterval.point(c.c0) + t * (RatInterval.point(c.c1) + t * RatInterval.point(c.c2))
        acc = acc * a + cv
    return acc


def _need(t: TriParam, conv: str):
    if t.convention != conv:
        raise ValueError(f"expected a {conv}-placement triangle, got {t.convention}")


def u1(t: TriParam, bits: int = 96) -> RatInterval:
    """Upper bound for mu_2 from the transplanted equilateral symmetric mode (sym placement)."""
    _need(t, SYM)
    if not t.b > 0:
        raise ValueError("b must be positive")
    p = pi2_enclosure(bits)
    a, b = _iv(t.a, bits), _iv(t.b, bits)
    r2 = a.sqr() + b.sqr()
    num = p * 64 * (r2 + 3) + (r2 - a * 6 - 3) * 243
    return num / (b.sqr() * 288)


def u2(t: TriParam, bits: int = 96) -> RatInterval:
    """Upper bound 18/(a^2+3) from the linear test function x + a/3 (sym placement)."""
    _need(t, SYM)
    a = _iv(t.a, bits)
    return RatInterval.point(18) / (a.sqr() + 3)


def hooker_protter(h, bits: int = 96) -> RatInterval:
    """Lower bound pi^2 (1+2h) / (4 h^2) for the first Dirichlet eigenvalue of a rhombus.

    The rhombus has side 1 and inradius-type parameter ``h = sqrt(c - c^2)``,
    i.e. half-diagonals ``sqrt(c)`` and ``sqrt(1-c)``.
    """
    h = as_exact(h)
    if not h > 0:
        raise ValueError("h must be positive")
    if h > F(1, 2):
        raise ValueError("h must not exceed 1/2")
    hv = _iv(h, bits)
    return pi2_enclosure(bits) * (hv * 2 + 1) / (hv.sqr() * 4)


def rhombus_half_diagonals(h) -> tuple[float, float]:
    """Half-diagonals ``(sqrt(1-c), sqrt(c))`` with ``c = (1 - sqrt(1-4h^2))/2``."""
    h = float(as_exact(h))
    c = (1 - (1 - 4 * h * h) ** 0.5) / 2
    return ((1 - c) ** 0.5, c**0.5)


def mu_a_lower(t: TriParam, bits: int = 96) -> RatInterval:
    """Lower bound for the antisymmetric kite eigenvalue (unit placement).

    Valid under the kite condition ``3 b^2 <= 1 - a + a^2`` and ``a <= 1/2``:
    ``pi^2 (3 + 7 d + 6 a sqrt(3 - 4a)) / (12 b^2)`` with ``d = a^2 + b^2 - a``.
    """
    _need(t, UNIT)
    a, b = t.a, t.b
    if not (3 * b * b <= 1 - a + a * a):
        raise ValueError("kite condition 3b^2 <= 1 - a + a^2 violated")
    if a > F(1, 2) or a < 0:
        raise ValueError("need 0 <= a <= 1/2")
    av, bv = _iv(a, bits), _iv(b, bits)
    d = av.sqr() + bv.sqr() - av
    root = _isqrt(3 - av * 4, bits + 8)
    return pi2_enclosure(bits) * (d * 7 + 3 + av * root * 6) / (bv.sqr() * 12)


def mu2_upper_lemma(t: TriParam, bits: int = 96) -> RatInterval:
    """Upper bound for mu_2 from two transplanted right-isosceles modes (unit placement)."""
    _need(t, UNIT)
    av, bv = _iv(t.a, bits), _iv(t.b, bits)
    p = pi2_enclosure(bits)
    c = av * (av - 1)
    b2 = bv.sqr()
    num = p * (c * (b2 + c + 2) * 2 + b2 + 1) - c * (b2 + c) * 16
    return num / ((c * 3 + 1) * b2 * 2)


def mu2_lemma_margin(t: TriParam, bits: int = 96) -> RatInterval:
    """Enclosure of ``pi^2/b^2 - mu2_upper_lemma`` computed exactly in ``pi^2``.

    The difference is ``(alpha pi^2 + beta) / (2 (3c+1) b^2)`` with ``c = a(a-1)``
    and rational ``alpha, beta``, so points of equality give exactly zero.
    """
    _need(t, UNIT)
    a, b = t.a, t.b
    if not b > 0:
        raise ValueError("b must be positive")
    c = a * (a - 1)
    b2 = b * b
    den = 2 * (3 * c + 1) * b2
    if not den > 0:
        raise ValueError("need 3 a (a-1) + 1 > 0")
    alpha = 2 * (3 * c + 1) - 2 * c * (b2 + c + 2) - b2 - 1
    beta = 16 * c * (b2 + c)
    num = piquad_range(PiQuad(beta, alpha), pi2_enclosure(bits), bits + 64)
    return num / scalar_enclosure(den, bits + 32)


def kite_upper_ABC(t: TriParam, bits: int = 96) -> RatInterval:
    """Upper bound (A + B b^2) / (C b^2) for mu_2 from three transplanted modes."""
    _need(t, UNIT)
    av, bv = _iv(t.a, bits), _iv(t.b, bits)
    p = pi2_enclosure(bits)
    A = _horner(A_COEFFS, av, p)
    B = _horner(B_COEFFS, av, p)
    C = _horner(C_COEFFS, av, p)
    if C.lo <= 0:
        raise ValueError("sign of C(a) is not established")
    b2 = bv.sqr()
    return (A + B * b2) / (C * b2)


def chain_holds(t: TriParam, bits: int = 96) -> bool:
    """True when mu_a_lower > kite_upper_ABC holds as an interval comparison."""
    return mu_a_lower(t, bits).lo > kite_upper_ABC(t, bits).hi


@dataclass(frozen=True)
class RegionFlags:
    kite_sym: bool
    mu_cond: bool
    acute: bool
    small_angle: bool
    small_angle_pi4: bool

    def as_dict(self) -> dict:
        return {
            "kite_sym": self.kite_sym,
            "mu_cond": self.mu_cond,
            "acute": self.acute,
            "small_angle": self.small_angle,
            "small_angle_pi4": self.small_angle_pi4,
        }


def region_classify(t: TriParam) -> RegionFlags:
    """Exact region flags for a unit-placement apex.

    The angle at ``(1,0)`` has tangent ``b/(1-a)``; comparing with
    ``tan(pi/6) = 1/sqrt(3)`` gives ``3 b^2 <= (1-a)^2`` and with ``tan(pi/4)``
    gives ``b <= 1 - a``.
    """
    _need(t, UNIT)
    a, b = t.a, t.b
    one_minus = 1 - a
    return RegionFlags(
        kite_sym=3 * b * b <= 1 - a + a * a,
        mu_cond=b * b <= a * a + one_minus * one_minus,
        acute=a * a + b * b > a,
        small_angle=one_minus > 0 and 3 * b * b <= one_minus * one_minus,
        small_angle_pi4=one_minus > 0 and b <= one_minus,
    )


def in_gray_region(t: TriParam, strict: bool = False) -> bool:
    """Kite condition plus acuteness, ``0 <= a <= 1/2``."""
    a, b = t.a, t.b
    if strict:
        return 0 < a < F(1, 2) and 3 * b * b < 1 - a + a * a and a * a + b * b > a
    return 0 <= a <= F(1, 2) and 3 * b * b <= 1 - a + a * a and a * a + b * b >= a and b > 0


def invert_isosceles(t: TriParam) -> TriParam:
    """Inversion in the circle ``(a-1)^2 + b^2 = 1``.

    ``p -> (1,0) + (p - (1,0)) / |p - (1,0)|^2``.  The image describes the same
    triangle with the base and the side through ``(1,0)`` exchanged, rescaled
    so the new base has length 1.
    """
    _need(t, UNIT)
    if not t.b > 0:
        raise ValueError("b must be positive")
    dx = t.a - 1
    r2 = dx * dx + t.b * t.b
    return TriParam(1 + dx / r2, t.b / r2, UNIT)


def side_lengths_sq(t: TriParam) -> tuple:
    """Squared side lengths (base, from (0,0) to apex, from (1,0) to apex)."""
    _need(t, UNIT)
    a, b = t.a, t.b
    return (F(1), a * a + b * b, (a - 1) ** 2 + b * b)
