"""Exact rationals, rational-endpoint intervals and enclosures of pi^2 and square roots.

Rationals are :class:`fractions.Fraction`.  Two exact extensions are layered on
top of them:

* :class:`QSqrt` -- numbers ``p + q*sqrt(d)`` for one square-free ``d``, used
  when a substitution such as ``b -> sqrt(3) - b`` must keep an equality point
  exactly at the origin of a rectangle.
* :class:`PiQuad` -- quadratics ``c0 + c1*t + c2*t**2`` in ``t = pi**2``.

Irrational values only ever become intervals through :func:`pi2_enclosure`
and :func:`sqrt_enclosure`, both of which are self-certifying.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "Fraction",
    "QSqrt",
    "RatInterval",
    "PiQuad",
    "as_exact",
    "scalar_enclosure",
    "scalar_sign",
    "upper_rational",
    "lower_rational",
    "pi_enclosure",
    "pi2_enclosure",
    "sqrt_enclosure",
    "sqrt_exact",
    "piquad_range",
    "format_scalar",
    "parse_scalar",
    "DEFAULT_CAP_BITS",
]

DEFAULT_CAP_BITS = 192


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (k, d) with n == k*k*d and d square-free (n > 0)."""
    k, d = 1, 1
    p = 2
    m = n
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        if m % p == 0:
            m //= p
            d *= p
        p += 1 if p == 2 else 2
    return k, d * m


# ---------------------------------------------------------------------------
# Quadratic surds


class QSqrt:
    """Exact number ``p + q*sqrt(d)`` with rational ``p, q`` and square-free ``d > 1``.

    Arithmetic with plain rationals is supported on both sides.  Results whose
    surd part vanishes collapse back to :class:`Fraction`, so zero is always
    ``Fraction(0)``.  Mixing different radicands raises ``ValueError``.
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, p, q, d: int):
        self.p = _q(p)
        self.q = _q(q)
        d = int(d)
        if d < 2:
            raise ValueError("radicand must be >= 2")
        k, sf = _squarefree_split(d)
        if sf == 1:
            raise ValueError(f"{d} is a perfect square")
        self.q *= k
        self.d = sf

    @staticmethod
    def _make(p: Fraction, q: Fraction, d: int):
        if q == 0:
            return p
        r = QSqrt.__new__(QSqrt)
        r.p, r.q, r.d = p, q, d
        return r

    def _other(self, o):
        if isinstance(o, QSqrt):
            if o.d != self.d:
                raise ValueError(f"cannot mix sqrt({self.d}) and sqrt({o.d})")
            return o.p, o.q
        if isinstance(o, (int, Fraction)):
            return Fraction(o), Fraction(0)
        return None

    def __add__(self, o):
        v = self._other(o)
        if v is None:
            return NotImplemented
        return QSqrt._make(self.p + v[0], self.q + v[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt._make(-self.p, -self.q, self.d)

    def __sub__(self, o):
        v = self._other(o)
        if v is None:
            return NotImplemented
        return QSqrt._make(self.p - v[0], self.q - v[1], self.d)

    def __rsub__(self, o):
        v = self._other(o)
        if v is None:
            return NotImplemented
        return QSqrt._make(v[0] - self.p, v[1] - self.q, self.d)

    def __mul__(self, o):
        v = self._other(o)
        if v is None:
            return NotImplemented
        p2, q2 = v
        return QSqrt._make(
            self.p * p2 + self.q * q2 * self.d, self.p * q2 + self.q * p2, self.d
        )

    __rmul__ = __mul__

    def conj(self):
        return QSqrt._make(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.d

    def __truediv__(self, o):
        v = self._other(o)
        if v is None:
            return NotImplemented
        if v[1] == 0:
            if v[0] == 0:
                raise ZeroDivisionError("division by zero")
            return QSqrt._make(self.p / v[0], self.q / v[0], self.d)
        den = QSqrt._make(v[0], v[1], self.d)
        return self * den.conj() / den.norm()

    def __rtruediv__(self, o):
        v = self._other(o)
        if v is None:
            return NotImplemented
        return QSqrt._make(v[0], v[1], self.d) * self.conj() / self.norm()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out, base = Fraction(1), self
        while n:
            if n & 1:
                out = base * out
            n >>= 1
            if n:
                base = base * base
        return out

    def sign(self) -> int:
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sp == sq or sp == 0:
            return sq
        if sq == 0:
            return sp
        # opposite signs: compare p^2 with q^2 d
        a2, b2 = self.p * self.p, self.q * self.q * self.d
        if a2 == b2:  # impossible for square-free d > 1, kept for safety
            return 0
        return sp if a2 > b2 else sq

    def _cmp(self, o):
        diff = self - o
        return diff.sign() if isinstance(diff, QSqrt) else (diff > 0) - (diff < 0)

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def __eq__(self, o):
        if isinstance(o, QSqrt):
            return (self.p, self.q, self.d) == (o.p, o.q, o.d)
        return False  # a QSqrt always has q != 0

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def __repr__(self):
        return f"QSqrt({self.p}, {self.q}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def as_exact(x):
    """Coerce ints and strings to Fraction; pass Fraction/QSqrt through."""
    if isinstance(x, (Fraction, QSqrt)):
        return x
    if isinstance(x, (int, str, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def scalar_sign(x) -> int:
    if isinstance(x, QSqrt):
        return x.sign()
    return (x > 0) - (x < 0)


def sqrt_exact(v, d_hint: int | None = None):
    """Exact square root of a nonnegative rational as Fraction or QSqrt."""
    v = _q(v)
    if v < 0:
        raise ValueError("square root of a negative number")
    if v == 0:
        return Fraction(0)
    n = v.numerator * v.denominator
    k, d = _squarefree_split(n)
    if d == 1:
        return Fraction(k, v.denominator)
    return QSqrt._make(Fraction(0), Fraction(k, v.denominator), d)


# ---------------------------------------------------------------------------
# Intervals


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


@dataclass(frozen=True, slots=True)
class RatInterval:
    """Closed interval with rational endpoints; arithmetic is exact and outward."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", _q(self.lo))
        if not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", _q(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "RatInterval":
        x = _q(x)
        return cls(x, x)

    @staticmethod
    def coerce(x) -> "RatInterval":
        if isinstance(x, RatInterval):
            return x
        if isinstance(x, QSqrt):
            raise TypeError("enclose QSqrt values explicitly with scalar_enclosure")
        return RatInterval.point(x)

    # -- arithmetic
    def __add__(self, o):
        if not isinstance(o, RatInterval):
            if isinstance(o, (int, Fraction)):
                return RatInterval(self.lo + o, self.hi + o)
            return NotImplemented
        return RatInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, o):
        if not isinstance(o, RatInterval):
            if isinstance(o, (int, Fraction)):
                return RatInterval(self.lo - o, self.hi - o)
            return NotImplemented
        return RatInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, o):
        if isinstance(o, (int, Fraction)):
            return RatInterval(o - self.hi, o - self.lo)
        return NotImplemented

    def __mul__(self, o):
        if not isinstance(o, RatInterval):
            if isinstance(o, (int, Fraction)):
                return RatInterval(self.lo * o, self.hi * o) if o >= 0 else RatInterval(self.hi * o, self.lo * o)
            return NotImplemented
        if self.lo == self.hi:
            return o * self.lo
        if o.lo == o.hi:
            return self * o.lo
        if self.lo >= 0 and o.lo >= 0:
            return RatInterval(self.lo * o.lo, self.hi * o.hi)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RatInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = RatInterval.coerce(o)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError(f"division by interval containing zero {o}")
        return self * RatInterval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, o):
        return RatInterval.coerce(o) / self

    def sqr(self) -> "RatInterval":
        if self.lo >= 0:
            return RatInterval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return RatInterval(self.hi * self.hi, self.lo * self.lo)
        return RatInterval(Fraction(0), max(self.lo * self.lo, self.hi * self.hi))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return RatInterval.point(1)
        if n % 2 == 0:
            return self.sqr() ** (n // 2)
        return _odd_pow(self, n)

    # -- queries
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, RatInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, QSqrt):
            return self.lo <= x and x <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def subset_of(self, o: "RatInterval") -> bool:
        return o.lo <= self.lo and self.hi <= o.hi

    def hull(self, o: "RatInterval") -> "RatInterval":
        return RatInterval(min(self.lo, o.lo), max(self.hi, o.hi))

    def round_out(self, bits: int = DEFAULT_CAP_BITS) -> "RatInterval":
        """Outward-round endpoints onto the grid 2**-bits when their denominators exceed it."""
        lim = 1 << bits
        lo, hi = self.lo, self.hi
        if lo.denominator > lim:
            lo = _floor_dyadic(lo, bits)
        if hi.denominator > lim:
            hi = _ceil_dyadic(hi, bits)
        if lo is self.lo and hi is self.hi:
            return self
        return RatInterval(lo, hi)

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


def _odd_pow(x: RatInterval, n: int) -> RatInterval:
    # odd powers are monotone
    return RatInterval(x.lo**n, x.hi**n)


# ---------------------------------------------------------------------------
# pi and square roots


def _arctan_inv_bounds(m: int, nterms: int) -> tuple[Fraction, Fraction]:
    """Bracket arctan(1/m) with the alternating Gregory series.

    Partial sums of an alternating series with decreasing terms bracket the
    limit, and consecutive brackets are nested.
    """
    s = Fraction(0)
    prev = None
    m2 = m * m
    pw = m
    for k in range(nterms + 1):
        term = Fraction(1, (2 * k + 1) * pw)
        prev = s
        s = s + term if k % 2 == 0 else s - term
        pw *= m2
    return (min(s, prev), max(s, prev))


def _machin_terms(bits: int) -> int:
    # each term of arctan(1/5) gains log2(25) ~ 4.64 bits; pi multiplies error by 16
    return (bits + 12) // 4 + 2


@lru_cache(maxsize=64)
def pi_enclosure(bits: int) -> RatInterval:
    """Interval containing pi of width <= 2**-bits (Machin: 16 atan(1/5) - 4 atan(1/239))."""
    if bits < 1:
        raise ValueError("bits must be positive")
    n = _machin_terms(bits)
    a_lo, a_hi = _arctan_inv_bounds(5, n)
    b_lo, b_hi = _arctan_inv_bounds(239, n)
    lo = 16 * a_lo - 4 * b_hi
    hi = 16 * a_hi - 4 * b_lo
    g = bits + 8
    return RatInterval(_floor_dyadic(lo, g), _ceil_dyadic(hi, g))


@lru_cache(maxsize=64)
def pi2_enclosure(bits: int) -> RatInterval:
    """Interval containing pi**2 of width <= 2**-bits.

    Refining ``bits`` yields nested enclosures: the series brackets are nested,
    and flooring a larger number onto a finer dyadic grid never decreases it.
    """
    if bits < 8:
        raise ValueError("bits must be >= 8")
    p = pi_enclosure(bits + 4)
    sq = p.sqr()
    g = bits + 4
    out = RatInterval(_floor_dyadic(sq.lo, g), _ceil_dyadic(sq.hi, g))
    assert out.width <= Fraction(1, 1 << bits)
    return out


@lru_cache(maxsize=256)
def sqrt_enclosure(v, bits: int) -> RatInterval:
    """Interval [l, h] with l*l <= v <= h*h and h - l <= 2**-bits.

    Perfect squares of rationals return a point interval.
    """
    v = _q(v)
    if v < 0:
        raise ValueError("square root of a negative number")
    if bits < 1:
        raise ValueError("bits must be positive")
    r = sqrt_exact(v)
    if isinstance(r, Fraction):
        return RatInterval(r, r)
    scale = 1 << bits
    s = math.isqrt(math.floor(v * scale * scale))
    lo = Fraction(s, scale)
    hi = Fraction(s + 1, scale)
    return RatInterval(lo, hi)


def scalar_enclosure(x, bits: int = 128) -> RatInterval:
    """Enclose an exact scalar (Fraction or QSqrt) by a rational interval."""
    if isinstance(x, RatInterval):
        return x
    if isinstance(x, QSqrt):
        return x.p + RatInterval.point(x.q) * sqrt_enclosure(x.d, bits + abs(x.q).numerator.bit_length() + 2)
    return RatInterval.point(x)


def upper_rational(x, bits: int = 128) -> Fraction:
    if isinstance(x, QSqrt):
        return scalar_enclosure(x, bits).hi
    return _q(x)


def lower_rational(x, bits: int = 128) -> Fraction:
    if isinstance(x, QSqrt):
        return scalar_enclosure(x, bits).lo
    return _q(x)


# ---------------------------------------------------------------------------
# Quadratics in pi^2


def _zero(x) -> bool:
    return isinstance(x, Fraction) and x == 0


@dataclass(frozen=True, slots=True)
class PiQuad:
    """Exact ``c0 + c1*t + c2*t**2`` with ``t = pi**2``.

    Coefficients are Fractions, or QSqrt values sharing one radicand.
    """

    c0: object = Fraction(0)
    c1: object = Fraction(0)
    c2: object = Fraction(0)

    @staticmethod
    def coerce(x) -> "PiQuad":
        if isinstance(x, PiQuad):
            return x
        return PiQuad(as_exact(x))

    @classmethod
    def t(cls) -> "PiQuad":
        return cls(Fraction(0), Fraction(1))

    def coeffs(self):
        return (self.c0, self.c1, self.c2)

    def is_zero(self) -> bool:
        return _zero(self.c0) and _zero(self.c1) and _zero(self.c2)

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs())

    def __add__(self, o):
        if not isinstance(o, PiQuad):
            if isinstance(o, (int, Fraction, QSqrt)):
                return PiQuad(self.c0 + o, self.c1, self.c2)
            return NotImplemented
        return PiQuad(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)

    __radd__ = __add__

    def __neg__(self):
        return PiQuad(-self.c0, -self.c1, -self.c2)

    def __sub__(self, o):
        if not isinstance(o, PiQuad):
            if isinstance(o, (int, Fraction, QSqrt)):
                return PiQuad(self.c0 - o, self.c1, self.c2)
            return NotImplemented
        return PiQuad(self.c0 - o.c0, self.c1 - o.c1, self.c2 - o.c2)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, PiQuad):
            if isinstance(o, (int, Fraction, QSqrt)):
                return PiQuad(self.c0 * o, self.c1 * o, self.c2 * o)
            return NotImplemented
        a, b = self, o
        c3 = a.c1 * b.c2 + a.c2 * b.c1
        c4 = a.c2 * b.c2
        if not (_zero(c3) and _zero(c4)):
            raise ValueError("PiQuad product exceeds degree 2 in pi^2")
        return PiQuad(
            a.c0 * b.c0,
            a.c0 * b.c1 + a.c1 * b.c0,
            a.c0 * b.c2 + a.c1 * b.c1 + a.c2 * b.c0,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = PiQuad(Fraction(1))
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction, QSqrt)):
            inv = 1 / as_exact(o) if not isinstance(o, QSqrt) else Fraction(1) / o
            return self * inv
        return NotImplemented

    def range(self, t_enc: RatInterval) -> RatInterval:
        return piquad_range(self, t_enc)

    def __float__(self):
        t = math.pi**2
        return float(self.c0) + float(self.c1) * t + float(self.c2) * t * t

    def __repr__(self):
        return f"PiQuad({self.c0}, {self.c1}, {self.c2})"


def piquad_range(q: PiQuad, t_enc: RatInterval, bits: int = 160) -> RatInterval:
    """Enclosure of ``{c0 + c1 t + c2 t^2 : t in t_enc}``.

    Exact for rational coefficients (endpoints plus the interior vertex);
    with surd coefficients the coefficients are enclosed first.
    """
    if q.is_rational():
        c0, c1, c2 = q.c0, q.c1, q.c2

        def f(t):
            return c0 + t * (c1 + t * c2)

        vals = [f(t_enc.lo), f(t_enc.hi)]
        if c2 != 0:
            v = -c1 / (2 * c2)
            if t_enc.lo < v < t_enc.hi:
                vals.append(f(v))
        return RatInterval(min(vals), max(vals))
    c0, c1, c2 = (scalar_enclosure(c, bits) for c in q.coeffs())
    return c0 + t_enc * (c1 + t_enc * c2)


# ---------------------------------------------------------------------------
# Text form of exact scalars: "p/q" or "p/q+r/s*sqrt(d)"

_SCALAR_RE = re.compile(
    r"^\s*([+-]?\d+(?:/\d+)?)\s*(?:([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\((\d+)\))?\s*$"
)


def format_scalar(x) -> str:
    if isinstance(x, QSqrt):
        sign = "-" if x.q < 0 else "+"
        return f"{_fmt_q(x.p)}{sign}{_fmt_q(abs(x.q))}*sqrt({x.d})"
    return _fmt_q(_q(x))


def _fmt_q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(s: str):
    m = _SCALAR_RE.match(s)
    if not m:
        raise ValueError(f"bad exact scalar {s!r}")
    p = Fraction(m.group(1))
    if m.group(2) is None:
        return p
    q = Fraction(m.group(3))
    if m.group(2) == "-":
        q = -q
    return p + QSqrt(0, q, int(m.group(4)))
