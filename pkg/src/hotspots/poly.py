"""Dense bivariate polynomials over exact or interval coefficients.

A :class:`Poly2` stores ``c[i][j]``, the coefficient of ``x**i * y**j`` where
``x, y`` are the two labelled variables in order.  Two coefficient kinds exist:

``"exact"``
    every entry is a :class:`~hotspots.exactq.PiQuad` whose coefficients are
    Fractions or QSqrt values.  Used to state polynomials exactly.
``"interval"``
    every entry is a :class:`~hotspots.exactq.RatInterval`.  This is what the
    fold certifier consumes.

:meth:`Poly2.collapse` turns the first kind into the second.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .exactq import (
    DEFAULT_CAP_BITS,
    PiQuad,
    QSqrt,
    RatInterval,
    as_exact,
    pi2_enclosure,
    piquad_range,
    scalar_enclosure,
)

__all__ = ["Poly2", "AffineMap", "substitute", "evaluate", "coefficient_matrix"]

EXACT = "exact"
INTERVAL = "interval"

_ZERO_Q = PiQuad()
_ZERO_I = RatInterval.point(0)


def _is_zero(c) -> bool:
    if isinstance(c, PiQuad):
        return c.is_zero()
    return c.lo == 0 and c.hi == 0


def _zero(kind: str):
    return _ZERO_Q if kind == EXACT else _ZERO_I


def _coerce_entry(c, kind: str):
    if kind == EXACT:
        if isinstance(c, RatInterval):
            raise TypeError("interval coefficient in an exact polynomial")
        return PiQuad.coerce(c)
    if isinstance(c, PiQuad):
        raise TypeError("PiQuad coefficient in an interval polynomial; collapse first")
    if isinstance(c, QSqrt):
        return scalar_enclosure(c)
    return RatInterval.coerce(c)


def _trim(rows: list[list]) -> tuple[tuple, ...]:
    ncol = 0
    nrow = 0
    for i, row in enumerate(rows):
        for j, c in enumerate(row):
            if not _is_zero(c):
                nrow = i + 1
                ncol = max(ncol, j + 1)
    if nrow == 0:
        return ()
    return tuple(tuple(r[:ncol]) for r in rows[:nrow])


class Poly2:
    """Dense polynomial in two named variables.

    Parameters
    ----------
    coeffs : sequence of sequences
        ``coeffs[i][j]`` multiplies ``x**i * y**j``.  Ragged rows are padded.
    var_names : pair of str
        Labels of ``x`` and ``y``.  Operations between polynomials require
        identical labels, so a silent variable swap is impossible.
    kind : {"exact", "interval"}
    """

    __slots__ = ("_c", "var_names", "kind")

    def __init__(self, coeffs, var_names: Sequence[str] = ("x", "y"), kind: str = EXACT):
        if kind not in (EXACT, INTERVAL):
            raise ValueError(f"unknown coefficient kind {kind!r}")
        if len(var_names) != 2 or var_names[0] == var_names[1]:
            raise ValueError("need two distinct variable names")
        self.kind = kind
        self.var_names = (str(var_names[0]), str(var_names[1]))
        width = max((len(r) for r in coeffs), default=0)
        z = _zero(kind)
        rows = [[_coerce_entry(c, kind) for c in r] + [z] * (width - len(r)) for r in coeffs]
        trimmed = _trim(rows)
        self._c = tuple(tuple(r) for r in trimmed)

    # -- constructors
    @classmethod
    def zero(cls, var_names=("x", "y"), kind=EXACT) -> "Poly2":
        return cls([], var_names, kind)

    @classmethod
    def const(cls, c, var_names=("x", "y"), kind=EXACT) -> "Poly2":
        return cls([[c]], var_names, kind)

    @classmethod
    def var(cls, name: str, var_names=("x", "y"), kind=EXACT) -> "Poly2":
        one = PiQuad(Fraction(1)) if kind == EXACT else RatInterval.point(1)
        if name == var_names[0]:
            return cls([[_zero(kind)], [one]], var_names, kind)
        if name == var_names[1]:
            return cls([[_zero(kind), one]], var_names, kind)
        raise ValueError(f"{name!r} is not one of {var_names}")

    @classmethod
    def pi2(cls, var_names=("x", "y")) -> "Poly2":
        return cls.const(PiQuad.t(), var_names, EXACT)

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], object], var_names=("x", "y"), kind=EXACT):
        if not terms:
            return cls.zero(var_names, kind)
        ni = max(i for i, _ in terms) + 1
        nj = max(j for _, j in terms) + 1
        z = _zero(kind)
        rows = [[z] * nj for _ in range(ni)]
        for (i, j), c in terms.items():
            rows[i][j] = _coerce_entry(c, kind) + rows[i][j]
        return cls(rows, var_names, kind)

    @classmethod
    def univariate(cls, coeffs: Sequence, var: str = "x", other: str = "_", kind=EXACT):
        """Polynomial in ``var`` alone; ``coeffs[k]`` multiplies ``var**k``."""
        return cls([[c] for c in coeffs], (var, other), kind)

    # -- structure
    @property
    def coeffs(self) -> tuple[tuple, ...]:
        return self._c

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._c), len(self._c[0]) if self._c else 0)

    @property
    def degree(self) -> tuple[int, int]:
        """Degrees in (x, y); the zero polynomial has degree (-1, -1)."""
        n, m = self.shape
        return (n - 1, m - 1)

    def total_degree(self) -> int:
        best = -1
        for i, row in enumerate(self._c):
            for j, c in enumerate(row):
                if not _is_zero(c):
                    best = max(best, i + j)
        return best

    def is_zero(self) -> bool:
        return not self._c

    def coeff(self, i: int, j: int = 0):
        if 0 <= i < len(self._c) and 0 <= j < len(self._c[i]):
            return self._c[i][j]
        return _zero(self.kind)

    def terms(self) -> Iterable[tuple[int, int, object]]:
        for i, row in enumerate(self._c):
            for j, c in enumerate(row):
                if not _is_zero(c):
                    yield i, j, c

    def var_index(self, name: str) -> int:
        try:
            return self.var_names.index(name)
        except ValueError:
            raise ValueError(f"{name!r} is not one of {self.var_names}") from None

    def is_univariate(self) -> bool:
        return self.shape[1] <= 1

    def with_terms(self, updates: Mapping[tuple[int, int], object]) -> "Poly2":
        """Copy with the listed coefficients replaced."""
        d = {(i, j): c for i, j, c in self.terms()}
        d.update(updates)
        return Poly2.from_terms(d, self.var_names, self.kind)

    def relabel(self, var_names) -> "Poly2":
        return Poly2(self._c, var_names, self.kind)

    def swap(self) -> "Poly2":
        """Exchange the roles of x and y (labels travel with the data)."""
        n, m = self.shape
        rows = [[self.coeff(i, j) for i in range(n)] for j in range(m)]
        return Poly2(rows, self.var_names[::-1], self.kind)

    # -- ring operations
    def _check(self, o: "Poly2"):
        if o.var_names != self.var_names:
            raise ValueError(f"variable labels differ: {self.var_names} vs {o.var_names}")
        if o.kind != self.kind:
            raise TypeError(f"cannot mix {self.kind} and {o.kind} polynomials")

    def _lift(self, o) -> "Poly2":
        if isinstance(o, Poly2):
            self._check(o)
            return o
        return Poly2.const(o, self.var_names, self.kind)

    def __add__(self, o):
        o = self._lift(o)
        n = max(len(self._c), len(o._c))
        m = max(self.shape[1], o.shape[1])
        rows = [[self.coeff(i, j) + o.coeff(i, j) for j in range(m)] for i in range(n)]
        return Poly2(rows, self.var_names, self.kind)

    __radd__ = __add__

    def __neg__(self):
        return Poly2([[-c for c in r] for r in self._c], self.var_names, self.kind)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def scale(self, s) -> "Poly2":
        s = _coerce_entry(s, self.kind)
        return Poly2([[c * s for c in r] for r in self._c], self.var_names, self.kind)

    def __mul__(self, o):
        if not isinstance(o, Poly2):
            return self.scale(o)
        self._check(o)
        if self.is_zero() or o.is_zero():
            return Poly2.zero(self.var_names, self.kind)
        n1, m1 = self.shape
        n2, m2 = o.shape
        z = _zero(self.kind)
        rows = [[z] * (m1 + m2 - 1) for _ in range(n1 + n2 - 1)]
        for i, j, c in self.terms():
            for k, l, d in o.terms():
                rows[i + k][j + l] = rows[i + k][j + l] + c * d
        return Poly2(rows, self.var_names, self.kind)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Poly2.const(1, self.var_names, self.kind)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, o):
        if not isinstance(o, Poly2):
            return NotImplemented
        return self.var_names == o.var_names and self.kind == o.kind and self._c == o._c

    def __hash__(self):
        return hash((self._c, self.var_names, self.kind))

    def __repr__(self):
        return f"Poly2({self.kind}, vars={self.var_names}, shape={self.shape})"

    # -- conversion
    def collapse(self, pi_bits: int = 96, cap_bits: int | None = DEFAULT_CAP_BITS) -> "Poly2":
        """Enclose every exact coefficient by a rational interval.

        pi**2 enters through :func:`pi2_enclosure`; surd coefficients through
        :func:`sqrt_enclosure`.  Exact zeros stay exact point zeros, which is
        what lets an equality point sit at a rectangle corner.
        """
        if self.kind == INTERVAL:
            return self if cap_bits is None else self.round_out(cap_bits)
        t = pi2_enclosure(pi_bits)
        rows = []
        for r in self._c:
            row = []
            for c in r:
                if c.is_zero():
                    row.append(_ZERO_I)
                    continue
                iv = piquad_range(c, t, bits=pi_bits + 64)
                if cap_bits is not None:
                    iv = iv.round_out(cap_bits)
                row.append(iv)
            rows.append(row)
        return Poly2(rows, self.var_names, INTERVAL)

    def round_out(self, cap_bits: int = DEFAULT_CAP_BITS) -> "Poly2":
        if self.kind != INTERVAL:
            raise TypeError("round_out applies to interval polynomials")
        return Poly2([[c.round_out(cap_bits) for c in r] for r in self._c], self.var_names, INTERVAL)

    def upper(self) -> list[list[Fraction]]:
        """Upper endpoints of an interval polynomial, dense."""
        n, m = self.shape
        return [[self.coeff(i, j).hi for j in range(m)] for i in range(n)]

    def lower(self) -> list[list[Fraction]]:
        n, m = self.shape
        return [[self.coeff(i, j).lo for j in range(m)] for i in range(n)]

    # convenience wrappers
    def substitute(self, m: "AffineMap") -> "Poly2":
        return substitute(self, m)

    def evaluate(self, x, y=0, pi_bits: int = 96) -> RatInterval:
        return evaluate(self, x, y, pi_bits)

    def evaluate_exact(self, x, y=0):
        return evaluate_exact(self, x, y)

    def float_eval(self, x: float, y: float = 0.0) -> float:
        acc = 0.0
        for i, j, c in self.terms():
            acc += float(c) * x**i * y**j
        return acc


@dataclass(frozen=True)
class AffineMap:
    """Per-variable substitution ``v -> s*v + r``.

    ``parts`` maps a variable label to ``(s, r)``.  ``s`` and ``r`` may be
    Fractions, QSqrt values, or RatIntervals (the last only for interval
    polynomials).  Unlisted variables are left alone.
    """

    parts: tuple[tuple[str, object, object], ...]

    def __init__(self, parts: Mapping[str, tuple] | Iterable[tuple[str, object, object]] = ()):
        if isinstance(parts, Mapping):
            items = [(k, v[0], v[1]) for k, v in parts.items()]
        else:
            items = [tuple(p) for p in parts]
        norm = []
        for name, s, r in sorted(items, key=lambda t: t[0]):
            s = s if isinstance(s, RatInterval) else as_exact(s)
            r = r if isinstance(r, RatInterval) else as_exact(r)
            if isinstance(s, RatInterval):
                if s.lo <= 0 <= s.hi:
                    raise ValueError("scale interval must exclude zero")
            elif s == 0:
                raise ValueError("scale must be nonzero")
            norm.append((name, s, r))
        object.__setattr__(self, "parts", tuple(norm))

    @classmethod
    def shift(cls, **offsets) -> "AffineMap":
        return cls({k: (1, v) for k, v in offsets.items()})

    def get(self, name: str):
        for n, s, r in self.parts:
            if n == name:
                return s, r
        return None

    def apply(self, values: Mapping[str, object]) -> dict:
        """Image of a point given as ``{name: value}``."""
        out = dict(values)
        for n, s, r in self.parts:
            if n in out:
                out[n] = s * out[n] + r
        return out

    def then(self, other: "AffineMap") -> "AffineMap":
        """Composite substitution: first ``self``, then ``other`` on the result.

        ``substitute(substitute(p, self), other) == substitute(p, self.then(other))``.
        For ``v -> s1 v + r1`` followed by ``v -> s2 v + r2`` the composite is
        ``v -> s1 (s2 v + r2) + r1``.
        """
        names = {n for n, _, _ in self.parts} | {n for n, _, _ in other.parts}
        parts = {}
        for n in names:
            s1, r1 = self.get(n) or (Fraction(1), Fraction(0))
            s2, r2 = other.get(n) or (Fraction(1), Fraction(0))
            parts[n] = (s1 * s2, s1 * r2 + r1)
        return AffineMap(parts)

    def is_exact(self) -> bool:
        return all(not isinstance(v, RatInterval) for _, s, r in self.parts for v in (s, r))

    def to_json(self) -> list:
        from .exactq import format_scalar

        return [[n, format_scalar(s), format_scalar(r)] for n, s, r in self.parts]

    @classmethod
    def from_json(cls, data) -> "AffineMap":
        from .exactq import parse_scalar

        return cls([(n, parse_scalar(s), parse_scalar(r)) for n, s, r in data])


def _powers(v, n: int, one):
    out = [one]
    for _ in range(n):
        out.append(out[-1] * v)
    return out


def _shift_axis(rows: list[list], s, r, kind: str, axis: int) -> list[list]:
    """Substitute ``v -> s*v + r`` along one axis of a dense coefficient matrix."""
    if axis == 1:
        t = [list(col) for col in zip(*rows)] if rows else []
        t = _shift_axis(t, s, r, kind, 0)
        return [list(col) for col in zip(*t)] if t else []
    n = len(rows)
    if n == 0:
        return rows
    m = len(rows[0])
    one = PiQuad(Fraction(1)) if kind == EXACT else RatInterval.point(1)
    if kind == EXACT:
        sp = [PiQuad.coerce(v) for v in _powers(s, n, Fraction(1))]
        rp = [PiQuad.coerce(v) for v in _powers(r, n, Fraction(1))]
    else:
        sp = _powers(RatInterval.coerce(s) if not isinstance(s, QSqrt) else scalar_enclosure(s), n, one)
        rp = _powers(RatInterval.coerce(r) if not isinstance(r, QSqrt) else scalar_enclosure(r), n, one)
    z = _zero(kind)
    out = [[z] * m for _ in range(n)]
    for i in range(n):
        row = rows[i]
        if all(_is_zero(c) for c in row):
            continue
        # (s v + r)^i = sum_k C(i,k) s^k r^(i-k) v^k
        for k in range(i + 1):
            w = sp[k] * rp[i - k] * comb(i, k)
            if _is_zero(w):
                continue
            tgt = out[k]
            for j in range(m):
                if not _is_zero(row[j]):
                    tgt[j] = tgt[j] + row[j] * w
    return out


def substitute(p: Poly2, m: AffineMap) -> Poly2:
    """Polynomial ``q`` with ``q(v) = p(s*v + r)`` per mapped variable.

    Exact when ``p`` is exact and ``m`` has exact entries; otherwise the result
    coefficients enclose the exact ones.
    """
    if p.kind == EXACT and not m.is_exact():
        raise TypeError("interval substitution requires an interval polynomial; collapse first")
    rows = [list(r) for r in p.coeffs]
    for name, s, r in m.parts:
        if name not in p.var_names:
            continue
        if (not isinstance(s, RatInterval) and s == 1) and (not isinstance(r, RatInterval) and r == 0):
            continue
        rows = _shift_axis(rows, s, r, p.kind, p.var_index(name))
    return Poly2(rows, p.var_names, p.kind)


def evaluate_exact(p: Poly2, x, y=0) -> PiQuad:
    """Exact value (a PiQuad) of an exact polynomial at an exact point."""
    if p.kind != EXACT:
        raise TypeError("evaluate_exact needs an exact polynomial")
    x, y = as_exact(x), as_exact(y)
    acc = PiQuad()
    for row in reversed(p.coeffs):
        inner = PiQuad()
        for c in reversed(row):
            inner = inner * y + c
        acc = acc * x + inner
    return acc


def evaluate(p: Poly2, x, y=0, pi_bits: int = 96) -> RatInterval:
    """Interval containing ``p(x, y)``; a point interval when everything is rational."""
    if p.kind == EXACT:
        v = evaluate_exact(p, x, y)
        return piquad_range(v, pi2_enclosure(pi_bits), bits=pi_bits + 64)
    xi = scalar_enclosure(x, pi_bits + 32) if not isinstance(x, RatInterval) else x
    yi = scalar_enclosure(y, pi_bits + 32) if not isinstance(y, RatInterval) else y
    acc = RatInterval.point(0)
    for row in reversed(p.coeffs):
        inner = RatInterval.point(0)
        for c in reversed(row):
            inner = inner * yi + c
        acc = acc * xi + inner
    return acc


def coefficient_matrix(p: Poly2) -> list[list]:
    """Dense matrix, row ``i`` = coefficients of ``x**i`` over increasing powers of ``y``.

    The zero polynomial gives ``[[0]]``.
    """
    if p.is_zero():
        return [[_zero(p.kind)]]
    return [list(r) for r in p.coeffs]
