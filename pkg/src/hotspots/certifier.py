"""Sound nonpositivity certificates for polynomials on rectangles.

The core test is a coefficient fold.  Writing ``p = sum_i x**i r_i(y)`` and
processing rows from the highest power of ``x`` down, each row is bumped by the
positive part of the running accumulator times ``dx``, then scanned over the
powers of ``y`` with negative carries divided by ``dy``.  If the largest entry
of the last scan is ``<= 0`` then ``p <= 0`` on ``[0, dx] x [0, dy]``.

Why it is sound, for one row ``l_0 + l_1 y + ... + l_n y**n`` on ``[0, dy]``:
with ``o_0 = l_0`` and ``o_k = min(o_{k-1}, 0)/dy + l_k`` one has
``sum_k l_k y**k <= sum_{k<n} max(o_k, 0) y**k + o_n y**n`` because a negative
``o_k y**k`` is at most ``(o_k/dy) y**(k+1)``.  So all ``o_k <= 0`` gives a
nonpositive row.  The same domination applied along ``x`` (positive parts of
the accumulator times ``dx``) chains the rows together.  Every step is monotone
nondecreasing in the coefficients and in ``dx, dy``, so interval coefficients
may be replaced by their upper endpoints.

Rectangles are normalized to the origin by an exact substitution; by the same
symmetry any of the four corners may serve as the origin, which is how
equality points on other corners are handled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exactq import (
    DEFAULT_CAP_BITS,
    PiQuad,
    QSqrt,
    RatInterval,
    as_exact,
    format_scalar,
    parse_scalar,
    pi2_enclosure,
    piquad_range,
    scalar_sign,
    upper_rational,
)
from .poly import EXACT, INTERVAL, AffineMap, Poly2, coefficient_matrix, substitute

__all__ = [
    "Rect",
    "FoldPass",
    "Split",
    "TacticStep",
    "Failure",
    "Certificate",
    "Unknown",
    "TacticError",
    "fold_bound",
    "fold_value",
    "certify_nonpos",
    "anchor",
    "tactic_replace_power",
    "tactic_drop_term",
    "eliminate_linear_param",
    "Tactic",
    "apply_tactics",
    "check_certificate",
    "poly_to_json",
    "poly_from_json",
    "node_to_json",
    "node_from_json",
]

Scalar = Union[Fraction, QSqrt]
CORNERS = ((1, 1), (-1, 1), (1, -1), (-1, -1))


class TacticError(ValueError):
    """A rewrite step whose preconditions could not be established."""


# ---------------------------------------------------------------------------
# Rectangles


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box ``[x0, x0+dx] x [y0, y0+dy]`` with exact corners.

    ``dy == 0`` marks a one-variable interval (the second variable is absent).
    """

    x0: Scalar
    y0: Scalar
    dx: Scalar
    dy: Scalar = Fraction(0)

    def __post_init__(self):
        for name in ("x0", "y0", "dx", "dy"):
            object.__setattr__(self, name, as_exact(getattr(self, name)))
        if scalar_sign(self.dx) <= 0:
            raise ValueError("rectangle width must be positive")
        if scalar_sign(self.dy) < 0:
            raise ValueError("rectangle height must be nonnegative")

    @classmethod
    def from_bounds(cls, xlo, xhi, ylo=0, yhi=0) -> "Rect":
        xlo, xhi, ylo, yhi = (as_exact(v) for v in (xlo, xhi, ylo, yhi))
        return cls(xlo, ylo, xhi - xlo, yhi - ylo)

    @classmethod
    def interval(cls, lo, hi) -> "Rect":
        return cls.from_bounds(lo, hi)

    @property
    def is_1d(self) -> bool:
        return scalar_sign(self.dy) == 0

    @property
    def x1(self):
        return self.x0 + self.dx

    @property
    def y1(self):
        return self.y0 + self.dy

    def corner(self, sx: int, sy: int):
        return (self.x0 if sx > 0 else self.x1, self.y0 if sy > 0 else self.y1)

    def longer_axis(self) -> int:
        if self.is_1d:
            return 0
        return 0 if self.dx >= self.dy else 1

    def split(self, axis: int) -> tuple["Rect", "Rect"]:
        if axis == 0:
            h = self.dx / 2
            return Rect(self.x0, self.y0, h, self.dy), Rect(self.x0 + h, self.y0, self.dx - h, self.dy)
        if self.is_1d:
            raise ValueError("cannot split a 1-D rectangle along y")
        h = self.dy / 2
        return Rect(self.x0, self.y0, self.dx, h), Rect(self.x0, self.y0 + h, self.dx, self.dy - h)

    def split_at(self, axis: int, at) -> tuple["Rect", "Rect"]:
        at = as_exact(at)
        if axis == 0:
            if not (self.x0 < at < self.x1):
                raise ValueError("split point outside rectangle")
            return Rect(self.x0, self.y0, at - self.x0, self.dy), Rect(at, self.y0, self.x1 - at, self.dy)
        if not (self.y0 < at < self.y1):
            raise ValueError("split point outside rectangle")
        return Rect(self.x0, self.y0, self.dx, at - self.y0), Rect(self.x0, at, self.dx, self.y1 - at)

    def contains(self, x, y=0) -> bool:
        ok = self.x0 <= x <= self.x1 if not isinstance(x, QSqrt) else (x >= self.x0 and x <= self.x1)
        if self.is_1d:
            return ok
        return ok and (self.y0 <= y if not isinstance(y, QSqrt) else y >= self.y0) and y <= self.y1

    def to_json(self) -> list[str]:
        return [format_scalar(v) for v in (self.x0, self.y0, self.dx, self.dy)]

    @classmethod
    def from_json(cls, data) -> "Rect":
        return cls(*(parse_scalar(s) for s in data))

    def __str__(self):
        xs = f"[{format_scalar(self.x0)}, {format_scalar(self.x1)}]"
        if self.is_1d:
            return xs
        return f"{xs} x [{format_scalar(self.y0)}, {format_scalar(self.y1)}]"


# ---------------------------------------------------------------------------
# The fold


def fold_value(rows: Sequence[Sequence[Fraction]], dx: Fraction, dy: Fraction) -> Fraction:
    """Fold a dense rational coefficient matrix (row i = power of x)."""
    acc: list[Fraction] | None = None
    for row in reversed(rows):
        if acc is None:
            new = list(row)
        else:
            new = [(a if a > 0 else 0) * dx + r for a, r in zip(acc, row)]
        out = []
        carry = None
        for k, v in enumerate(new):
            o = v if k == 0 else (carry if carry < 0 else 0) / dy + v
            out.append(o)
            carry = o
        acc = out
    return max(acc)


def _side_length(v) -> Fraction:
    # irrational side lengths are replaced by an upper rational; a larger box
    # only makes the claim stronger
    return upper_rational(v, 160) if isinstance(v, QSqrt) else as_exact(v)


def fold_bound(p: Poly2, dx, dy=0, *, pi_bits: int = 96) -> RatInterval:
    """Fold bound of ``p`` on ``[0, dx] x [0, dy]``.

    The upper endpoint is the certificate value (``hi <= 0`` proves ``p <= 0``);
    the lower endpoint is the same fold on lower coefficient endpoints.

    Parameters
    ----------
    p : Poly2
        Interval polynomial.  Exact polynomials are collapsed with ``pi_bits``.
    dx, dy : exact scalars
        Side lengths.  ``dy = 0`` is allowed only when ``p`` has no ``y`` terms.
    """
    dx = _side_length(dx)
    dy = _side_length(dy)
    if dx <= 0:
        raise ValueError("zero-area rectangle: dx must be positive")
    if p.kind == EXACT:
        p = p.collapse(pi_bits)
    m = coefficient_matrix(p)
    if dy <= 0 and len(m[0]) > 1:
        raise ValueError("zero-area rectangle: dy must be positive for a bivariate polynomial")
    hi = fold_value([[c.hi for c in r] for r in m], dx, dy)
    lo = fold_value([[c.lo for c in r] for r in m], dx, dy)
    return RatInterval(lo, hi)


def anchor(p: Poly2, rect: Rect, corner: int = 0) -> Poly2:
    """Substitute so that the chosen corner of ``rect`` becomes the origin.

    Corner 0 is the lower-left one.  Corners 1-3 reflect x, y or both, so that
    the rectangle is always ``[0, dx] x [0, dy]`` in the new variables.
    """
    sx, sy = CORNERS[corner]
    cx, cy = rect.corner(sx, sy)
    xn, yn = p.var_names
    parts = {xn: (sx, cx)}
    if not rect.is_1d:
        parts[yn] = (sy, cy)
    elif sy < 0:
        raise ValueError("1-D rectangles only have corners 0 and 1")
    return substitute(p, AffineMap(parts))


# ---------------------------------------------------------------------------
# Certificate nodes


@dataclass(frozen=True)
class FoldPass:
    rect: Rect
    corner: int
    bound: RatInterval

    @property
    def ok(self) -> bool:
        return self.bound.hi <= 0


@dataclass(frozen=True)
class Failure:
    rect: Rect
    bound: RatInterval
    corner: int = 0

    ok = False


@dataclass(frozen=True)
class Split:
    rect: Rect
    axis: int
    at: Scalar
    children: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.children)


@dataclass(frozen=True)
class TacticStep:
    """One dominating rewrite ``p -> p'`` followed by the proof for ``p'``.

    ``side`` holds certificates for the side condition ``var**k - q <= 0`` (one
    per piece of the domain); ``child`` certifies the rewritten polynomial.
    """

    kind: str  # "replace" | "drop"
    var: str
    k: int
    replacement: Poly2 | None
    rect: Rect | None
    side: tuple = ()
    child: object = None
    label: str = ""

    @property
    def ok(self) -> bool:
        side_ok = all(s.ok for s in self.side)
        return side_ok and (self.child is None or self.child.ok)


Node = Union[FoldPass, Failure, Split, TacticStep]


def iter_leaves(node) -> Iterable:
    if isinstance(node, (FoldPass, Failure)):
        yield node
    elif isinstance(node, Split):
        for c in node.children:
            yield from iter_leaves(c)
    elif isinstance(node, TacticStep):
        for s in node.side:
            yield from iter_leaves(s.root if isinstance(s, (Certificate, Unknown)) else s)
        if node.child is not None:
            yield from iter_leaves(node.child)


def _main_leaves(node) -> Iterable:
    # side conditions of rewrites only need <= 0; strictness comes from the chain end
    while isinstance(node, TacticStep):
        node = node.child
    if node is not None:
        yield from iter_leaves(node)


@dataclass
class Certificate:
    """A proof that ``poly <= 0`` on ``rect``; ``root`` is the node tree."""

    poly: Poly2
    rect: Rect
    root: Node
    pi_bits: int = 96
    cap_bits: int | None = DEFAULT_CAP_BITS
    label: str = ""

    @property
    def ok(self) -> bool:
        return self.root.ok

    @property
    def strict(self) -> bool:
        """All fold leaves strictly negative, which proves ``poly < 0``."""
        return self.ok and all(l.bound.hi < 0 for l in _main_leaves(self.root) if isinstance(l, FoldPass))

    def leaves(self):
        return list(iter_leaves(self.root))

    def to_json(self) -> dict:
        return {
            "kind": "certificate",
            "label": self.label,
            "pi_bits": self.pi_bits,
            "cap_bits": self.cap_bits,
            "poly": poly_to_json(self.poly),
            "rect": self.rect.to_json(),
            "root": node_to_json(self.root),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(
            poly=poly_from_json(d["poly"]),
            rect=Rect.from_json(d["rect"]),
            root=node_from_json(d["root"]),
            pi_bits=d["pi_bits"],
            cap_bits=d["cap_bits"],
            label=d.get("label", ""),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


@dataclass
class Unknown(Certificate):
    """Certification failed; ``worst`` is the failing leaf with the largest bound."""

    worst: Failure | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return False


# ---------------------------------------------------------------------------
# Certification with bisection


@dataclass
class _Settings:
    pi_bits: int
    cap_bits: int | None
    corners: tuple[int, ...]


def _try_leaf(p: Poly2, rect: Rect, st: _Settings):
    best = None
    for c in st.corners:
        if rect.is_1d and c > 1:
            continue
        q = anchor(p, rect, c)
        if q.kind == EXACT:
            q = q.collapse(st.pi_bits, st.cap_bits)
        b = fold_bound(q, rect.dx, rect.dy)
        if b.hi <= 0:
            return FoldPass(rect, c, b)
        if best is None or b.hi < best.bound.hi:
            best = Failure(rect, b, c)
    return best


def _certify(p: Poly2, rect: Rect, depth: int, st: _Settings):
    leaf = _try_leaf(p, rect, st)
    if leaf.ok or depth <= 0:
        return leaf
    axis = rect.longer_axis()
    r0, r1 = rect.split(axis)
    at = r1.x0 if axis == 0 else r1.y0
    kids = []
    for r in (r0, r1):
        node = _certify(p, r, depth - 1, st)
        kids.append(node)
        if not node.ok:
            break
    return Split(rect, axis, at, tuple(kids))


def _worst(node) -> Failure | None:
    fails = [l for l in iter_leaves(node) if isinstance(l, Failure)]
    return max(fails, key=lambda f: f.bound.hi) if fails else None


def certify_nonpos(
    p: Poly2,
    r: Rect,
    max_depth: int = 12,
    *,
    pi_bits: int = 96,
    cap_bits: int | None = DEFAULT_CAP_BITS,
    corners: Sequence[int] = (0, 1, 2, 3),
    label: str = "",
) -> Certificate | Unknown:
    """Certify ``p <= 0`` on ``r``, bisecting the longer side on failure.

    Returns a :class:`Certificate` whose leaves all pass, or an
    :class:`Unknown` carrying the partial tree and the worst failing leaf.
    Evaluation of sibling subtrees stops at the first failure.
    """
    st = _Settings(pi_bits, cap_bits, tuple(corners))
    root = _certify(p, r, max_depth, st)
    if root.ok:
        return Certificate(p, r, root, pi_bits, cap_bits, label)
    return Unknown(p, r, root, pi_bits, cap_bits, label, worst=_worst(root))


# ---------------------------------------------------------------------------
# Tactics


def _coeff_range(c, pi_bits: int) -> RatInterval:
    if isinstance(c, PiQuad):
        return piquad_range(c, pi2_enclosure(pi_bits), bits=pi_bits + 64)
    return c


def _column_terms(p: Poly2, axis: int, k: int) -> dict[int, object]:
    """Coefficients multiplying ``var**k * other**j``, keyed by ``j``."""
    out = {}
    for i, j, c in p.terms():
        if (i if axis == 0 else j) == k:
            out[j if axis == 0 else i] = c
    return out


def _mono(p: Poly2, axis: int, k: int, j: int, c) -> Poly2:
    key = (k, j) if axis == 0 else (j, k)
    return Poly2.from_terms({key: c}, p.var_names, p.kind)


def _side_rects(domain: Rect, axis: int, split_at: Sequence) -> list[Rect]:
    lo, hi = (domain.x0, domain.x1) if axis == 0 else (domain.y0, domain.y1)
    pts = [lo] + sorted(as_exact(s) for s in split_at) + [hi]
    for u, v in zip(pts, pts[1:]):
        if not u < v:
            raise TacticError("split points must lie strictly inside the domain")
    return [Rect.from_bounds(u, v) for u, v in zip(pts, pts[1:])]


def tactic_replace_power(
    p: Poly2,
    var: str,
    k: int,
    q: Poly2,
    domain: Rect,
    *,
    split_at: Sequence = (),
    max_depth: int = 12,
    pi_bits: int = 96,
    cap_bits: int | None = DEFAULT_CAP_BITS,
    label: str = "",
) -> tuple[Poly2, TacticStep]:
    """Replace ``var**k`` by ``q(var)`` where the coefficient is nonnegative.

    The side condition ``var**k - q <= 0`` is certified on the ``var`` range of
    ``domain`` (cut at ``split_at`` so interior equality points become
    corners).  Since every other factor ``other**j`` is nonnegative on an
    origin-anchored domain, the result dominates ``p`` pointwise.

    Raises
    ------
    TacticError
        if some affected coefficient is not provably nonnegative, or the side
        condition is not certified.
    """
    axis = p.var_index(var)
    if q.var_names != p.var_names or q.kind != p.kind:
        raise TacticError("replacement must share variables and kind with p")
    other = 1 - axis
    if any((j if other == 1 else i) != 0 for i, j, _ in q.terms()):
        raise TacticError("replacement may only involve the replaced variable")
    cols = _column_terms(p, axis, k)
    if not cols:
        raise TacticError(f"no {var}^{k} term to replace")
    for j, c in cols.items():
        if _coeff_range(c, pi_bits).lo < 0:
            raise TacticError(f"coefficient of {var}^{k} (other power {j}) is not provably nonnegative")
    # side condition, as a polynomial in var alone
    mono = Poly2.var(var, p.var_names, p.kind) ** k
    side = mono - q
    side1 = side if axis == 0 else side.swap()
    side1 = side1.relabel((var, "_side"))
    sides = []
    for rr in _side_rects(domain, axis, split_at):
        cert = certify_nonpos(side1, rr, max_depth, pi_bits=pi_bits, cap_bits=cap_bits)
        sides.append(cert)
        if not cert.ok:
            raise TacticError(f"side condition {var}^{k} <= q failed on {rr}")
    out = p
    for j, c in cols.items():
        # remove c var^k other^j and add c other^j q(var)
        out = out - _mono(p, axis, k, j, c) + _mono(p, axis, 0, j, c) * q
    step = TacticStep("replace", var, k, q, domain, tuple(sides), None, label)
    return out, step


def tactic_drop_term(p: Poly2, var: str, k: int, *, pi_bits: int = 96, label: str = "") -> tuple[Poly2, TacticStep]:
    """Delete every ``var**k`` term whose coefficient is provably ``<= 0``.

    Valid on origin-anchored domains where all monomials are nonnegative.
    """
    axis = p.var_index(var)
    cols = _column_terms(p, axis, k)
    if not cols:
        raise TacticError(f"no {var}^{k} term to drop")
    out = p
    for j, c in cols.items():
        if _coeff_range(c, pi_bits).hi > 0:
            raise TacticError(f"coefficient of {var}^{k} (other power {j}) is not provably nonpositive")
        out = out - _mono(p, axis, k, j, c)
    return out, TacticStep("drop", var, k, None, None, (), None, label)


def eliminate_linear_param(parts: Sequence[Poly2], g_lo, g_hi) -> tuple[Poly2, Poly2]:
    """Endpoint polynomials of ``sum_k g**k parts[k]`` for ``g`` in ``[g_lo, g_hi]``.

    The family is affine in ``g``, so nonpositivity at both endpoints gives it
    for the whole range.
    """
    parts = list(parts)
    while len(parts) > 2 and parts[-1].is_zero():
        parts.pop()
    if len(parts) > 2:
        raise ValueError("polynomial is not linear in the parameter")
    if not parts:
        raise ValueError("empty parameter expansion")
    p0 = parts[0]
    p1 = parts[1] if len(parts) == 2 else Poly2.zero(p0.var_names, p0.kind)
    g_lo, g_hi = as_exact(g_lo), as_exact(g_hi)
    if g_lo > g_hi:
        raise ValueError("empty parameter range")
    return p0 + p1.scale(g_lo), p0 + p1.scale(g_hi)


def _need_nonneg(rect: Rect):
    # both rewrites compare monomials termwise, which needs nonnegative variables
    if scalar_sign(rect.x0) < 0 or (not rect.is_1d and scalar_sign(rect.y0) < 0):
        raise TacticError(f"rewrites need a domain in the nonnegative quadrant, got {rect}")


@dataclass(frozen=True)
class Tactic:
    """One scripted rewrite: ``replace`` var**k by ``replacement`` or ``drop`` it."""

    kind: str
    var: str
    k: int
    replacement: Poly2 | None = None
    split_at: tuple = ()
    label: str = ""


def apply_tactics(
    p: Poly2,
    rect: Rect,
    script: Sequence[Sequence[Tactic]],
    max_depth: int = 12,
    *,
    pi_bits: int = 96,
    cap_bits: int | None = DEFAULT_CAP_BITS,
    label: str = "",
) -> tuple[Certificate | Unknown, list[Poly2]]:
    """Run a rewrite script, then certify the final polynomial by folding.

    ``script`` is a list of steps, each a group of tactics applied in order.
    Returns the certificate (or Unknown with ``error`` set when a rewrite is
    rejected) and the polynomial after each step.
    """
    steps: list[TacticStep] = []
    history = []
    cur = p
    try:
        _need_nonneg(rect)
        for group in script:
            for t in group:
                if t.kind == "replace":
                    cur, st = tactic_replace_power(
                        cur, t.var, t.k, t.replacement, rect, split_at=t.split_at,
                        max_depth=max_depth, pi_bits=pi_bits, cap_bits=cap_bits, label=t.label,
                    )
                elif t.kind == "drop":
                    cur, st = tactic_drop_term(cur, t.var, t.k, pi_bits=pi_bits, label=t.label)
                else:
                    raise TacticError(f"unknown tactic {t.kind!r}")
                steps.append(st)
            history.append(cur)
    except TacticError as e:
        leaf = _try_leaf(cur, rect, _Settings(pi_bits, cap_bits, (0,)))
        fail = leaf if isinstance(leaf, Failure) else Failure(rect, leaf.bound, leaf.corner)
        root = _chain(steps, fail)
        return Unknown(p, rect, root, pi_bits, cap_bits, label, worst=fail, error=str(e)), history
    final = certify_nonpos(cur, rect, max_depth, pi_bits=pi_bits, cap_bits=cap_bits)
    root = _chain(steps, final.root)
    if final.ok:
        return Certificate(p, rect, root, pi_bits, cap_bits, label), history
    return Unknown(p, rect, root, pi_bits, cap_bits, label, worst=_worst(final.root)), history


def _chain(steps: Sequence[TacticStep], tail):
    node = tail
    for st in reversed(steps):
        node = TacticStep(st.kind, st.var, st.k, st.replacement, st.rect, st.side, node, st.label)
    return node


# ---------------------------------------------------------------------------
# Serialization


def _iv_json(iv: RatInterval) -> list[str]:
    return [format_scalar(iv.lo), format_scalar(iv.hi)]


def _iv_from(d) -> RatInterval:
    return RatInterval(parse_scalar(d[0]), parse_scalar(d[1]))


def poly_to_json(p: Poly2) -> dict:
    if p.kind == EXACT:
        rows = [[[format_scalar(x) for x in c.coeffs()] for c in r] for r in p.coeffs]
    else:
        rows = [[_iv_json(c) for c in r] for r in p.coeffs]
    return {"vars": list(p.var_names), "kind": p.kind, "coeffs": rows}


def poly_from_json(d: dict) -> Poly2:
    if d["kind"] == EXACT:
        rows = [[PiQuad(*(parse_scalar(x) for x in c)) for c in r] for r in d["coeffs"]]
    else:
        rows = [[_iv_from(c) for c in r] for r in d["coeffs"]]
    return Poly2(rows, tuple(d["vars"]), d["kind"])


def node_to_json(n) -> dict:
    if isinstance(n, FoldPass):
        return {"node": "fold", "rect": n.rect.to_json(), "corner": n.corner, "bound": _iv_json(n.bound)}
    if isinstance(n, Failure):
        return {"node": "failure", "rect": n.rect.to_json(), "corner": n.corner, "bound": _iv_json(n.bound)}
    if isinstance(n, Split):
        return {
            "node": "split",
            "rect": n.rect.to_json(),
            "axis": n.axis,
            "at": format_scalar(n.at),
            "children": [node_to_json(c) for c in n.children],
        }
    if isinstance(n, TacticStep):
        return {
            "node": "tactic",
            "kind": n.kind,
            "var": n.var,
            "k": n.k,
            "label": n.label,
            "replacement": None if n.replacement is None else poly_to_json(n.replacement),
            "rect": None if n.rect is None else n.rect.to_json(),
            "side": [s.to_json() for s in n.side],
            "child": None if n.child is None else node_to_json(n.child),
        }
    raise TypeError(f"not a certificate node: {n!r}")


def node_from_json(d: dict):
    kind = d["node"]
    if kind == "fold":
        return FoldPass(Rect.from_json(d["rect"]), d["corner"], _iv_from(d["bound"]))
    if kind == "failure":
        return Failure(Rect.from_json(d["rect"]), _iv_from(d["bound"]), d.get("corner", 0))
    if kind == "split":
        return Split(
            Rect.from_json(d["rect"]),
            d["axis"],
            parse_scalar(d["at"]),
            tuple(node_from_json(c) for c in d["children"]),
        )
    if kind == "tactic":
        return TacticStep(
            d["kind"],
            d["var"],
            d["k"],
            None if d["replacement"] is None else poly_from_json(d["replacement"]),
            None if d["rect"] is None else Rect.from_json(d["rect"]),
            tuple(Certificate.from_json(s) for s in d["side"]),
            None if d["child"] is None else node_from_json(d["child"]),
            d.get("label", ""),
        )
    raise ValueError(f"unknown node kind {kind!r}")


# ---------------------------------------------------------------------------
# Independent checking


@dataclass
class CheckResult:
    ok: bool
    leaves: int = 0
    errors: list[str] = field(default_factory=list)


def _tiles(parent: Rect, kids: Sequence, axis: int, at) -> bool:
    if len(kids) != 2:
        return False
    a, b = (k.rect for k in kids)
    if axis == 0:
        return (
            a.x0 == parent.x0 and a.x1 == at and b.x0 == at and b.x1 == parent.x1
            and a.y0 == b.y0 == parent.y0 and a.dy == b.dy == parent.dy
        )
    return (
        a.y0 == parent.y0 and a.y1 == at and b.y0 == at and b.y1 == parent.y1
        and a.x0 == b.x0 == parent.x0 and a.dx == b.dx == parent.dx
    )


def _check_node(p: Poly2, rect: Rect, node, pi_bits, cap_bits, res: CheckResult, where: str):
    if isinstance(node, Failure):
        res.errors.append(f"{where}: failure leaf on {node.rect}")
        return
    if not isinstance(node, TacticStep) and node.rect != rect:
        res.errors.append(f"{where}: node rectangle {node.rect} does not match {rect}")
        return
    if isinstance(node, FoldPass):
        if node.corner not in range(4) or (rect.is_1d and node.corner > 1):
            res.errors.append(f"{where}: bad corner {node.corner}")
            return
        q = anchor(p, rect, node.corner)
        if q.kind == EXACT:
            q = q.collapse(pi_bits, cap_bits)
        b = fold_bound(q, rect.dx, rect.dy)
        res.leaves += 1
        if b != node.bound:
            res.errors.append(f"{where}: recorded bound {node.bound} differs from recomputed {b}")
        elif b.hi > 0:
            res.errors.append(f"{where}: bound {b} is positive")
        return
    if isinstance(node, Split):
        if not _tiles(rect, node.children, node.axis, node.at):
            res.errors.append(f"{where}: children do not tile {rect}")
            return
        for i, c in enumerate(node.children):
            _check_node(p, c.rect, c, pi_bits, cap_bits, res, f"{where}/{i}")
        return
    if isinstance(node, TacticStep):
        try:
            _need_nonneg(rect)
            if node.kind == "drop":
                p2, _ = tactic_drop_term(p, node.var, node.k, pi_bits=pi_bits)
            elif node.kind == "replace":
                if node.rect != rect:
                    raise TacticError("side condition domain differs from the certified rectangle")
                axis = p.var_index(node.var)
                q = node.replacement
                p2 = p
                for j, c in _column_terms(p, axis, node.k).items():
                    if _coeff_range(c, pi_bits).lo < 0:
                        raise TacticError("negative coefficient")
                    p2 = p2 - _mono(p, axis, node.k, j, c) + _mono(p, axis, 0, j, c) * q
                side = Poly2.var(node.var, p.var_names, p.kind) ** node.k - q
                side1 = (side if axis == 0 else side.swap()).relabel((node.var, "_side"))
                lo = node.rect.x0 if axis == 0 else node.rect.y0
                hi = node.rect.x1 if axis == 0 else node.rect.y1
                pieces = sorted((s.rect for s in node.side), key=lambda r: float(r.x0))
                if not pieces or pieces[0].x0 != lo or pieces[-1].x1 != hi or any(
                    u.x1 != v.x0 for u, v in zip(pieces, pieces[1:])
                ):
                    raise TacticError("side-condition pieces do not cover the domain")
                for s in node.side:
                    if s.poly != side1:
                        raise TacticError("side-condition polynomial mismatch")
                    sub = check_certificate(s)
                    res.leaves += sub.leaves
                    if not sub.ok:
                        raise TacticError("side certificate: " + "; ".join(sub.errors))
            else:
                raise TacticError(f"unknown tactic {node.kind!r}")
        except (TacticError, ValueError) as e:
            res.errors.append(f"{where}: tactic {node.kind} {node.var}^{node.k}: {e}")
            return
        if node.child is None:
            res.errors.append(f"{where}: tactic without continuation")
            return
        _check_node(p2, rect, node.child, pi_bits, cap_bits, res, f"{where}>")
        return
    res.errors.append(f"{where}: unknown node {node!r}")


def check_certificate(cert: Certificate | dict | str) -> CheckResult:
    """Re-verify a certificate from scratch.

    Every fold leaf is recomputed and must equal the recorded bound exactly
    and be nonpositive; every split must tile its parent exactly; tactic steps
    are replayed and their side certificates checked recursively.
    """
    if isinstance(cert, str):
        cert = json.loads(cert)
    if isinstance(cert, dict):
        try:
            cert = Certificate.from_json(cert)
        except (KeyError, ValueError, TypeError) as e:
            return CheckResult(False, 0, [f"malformed certificate: {e}"])
    res = CheckResult(True)
    try:
        _check_node(cert.poly, cert.rect, cert.root, cert.pi_bits, cert.cap_bits, res, "root")
    except (ValueError, TypeError, ZeroDivisionError) as e:
        res.errors.append(f"certificate could not be re-verified: {e}")
    res.ok = not res.errors
    return res
