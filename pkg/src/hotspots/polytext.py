"""Text format for exact polynomials.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := RATIONAL | VAR | "pi2" | "sqrt" "(" RATIONAL ")" | "(" expr ")"

``RATIONAL`` is ``p`` or ``p/q`` with nonnegative integers; there are no
decimals, so every file denotes an exact polynomial.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .exactq import PiQuad, format_scalar, sqrt_exact
from .poly import Poly2

__all__ = ["PolyParseError", "parse_poly", "format_poly"]

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class PolyParseError(ValueError):
    pass


def _tokens(s: str):
    pos = 0
    out = []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            break
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif ident is not None:
            out.append(("id", ident))
        elif op in "+-*^()":
            out.append(("op", op))
        else:
            raise PolyParseError(f"unexpected character {op!r} at {m.start(3)}")
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, text: str, var_names):
        self.toks = _tokens(text)
        self.i = 0
        self.vn = tuple(var_names)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        t = self.toks[self.i]
        if (kind and t[0] != kind) or (val and t[1] != val):
            raise PolyParseError(f"expected {val or kind}, got {t[1] or 'end of input'!r}")
        self.i += 1
        return t

    def const(self, c) -> Poly2:
        return Poly2.const(c, self.vn)

    def expr(self) -> Poly2:
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly2:
        p = self.unary()
        while self.peek() == ("op", "*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Poly2:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly2:
        p = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            k = self.take("num")[1]
            if "/" in k:
                raise PolyParseError("exponents must be nonnegative integers")
            p = p ** int(k)
        return p

    def atom(self) -> Poly2:
        kind, v = self.peek()
        if kind == "num":
            self.take()
            return self.const(Fraction(v))
        if kind == "id":
            self.take()
            if v == "pi2":
                return Poly2.pi2(self.vn)
            if v == "sqrt":
                self.take("op", "(")
                r = Fraction(self.take("num")[1])
                self.take("op", ")")
                return self.const(sqrt_exact(r))
            if v in self.vn:
                return Poly2.var(v, self.vn)
            raise PolyParseError(f"unknown identifier {v!r} (variables are {self.vn})")
        if (kind, v) == ("op", "("):
            self.take()
            p = self.expr()
            self.take("op", ")")
            return p
        raise PolyParseError(f"unexpected {v or 'end of input'!r}")


def parse_poly(text: str, var_names=("x", "y")) -> Poly2:
    """Parse ``text`` into an exact :class:`Poly2`."""
    if var_names[0] == var_names[1]:
        raise ValueError("variable names must differ")
    for v in var_names:
        if v in ("pi2", "sqrt"):
            raise ValueError(f"{v!r} is reserved")
    ps = _Parser(text, var_names)
    try:
        p = ps.expr()
    except ValueError as e:
        if isinstance(e, PolyParseError):
            raise
        raise PolyParseError(str(e)) from e
    ps.take("end")
    return p


def _fmt_coeff(c: PiQuad) -> str:
    parts = []
    for k, v in enumerate((c.c0, c.c1, c.c2)):
        if v == 0:
            continue
        s = f"({format_scalar(v)})"
        parts.append(s if k == 0 else s + ("*pi2" if k == 1 else "*pi2^2"))
    return " + ".join(parts)


def format_poly(p: Poly2) -> str:
    """Canonical text for an exact polynomial; ``parse_poly`` reads it back."""
    if p.kind != "exact":
        raise TypeError("only exact polynomials have a text form")
    terms = []
    x, y = p.var_names
    for i, j, c in p.terms():
        mono = "".join(f"*{n}" + (f"^{e}" if e > 1 else "") for n, e in ((x, i), (y, j)) if e)
        terms.append(f"({_fmt_coeff(c)}){mono}")
    return " + ".join(terms) if terms else "0"
