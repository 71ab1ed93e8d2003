"""Closed local density polynomials and the density side of the KR identity.

Polynomials are exact in two variables: X, and q with possibly negative
exponents (the hyperbolic-plane formulas carry 1/q and 1/q^2).  Nothing is
floating point; evaluation returns a Fraction.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from .errors import OutOfRange
from .herm import AntiDiagonal, Diagonal, TClass
from .divisor import intersect_closed

BASES = ("L", "H")


class DensityPoly:
    """Sum of c * X^i * q^j over a finite map (i, j) -> c with integer c."""

    __slots__ = ("terms", "meta")

    def __init__(self, terms=None, meta=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        self.meta = meta or {}

    @classmethod
    def const(cls, c: int) -> "DensityPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, xdeg: int = 0, qdeg: int = 0, c: int = 1) -> "DensityPoly":
        return cls({(xdeg, qdeg): c})

    def _lift(self, other):
        if isinstance(other, DensityPoly):
            return other
        if isinstance(other, int):
            return DensityPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = defaultdict(int, self.terms)
        for k, v in other.terms.items():
            out[k] += v
        return DensityPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DensityPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = defaultdict(int)
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                out[(i1 + i2, j1 + j2)] += c1 * c2
        return DensityPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = DensityPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree_x(self) -> int:
        """X-degree; -1 for the zero polynomial."""
        return max((i for i, _ in self.terms), default=-1)

    def coefficient_x(self, i: int) -> "DensityPoly":
        return DensityPoly({(0, j): c for (k, j), c in self.terms.items() if k == i})

    def diff_x(self) -> "DensityPoly":
        return DensityPoly({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})

    def at_x(self, x: int) -> "DensityPoly":
        """Substitute an integer for X, leaving a Laurent polynomial in q."""
        out = defaultdict(int)
        for (i, j), c in self.terms.items():
            out[(0, j)] += c * x ** i
        return DensityPoly(out)

    def __call__(self, q, x) -> Fraction:
        q, x = Fraction(q), Fraction(x)
        return sum((c * x ** i * q ** j for (i, j), c in self.terms.items()), Fraction(0))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items()):
            mono = "*".join(s for s in (
                f"X^{i}" if i > 1 else ("X" if i == 1 else ""),
                f"q^{j}" if j not in (0, 1) else ("q" if j == 1 else ""),
            ) if s)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


X = DensityPoly.monomial(1, 0)
Q = DensityPoly.monomial(0, 1)
QINV = DensityPoly.monomial(0, -1)
ONE = DensityPoly.const(1)


def _qpow(k: int) -> DensityPoly:
    return DensityPoly.monomial(0, k)


def _geom(lo: int, hi: int, xstep: int, qstep: int) -> DensityPoly:
    """sum_{e=lo}^{hi} X^(xstep e) q^(qstep e)."""
    return DensityPoly({(xstep * e, qstep * e): 1 for e in range(lo, hi + 1)})


def _diag_L(a: int, b: int, e1: int, e2: int) -> DensityPoly:
    one_minus_x = ONE - X
    return (
        one_minus_x * (1 + e2 + e2 * Q) * _geom(0, a, 1, 1)
        - e1 * _qpow(a + 1) * X ** (b + 1) * one_minus_x * _geom(0, a, 1, -1)
        - e1 * (1 + Q) * (X ** (a + b + 2) + e1 * e2)
        + (1 + e2) * _qpow(a + 1) * X ** (a + 1) * (1 + e1 * X ** (b - a))
    )


def _diag_H(a: int, b: int, e1: int) -> DensityPoly:
    one_minus_x = ONE - X
    c = ONE + QINV + _qpow(-2)
    return (
        c * one_minus_x * _geom(0, a, 1, 1)
        - e1 * _qpow(a - 1) * X ** (b + 1) * one_minus_x * _geom(0, a, 1, -1)
        - QINV * (1 + QINV) * (1 + e1 * X ** (a + b + 2))
        + _qpow(a) * (1 + QINV) * X ** (a + 1) * (1 + e1 * X ** (b - a + 1))
    )


def _anti_L(n: int, e2: int) -> DensityPoly:
    r = (n + 1) // 2
    one_minus_x = ONE - X
    return (
        -_qpow(n + 2) * one_minus_x * _geom(r + 1, n + 1, 1, -1)
        + one_minus_x * (1 + e2 + e2 * Q) * _geom(0, r, 1, 1)
        - (Q + 1) * (e2 + X ** (n + 2))
        + (1 + e2) * (Q + 1) * _qpow(r) * X ** (r + 1)
    )


def _anti_H(n: int) -> DensityPoly:
    r = (n + 1) // 2
    one_minus_x = ONE - X
    return (
        -one_minus_x * _qpow(n) * _geom(r + 1, n + 1, 1, -1)
        + (ONE + QINV + _qpow(-2)) * one_minus_x * _geom(0, r, 1, 1)
        - (QINV + _qpow(-2)) * (1 + X ** (n + 2))
        + (1 + QINV) ** 2 * _qpow(r) * X ** (r + 1)
    )


def alpha_poly(base: str, c: TClass, eps2: int = -1) -> DensityPoly:
    """alpha(S, T, X) for S = diag(v, 1) ("L", eps2 = chi(-v)) or S = H.

    Classes outside the integral range (alpha < 0, resp. n < -1) give the
    zero polynomial.  eps2 is ignored for H.
    """
    if base not in BASES:
        raise OutOfRange(f"unknown base lattice {base!r}")
    if eps2 not in (1, -1):
        raise OutOfRange("eps2 must be +1 or -1")
    if isinstance(c, Diagonal):
        if c.alpha < 0:
            poly = DensityPoly()
        elif base == "L":
            poly = _diag_L(c.alpha, c.beta, c.eps1, eps2)
        else:
            poly = _diag_H(c.alpha, c.beta, c.eps1)
    elif isinstance(c, AntiDiagonal):
        if c.n < -1:
            poly = DensityPoly()
        elif base == "L":
            poly = _anti_L(c.n, eps2)
        else:
            poly = _anti_H(c.n)
    else:
        raise OutOfRange(f"not a class: {c!r}")
    poly.meta = {"base": base, "class": c, "eps2": eps2 if base == "L" else None}
    return poly


def alpha_prime(base: str, c: TClass, eps2: int = -1, q=None):
    """-d/dX alpha(S, T, X) at X = 1; a q-polynomial, or a Fraction if q is given."""
    d = -alpha_poly(base, c, eps2).diff_x().at_x(1)
    return d if q is None else d(q, 1)


def alpha_value(base: str, c: TClass, q, x=1, eps2: int = -1) -> Fraction:
    return alpha_poly(base, c, eps2)(q, x)


def alpha_LS(q) -> Fraction:
    """alpha(L, S) for S the Gram matrix of L itself: 2(1 + q)."""
    return Fraction(2 * (1 + q))


def _check_split(c: TClass) -> None:
    if isinstance(c, Diagonal) and c.eps1 != 1:
        raise OutOfRange(f"{c} is not the class of a pair in the split plane")


def kr_rhs(c: TClass, q) -> Fraction:
    """2 alpha'(L,T)/alpha(L,S) - (2q^2/(q^2-1)) alpha(H,T)/alpha(L,S), with eps2 = -1."""
    _check_split(c)
    q = Fraction(q)
    als = alpha_LS(q)
    a_prime = alpha_prime("L", c, -1, q)
    a_h = alpha_value("H", c, q)
    return 2 * a_prime / als - (2 * q * q / (q * q - 1)) * a_h / als


def verify_kr(c: TClass, q) -> bool:
    return kr_rhs(c, q) == intersect_closed(c, int(q), "split")


__all__ = [
    "DensityPoly", "X", "Q", "alpha_poly", "alpha_prime", "alpha_value",
    "alpha_LS", "kr_rhs", "verify_kr",
]
