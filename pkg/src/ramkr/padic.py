"""Arithmetic in the ramified quadratic extension F = F0(pi), pi^2 = p.

Elements are stored as an exact representative x0 + x1*pi with rational
coordinates, together with an absolute pi-adic precision.  Exact elements
(the common case) carry ``prec = inf``; elements built from truncated digit
data carry a finite ``prec`` and refuse to decide anything at or beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from numbers import Rational

import gmpy2
from gmpy2 import mpq

from .errors import PrecisionExhausted

INF = math.inf
_ZERO = mpq(0)


def _is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    return all(n % d for d in range(3, isqrt(n) + 1, 2))


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero integer")
    return int(gmpy2.remove(n, p)[1])


def vp(x, p: int) -> float:
    """p-adic valuation of a rational, +inf for zero."""
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def chi(x, p: int) -> int:
    """Quadratic character of F0^x attached to F/F0.

    Writing x = p^k * u with u a p-unit, chi(x) = chi(-1)^k * (u/p); the value
    on p is forced by -p being the norm of pi.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("chi is undefined at 0")
    k = vp(x, p)
    u = x / Fraction(p) ** k
    unit = u.numerator * u.denominator  # same square class as num/den
    sign = legendre(-1, p) ** (k % 2)
    return sign * legendre(unit, p)


def residue_mod(x, modulus: int) -> int:
    """Image of a p-integral rational in Z/modulus."""
    num, den = int(x.numerator), int(x.denominator)
    return num * pow(den, -1, modulus) % modulus


@dataclass(frozen=True)
class PrimeParam:
    """The prime p (so q = p) and the working precision N in pi-digits."""

    p: int
    N: int = 64

    def __post_init__(self):
        if not _is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.N < 4:
            raise ValueError("working precision N must be at least 4")

    @property
    def q(self) -> int:
        return self.p

    @property
    def chi_minus_one(self) -> int:
        return legendre(-1, self.p)

    def elem(self, x0=0, x1=0, prec=INF) -> "PAdicElem":
        return PAdicElem(self, mpq(x0), mpq(x1), prec)

    @property
    def zero(self) -> "PAdicElem":
        return self.elem(0)

    @property
    def one(self) -> "PAdicElem":
        return self.elem(1)

    @property
    def pi(self) -> "PAdicElem":
        return self.elem(0, 1)

    def pi_pow(self, k: int) -> "PAdicElem":
        """pi^k for any integer k, exactly."""
        h, r = divmod(k, 2)
        ph = mpq(self.p) ** h
        return self.elem(0 if r else ph, ph if r else 0)

    def from_val_unit(self, val: int, u0: int, u1: int, prec=INF) -> "PAdicElem":
        """Rebuild pi^val * (u0 + u1*pi)."""
        if u0 % self.p == 0:
            raise ValueError("unit part must have a p-unit constant term")
        return self.pi_pow(val) * self.elem(u0, u1, prec)

    def __repr__(self):
        return f"PrimeParam(p={self.p}, N={self.N})"


class PAdicElem:
    __slots__ = ("field", "x0", "x1", "prec")

    def __init__(self, field: PrimeParam, x0, x1, prec=INF):
        self.field = field
        self.x0 = x0
        self.x1 = x1
        self.prec = prec

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "PAdicElem":
        if isinstance(other, PAdicElem):
            if other.field.p != self.field.p:
                raise ValueError("elements live over different primes")
            return other
        if isinstance(other, (int, Rational)) or type(other) is type(_ZERO):
            return PAdicElem(self.field, mpq(other), _ZERO)
        return NotImplemented

    # -- valuation --------------------------------------------------------
    def _raw_val(self) -> float:
        p = self.field.p
        return min(2 * vp(self.x0, p), 2 * vp(self.x1, p) + 1)

    def is_zero(self) -> bool:
        if self.x0 == 0 and self.x1 == 0:
            if self.prec == INF:
                return True
            raise PrecisionExhausted("cannot distinguish from zero")
        if self._raw_val() >= self.prec:
            raise PrecisionExhausted("cannot distinguish from zero")
        return False

    @property
    def val(self) -> float:
        """Exact pi-adic valuation; +inf for an exact zero."""
        if self.is_zero():
            return INF
        return int(self._raw_val())

    @property
    def unit(self) -> tuple[int, int]:
        """Unit part (u0, u1) with self = pi^val * (u0 + u1*pi).

        Coordinates are reduced modulo p^ceil((N - max(val, 0)) / 2).
        """
        v = self.val
        if v == INF:
            raise ValueError("zero has no unit part")
        u = self * self.field.pi_pow(-v)
        k = max(1, -(-(self.field.N - max(v, 0)) // 2))
        m = self.field.p ** k
        return residue_mod(u.x0, m), residue_mod(u.x1, m)

    @property
    def is_exact(self) -> bool:
        return self.prec == INF

    def in_base(self) -> bool:
        """True when the element lies in F0 (fixed by conjugation)."""
        return self.x1 == 0

    def rational(self) -> Fraction:
        if self.x1 != 0:
            raise ValueError(f"{self} is not in F0")
        return Fraction(int(self.x0.numerator), int(self.x0.denominator))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PAdicElem(self.field, self.x0 + o.x0, self.x1 + o.x1,
                         min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return PAdicElem(self.field, -self.x0, -self.x1, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        x0 = self.x0 * o.x0 + p * self.x1 * o.x1
        x1 = self.x0 * o.x1 + self.x1 * o.x0
        prec = INF
        if self.prec != INF or o.prec != INF:
            prec = min(self.prec + o._raw_val(), o.prec + self._raw_val())
        return PAdicElem(self.field, x0, x1, prec)

    __rmul__ = __mul__

    def conj(self) -> "PAdicElem":
        return PAdicElem(self.field, self.x0, -self.x1, self.prec)

    def norm(self):
        """Nm(x) = x * conj(x), an element of F0."""
        return self.x0 * self.x0 - self.field.p * self.x1 * self.x1

    def trace(self):
        return 2 * self.x0

    def inverse(self) -> "PAdicElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        nm = self.norm()
        prec = INF
        if self.prec != INF:
            prec = self.prec - 2 * self.val
        return PAdicElem(self.field, self.x0 / nm, -self.x1 / nm, prec)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = PAdicElem(self.field, mpq(1), _ZERO)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_exact and o.is_exact:
            return self.x0 == o.x0 and self.x1 == o.x1
        return (self - o).is_zero()

    def __hash__(self):
        if not self.is_exact:
            raise TypeError("inexact elements are unhashable")
        return hash((self.field.p, self.x0, self.x1))

    def __repr__(self):
        return f"PAdicElem({self})"

    def __str__(self):
        a, b = self.x0, self.x1
        if b == 0:
            s = str(a)
        elif a == 0:
            s = "pi" if b == 1 else ("-pi" if b == -1 else f"{b}*pi")
        else:
            sign = "+" if b > 0 else "-"
            mag = abs(b)
            s = f"{a}{sign}" + ("pi" if mag == 1 else f"{mag}*pi")
        if self.prec != INF:
            s += f" + O(pi^{self.prec})"
        return s


def digits(x: PAdicElem, start: int, stop: int) -> tuple[int, ...]:
    """pi-adic digits of x in positions start..stop-1, each in 0..p-1.

    Requires val(x) >= start.
    """
    f = x.field
    p = f.p
    y = x * f.pi_pow(-start)
    m = p ** max(1, stop - start)
    a, b = y.x0, y.x1
    out = []
    for _ in range(max(0, stop - start)):
        if vp(a, p) < 0 or vp(b, p) < 0:
            raise ValueError("element is not integral at the start position")
        d = residue_mod(a, m) % p
        a, b = b, (a - d) / p
        out.append(d)
    return tuple(out)
