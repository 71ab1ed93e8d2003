"""Hermitian 2x2 matrices over F and vector pairs in the split plane C.

C = F^2 in the basis {w0, w1} with (w0, w1) = 1 and both basis vectors
isotropic.  The form is linear in the first slot:

    (a w0 + b w1, c w0 + d w1) = a*conj(d) + b*conj(c).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DegenerateInput, InvalidClass, NotRepresentable, SingularMatrix
from .padic import INF, PAdicElem, PrimeParam, chi


class VectorC:
    """A vector x*w0 + y*w1 of C."""

    __slots__ = ("x", "y")

    def __init__(self, x: PAdicElem, y: PAdicElem):
        self.x = x
        self.y = y

    @property
    def field(self) -> PrimeParam:
        return self.x.field

    def __add__(self, o: "VectorC") -> "VectorC":
        return VectorC(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "VectorC") -> "VectorC":
        return VectorC(self.x - o.x, self.y - o.y)

    def __neg__(self) -> "VectorC":
        return VectorC(-self.x, -self.y)

    def scale(self, c) -> "VectorC":
        return VectorC(self.x * c, self.y * c)

    __rmul__ = scale

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero()

    def __eq__(self, o):
        if not isinstance(o, VectorC):
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"VectorC({self.x}, {self.y})"


def w0(field: PrimeParam) -> VectorC:
    return VectorC(field.one, field.zero)


def w1(field: PrimeParam) -> VectorC:
    return VectorC(field.zero, field.one)


def form(u: VectorC, v: VectorC) -> PAdicElem:
    return u.x * v.y.conj() + u.y * v.x.conj()


def qnorm(v: VectorC) -> PAdicElem:
    """q(v) = (v, v), which lies in F0."""
    return form(v, v)


@dataclass(frozen=True)
class HermMatrix2:
    t11: PAdicElem
    t12: PAdicElem
    t22: PAdicElem

    def __post_init__(self):
        if not (self.t11.in_base() and self.t22.in_base()):
            raise ValueError("diagonal entries of a Hermitian matrix must lie in F0")

    @property
    def t21(self) -> PAdicElem:
        return self.t12.conj()

    @property
    def field(self) -> PrimeParam:
        return self.t11.field

    def det(self) -> PAdicElem:
        return self.t11 * self.t22 - self.t12 * self.t21

    def rows(self):
        return [[self.t11, self.t12], [self.t21, self.t22]]

    def congruent(self, g) -> "HermMatrix2":
        """g^t T conj(g) for a 2x2 matrix g over F (nested lists)."""
        t = self.rows()
        gt = [[g[j][i] for j in range(2)] for i in range(2)]
        gb = [[g[i][j].conj() for j in range(2)] for i in range(2)]
        m = _matmul(_matmul(gt, t), gb)
        return HermMatrix2(m[0][0], m[0][1], m[1][1])

    def __str__(self):
        return f"[[{self.t11}, {self.t12}], [{self.t21}, {self.t22}]]"


def _matmul(a, b):
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)]
            for i in range(2)]


@dataclass(frozen=True)
class Diagonal:
    """diag(u1 (-p)^alpha, u2 (-p)^beta) with eps1 = chi(-u1 u2)."""

    alpha: int
    beta: int
    eps1: int

    def __post_init__(self):
        if self.alpha > self.beta:
            raise InvalidClass(f"need alpha <= beta, got {self.alpha} > {self.beta}")
        if self.eps1 not in (1, -1):
            raise InvalidClass("eps1 must be +1 or -1")

    @property
    def integral(self) -> bool:
        return self.alpha >= 0

    def __str__(self):
        return f"Diagonal({self.alpha},{self.beta},{self.eps1:+d})"


@dataclass(frozen=True)
class AntiDiagonal:
    """[[0, pi^n], [(-pi)^n, 0]] with n odd."""

    n: int

    def __post_init__(self):
        if self.n % 2 == 0:
            raise InvalidClass(f"anti-diagonal classes need odd n, got {self.n}")

    @property
    def integral(self) -> bool:
        return self.n >= 1

    def __str__(self):
        return f"AntiDiagonal({self.n})"


TClass = Union[Diagonal, AntiDiagonal]


def gram_pair(b1: VectorC, b2: VectorC) -> HermMatrix2:
    return HermMatrix2(form(b1, b1), form(b1, b2), form(b2, b2))


def classify(T: HermMatrix2) -> TClass:
    """Normal-form class of a nonsingular Hermitian 2x2 matrix."""
    d = T.det()
    if d.is_zero():
        raise SingularMatrix("matrix is singular")
    p = T.field.p
    vd = min(T.t11.val, T.t22.val)
    vo = T.t12.val
    if vo < vd and vo % 2 == 1:
        return AntiDiagonal(int(vo))
    alpha = int(min(vd, vo)) // 2
    beta = d.val // 2 - alpha
    # chi(-p) = 1, so the (-p)-powers in det drop out of chi(-u1 u2).
    return Diagonal(alpha, beta, chi(-d.rational(), p))


def is_split_representable(c: TClass) -> bool:
    return isinstance(c, AntiDiagonal) or c.eps1 == 1


def canonical_pair(c: TClass, field: PrimeParam) -> tuple[VectorC, VectorC]:
    """A concrete pair in C whose Gram matrix has class c."""
    if isinstance(c, AntiDiagonal):
        return VectorC(field.pi_pow(c.n), field.zero), w1(field)
    if c.eps1 != 1:
        raise NotRepresentable(f"{c} is not represented in the split plane")
    s = field.elem(-Fraction(-field.p) ** c.alpha / 2)
    b1 = VectorC(s, field.one)
    b2 = VectorC(s, -field.one).scale(field.pi_pow(c.beta - c.alpha))
    return b1, b2


# -- isometries of C used to scramble a pair ------------------------------

def _swap(v: VectorC, _f, _a) -> VectorC:
    return VectorC(v.y, v.x)


def _shear_w1(v: VectorC, f: PrimeParam, s) -> VectorC:
    # w1 -> w1 + s*pi*w0
    return VectorC(v.x + v.y * f.pi * s, v.y)


def _shear_w0(v: VectorC, f: PrimeParam, s) -> VectorC:
    return VectorC(v.x, v.y + v.x * f.pi * s)


def _scale(v: VectorC, f: PrimeParam, c: PAdicElem) -> VectorC:
    # w0 -> c w0, w1 -> conj(c)^-1 w1
    return VectorC(v.x * c, v.y / c.conj())


def random_isometry_word(field: PrimeParam, rng: random.Random, max_len: int = 12):
    """A list of (move, argument) pairs, each an isometry of C."""
    p = field.p
    word = []
    for _ in range(rng.randint(0, max_len)):
        kind = rng.randrange(4)
        if kind == 0:
            word.append((_swap, None))
        elif kind in (1, 2):
            word.append((_shear_w1 if kind == 1 else _shear_w0, rng.randint(1, p - 1)))
        else:
            c = field.elem(rng.randint(1, p - 1), rng.randint(-2, 2))
            word.append((_scale, c))
    return word


def apply_word(word, v: VectorC) -> VectorC:
    f = v.field
    for move, arg in word:
        v = move(v, f, arg)
    return v


def randomize_pair(b1: VectorC, b2: VectorC, seed) -> tuple[VectorC, VectorC]:
    """Move a pair by a random isometry of C; the Gram matrix is unchanged."""
    rng = random.Random(seed)
    word = random_isometry_word(b1.field, rng)
    return apply_word(word, b1), apply_word(word, b2)


def random_gl2(field: PrimeParam, rng: random.Random, spread: int = 3):
    """A random 2x2 matrix over O_F with unit determinant."""

    def rnd():
        return field.elem(rng.randint(-spread, spread), rng.randint(-spread, spread))

    while True:
        g = [[rnd(), rnd()], [rnd(), rnd()]]
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        if not det.is_zero() and det.val == 0:
            return g


def check_independent(b1: VectorC, b2: VectorC) -> None:
    det = b1.x * b2.y - b1.y * b2.x
    if det.is_zero():
        raise DegenerateInput("vectors are linearly dependent")


def class_of_pair(b1: VectorC, b2: VectorC) -> TClass:
    check_independent(b1, b2)
    return classify(gram_pair(b1, b2))


__all__ = [
    "VectorC", "HermMatrix2", "Diagonal", "AntiDiagonal", "TClass",
    "w0", "w1", "form", "qnorm", "gram_pair", "classify", "canonical_pair",
    "randomize_pair", "random_gl2", "is_split_representable", "class_of_pair",
    "check_independent", "INF",
]
