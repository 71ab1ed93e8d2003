"""Special divisors on the Kramer model and their intersection numbers.

A divisor is a finite integer combination of projective lines PLine(L2),
exceptional curves Exc(L0) and horizontal parts Horizontal(b).  The
intersection number Int(T) is assembled from local pairing rules summed
over the common support tree, and separately from closed formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import InvalidClass, UnsupportedPairing
from .herm import (
    AntiDiagonal, Diagonal, TClass, VectorC, canonical_pair, check_independent,
    classify, form, gram_pair, qnorm,
)
from .tree import Lattice, SupportTree, lambda_b, tree_intersection


@dataclass(frozen=True)
class PLine:
    lattice: Lattice

    def __str__(self):
        return f"P{self.lattice.key()}"


@dataclass(frozen=True)
class Exc:
    lattice: Lattice

    def __str__(self):
        return f"Exc{self.lattice.key()}"


@dataclass(frozen=True, eq=False)
class Horizontal:
    b: VectorC

    @property
    def anchor(self) -> Lattice:
        return lambda_b(self.b)

    def __eq__(self, other):
        return isinstance(other, Horizontal) and self.b == other.b

    def __hash__(self):
        return hash(("h", self.b))


Component = Union[PLine, Exc, Horizontal]


class Divisor(dict):
    """Component -> nonzero integer multiplicity."""

    def add(self, comp: Component, mult: int) -> None:
        m = self.get(comp, 0) + mult
        if m:
            self[comp] = m
        else:
            self.pop(comp, None)

    def components(self, kind):
        return {c: m for c, m in self.items() if isinstance(c, kind)}


def decompose(b: VectorC, region: SupportTree) -> Divisor:
    """Multiplicities of the special divisor of b over a finite region.

    PLine(L2) gets n(b, L2), Exc(L0) gets n(b, L0) + 1, plus one horizontal
    component when q(b) is nonzero.  q(b) outside O_F0 gives the zero divisor.
    """
    div = Divisor()
    qb = qnorm(b)
    if not qb.is_zero() and qb.val < 0:
        return div
    idx = region.vectors.index(b) if b in region.vectors else None
    for k, lat in region.vertices.items():
        n = region.annotations[k][idx] if idx is not None else lat.n_of(b)
        if n >= 1:
            div.add(PLine(lat), n)
    for k, lat in region.edges.items():
        n = region.annotations[k][idx] if idx is not None else lat.n_of(b)
        if n >= 0:
            div.add(Exc(lat), n + 1)
    if not qb.is_zero():
        div.add(Horizontal(b), 1)
    return div


def component_pairing(c1: Component, c2: Component, q: int) -> int:
    """Intersection pairing of two irreducible components."""
    if isinstance(c2, Exc) and not isinstance(c1, Exc):
        c1, c2 = c2, c1
    if isinstance(c2, PLine) and isinstance(c1, Horizontal):
        c1, c2 = c2, c1
    if isinstance(c1, Exc):
        if isinstance(c2, PLine):
            return int(c2.lattice.contains_lattice(c1.lattice))
        if isinstance(c2, Exc):
            return -2 if c1.lattice == c2.lattice else 0
        return int(c1.lattice == c2.anchor)
    if isinstance(c1, PLine):
        if isinstance(c2, PLine):
            return -(q + 1) if c1.lattice == c2.lattice else 0
        return 0
    # Horizontal . Horizontal
    if not form(c1.b, c2.b).is_zero():
        raise UnsupportedPairing("horizontal parts need orthogonal anchors")
    return 0


def cycle_pairing(c: Component, b: VectorC, tree: SupportTree | None = None) -> int:
    """Pairing of one component with the whole special divisor of b."""
    if isinstance(c, PLine):
        return int(c.lattice.contains(b))
    if isinstance(c, Exc):
        return -int(c.lattice.contains(b))
    if not form(c.b, b).is_zero():
        raise UnsupportedPairing("horizontal pairing needs (b1, b) = 0")
    return c.anchor.n_of(b) + 1


def _orthogonalize(b1: VectorC, b2: VectorC):
    """An O_F-basis change of (b1, b2) making the pair orthogonal.

    The pivot is the basis vector of least q-valuation (or b1 + b2 when the
    off-diagonal entry is strictly smaller and of even valuation); the other
    vector is then corrected by an integral multiple of the pivot.
    """
    T = gram_pair(b1, b2)
    v11, v22, vo = T.t11.val, T.t22.val, T.t12.val
    if vo < min(v11, v22):
        e, other = b1 + b2, b2
    elif v11 <= v22:
        e, other = b1, b2
    else:
        e, other = b2, b1
    coeff = form(other, e) / qnorm(e)
    if coeff.val < 0:
        return None
    return e, other - e.scale(coeff)


def _tree_sum(b1: VectorC, tree: SupportTree) -> int:
    total = 0
    for k in tree.vertices:
        total += tree.annotations[k][0]
    for k in tree.edges:
        total -= tree.annotations[k][0] + 1
    return total


def intersect_tree(b1: VectorC, b2: VectorC) -> int:
    """Int(T) by summing the local pairing rules over the common support."""
    check_independent(b1, b2)
    f = b1.field
    cls = classify(gram_pair(b1, b2))
    if not cls.integral:
        return 0
    if isinstance(cls, Diagonal):
        pair = _orthogonalize(b1, b2)
        if pair is None:
            pair = canonical_pair(cls, f)
        e, g = pair
        tree = tree_intersection(e, g)
        return _tree_sum(e, tree) + lambda_b(e).n_of(g) + 1
    if qnorm(b1).is_zero():
        pass
    elif qnorm(b2).is_zero():
        b1, b2 = b2, b1
    else:
        # no exact isotropic basis vector is available in general
        b1, b2 = canonical_pair(cls, f)
    tree = tree_intersection(b1, b2)
    return _tree_sum(b1, tree)


def intersect_closed(c: TClass, q: int, space: str = "split") -> int:
    """Closed-form Int(T) for the split or the nonsplit plane."""
    if space not in ("split", "nonsplit"):
        raise ValueError(f"unknown space {space!r}")
    if isinstance(c, AntiDiagonal):
        if space == "nonsplit":
            raise InvalidClass("anti-diagonal classes occur only in the split plane")
        if c.n < 1:
            return 0
        r = (c.n + 1) // 2
        return -(q + 1) * (q ** r - 1) // (q - 1) + c.n + 1
    a, b = c.alpha, c.beta
    if a < 0:
        return 0
    if space == "split":
        return a + b - 2 * q * (q ** a - 1) // (q - 1)
    return 2 * sum(q ** s * (a + b + 1 - 2 * s) for s in range(a + 1)) - a - b - 2


__all__ = [
    "PLine", "Exc", "Horizontal", "Divisor", "decompose", "component_pairing",
    "cycle_pairing", "intersect_tree", "intersect_closed",
]
