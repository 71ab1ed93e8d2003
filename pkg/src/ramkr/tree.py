"""The Bruhat-Tits tree of vertex lattices in C.

Type-2 lattices are the vertices and type-0 lattices the edges.  Every
type-2 lattice is stored with a basis (v0, v1) whose Gram matrix is exactly
pi^-1 [[0, 1], [-1, 0]]; every type-0 lattice with a basis (e0, e1) whose
Gram matrix is [[0, 1], [1, 0]].  Both shapes make the neighbor formulas
one-liners.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import DegenerateInput, IsotropicVector, RegionExceeded
from .herm import (
    AntiDiagonal, Diagonal, TClass, VectorC, check_independent, classify, form,
    gram_pair, qnorm, w0, w1,
)
from .padic import INF, PAdicElem, PrimeParam, chi, digits

TYPE0, TYPE2, NOT_VERTEX = "Type0", "Type2", "NotVertex"
MAX_NODES = 100_000


def _solve2(m, rhs):
    """Solve the 2x2 system m * c = rhs over F (m given as rows)."""
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det.is_zero():
        raise DegenerateInput("singular 2x2 system")
    c0 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det
    c1 = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det
    return c0, c1


class Lattice:
    """A rank-2 O_F-lattice in C given by two basis columns."""

    __slots__ = ("b0", "b1", "vtype", "_key")

    def __init__(self, b0: VectorC, b1: VectorC, vtype: str | None = None):
        check_independent(b0, b1)
        self.b0 = b0
        self.b1 = b1
        self.vtype = vtype
        self._key = None

    @property
    def field(self) -> PrimeParam:
        return self.b0.field

    @property
    def basis(self):
        return (self.b0, self.b1)

    def gram(self):
        b = self.basis
        return [[form(b[i], b[j]) for j in range(2)] for i in range(2)]

    def coords(self, v: VectorC):
        m = [[self.b0.x, self.b1.x], [self.b0.y, self.b1.y]]
        return _solve2(m, (v.x, v.y))

    def n_of(self, v: VectorC) -> int:
        """Largest n with pi^-n v in the lattice."""
        c0, c1 = self.coords(v)
        n = min(c0.val, c1.val)
        if n == INF:
            raise DegenerateInput("n(b, L) is undefined for b = 0")
        return int(n)

    def contains(self, v: VectorC) -> bool:
        c0, c1 = self.coords(v)
        return c0.val >= 0 and c1.val >= 0

    def contains_lattice(self, other: "Lattice") -> bool:
        return self.contains(other.b0) and self.contains(other.b1)

    def scaled(self, c: PAdicElem) -> "Lattice":
        return Lattice(self.b0.scale(c), self.b1.scale(c))

    def key(self):
        """Basis-independent hash key: Hermite normal form over O_F."""
        if self._key is None:
            self._key = _hnf_key(self.b0, self.b1)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.contains_lattice(other) and other.contains_lattice(self)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        tag = self.vtype or "Lattice"
        return f"{tag}<{self.b0}, {self.b1}>"


def _hnf_key(b0: VectorC, b1: VectorC):
    f = b0.field
    cols = [b0, b1]
    cols.sort(key=lambda v: v.x.val)
    c, o = cols
    k1 = c.x.val
    if k1 == INF:
        raise DegenerateInput("basis is degenerate")
    o2y = o.y - o.x / c.x * c.y
    k2 = o2y.val
    # normalize c to (pi^k1, y) and reduce y modulo pi^k2
    y = c.y * f.pi_pow(int(k1)) / c.x
    s = y.val
    if s >= k2:
        return (int(k1), int(k2))
    return (int(k1), int(k2), int(s), digits(y, int(s), int(k2)))


# -- constructors and basic operations ------------------------------------

def standard_lattice(f: PrimeParam) -> Lattice:
    return Lattice(w0(f), w1(f), TYPE0)


def type0(e0: VectorC, e1: VectorC) -> Lattice:
    """Type-0 lattice from a hyperbolic basis ((e0, e1) = 1)."""
    return Lattice(e0, e1, TYPE0)


def type2(v0: VectorC, v1: VectorC) -> Lattice:
    """Type-2 lattice from a basis with (v0, v1) = pi^-1."""
    return Lattice(v0, v1, TYPE2)


def dual(lat: Lattice) -> Lattice:
    """Basis of {x : (x, L) in O_F}: the vectors d_j with (d_j, b_i) = delta_ij."""
    b = lat.basis
    m = [[b[i].y.conj(), b[i].x.conj()] for i in range(2)]
    f = lat.field
    cols = []
    for j in range(2):
        rhs = (f.one if j == 0 else f.zero, f.one if j == 1 else f.zero)
        dx, dy = _solve2(m, rhs)
        cols.append(VectorC(dx, dy))
    return Lattice(*cols)


def vertex_type(lat: Lattice) -> str:
    d = dual(lat)
    if not lat.contains_lattice(d):
        return NOT_VERTEX
    if not d.contains_lattice(lat.scaled(lat.field.pi)):
        return NOT_VERTEX
    c00, c10 = lat.coords(d.b0)
    c01, c11 = lat.coords(d.b1)
    index = (c00 * c11 - c01 * c10).val
    return {0: TYPE0, 2: TYPE2}.get(index, NOT_VERTEX)


def n_of(b: VectorC, lat: Lattice) -> int:
    return lat.n_of(b)


def neighbor_steps(lat: Lattice):
    """The q+1 adjacent type-2 lattices, each with the edge joining it to lat."""
    f = lat.field
    pi, pinv = f.pi, f.pi_pow(-1)
    v0, v1 = lat.b0, lat.b1
    out = [(type2(v0.scale(pinv), v1.scale(-pi)), type0(v0, v1.scale(-pi)))]
    for k in range(f.p):
        u = v0.scale(f.elem(k)) + v1
        out.append((type2(v0.scale(pi), u.scale(-pinv)), type0(v0.scale(pi), u)))
    return out


def neighbors(lat: Lattice) -> list[Lattice]:
    return [nb for nb, _ in neighbor_steps(lat)]


def endpoints(edge: Lattice) -> tuple[Lattice, Lattice]:
    """The two type-2 lattices containing a type-0 lattice."""
    e0, e1 = hyperbolic_basis(edge)
    pinv = edge.field.pi_pow(-1)
    return type2(e0.scale(pinv), e1), type2(e1.scale(pinv), e0)


def hyperbolic_basis(edge: Lattice) -> tuple[VectorC, VectorC]:
    """A basis of a type-0 lattice with Gram matrix [[0, 1], [1, 0]]."""
    g = edge.gram()
    if g[0][0].is_zero() and g[1][1].is_zero() and g[0][1] == 1:
        return edge.b0, edge.b1
    # a unit-norm vector c pins the lattice down as Lambda_c
    for c in (edge.b0, edge.b1, edge.b0 + edge.b1):
        qc = qnorm(c)
        if not qc.is_zero() and qc.val == 0:
            return _hyperbolic_from_anchor(c)
    raise DegenerateInput("lattice is not unimodular")


def _orth_partner(b: VectorC) -> VectorC:
    # (x, -x conj(y)/conj(x)) is orthogonal to b = (x, y) and has q = -q(b)
    x, y = b.x, b.y
    return VectorC(x, -(x * y.conj()) / x.conj())


def _anchor_pair(b: VectorC):
    qb = qnorm(b)
    if qb.is_zero():
        raise IsotropicVector("Lambda_b needs q(b) != 0")
    m = qb.val // 2
    s = b.field.pi_pow(-m)
    c1 = b.scale(s)
    if c1.x.is_zero():
        c1 = VectorC(c1.y, c1.x)  # unreachable for anisotropic b; keeps types honest
    return c1, _orth_partner(b).scale(s)


def _hyperbolic_from_anchor(c1: VectorC):
    u = qnorm(c1)
    cp = _orth_partner(c1)
    e0 = c1 + cp
    e1 = (c1 - cp).scale(1 / (2 * u))
    return e0, e1


def lambda_b(b: VectorC) -> Lattice:
    """The unique type-0 lattice containing pi^-ord(q(b)) b primitively."""
    c1, _ = _anchor_pair(b)
    return type0(*_hyperbolic_from_anchor(c1))


def lambda_b_complement(b: VectorC) -> VectorC:
    """The unit-norm vector c' with Lambda_b = <c1, c'> and (c1, c') = 0."""
    return _anchor_pair(b)[1]


def ord_q(b: VectorC) -> int:
    """ord_{pi0} q(b)."""
    qb = qnorm(b)
    if qb.is_zero():
        raise IsotropicVector("q(b) = 0")
    return qb.val // 2


# -- distance -------------------------------------------------------------

def distance(a: Lattice, b: Lattice) -> Fraction:
    """Tree distance between vertices or edge midpoints.

    Read off the elementary divisors of the transition matrix: if they are
    pi^s and pi^t with s <= t, the distance is (t - s) / 2.
    """
    c00, c10 = a.coords(b.b0)
    c01, c11 = a.coords(b.b1)
    vdet = (c00 * c11 - c01 * c10).val
    vmin = min(c.val for c in (c00, c10, c01, c11))
    return Fraction(int(vdet - 2 * vmin), 2)


def _as_vertex_set(lat: Lattice):
    kind = lat.vtype or vertex_type(lat)
    if kind == TYPE2:
        return [lat], Fraction(0)
    if kind == TYPE0:
        return list(endpoints(lat)), Fraction(1, 2)
    raise DegenerateInput("not a vertex lattice")


def distance_bfs(a: Lattice, b: Lattice, budget: int = MAX_NODES) -> Fraction:
    """Breadth-first distance, used as an independent check on ``distance``."""
    if a == b:
        return Fraction(0)
    starts, da = _as_vertex_set(a)
    goals, db = _as_vertex_set(b)
    goal_keys = {g.key() for g in goals}
    seen = {s.key() for s in starts}
    frontier = deque((s, 0) for s in starts)
    while frontier:
        lat, d = frontier.popleft()
        if lat.key() in goal_keys:
            return d + da + db
        for nb in neighbors(lat):
            k = nb.key()
            if k not in seen:
                if len(seen) >= budget:
                    raise RegionExceeded(f"BFS exceeded {budget} nodes")
                seen.add(k)
                frontier.append((nb, d + 1))
    raise RegionExceeded("target not reached")


# -- support trees --------------------------------------------------------

@dataclass
class SupportTree:
    vectors: tuple
    vertices: dict = dc_field(default_factory=dict)
    edges: dict = dc_field(default_factory=dict)
    annotations: dict = dc_field(default_factory=dict)
    adjacency: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def vertex_keys(self):
        return set(self.vertices)

    def n(self, lat: Lattice, i: int = 0) -> int:
        return self.annotations[lat.key()][i]

    def to_dot(self) -> str:
        """Graphviz rendering, vertices labelled by their n-annotations."""
        names = {k: f"v{i}" for i, k in enumerate(sorted(self.vertices, key=repr))}
        lines = ["graph support {"]
        for k, name in names.items():
            label = ",".join(str(x) for x in self.annotations[k])
            lines.append(f'  {name} [label="{label}"];')
        done = set()
        for k, nbrs in sorted(self.adjacency.items(), key=lambda kv: repr(kv[0])):
            for nk, ek in nbrs:
                if ek in done:
                    continue
                done.add(ek)
                label = ",".join(str(x) for x in self.annotations[ek])
                lines.append(f'  {names[k]} -- {names[nk]} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def _grow(starts, keep, vectors, max_nodes=MAX_NODES, max_radius=None) -> SupportTree:
    tree = SupportTree(tuple(vectors))
    seen = set()
    queue = deque()
    for s in starts:
        k = s.key()
        if k not in seen:
            seen.add(k)
            if keep(s):
                tree.vertices[k] = s
                queue.append((s, 0))
    while queue:
        lat, depth = queue.popleft()
        k = lat.key()
        for nb, edge in neighbor_steps(lat):
            nk = nb.key()
            if nk not in seen:
                seen.add(nk)
                if max_radius is not None and depth + 1 > max_radius:
                    continue
                if keep(nb):
                    if len(tree.vertices) >= max_nodes:
                        raise RegionExceeded(f"support exceeded {max_nodes} vertices")
                    tree.vertices[nk] = nb
                    queue.append((nb, depth + 1))
            if nk in tree.vertices:
                ek = edge.key()
                if ek not in tree.edges:
                    tree.edges[ek] = edge
                tree.adjacency.setdefault(k, [])
                if (nk, ek) not in tree.adjacency[k]:
                    tree.adjacency[k].append((nk, ek))
                tree.adjacency.setdefault(nk, [])
                if (k, ek) not in tree.adjacency[nk]:
                    tree.adjacency[nk].append((k, ek))
    for store in (tree.vertices, tree.edges):
        for k, lat in store.items():
            tree.annotations[k] = tuple(lat.n_of(v) for v in vectors)
    return tree


def ball(b: VectorC, max_nodes: int = MAX_NODES) -> SupportTree:
    """All vertex lattices containing an anisotropic vector b."""
    m = ord_q(b)
    if m < 0:
        return SupportTree((b,))
    start = endpoints(lambda_b(b))
    return _grow(start, lambda lat: lat.contains(b), (b,), max_nodes, max_radius=m + 1)


def _both(b1, b2):
    return lambda lat: lat.contains(b1) and lat.contains(b2)


def isotropic_center(b1: VectorC, b2: VectorC) -> Lattice:
    """<pi^-r b1, pi^-r b2> for isotropic b1, b2 with (b1, b2) of odd valuation n.

    r = (n+1)/2.  The raw Gram entry is a unit times pi^-1, so b2 is rescaled
    by a unit to land exactly on the normalized type-2 Gram matrix.
    """
    f = b1.field
    t = form(b1, b2)
    n = t.val
    r = (n + 1) // 2
    s = f.pi_pow(-r)
    v0, v1 = b1.scale(s), b2.scale(s)
    g = form(v0, v1)
    c = (f.pi_pow(-1) / g).conj()
    return type2(v0, v1.scale(c))


def tree_intersection(b1: VectorC, b2: VectorC, max_nodes: int = MAX_NODES) -> SupportTree:
    """Vertex lattices containing both b1 and b2 (empty for non-integral T)."""
    cls = classify(gram_pair(b1, b2))
    vectors = (b1, b2)
    if not cls.integral:
        return SupportTree(vectors)
    q1, q2 = qnorm(b1), qnorm(b2)
    if not q1.is_zero():
        return _grow(ball(b1, max_nodes).vertices.values(), _both(b1, b2), vectors, max_nodes)
    if not q2.is_zero():
        return _grow(ball(b2, max_nodes).vertices.values(), _both(b1, b2), vectors, max_nodes)
    n = form(b1, b2).val
    if n % 2 == 0:
        # b1 + b2 is anisotropic and spans the same lattices' membership test
        b3 = b1 + b2
        return _grow(ball(b3, max_nodes).vertices.values(), _both(b1, b2), vectors, max_nodes)
    center = isotropic_center(b1, b2)
    return _grow([center], _both(b1, b2), vectors, max_nodes)


def tclass_from_tree(b1: VectorC, b2: VectorC) -> TClass:
    """Read the Gram class of an anisotropic pair off the tree geometry.

    With n_i = ord q(b_i) (ordered n1 <= n2) and d the distance between the
    two anchor edges:
      same anchor       -> Diagonal(n1, n2 + v((c2, c1')))
      n1 <= n2 - d      -> Diagonal(n1, n2 - d)   (nested balls)
      otherwise         -> class of n = n1 + n2 - d
    eps1 still comes from the determinant: the tree does not see it.
    """
    check_independent(b1, b2)
    n1, n2 = ord_q(b1), ord_q(b2)
    if n1 > n2:
        b1, b2, n1, n2 = b2, b1, n2, n1
    anchor1, anchor2 = lambda_b(b1), lambda_b(b2)
    d = distance(anchor1, anchor2)
    det = gram_pair(b1, b2).det()
    eps1 = chi(-det.rational(), b1.field.p)
    if d == 0:
        f = b1.field
        c2 = b2.scale(f.pi_pow(-n2))
        c1p = lambda_b_complement(b1)
        beta = n2 + int(form(c2, c1p).val)
        return Diagonal(n1, beta, eps1)
    d = int(d)
    if n1 <= n2 - d:
        return Diagonal(n1, n2 - d, eps1)
    n = n1 + n2 - d
    if n % 2:
        return AntiDiagonal(n)
    return Diagonal(n // 2, n // 2, eps1)


__all__ = [
    "Lattice", "SupportTree", "TYPE0", "TYPE2", "NOT_VERTEX",
    "standard_lattice", "type0", "type2", "dual", "vertex_type", "n_of",
    "neighbors", "neighbor_steps", "endpoints", "hyperbolic_basis", "lambda_b",
    "lambda_b_complement", "ord_q", "distance", "distance_bfs", "ball",
    "isotropic_center", "tree_intersection", "tclass_from_tree",
]
