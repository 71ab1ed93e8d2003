"""Brute-force representation counts over the residue ring O_F / p^a.

A Hermitian lattice S is given as an orthogonal sum of blocks: rank-one
blocks <s> with s in O_F0, and hyperbolic planes H with Gram matrix
pi^-1 [[0, 1], [-1, 0]].  For X in M_{m,n}(O_F / p^a) the Gram matrix
T(X) = X^t S conj(X) is only well defined modulo p^a * Herm_n(O_F)^dual,
whose off-diagonal part is pi^-1 O_F.  So we record

    diagonal entries           mod p^a
    pi * (off-diagonal entry)  mod p^a   (as a pair u + v*pi)

and normalize counts by q^(-a n (2m - n)).

Column pairs are enumerated with numpy; larger single-T counts collapse the
first column to orbits of a diagonal isometry group, which leaves the
inner count unchanged exactly.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetExhausted
from .herm import HermMatrix2
from .padic import PAdicElem, PrimeParam, legendre, vp

DEFAULT_BUDGET = 3 ** 16
_ORBIT_THRESHOLD = 20_000


@dataclass(frozen=True)
class HermForm:
    """Orthogonal sum of blocks ("diag", s) and ("hyp",) over O_F at prime p."""

    p: int
    blocks: tuple

    @property
    def rank(self) -> int:
        return sum(1 if b[0] == "diag" else 2 for b in self.blocks)

    def __add__(self, other: "HermForm") -> "HermForm":
        if other.p != self.p:
            raise ValueError("mismatched primes")
        return HermForm(self.p, self.blocks + other.blocks)

    def __str__(self):
        parts = [f"<{b[1]}>" if b[0] == "diag" else "H" for b in self.blocks]
        return " + ".join(parts)


def anisotropic_unit(p: int) -> int:
    """Least v >= 1 with chi(-v) = -1, so that diag(v, 1) is anisotropic."""
    v = 1
    while legendre(-v, p) != -1:
        v += 1
    return v


def lattice_L(p: int) -> HermForm:
    return HermForm(p, (("diag", anisotropic_unit(p)), ("diag", 1)))


def lattice_H(p: int) -> HermForm:
    return HermForm(p, (("hyp",),))


def unary(p: int, s: int) -> HermForm:
    return HermForm(p, (("diag", s),))


def L_gram(p: int) -> HermMatrix2:
    f = PrimeParam(p)
    return HermMatrix2(f.elem(anisotropic_unit(p)), f.zero, f.one)


# -- residue encodings ----------------------------------------------------

def _elem_residue(e: PAdicElem, M: int):
    """(u, v) with e = u + v*pi mod p^a; None if e is not integral."""
    if e.is_zero():
        return 0, 0
    if e.val < 0:
        return None
    p = e.field.p
    out = []
    for c in (e.x0, e.x1):
        if c == 0:
            out.append(0)
        else:
            if vp(c, p) < 0:
                return None
            out.append(int(c.numerator) * pow(int(c.denominator), -1, M) % M)
    return tuple(out)


def residue_key(T, M: int):
    """Bin coordinates of a Hermitian T, or None when no integral X can hit it."""
    if isinstance(T, PAdicElem) or isinstance(T, (int, Fraction)):
        if not isinstance(T, PAdicElem):
            T = PrimeParam(_prime_of(M)).elem(T)
        if not T.in_base():
            raise ValueError("a 1x1 Hermitian matrix must lie in F0")
        r = _elem_residue(T, M)
        return None if r is None else (r[0],)
    T = as_herm(T)
    d1, d2 = _elem_residue(T.t11, M), _elem_residue(T.t22, M)
    off = _elem_residue(T.t12 * T.field.pi, M)
    if d1 is None or d2 is None or off is None:
        return None
    return (d1[0], d2[0], off[0], off[1])


def _prime_of(M: int) -> int:
    for d in range(3, M + 1, 2):
        if M % d == 0:
            return d
    raise ValueError("modulus must be an odd prime power")


def as_herm(T) -> HermMatrix2:
    if isinstance(T, HermMatrix2):
        return T
    (a, b), (c, d) = T
    if c != b.conj():
        raise ValueError("matrix is not Hermitian: t21 != conj(t12)")
    return HermMatrix2(a, b, d)


# -- vectorized ring arithmetic -------------------------------------------

def _all_vectors(m: int, M: int) -> np.ndarray:
    n = M ** (2 * m)
    idx = np.arange(n, dtype=np.int64)
    out = np.empty((n, 2 * m), dtype=np.int64)
    for j in range(2 * m - 1, -1, -1):
        out[:, j] = idx % M
        idx //= M
    return out


def _pi_form(x: np.ndarray, y: np.ndarray, form: HermForm, M: int):
    """pi * (x, y)_S as (U, V) mod M; x and y broadcast against each other."""
    p = form.p
    U = 0
    V = 0
    i = 0
    for blk in form.blocks:
        if blk[0] == "diag":
            s = blk[1]
            a, b = x[..., 2 * i], x[..., 2 * i + 1]
            c, d = y[..., 2 * i], y[..., 2 * i + 1]
            z0 = a * c - p * b * d
            z1 = b * c - a * d
            U = U + p * s * z1
            V = V + s * z0
            i += 1
        else:
            a1, b1, a2, b2 = (x[..., 2 * i + k] for k in range(4))
            c1, d1, c2, d2 = (y[..., 2 * i + k] for k in range(4))
            # x1 conj(y2) - x2 conj(y1)
            U = U + (a1 * c2 - p * b1 * d2) - (a2 * c1 - p * b2 * d1)
            V = V + (b1 * c2 - a1 * d2) - (b2 * c1 - a2 * d1)
            i += 2
    return U % M, V % M


def _self_values(vecs: np.ndarray, form: HermForm, M: int) -> np.ndarray:
    """(x, x) mod M for each row; it lies in F0, so only the V-part survives."""
    return _pi_form(vecs, vecs, form, M)[1]


def _mul(a, b, c, d, p, M):
    return (a * c + p * b * d) % M, (a * d + b * c) % M


def _norm_one_units(p: int, M: int) -> np.ndarray:
    r = np.arange(M, dtype=np.int64)
    u0, u1 = np.meshgrid(r, r, indexing="ij")
    u0, u1 = u0.ravel(), u1.ravel()
    mask = (u0 * u0 - p * u1 * u1) % M == 1
    return np.stack([u0[mask], u1[mask]], axis=1)


def _all_units(p: int, M: int) -> np.ndarray:
    r = np.arange(M, dtype=np.int64)
    u0, u1 = np.meshgrid(r, r, indexing="ij")
    u0, u1 = u0.ravel(), u1.ravel()
    mask = u0 % p != 0
    return np.stack([u0[mask], u1[mask]], axis=1)


def _inverse_table(p: int, M: int) -> dict:
    units = _all_units(p, M)
    inv = {}
    for u0, u1 in units.tolist():
        nm = (u0 * u0 - p * u1 * u1) % M
        ni = pow(nm, -1, M)
        inv[(u0, u1)] = (u0 * ni % M, (-u1) * ni % M)
    return inv


def _isometry_group(form: HermForm, M: int):
    """Per-block generators of a diagonal isometry group, as coordinate maps.

    Each element is a list of (coordinate, (u0, u1)) multipliers.
    """
    p = form.p
    per_block = []
    i = 0
    for blk in form.blocks:
        if blk[0] == "diag":
            per_block.append([[(i, tuple(u))] for u in _norm_one_units(p, M).tolist()])
            i += 1
        else:
            inv = _inverse_table(p, M)
            elems = []
            for u in _all_units(p, M).tolist():
                cu = (u[0], (-u[1]) % M)
                elems.append([(i, tuple(u)), (i + 1, inv[cu])])
            per_block.append(elems)
            i += 2
    return [sum(combo, []) for combo in itertools.product(*per_block)]


def _encode(vecs: np.ndarray, M: int) -> np.ndarray:
    code = np.zeros(len(vecs), dtype=np.int64)
    for j in range(vecs.shape[1]):
        code = code * M + vecs[:, j]
    return code


def _orbits(vecs: np.ndarray, form: HermForm, M: int):
    """Split rows of vecs into orbits; returns (representatives, sizes)."""
    p = form.p
    group = _isometry_group(form, M)
    codes = _encode(vecs, M)
    order = {c: k for k, c in enumerate(codes.tolist())}
    seen = np.zeros(len(vecs), dtype=bool)
    reps, sizes = [], []
    gm = np.array([[u for _, u in g] for g in group], dtype=np.int64)  # (G, k, 2)
    coords = [c for c, _ in group[0]]
    for k in range(len(vecs)):
        if seen[k]:
            continue
        x = vecs[k]
        imgs = np.repeat(x[None, :], len(group), axis=0)
        for slot, c in enumerate(coords):
            a, b = _mul(x[2 * c], x[2 * c + 1], gm[:, slot, 0], gm[:, slot, 1], p, M)
            imgs[:, 2 * c], imgs[:, 2 * c + 1] = a, b
        orbit = np.unique(_encode(imgs, M))
        members = [order[c] for c in orbit.tolist() if c in order]
        seen[members] = True
        reps.append(k)
        sizes.append(len(members))
    return vecs[reps], np.array(sizes, dtype=np.int64)


def _inner_counts(args):
    xs, ys, form, M, target = args
    out = np.empty(len(xs), dtype=np.int64)
    for k, x in enumerate(xs):
        U, V = _pi_form(x[None, :], ys, form, M)
        out[k] = int(np.count_nonzero((U == target[0]) & (V == target[1])))
    return out


def _split(arr, parts):
    return [a for a in np.array_split(arr, parts) if len(a)]


def _workers(workers):
    if workers is None:
        workers = min(4, os.cpu_count() or 1)
    return max(1, workers)


def count_reps(S: HermForm, T, a: int, budget: int = DEFAULT_BUDGET,
               workers: int | None = 1) -> int:
    """Number of X in M_{m,n}(O_F / p^a) with X^t S conj(X) = T in the sense above."""
    M, m = S.p ** a, S.rank
    key = residue_key(T, M)
    n = 1 if isinstance(T, (PAdicElem, int, Fraction)) else 2
    states = M ** (2 * m)
    if states > budget:
        raise BudgetExhausted(f"{states} column states exceed budget {budget}")
    if key is None:
        return 0
    vecs = _all_vectors(m, M)
    selfv = _self_values(vecs, S, M)
    xs = vecs[selfv == key[0]]
    if n == 1:
        return int(len(xs))
    ys = vecs[selfv == key[1]]
    if len(vecs) > _ORBIT_THRESHOLD:
        reps, sizes = _orbits(xs, S, M)
    else:
        reps, sizes = xs, np.ones(len(xs), dtype=np.int64)
    target = (key[2], key[3])
    w = _workers(workers)
    chunks = _split(np.arange(len(reps)), w * 4 if w > 1 else 1)
    jobs = [(reps[c], ys, S, M, target) for c in chunks]
    if w > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(w) as ex:
            parts = list(ex.map(_inner_counts, jobs))
    else:
        parts = [_inner_counts(j) for j in jobs]
    inner = np.concatenate(parts)
    return int(sum(int(s) * int(c) for s, c in zip(sizes.tolist(), inner.tolist())))


# -- histograms and convolution -------------------------------------------

class GramHistogram:
    """Counts of all 2x2 residue Gram values, indexed by bin coordinates."""

    def __init__(self, p: int, a: int, counts: np.ndarray):
        self.p = p
        self.a = a
        self.M = p ** a
        self.counts = counts

    def mass(self) -> int:
        return int(sum(int(c) for c in self.counts.tolist())) if self.counts.dtype == object \
            else int(self.counts.sum(dtype=object))

    def index(self, key) -> int:
        M = self.M
        return ((key[0] * M + key[1]) * M + key[2]) * M + key[3]

    def __getitem__(self, T) -> int:
        key = T if isinstance(T, tuple) else residue_key(T, self.M)
        if key is None:
            return 0
        return int(self.counts[self.index(key)])

    def nonzero(self) -> dict:
        M = self.M
        out = {}
        for i in np.flatnonzero(self.counts).tolist():
            key = []
            r = i
            for _ in range(4):
                key.append(r % M)
                r //= M
            out[tuple(reversed(key))] = int(self.counts[i])
        return out


def point_mass(p: int, a: int) -> GramHistogram:
    """Histogram of the rank-0 lattice: the zero matrix once."""
    counts = np.zeros((p ** a) ** 4, dtype=np.int64)
    counts[0] = 1
    return GramHistogram(p, a, counts)


def _hist_chunk(args):
    xs, vecs, selfv, form, M = args
    acc = np.zeros(M ** 4, dtype=np.int64)
    step = max(1, 400_000 // max(1, len(vecs)))
    for s in range(0, len(xs), step):
        x = xs[s:s + step]
        sx = _self_values(x, form, M)
        U, V = _pi_form(x[:, None, :], vecs[None, :, :], form, M)
        idx = ((sx[:, None] * M + selfv[None, :]) * M + U) * M + V
        acc += np.bincount(idx.ravel(), minlength=M ** 4)
    return acc


@lru_cache(maxsize=16)
def _gram_histogram_cached(S: HermForm, a: int, budget: int, workers: int) -> GramHistogram:
    p, M, m = S.p, S.p ** a, S.rank
    vecs = _all_vectors(m, M)
    selfv = _self_values(vecs, S, M)
    chunks = _split(vecs, workers * 4 if workers > 1 else 1)
    jobs = [(c, vecs, selfv, S, M) for c in chunks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_hist_chunk, jobs))
    else:
        parts = [_hist_chunk(j) for j in jobs]
    return GramHistogram(p, a, np.sum(parts, axis=0))


def gram_histogram(S: HermForm, a: int, budget: int = DEFAULT_BUDGET,
                   workers: int | None = None) -> GramHistogram:
    """h[T] = number of X in M_{m,2} with Gram value T, for every residue T."""
    states = (S.p ** a) ** (4 * S.rank)
    if states > budget:
        raise BudgetExhausted(f"{states} pair states exceed budget {budget}")
    return _gram_histogram_cached(S, a, budget, _workers(workers))


def _as_grid(h: GramHistogram) -> np.ndarray:
    M = h.M
    return h.counts.reshape(M, M, M, M)


def convolve(h1: GramHistogram, h2: GramHistogram) -> GramHistogram:
    """Gram histogram of the orthogonal sum: (h1 * h2)[T] = sum h1[T'] h2[T - T']."""
    if (h1.p, h1.a) != (h2.p, h2.a):
        raise ValueError("histograms live at different levels")
    big = h1.mass() * h2.mass() >= 2 ** 62
    dtype = object if big else np.int64
    g1 = _as_grid(h1).astype(dtype)
    g2 = _as_grid(h2).astype(dtype)
    M = h1.M
    out = np.zeros_like(g2)
    for idx in zip(*np.nonzero(g1)):
        out += g1[idx] * np.roll(g2, shift=idx, axis=(0, 1, 2, 3))
    return GramHistogram(h1.p, h1.a, out.reshape(M ** 4))


def _convolution_entry(h1: GramHistogram, h2: GramHistogram, key) -> int:
    """A single entry of h1 * h2, accumulated in exact integers."""
    M = h1.M
    grid = np.indices((M, M, M, M)).reshape(4, -1)
    shifted = [(key[k] - grid[k]) % M for k in range(4)]
    j = ((shifted[0] * M + shifted[1]) * M + shifted[2]) * M + shifted[3]
    a = h1.counts.astype(object)
    b = h2.counts.astype(object)[j]
    return int(np.dot(a, b))


def normalizer(p: int, a: int, m: int, n: int) -> Fraction:
    return Fraction(1, p ** (a * n * (2 * m - n)))


def density(S: HermForm, T, a: int, budget: int = DEFAULT_BUDGET,
            workers: int | None = 1) -> Fraction:
    """Normalized count q^(-a n (2m - n)) N_a(S, T)."""
    n = 1 if isinstance(T, (PAdicElem, int, Fraction)) else 2
    return count_reps(S, T, a, budget, workers) * normalizer(S.p, a, S.rank, n)


def density_at_r(S: HermForm, T, r: int, a: int, budget: int = DEFAULT_BUDGET,
                 workers: int | None = None) -> Fraction:
    """Normalized count for S + H^r, read off Gram histogram convolutions."""
    if not 0 <= r <= 3:
        raise ValueError("r must lie in 0..3")
    if r == 0:
        return density(S, T, a, budget, workers)
    M = S.p ** a
    key = residue_key(T, M)
    if key is None:
        return Fraction(0)
    hS = gram_histogram(S, a, budget, workers)
    hH = gram_histogram(lattice_H(S.p), a, budget, workers)
    tower = hH
    for _ in range(r - 1):
        tower = convolve(tower, hH)
    count = _convolution_entry(hS, tower, key)
    return count * normalizer(S.p, a, S.rank + 2 * r, 2)


@dataclass(frozen=True)
class Stabilized:
    value: Fraction
    level: int
    history: tuple


def stabilize(S: HermForm, T, max_level: int = 3, budget: int = DEFAULT_BUDGET,
              workers: int | None = 1, start: int = 1) -> Stabilized:
    """Normalized densities at a = start, start+1, ... until two consecutive agree."""
    hist = []
    for a in range(start, max_level + 1):
        hist.append(density(S, T, a, budget, workers))
        if len(hist) >= 2 and hist[-1] == hist[-2]:
            return Stabilized(hist[-1], a - 1, tuple(hist))
    raise BudgetExhausted(f"no two consecutive levels agreed up to a = {max_level}: {hist}")


def stabilized_density(S: HermForm, T, budget: int = DEFAULT_BUDGET, max_level: int = 3,
                       workers: int | None = 1) -> Fraction:
    return stabilize(S, T, max_level, budget, workers).value


__all__ = [
    "HermForm", "lattice_L", "lattice_H", "unary", "L_gram", "anisotropic_unit",
    "residue_key", "count_reps", "gram_histogram", "GramHistogram", "point_mass",
    "convolve", "density", "density_at_r", "stabilize", "stabilized_density",
    "normalizer", "Stabilized", "DEFAULT_BUDGET",
]
