"""Acceptance run: one PASS/FAIL line per criterion, exact tolerances throughout.

Run alone with `pytest -v tests/test_acceptance.py`; the verdict lines are
written straight to the terminal even when pytest captures output.
"""

import random
import time
from fractions import Fraction

import pytest

from ramkr.density import alpha_poly, kr_rhs
from ramkr.divisor import intersect_closed, intersect_tree
from ramkr.herm import (
    AntiDiagonal, Diagonal, HermMatrix2, canonical_pair, classify, gram_pair,
    random_gl2, randomize_pair,
)
from ramkr.oracle import density, density_at_r, lattice_H, lattice_L, stabilize, unary
from ramkr.padic import PrimeParam
from ramkr.tree import (
    ball, distance, endpoints, lambda_b, neighbor_steps, neighbors, ord_q, tclass_from_tree,
)
from instances import (
    anisotropic_pairs, combine, random_anisotropic, random_isotropic, random_vertex,
)

WORKERS = 4


@pytest.fixture
def report(capsys):
    def emit(n: int, title: str, failures: list, started: float, budget: float, detail=""):
        elapsed = time.perf_counter() - started
        ok = not failures and elapsed < budget
        verdict = "PASS" if ok else "FAIL"
        line = f"[acceptance {n}] {verdict}  {title}  ({detail}; {elapsed:.1f}s, limit {budget:.0f}s)"
        with capsys.disabled():
            print("\n" + line)
            for f in failures[:10]:
                print(f"    mismatch: {f}")
        assert not failures, failures[:10]
        assert elapsed < budget, f"took {elapsed:.1f}s"
    return emit


def split_grid(amax, bmax, ns):
    return [Diagonal(a, b, 1) for a in range(amax + 1) for b in range(a, bmax + 1)] + \
        [AntiDiagonal(n) for n in ns]


# 1 -------------------------------------------------------------------------

def test_criterion_1_tree_equals_closed(report):
    t0 = time.perf_counter()
    failures, checks = [], 0
    for p in (3, 5):
        f = PrimeParam(p)
        for c in split_grid(4, 4, (1, 3, 5, 7)):
            got, want = intersect_tree(*canonical_pair(c, f)), intersect_closed(c, p)
            checks += 1
            if got != want:
                failures.append(f"p={p} {c}: tree {got} closed {want}")
    f = PrimeParam(3)
    rng = random.Random(20261015)
    for c in split_grid(2, 3, (1, 3, 5)):
        want = intersect_closed(c, 3)
        for _ in range(20):
            b1, b2 = combine(*canonical_pair(c, f), random_gl2(f, rng, spread=2))
            b1, b2 = randomize_pair(b1, b2, rng.random())
            if rng.random() < 0.5:
                b1, b2 = b2, b1
            got = intersect_tree(b1, b2)
            checks += 1
            if got != want:
                failures.append(f"random {c}: tree {got} closed {want}")
    report(1, "intersect_tree = intersect_closed (grid p=3,5 and randomized pairs)",
           failures, t0, 120, f"{checks} exact checks")


# 2 -------------------------------------------------------------------------

def test_criterion_2_kr_identity(report):
    t0 = time.perf_counter()
    failures, checks = [], 0
    classes = split_grid(4, 4, (1, 3, 5, 7)) + [
        AntiDiagonal(-1), AntiDiagonal(-3), Diagonal(-1, 0, 1), Diagonal(-2, 3, 1),
    ]
    for q in (3, 5, 7, 9):
        for c in classes:
            lhs, rhs = intersect_closed(c, q), kr_rhs(c, q)
            checks += 1
            if Fraction(lhs) != rhs:
                failures.append(f"q={q} {c}: Int {lhs} KR {rhs}")
    spots = {(Diagonal(1, 1, 1), 3): -4, (AntiDiagonal(1), 3): -2}
    for (c, q), v in spots.items():
        checks += 1
        if kr_rhs(c, q) != v:
            failures.append(f"spot {c} q={q}: {kr_rhs(c, q)} != {v}")
    report(2, "kr_rhs = intersect_closed over q in {3,5,7,9}", failures, t0, 10,
           f"{checks} exact checks")


# 3 -------------------------------------------------------------------------

F3 = PrimeParam(3)


def _T(t11, t12, t22):
    e = lambda v: v if hasattr(v, "field") else F3.elem(v)  # noqa: E731
    return HermMatrix2(e(t11), e(t12), e(t22))


# representatives at p = 3, where L = diag(1, 1) and eps2 = chi(-1) = -1
CLASS_REPS = [
    (Diagonal(0, 0, 1), _T(-1, 0, 1)),
    (Diagonal(0, 0, -1), _T(1, 0, 1)),
    (Diagonal(0, 1, 1), _T(1, 0, 3)),
    (Diagonal(0, 1, -1), _T(1, 0, -3)),
    (AntiDiagonal(1), _T(0, F3.pi, 0)),
    (AntiDiagonal(-1), _T(0, F3.pi_pow(-1), 0)),
]


def test_criterion_3_densities_by_brute_force(report):
    t0 = time.perf_counter()
    failures, notes = [], []
    L, H = lattice_L(3), lattice_H(3)

    # (a) alpha(L, S) = 2(1 + q)
    st = stabilize(L, _T(1, 0, 1), max_level=3, workers=WORKERS)
    if st.value != 8:
        failures.append(f"(a) alpha(L,S) = {st.value}")
    notes.append(f"(a) alpha(L,S)={st.value} at a={st.level}")

    # rank-one auxiliary count: stable through a = 3
    aux = [density(unary(3, 1), 1, a) for a in (1, 2, 3)]
    if len(set(aux)) != 1 or aux[0] != 2:
        failures.append(f"(b) rank-one densities {aux}")

    # (b) levels a = 2 and a = 3 agree and equal the closed value at X = 1
    for c, T in CLASS_REPS:
        for base, S in (("L", L), ("H", H)):
            d2 = density(S, T, 2, workers=WORKERS)
            d3 = density(S, T, 3, workers=WORKERS)
            want = alpha_poly(base, c, -1)(3, 1)
            if not d2 == d3 == want:
                failures.append(f"(b) {base} {c}: a=2 {d2}, a=3 {d3}, closed {want}")
    notes.append(f"(b) {2 * len(CLASS_REPS)} class/base pairs stable at a=2,3")

    # (c) hyperbolic tower at X = q^-2r on unimodular diagonal classes
    for c, T in CLASS_REPS[:2]:
        for r in (1, 2):
            got = density_at_r(L, T, r, 2, workers=WORKERS)
            want = alpha_poly("L", c, -1)(3, Fraction(1, 9 ** r))
            if got != want:
                failures.append(f"(c) {c} r={r}: brute {got} closed {want}")
    notes.append("(c) r=1,2 at a=2")
    report(3, "brute-force local densities at p=3 match the closed polynomials",
           failures, t0, 300, "; ".join(notes))


# 4 -------------------------------------------------------------------------

def _propagation(lat, b):
    n = lat.n_of(b)
    return sorted(nb.n_of(b) - n for nb in neighbors(lat))


def test_criterion_4_tree_invariants(report):
    t0 = time.perf_counter()
    failures = []
    counts = dict.fromkeys(["propagation", "edge-rule", "distance", "ball", "edge-sum"], 0)
    for p in (3, 5):
        f = PrimeParam(p)
        rng = random.Random(1000 + p)
        expected_prop = [-1] * p + [1]
        for _ in range(100):
            # anisotropic b with a vertex of its ball away from the anchor
            b = random_anisotropic(f, rng, max_ord=2)
            inner = {e.key() for e in endpoints(lambda_b(b))}
            outer = [v for k, v in ball(b).vertices.items() if k not in inner]
            while not outer:  # ord 0 balls are just the two anchor endpoints
                b = random_anisotropic(f, rng, max_ord=2)
                inner = {e.key() for e in endpoints(lambda_b(b))}
                outer = [v for k, v in ball(b).vertices.items() if k not in inner]
            lat = rng.choice(outer)
            counts["propagation"] += 1
            if _propagation(lat, b) != expected_prop:
                failures.append(f"p={p} propagation (anisotropic) at {lat}")
            # distance law on the same instance
            if lat.n_of(b) != ord_q(b) - distance(lat, lambda_b(b)) + Fraction(1, 2):
                failures.append(f"p={p} distance law at {lat}")
            counts["distance"] += 1
            # isotropic b at an arbitrary vertex
            iso = random_isotropic(f, rng)
            v = random_vertex(f, rng)
            if _propagation(v, iso) != expected_prop:
                failures.append(f"p={p} propagation (isotropic) at {v}")
            counts["propagation"] += 1
            # edge rule and edge-sum for a vertex of T(b), both kinds of b
            for vec in (b, iso):
                w = random_vertex(f, rng)
                vec = vec.scale(f.pi_pow(rng.randint(0, 2) - w.n_of(vec)))
                n2 = w.n_of(vec)
                steps = neighbor_steps(w)
                for nb, edge in steps:
                    if edge.n_of(vec) != min(n2, nb.n_of(vec)):
                        failures.append(f"p={p} edge rule at {edge}")
                if sum(edge.n_of(vec) + 1 - n2 for _, edge in steps) != 1:
                    failures.append(f"p={p} edge sum at {w}")
                counts["edge-rule"] += 1
                counts["edge-sum"] += 1
        for k in range(100):
            m = k % 4 if p == 3 else k % 3
            b = random_anisotropic(f, rng, max_ord=0).scale(f.pi_pow(m))
            size = len(ball(b).vertices)
            if size != 2 * sum(p ** i for i in range(m + 1)):
                failures.append(f"p={p} ball ord {m}: {size} vertices")
            counts["ball"] += 1
    detail = ", ".join(f"{k} {v}" for k, v in counts.items())
    report(4, "tree invariants over randomized (b, lattice) instances at p=3,5",
           failures, t0, 60, detail)


# 5 -------------------------------------------------------------------------

def test_criterion_5_classification(report):
    t0 = time.perf_counter()
    failures, checks = [], 0
    for p in (3, 5):
        f = PrimeParam(p)
        rng = random.Random(5000 + p)
        for c in split_grid(4, 5, (1, 3, 5, 7)):
            T = gram_pair(*canonical_pair(c, f))
            if classify(T) != c:
                failures.append(f"p={p} canonical {c} -> {classify(T)}")
            checks += 1
            for _ in range(200):
                got = classify(T.congruent(random_gl2(f, rng)))
                checks += 1
                if got != c:
                    failures.append(f"p={p} congruence moved {c} to {got}")
        for name, pairs in anisotropic_pairs(f, 50, seed=p).items():
            for b1, b2 in pairs:
                got, want = tclass_from_tree(b1, b2), classify(gram_pair(b1, b2))
                checks += 1
                if got != want:
                    failures.append(f"p={p} {name}: tree {got} classify {want}")
    report(5, "classification coherence (canonical, congruences, tree reading)",
           failures, t0, 60, f"{checks} exact checks")
