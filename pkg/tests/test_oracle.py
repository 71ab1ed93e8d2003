import itertools
from fractions import Fraction

import numpy as np
import pytest

from ramkr.errors import BudgetExhausted
from ramkr.herm import HermMatrix2
from ramkr.oracle import (
    L_gram, anisotropic_unit, as_herm, convolve, count_reps, density,
    density_at_r, gram_histogram, lattice_H, lattice_L, point_mass, residue_key,
    stabilize, stabilized_density, unary,
)
from ramkr.padic import PrimeParam

F3 = PrimeParam(3)


def herm(t11, t12, t22, f=F3):
    e = lambda v: v if hasattr(v, "field") else f.elem(v)  # noqa: E731
    return HermMatrix2(e(t11), e(t12), e(t22))


# Class representatives at p = 3 (L = diag(1, 1) there).
T_S = herm(1, 0, 1)
T_00P = herm(-1, 0, 1)
T_01P = herm(1, 0, 3)
T_01M = herm(1, 0, -3)
T_A1 = herm(0, F3.pi, 0)
T_AM1 = herm(0, F3.pi_pow(-1), 0)


# -- an independent counter written directly in PAdicElem arithmetic --------

def slow_count(S_rows, T: HermMatrix2, a: int, conjugate_first=False) -> int:
    """Count X mod p^a with Gram congruent to T, entry by entry, no numpy."""
    f = T.field
    p = f.p
    M = p ** a
    residues = [f.elem(u, v) for u in range(M) for v in range(M)]
    m = len(S_rows)
    total = 0
    for entries in itertools.product(residues, repeat=2 * m):
        X = [entries[2 * k: 2 * k + 2] for k in range(m)]  # X[k][j]
        def g(i, j):
            s = f.zero
            for k in range(m):
                for l in range(m):
                    if S_rows[k][l].is_zero():
                        continue
                    if conjugate_first:
                        s = s + X[k][i].conj() * S_rows[k][l] * X[l][j]
                    else:
                        s = s + X[k][i] * S_rows[k][l] * X[l][j].conj()
            return s
        d1, d2 = g(0, 0) - T.t11, g(1, 1) - T.t22
        target12 = T.t12 if not conjugate_first else T.t12.conj()
        off = g(0, 1) - target12
        if d1.val >= 2 * a and d2.val >= 2 * a and off.val >= 2 * a - 1:
            total += 1
    return total


L_ROWS = L_gram(3).rows()
H_ROWS = [[F3.zero, F3.pi_pow(-1)], [-F3.pi_pow(-1), F3.zero]]


@pytest.mark.parametrize("T", [T_S, T_00P, T_01P, T_01M, T_A1, T_AM1],
                         ids=["S", "00+", "01+", "01-", "A1", "A-1"])
@pytest.mark.parametrize("base", ["L", "H"])
def test_counts_match_independent_counter(base, T):
    S, rows = (lattice_L(3), L_ROWS) if base == "L" else (lattice_H(3), H_ROWS)
    assert count_reps(S, T, 1) == slow_count(rows, T, 1)


@pytest.mark.parametrize("T", [T_00P, T_01M, T_A1], ids=["00+", "01-", "A1"])
def test_conjugate_convention_gives_same_count(T):
    assert slow_count(L_ROWS, T, 1) == slow_count(L_ROWS, T, 1, conjugate_first=True)


def test_rank_one_counts():
    S = unary(3, 1)
    assert count_reps(S, 1, 1) == 6
    assert count_reps(S, 1, 2) == 18
    assert density(S, 1, 2) == 2
    assert stabilize(S, 1).value == 2 and stabilize(S, 1).level == 1


def test_anisotropic_unit():
    assert anisotropic_unit(3) == 1
    assert anisotropic_unit(5) == 2
    assert anisotropic_unit(7) == 1


def test_residue_key_rejects_nonintegral():
    assert residue_key(herm(Fraction(1, 3), 0, 1), 9) is None
    assert residue_key(T_AM1, 9) is not None  # pi^-1 is allowed off the diagonal
    assert residue_key(herm(0, F3.pi_pow(-3), 0), 9) is None


def test_as_herm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        as_herm([[F3.one, F3.pi], [F3.pi, F3.one]])


def test_budget_is_enforced():
    with pytest.raises(BudgetExhausted):
        count_reps(lattice_L(3), T_S, 5)
    with pytest.raises(BudgetExhausted):
        gram_histogram(lattice_L(3), 3)


# -- frozen brute-force densities (a = 1, 2) --------------------------------

FROZEN = {
    ("L", "S"): (8, 8), ("L", "00+"): (0, 0), ("L", "01+"): (4, 0), ("L", "01-"): (4, 8),
    ("L", "A1"): (1, 0), ("L", "A-1"): (0, 0),
    ("H", "S"): (0, 0), ("H", "00+"): (Fraction(16, 9),) * 2,
    ("H", "01+"): (Fraction(8, 9), Fraction(16, 9)), ("H", "01-"): (Fraction(8, 9), 0),
    ("H", "A1"): (Fraction(41, 9), Fraction(40, 9)), ("H", "A-1"): (Fraction(8, 9),) * 2,
}
NAMED = {"S": T_S, "00+": T_00P, "01+": T_01P, "01-": T_01M, "A1": T_A1, "A-1": T_AM1}


@pytest.mark.parametrize("key", sorted(FROZEN), ids=lambda k: f"{k[0]}-{k[1]}")
def test_frozen_densities(key):
    base, name = key
    S = lattice_L(3) if base == "L" else lattice_H(3)
    got = tuple(density(S, NAMED[name], a) for a in (1, 2))
    assert got == tuple(Fraction(v) for v in FROZEN[key])


# -- histograms ------------------------------------------------------------

def test_histogram_mass_and_zero():
    h = gram_histogram(lattice_L(3), 1)
    assert h.mass() == 3 ** 8
    assert h[herm(0, 0, 0)] >= 1
    assert h[T_S] == count_reps(lattice_L(3), T_S, 1)


def test_histogram_matches_count_at_level_two():
    h = gram_histogram(lattice_L(3), 2, workers=1)
    assert h[T_S] * Fraction(1, 3 ** 8) == 8


def test_convolution_identity_and_mass():
    h = gram_histogram(lattice_H(3), 1)
    assert np.array_equal(convolve(h, point_mass(3, 1)).counts, h.counts)
    g = gram_histogram(lattice_L(3), 1)
    assert convolve(g, h).mass() == g.mass() * h.mass()


@pytest.mark.parametrize("T", [T_S, T_00P, T_01M, T_A1], ids=["S", "00+", "01-", "A1"])
def test_convolution_matches_direct_rank_four_count(T):
    big = lattice_L(3) + lattice_H(3)
    direct = count_reps(big, T, 1)
    conv = convolve(gram_histogram(lattice_L(3), 1), gram_histogram(lattice_H(3), 1))
    assert conv[T] == direct


def test_density_at_r_zero_is_density():
    assert density_at_r(lattice_L(3), T_01M, 0, 2) == density(lattice_L(3), T_01M, 2)


def test_density_at_r_rejects_large_r():
    with pytest.raises(ValueError):
        density_at_r(lattice_L(3), T_S, 4, 1)


def test_h_tower_values_frozen():
    # Observed values of the H-based tower; the closed H polynomial differs here
    # for diagonal classes away from X = 1 (see the decisions ledger).
    H = lattice_H(3)
    assert density_at_r(H, T_00P, 1, 1) == Fraction(800, 729)
    assert density_at_r(H, herm(-1, 0, -1), 1, 1) == Fraction(640, 729)
    assert density_at_r(H, T_A1, 1, 2) == Fraction(8720, 6561)


def test_stabilized_density_of_S():
    assert stabilized_density(lattice_L(3), T_S) == 8


def test_forms_compose():
    S = lattice_L(3) + lattice_H(3)
    assert S.rank == 4
    assert str(S) == "<1> + <1> + H"
    with pytest.raises(ValueError):
        lattice_L(3) + lattice_L(5)
