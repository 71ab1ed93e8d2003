from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ramkr.errors import PrecisionExhausted
from ramkr.padic import INF, PrimeParam, chi, digits, legendre, vp
from strategies import PRIMES, element_pairs, elements


def test_pi_squared_is_p(field):
    assert field.pi * field.pi == field.p
    assert field.pi.val == 1
    assert field.elem(field.p).val == 2


def test_pi_pow_negative(f3):
    assert f3.pi_pow(-3) * f3.pi_pow(3) == 1
    assert f3.pi_pow(-3).val == -3
    assert f3.pi_pow(0) == 1


def test_norm_of_pi(field):
    assert field.pi.norm() == -field.p


def test_valuation_of_rationals(f3):
    assert f3.elem(Fraction(9, 2)).val == 4
    assert f3.elem(Fraction(1, 3)).val == -2
    assert f3.elem(0, 1).val == 1
    assert f3.elem(3, 1).val == 1
    assert f3.zero.val == INF


def test_unit_part(f3):
    x = f3.from_val_unit(3, 2, 1)
    assert x.val == 3
    assert x.unit[0] % 3 == 2
    with pytest.raises(ValueError):
        f3.from_val_unit(0, 3, 1)


def test_inexact_zero_raises(f3):
    x = f3.elem(0, 0, prec=5)
    with pytest.raises(PrecisionExhausted):
        x.is_zero()
    y = f3.elem(27, 0, prec=4)
    with pytest.raises(PrecisionExhausted):
        _ = y.val


def test_precision_propagation(f3):
    a = f3.elem(1, 0, prec=10)
    b = f3.pi_pow(3)
    assert (a * b).prec == 13
    assert (a + b).prec == 10
    assert f3.elem(3, 0, prec=10).inverse().prec == 6


def test_chi_values():
    assert chi(-3, 3) == 1  # -p is a norm
    assert chi(3, 3) == legendre(-1, 3) == -1
    assert chi(5, 5) == 1
    assert chi(2, 5) == -1
    assert chi(Fraction(4, 9), 3) == 1


def test_chi_zero():
    with pytest.raises(ValueError):
        chi(0, 3)


def test_digits(f3):
    x = f3.elem(1 + 2 * 3, 1)  # 7 + pi = 1 + pi + 2 pi^2
    assert digits(x, 0, 4) == (1, 1, 2, 0)
    assert digits(f3.elem(-1), 0, 5) == (2, 0, 2, 0, 2)  # -1 = 2 - pi^2
    with pytest.raises(ValueError):
        digits(f3.pi_pow(-1), 0, 2)


def test_bad_prime():
    for p in (2, 9, 1, -3):
        with pytest.raises(ValueError):
            PrimeParam(p)


@given(element_pairs())
def test_valuation_additive(pair):
    a, b = pair
    assert (a * b).val == a.val + b.val


@given(element_pairs())
def test_ultrametric(pair):
    a, b = pair
    assert (a + b).val >= min(a.val, b.val)


@given(element_pairs(nonzero=True))
def test_division_inverts_multiplication(pair):
    a, b = pair
    assert (a * b) / b == a


@given(element_pairs())
def test_conjugation_is_a_ring_map(pair):
    a, b = pair
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert a.conj().conj() == a


@given(elements(nonzero=True))
def test_norm_lands_in_base(a):
    n = a * a.conj()
    assert n.in_base()
    assert n.rational() == a.norm()


@given(PRIMES, st.integers(1, 500), st.integers(1, 500))
def test_chi_multiplicative(p, x, y):
    if x % p == 0 and vp(Fraction(x), p) > 3:
        return
    assert chi(x * y, p) == chi(x, p) * chi(y, p)
