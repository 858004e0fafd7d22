from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qtriag.coeffs import E4X, GAUSS_I, GAUSS_ONE, Q, QX, GaussQ, Scalar

rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 12))
gauss = st.builds(GaussQ, rationals, rationals)
scalars = st.dictionaries(st.integers(-6, 6), gauss, max_size=4).map(Scalar)


def test_gauss_arithmetic():
    a = GaussQ.of(Fraction(3, 2), Fraction(1, 2))
    b = GaussQ.of(1, -1)
    assert a + b == GaussQ.of(Fraction(5, 2), Fraction(-1, 2))
    assert a * b == GaussQ.of(2, -1)          # (3/2+i/2)(1-i) = 2 - i
    assert a * a.inverse() == GAUSS_ONE
    assert GAUSS_I * GAUSS_I == GaussQ.of(-1)
    assert a.conj().conj() == a


def test_gauss_zero_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        GaussQ().inverse()


def test_named_constants():
    assert Q == Scalar.s_power(8)
    assert E4X * E4X == Q
    assert QX == Scalar.s_power(-2)
    assert Q * Q.inverse() == Scalar.one()


def test_scalar_drops_zero_terms():
    s = Scalar.of(1) - Scalar.of(1)
    assert s.is_zero()
    assert not s.terms


def test_monomial_division():
    num = Scalar.of(3, 1, spow=4)
    den = Scalar.of(1, 1, spow=-2)
    assert (num / den) * den == num
    poly = Scalar.of(1) + Scalar.s_power(2)
    with pytest.raises(ValueError):
        poly.inverse()


def test_conjugation_fixes_s():
    s = Scalar.of(2, -3, spow=5)
    assert s.conj().terms == {5: GaussQ.of(2, 3)}


def test_subs_s_power():
    s = Scalar.s_power(8) + Scalar.of(0, 1, spow=-2)
    flipped = s.subs_s_power(-1)
    assert flipped == Scalar.s_power(-8) + Scalar.of(0, 1, spow=2)
    assert flipped.subs_s_power(-1) == s


def test_evaluate_is_multiplicative():
    import cmath

    a = Scalar.of(3, 1, spow=2)
    b = Scalar.of(1, -2, spow=-5)
    x = 0.37
    lhs = (a * b).evaluate(x)
    rhs = a.evaluate(x) * b.evaluate(x)
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)
    assert abs(Scalar.s_power(8).evaluate(x) - cmath.exp(8 * x)) < 1e-14


@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(scalars)
def test_conj_involution(a):
    assert a.conj().conj() == a


@given(scalars, scalars)
def test_eval_additive(a, b):
    x = 0.25
    assert abs((a + b).evaluate(x) - (a.evaluate(x) + b.evaluate(x))) < 1e-9
