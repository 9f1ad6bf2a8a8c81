import pytest
from hypothesis import given, strategies as st

from klq.laurent import (
    LaurentPoly, NegativeExponent, OddExponent, from_q_polynomial, make_g,
    mu_coefficient, to_q_polynomial,
)

T = LaurentPoly.monomial


def lp(**kw):
    return LaurentPoly(kw)


polys = st.dictionaries(st.integers(-12, 12), st.integers(-10**30, 10**30), max_size=8).map(LaurentPoly)


def test_canonical_form_drops_zeros():
    p = LaurentPoly({1: 2, 0: 0, -3: 5})
    assert p.terms == {1: 2, -3: 5}
    assert LaurentPoly([(2, 1), (2, -1)]) == LaurentPoly.zero()
    assert not LaurentPoly.zero()


def test_examples():
    assert (T(0) + T(-1)).shift(1) == T(1) + T(0)
    assert T(0).times_t_plus_tinv() == T(1) + T(-1)
    s = T(1) + T(-1)
    assert s * s == T(2) + T(0, 2) + T(-2)
    assert (T(1) + T(-3, 2)).bar() == T(-1) + T(3, 2)
    assert T(0, 5).bar() == T(0, 5)


def test_make_g_examples():
    f = T(2) + T(0, 3) + T(-1, 2)
    assert make_g(f) == T(2) + T(0, 3) + T(-2)
    assert make_g(T(-3, 5)) == LaurentPoly.zero()
    assert make_g(T(0, 7)) == T(0, 7)


def test_predicates():
    assert (T(-1) + T(-3)).is_strictly_negative()
    assert (T(2) + T(0)).parity_ok(0)
    assert not (T(2) + T(1)).parity_ok(0)
    assert (T(3) + T(-3)).is_bar_symmetric()
    assert not (T(3) + T(-1)).is_bar_symmetric()


def test_to_q_polynomial():
    assert to_q_polynomial(T(-4) + T(-2), 4) == [1, 1]
    assert to_q_polynomial(T(0), 0) == [1]
    assert to_q_polynomial(T(-3), 3) == [1]
    with pytest.raises(OddExponent):
        to_q_polynomial(T(-2), 3)
    with pytest.raises(NegativeExponent):
        to_q_polynomial(T(-5), 3)


def test_mu_coefficient():
    assert mu_coefficient(T(-1, 3) + T(-3)) == 3
    assert mu_coefficient(T(-2)) == 0


def test_big_coefficients_stay_exact():
    big = T(0, 2**200 + 1)
    assert (big * big).coeff(0) == (2**200 + 1) ** 2


def test_json_round_trip():
    p = T(-3, -(10**40)) + T(2, 7)
    data = p.to_json()
    assert data == [[-3, str(-(10**40))], [2, "7"]]
    assert LaurentPoly.from_json(data) == p


@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == LaurentPoly.zero()


@given(polys, st.integers(-20, 20), st.integers(-20, 20))
def test_shift_composes(f, a, b):
    assert f.shift(a).shift(b) == f.shift(a + b)
    assert f.shift(a) == f * T(a)


@given(polys, polys)
def test_bar_is_ring_involution(f, g):
    assert f.bar().bar() == f
    assert (f * g).bar() == f.bar() * g.bar()
    assert (f + g).bar() == f.bar() + g.bar()


@given(polys)
def test_make_g_decomposition(f):
    g = make_g(f)
    assert g.is_bar_symmetric()
    assert (f - g).is_strictly_negative()
    # the nonnegative part survives unchanged in g
    assert all(g.coeff(e) == c for e, c in f.items() if e >= 0)


@given(st.lists(st.integers(-10**20, 10**20), max_size=6), st.integers(0, 15))
def test_q_polynomial_round_trip(coeffs, extra):
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    ldiff = 2 * max(len(coeffs) - 1, 0) + 1 + extra
    f = from_q_polynomial(coeffs, ldiff)
    assert to_q_polynomial(f, ldiff) == coeffs
