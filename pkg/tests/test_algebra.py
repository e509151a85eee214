from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperexp.algebra import (
    EpsPoly,
    Polynomial,
    RationalFunction,
    elem_sym,
    elem_sym_all,
    eps_inverse,
    merge_check,
    parse_rational,
    to_rational,
)
from hyperexp.errors import NonInvertibleError

from conftest import nonzero_rationals, rationals

polys = st.lists(rationals, min_size=1, max_size=5).map(Polynomial)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def test_elem_sym_all_examples():
    r1, r2 = F(2, 3), F(-5, 7)
    assert elem_sym_all([r1, r2]) == [1, r1 + r2, r1 * r2]
    assert elem_sym_all([]) == [1]
    assert elem_sym_all([1, 2, 3]) == [1, 6, 11, 6]


def test_elem_sym_examples():
    assert elem_sym(0, [F(1, 2), 7]) == 1
    assert elem_sym(2, [1, 2, 3]) == 11
    a, c = [F(1, 3), F(-2)], F(5, 4)
    assert elem_sym(1, a + [c]) == sum(a) + c
    with pytest.raises(IndexError):
        elem_sym(3, [1, 2])
    with pytest.raises(IndexError):
        elem_sym(-1, [1])


def test_merge_check_examples():
    assert merge_check([1, 2], [3])
    assert merge_check([F(1, 2), F(-1, 3)], [F(2, 5), 7])
    assert merge_check([], [5])


def test_eps_inverse_examples():
    assert eps_inverse(EpsPoly([1, 1], 2)) == EpsPoly([1, -1, 1], 2)
    assert eps_inverse(EpsPoly([2], 1)) == EpsPoly([F(1, 2)], 1)
    with pytest.raises(NonInvertibleError):
        eps_inverse(EpsPoly([0, 1], 2))


def test_rational_parsing():
    assert parse_rational("-3/6") == F(-1, 2)
    assert to_rational(4) == F(4)
    with pytest.raises(TypeError):
        to_rational(0.5)


@given(st.lists(rationals, max_size=6), st.lists(rationals, max_size=6))
def test_merge_check_random(r, q):
    assert merge_check(r, q)


@given(st.lists(rationals, max_size=6))
def test_elem_sym_matches_product(roots):
    prod = Polynomial.const(1)
    for r in roots:
        prod = prod * Polynomial((r, 1))
    assert list(reversed(elem_sym_all(roots))) == list(prod.coeffs)


@given(nonzero_polys, nonzero_polys)
@settings(max_examples=60)
def test_rational_function_inverse(f, g):
    q = RationalFunction(f, g)
    assert q * RationalFunction(g, f) == RationalFunction.const(1)
    assert RationalFunction(q.num, q.den) == q
    assert q.den.lc == 1


@given(polys, nonzero_polys)
@settings(max_examples=60)
def test_polynomial_division(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(nonzero_polys, nonzero_polys)
@settings(max_examples=40)
def test_gcd_divides(a, b):
    g = a.gcd(b)
    assert divmod(a, g)[1].is_zero() and divmod(b, g)[1].is_zero()


@given(st.lists(rationals, min_size=1, max_size=4), st.integers(0, 4))
def test_eps_inverse_property(coeffs, N):
    coeffs = [coeffs[0] or F(1)] + coeffs[1:]
    p = EpsPoly(coeffs, N)
    prod = eps_inverse(p) * p
    assert prod == EpsPoly.one(N)


def test_rational_roots_and_exact_root():
    p = Polynomial.from_roots([F(1, 2), F(1, 2), -3, 0])
    assert sorted(p.rational_roots()) == [(F(-3), 1), (F(0), 1), (F(1, 2), 2)]
    assert Polynomial((1, 1)).__pow__(3).exact_root(3) == Polynomial((1, 1))
    assert Polynomial((1, 0, 1)).exact_root(2) is None
    # x^2 + 1 has no rational roots
    assert Polynomial((1, 0, 1)).rational_roots() == []


def test_rational_function_calculus():
    x = RationalFunction.x()
    f = (x + 1) / (x * x - 1)
    assert f == RationalFunction(Polynomial.const(1), Polynomial((-1, 1)))
    assert f.derivative() == -(f * f)
    assert f.theta() == x * f.derivative()
    assert f.compose(x * 2) == RationalFunction(Polynomial.const(1), Polynomial((-1, 2)))
    v, c = (RationalFunction.const(1) / (x * x * (1 - x))).laurent_at_zero(1)
    assert v == -2 and c == [1, 1, 1, 1]
    assert f(F(3)) == F(1, 2)


@given(st.lists(st.tuples(rationals, st.integers(1, 3)), max_size=4, unique_by=lambda t: t[0]))
@settings(max_examples=60)
def test_rational_roots_recovered(pairs):
    roots = [r for r, m in pairs for _ in range(m)]
    p = Polynomial.from_roots(roots) * Polynomial((1, 0, 1))  # irreducible factor stays unreported
    assert sorted(p.rational_roots()) == sorted(pairs)
