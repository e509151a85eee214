import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperexp.algebra import EpsPoly
from hyperexp.errors import DomainError, UnsupportedError
from hyperexp.oracle import (
    BinomialSumSpec,
    EpsParam,
    HyperSpec,
    binomial_sum,
    catalog_hyper_rep,
    harmonic_sum,
    hyper_eps_coeffs,
    oracle_table,
    pochhammer_eps,
    theta_hyper_eps_coeffs,
)

from conftest import rationals

LI2_HALF = math.pi ** 2 / 12 - math.log(2) ** 2 / 2


def spec(upper, lower):
    return HyperSpec(tuple(EpsParam(*u) for u in upper), tuple(EpsParam(*b) for b in lower))


TWO_F_ONE_EPS = spec([(0, 1), (0, -1)], [(1, 0)])


def test_pochhammer_examples():
    assert pochhammer_eps(EpsParam(1, 1), 2, 2) == EpsPoly([2, 3, 1], 2)
    a = F(3, 7)
    assert pochhammer_eps(EpsParam(0, a), 1, 3) == EpsPoly([0, a], 3)
    assert pochhammer_eps(EpsParam(F(1, 2)), 2, 0) == EpsPoly([F(3, 4)], 0)


def test_hyper_eps_coeffs_examples():
    w0 = hyper_eps_coeffs(spec([(1, 0), (1, 0)], [(2, 0)]), 0.5, 0)[0]
    assert w0 == pytest.approx(2 * math.log(2), abs=1e-14)
    w = hyper_eps_coeffs(TWO_F_ONE_EPS, 0.5, 3)
    assert w[1] == 0.0
    assert w[2] == pytest.approx(-LI2_HALF, abs=1e-14)


def test_theta_examples():
    s = spec([(1, 0), (1, 0)], [(2, 0)])
    z, d = 0.5, 1e-5
    fd = z * (hyper_eps_coeffs(s, z + d, 0)[0] - hyper_eps_coeffs(s, z - d, 0)[0]) / (2 * d)
    exact = 1 / (1 - z) + math.log(1 - z) / z
    assert theta_hyper_eps_coeffs(s, 1, z, 0)[0] == pytest.approx(exact, abs=1e-13)
    assert fd == pytest.approx(exact, rel=1e-8)
    assert theta_hyper_eps_coeffs(TWO_F_ONE_EPS, 0, 0.3, 2) == hyper_eps_coeffs(TWO_F_ONE_EPS, 0.3, 2)
    assert theta_hyper_eps_coeffs(TWO_F_ONE_EPS, 1, 0.0, 2) == [0.0, 0.0, 0.0]


def test_harmonic_sum_examples():
    assert harmonic_sum(1, 3) == F(11, 6)
    assert harmonic_sum(2, 1) == 1
    assert harmonic_sum(1, 0) == 0


@given(st.integers(1, 4), st.integers(1, 40))
def test_harmonic_sum_step(a, n):
    assert harmonic_sum(a, n) - harmonic_sum(a, n - 1) == F(1, n ** a)


def test_binomial_sum_examples():
    assert binomial_sum(BinomialSumSpec(1, (), (), 2, 1)) == pytest.approx(math.pi ** 2 / 18, abs=1e-15)
    v = binomial_sum(BinomialSumSpec(-1, (), (), 0, F(1, 10)))
    assert v == pytest.approx(1 / math.sqrt(1 - 0.4) - 1, abs=1e-15)
    # z/2 with S_1(j-1): partial sums by hand
    direct = sum(float(harmonic_sum(1, j - 1) / (j * math.comb(2 * j, j))) * 0.5 ** j for j in range(1, 80))
    assert binomial_sum(BinomialSumSpec(1, (1,), (), 1, F(1, 2))) == pytest.approx(direct, abs=1e-15)


def test_binomial_sum_domain():
    with pytest.raises(DomainError):
        binomial_sum(BinomialSumSpec(1, (), (), 2, 4))
    with pytest.raises(DomainError):
        binomial_sum(BinomialSumSpec(-1, (), (), 0, F(1, 4)))
    with pytest.raises(DomainError):
        BinomialSumSpec(2, (), (), 0, 0)


def test_catalog_examples():
    _, r = catalog_hyper_rep(BinomialSumSpec(1, (), (), 0, F(1, 5)))
    assert r < 1e-10
    _, r = catalog_hyper_rep(BinomialSumSpec(-1, (), (), 0, F(1, 10)))
    assert r < 1e-10
    with pytest.raises(UnsupportedError):
        catalog_hyper_rep(BinomialSumSpec(1, (1, 1, 1, 1), (), 5, F(1, 2)))


def test_invalid_specs():
    with pytest.raises(DomainError):
        spec([(1, 0)], [(-2, 0)])
    with pytest.raises(DomainError):
        spec([(1, 0)], [(1, 0)])
    with pytest.raises(DomainError):
        hyper_eps_coeffs(TWO_F_ONE_EPS, 1.0, 2)


@given(st.lists(rationals, min_size=3, max_size=3), st.floats(-0.9, 0.9))
@settings(max_examples=30, deadline=None)
def test_undeformed_has_no_eps_terms(fixed, z):
    a, b, c = fixed
    if c <= 0 and c.denominator == 1:
        c += F(1, 2)
    w = hyper_eps_coeffs(spec([(a, 0), (b, 0)], [(c, 0)]), z, 3)
    assert w[1:] == [0.0, 0.0, 0.0]


@given(rationals.filter(lambda r: r != 0), st.floats(0.05, 0.8))
@settings(max_examples=25, deadline=None)
def test_slope_scaling(lam, z):
    s = spec([(0, 1), (F(1, 2), 1)], [(1, F(-1, 3))])
    base = hyper_eps_coeffs(s, z, 3)
    scaled = hyper_eps_coeffs(s.scaled(lam), z, 3)
    for m in range(4):
        assert scaled[m] == pytest.approx(base[m] * float(lam) ** m, rel=1e-12, abs=1e-13)


def test_partial_sums_monotone():
    from hyperexp.oracle import _term_coefficients

    s = spec([(F(1, 2), 0), (F(3, 2), 0)], [(F(5, 2), 0)])
    z, total, prev = 0.7, 0.0, -1.0
    for j, coeff in _term_coefficients(s, 0):
        total += float(coeff[0]) * z ** j
        assert total > prev
        prev = total
        if j > 60:
            break


def test_table_invariants():
    t = oracle_table(TWO_F_ONE_EPS, [0.1, 0.5], 2)
    assert np.all(t.values[0] == 1.0)
    assert t.w(2, 0.5) == pytest.approx(-LI2_HALF, abs=1e-14)
    assert t.entries[(1, 0.1)] == 0.0


@pytest.mark.parametrize("z", [0.2499, -0.2, 0.1])
def test_binomial_sum_near_radius(z):
    # sum binom(2j,j) z^j / j = 2 ln(2/(1 + sqrt(1 - 4z)))
    exact = 2 * math.log(2 / (1 + math.sqrt(1 - 4 * z)))
    assert abs(binomial_sum(BinomialSumSpec(-1, (), (), 1, z)) - exact) < 1e-12


def test_inverse_binomial_sum_near_radius():
    # sum z^j / (j^2 binom(2j,j)) = 2 arcsin(sqrt(z)/2)^2
    z = 3.9
    exact = 2 * math.asin(math.sqrt(z) / 2) ** 2
    assert abs(binomial_sum(BinomialSumSpec(1, (), (), 2, z)) - exact) < 1e-12
