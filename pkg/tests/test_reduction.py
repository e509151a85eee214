import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperexp.algebra import RationalFunction
from hyperexp.checks import random_reduction_case
from hyperexp.errors import DomainError, ReductionError
from hyperexp.oracle import EpsParam, HyperSpec, theta_hyper_eps_coeffs
from hyperexp.reduction import ThetaRep, companion, identity_rep, reduce, step, verify_rep

Z = RationalFunction.x()
ONE = RationalFunction.const(1)


def spec(upper, lower):
    return HyperSpec(tuple(EpsParam(*u) for u in upper), tuple(EpsParam(*b) for b in lower))


def test_companion_two_f_one():
    a, b, c = F(1, 3), F(2, 5), F(3, 7)
    comp = companion(spec([(a,), (b,)], [(c,)]))
    assert comp.rows[0] == (RationalFunction.const(0), ONE)
    assert comp.last_row[0] == Z * (a * b) / (1 - Z)
    assert comp.last_row[1] == (Z * (a + b) - (c - 1)) / (1 - Z)


def test_companion_one_f_zero():
    comp = companion(spec([(F(5, 2),)], []))
    assert comp.p == 1
    assert comp.last_row[0] == Z * F(5, 2) / (1 - Z)


def test_companion_at_eps():
    s = spec([(0, 1), (0, -1)], [(1,)])
    assert companion(s, F(1, 2)).last_row[0] == Z * F(-1, 4) / (1 - Z)


def test_raise_upper_unit():
    base = spec([(1,), (F(1, 3),)], [(F(1, 2),)])
    rep = step(identity_rep(base), "upper", 0, 1)
    assert rep.coeffs == (ONE, ONE)
    assert rep.normalizer == ONE


def test_lower_c_from_two():
    base = spec([(F(1, 3),), (F(2, 5),)], [(2,)])
    rep = step(identity_rep(base), "lower", 0, -1)
    assert rep.coeffs == (ONE, ONE)
    assert verify_rep(rep, rep.target, 0.4) < 1e-12


def test_raise_lower():
    base = spec([(F(1, 3),), (F(2, 5),)], [(F(3, 7),)])
    rep = step(identity_rep(base), "lower", 0, 1)
    assert rep.target == spec([(F(1, 3),), (F(2, 5),)], [(F(10, 7),)])
    for z in (0.2, 0.5):
        assert verify_rep(rep, rep.target, z) < 1e-10


def test_reduce_identity():
    base = spec([(F(1, 3),), (F(2, 5),)], [(F(3, 7),)])
    rep = reduce(base, base)
    assert rep == identity_rep(base)


def test_reduce_known_closed_form():
    # 2F1(2,1;1;z) = 1/(1-z)^2 and 2F1(1,1;1;z) = 1/(1-z), so target = (1 + theta) base
    base = spec([(1,), (1,)], [(1,)])
    target = spec([(2,), (1,)], [(1,)])
    rep = reduce(target, base)
    assert rep.vector == [ONE, ONE]
    z = 0.3
    got = rep.evaluate(z, [1 / (1 - z), z / (1 - z) ** 2])
    assert abs(got - 1 / (1 - z) ** 2) < 1e-14


def test_three_f_two_with_eps():
    base = spec([(F(1, 3), 1), (F(2, 5), -1), (F(1, 7), 2)], [(F(3, 11), 1), (F(5, 9), 0)])
    target = spec([(F(4, 3), 1), (F(2, 5), -1), (F(1, 7), 2)], [(F(14, 11), 1), (F(5, 9), 0)])
    rep = reduce(target, base, F(1, 13))
    assert verify_rep(rep, target, 0.35) < 1e-10


def test_verify_rep_values():
    base = spec([(F(1, 3), 1), (F(2, 5),)], [(F(3, 7), -1)])
    assert verify_rep(identity_rep(base, F(1, 5)), base, 0.3, N=2) == 0.0
    rep = reduce(spec([(F(4, 3), 1), (F(2, 5),)], [(F(3, 7), -1)]), base, F(1, 5))
    assert verify_rep(rep, rep.target, 0.3, N=3) < 1e-10
    coeffs = list(rep.coeffs)
    coeffs[1] = coeffs[1] + rep.normalizer
    bad = ThetaRep(rep.base, rep.target, rep.eps, tuple(coeffs), rep.normalizer)
    assert verify_rep(bad, rep.target, 0.3) > 0.1


def _poles(rep):
    return {r for r, _ in rep.normalizer.num.rational_roots()}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_shifts_round_trip_and_poles(seed):
    rng = random.Random(seed)
    eps = F(1, 13)
    base, target, _ = random_reduction_case(rng, eps)
    rep = reduce(target, base, eps)
    assert _poles(rep) <= {F(0), F(1)}
    assert verify_rep(rep, target, 0.25) < 1e-9
    which = rng.choice(["upper", "lower"])
    idx = rng.randrange(base.p if which == "upper" else base.p - 1)
    there = step(identity_rep(base, eps), which, idx, 1)
    back = step(there, which, idx, -1)
    assert back == identity_rep(base, eps)


def test_step_order_independent():
    base = spec([(F(1, 3),), (F(2, 5),)], [(F(3, 7),)])
    r1 = step(step(identity_rep(base), "upper", 0, 1), "lower", 0, 1)
    r2 = step(step(identity_rep(base), "lower", 0, 1), "upper", 0, 1)
    assert r1.vector == r2.vector


def test_errors():
    base = spec([(0,), (F(1, 3),)], [(F(1, 2),)])
    with pytest.raises(ReductionError):
        step(identity_rep(base), "upper", 0, 1)
    with pytest.raises(DomainError):
        reduce(spec([(F(1, 2),), (F(1, 3),)], [(F(1, 2),)]), spec([(F(1, 4),), (F(1, 3),)], [(F(1, 2),)]))
    with pytest.raises(ReductionError):
        step(identity_rep(spec([(F(1, 3),), (F(2, 5),)], [(1,)])), "lower", 0, -1)


@pytest.mark.parametrize("seed", range(4))
def test_companion_annihilates_series(seed):
    rng = random.Random(seed)
    p = rng.choice([1, 2, 3])
    s = spec([(F(rng.randint(1, 9), 4),) for _ in range(p)], [(F(rng.randint(1, 9), 5),) for _ in range(p - 1)])
    comp = companion(s)
    z = 0.37
    th = [theta_hyper_eps_coeffs(s, k, z, 0)[0] for k in range(p + 1)]
    pred = sum(float(c(z)) * t for c, t in zip(comp.last_row, th[:p]))
    assert abs(pred - th[p]) < 1e-10 * max(1.0, abs(th[p]))
