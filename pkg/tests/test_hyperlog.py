import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperexp.algebra import RationalFunction
from hyperexp.epsode import BaseSpec, expand
from hyperexp.errors import DomainError, UnsupportedError
from hyperexp.hyperlog import (
    HyperlogExpr,
    HyperlogWord,
    eval_expr,
    eval_word,
    eval_words,
    expand_table,
    integrate,
    integral_rep_expr,
    shuffle,
    symbolic_expand,
    word_series,
)
from hyperexp.oracle import hyper_eps_coeffs
from hyperexp.parammap import param_map

X = RationalFunction.x()
ONE = RationalFunction.const(1)
LI2_HALF = math.pi ** 2 / 12 - math.log(2) ** 2 / 2
TWO_F_ONE = BaseSpec(2, (1,), 0, -1, (), 1, 0)

words = st.lists(st.sampled_from([1, -1, 2, F(-1, 2)]), min_size=1, max_size=3).map(tuple)


def test_eval_word_examples():
    assert abs(eval_word(0.5, (1,)) - math.log(0.5)) < 1e-14
    assert abs(eval_word(0.5, (0, 1)) + LI2_HALF) < 1e-14
    assert abs(eval_word(0.3, (-1,)) - math.log(1.3)) < 1e-14
    assert eval_word(0.0, (1, 2)) == 0.0
    assert eval_words(0.0, [()]) == [1.0]


def test_word_repr():
    w = HyperlogWord((0, 1))
    assert w.weight == 2 and w.regular
    assert str(w) == "I(x; 0,1)"
    assert not HyperlogWord((1, 0)).regular


def test_shuffle_examples():
    assert sorted(str(w) for w in shuffle((1,), (2,))) == ["I(x; 1,2)", "I(x; 2,1)"]
    assert len(shuffle((1, 2), (3, 4, 5))) == math.comb(5, 2)
    assert [w.letters for w in shuffle((), (1, 2))] == [(1, 2)]


@settings(max_examples=25, deadline=None)
@given(words, words, st.floats(0.05, 0.45))
def test_shuffle_identity(w1, w2, x):
    lhs = eval_word(x, w1) * eval_word(x, w2)
    rhs = math.fsum(eval_words(x, shuffle(w1, w2)))
    assert abs(lhs - rhs) < 1e-12


@settings(max_examples=25, deadline=None)
@given(words, st.sampled_from([0, 1, -1, 2]), st.floats(0.1, 0.4))
def test_derivative_relation(w, a, x):
    word = (a,) + w
    d = 1e-5
    fd = (eval_word(x + d, word) - eval_word(x - d, word)) / (2 * d)
    exact = eval_word(x, w) / (x - a)
    assert abs(fd - exact) <= 1e-6 * max(abs(exact), 1e-12)


@pytest.mark.parametrize("word", [(1,), (0, 1), (2, -1, 1), (0, 0, -1)])
def test_small_argument_matches_series(word):
    x = 1e-4
    series = word_series(word, 6)
    assert series[0] == 0
    approx = sum(float(c) * x ** n for n, c in enumerate(series))
    assert abs(eval_word(x, word) - approx) <= 1e-10 * abs(approx)


def test_letter_on_path_rejected():
    with pytest.raises(DomainError):
        eval_word(0.6, (F(1, 2),))


def test_expr_evaluation():
    assert eval_expr(HyperlogExpr({}), 0.4) == 0.0
    e = HyperlogExpr({(1,): ONE})
    assert abs(eval_expr(e, 0.5) - math.log(0.5)) < 1e-14
    assert e.weight == 1 and e.letters == {F(1)}


def test_integrate_exact():
    # int_0^x dt/(t-1) = ln(1-x); int_0^x t dt = x^2/2; int_0^x ln(1-t) dt
    assert integrate(HyperlogExpr({(): 1 / (X - 1)})) == HyperlogExpr({(1,): ONE})
    assert integrate(HyperlogExpr({(): X})) == HyperlogExpr({(): X * X / 2})
    e = integrate(HyperlogExpr({(1,): ONE}))
    x = 0.37
    assert abs(e(x) - ((x - 1) * math.log(1 - x) - x)) < 1e-14
    with pytest.raises(DomainError):
        integrate(HyperlogExpr({(): 1 / X}))


def test_symbolic_two_f_one():
    pm = param_map(0, 1)
    exprs = symbolic_expand(TWO_F_ONE, 3, pm)
    assert exprs[0] == HyperlogExpr({(): ONE}, exprs[0].variable, 0)
    assert exprs[1].is_empty()
    ref = hyper_eps_coeffs(TWO_F_ONE.to_hyperspec(), 0.5, 3)
    for m in (2, 3):
        assert abs(eval_expr(exprs[m], 0.5, pm) - ref[m]) < 1e-12
    # 2F1(e,-e;1;z) = 1 - e^2 Li2(z) + ...
    assert abs(eval_expr(exprs[2], 0.5, pm) + LI2_HALF) < 1e-13


def test_case_ii_against_ode():
    spec = BaseSpec(2, (1,), F(1, 2), 1, (), 1, 0)
    table = expand_table(spec, 3, [0.3])
    ode = expand(spec, 3, [0.3])
    assert table.max_deviation(ode) < 1e-8
    assert table.diagnostics["case"] == "ii"


def test_case_iii_against_series():
    spec = BaseSpec(2, (1,), F(1, 2), 1, (), F(5, 2), 1)
    table = expand_table(spec, 3, [0.2, 0.7])
    for z in (0.2, 0.7):
        ref = hyper_eps_coeffs(spec.to_hyperspec(), z, 3)
        assert max(abs(table.w(m, z) - ref[m]) for m in range(4)) < 1e-10


def test_unsupported():
    with pytest.raises(UnsupportedError):
        symbolic_expand(BaseSpec(2, (1,), F(1, 3), 1, (), F(1, 2), 0), 2)
    with pytest.raises(UnsupportedError):
        symbolic_expand(BaseSpec(3, (1, 1), 0, 1, (0,), 1, 0), 5)
    with pytest.raises(UnsupportedError):
        symbolic_expand(BaseSpec(2, (1,), 0, 1, (), F(1, 2), 0), 2)


def test_integral_representation():
    expr, pm = integral_rep_expr(F(1, 2), 1)
    assert pm.case_tag == "ii"
    assert expr == HyperlogExpr({(): -2 * X / (X + 1)}, expr.variable, expr.xi0)
    z = 0.45
    ref = z * hyper_eps_coeffs_2f1(F(3, 2), 1, 2, z)
    assert abs(eval_expr(expr, z, pm) - ref) < 1e-13


def hyper_eps_coeffs_2f1(a, b, c, z):
    from hyperexp.oracle import EpsParam, HyperSpec

    spec = HyperSpec((EpsParam(a), EpsParam(b)), (EpsParam(c),))
    return hyper_eps_coeffs(spec, z, 0)[0]
