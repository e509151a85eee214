import dataclasses
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperexp.algebra import RationalFunction
from hyperexp.checks import map_battery
from hyperexp.epsode import h_factor
from hyperexp.errors import DomainError
from hyperexp.parammap import classify, one_forms, param_map, verify_map

XI = RationalFunction.x()


def test_classify_examples():
    pm = classify(0, F(1, 2))
    assert (pm.case_tag, pm.q, pm.numerator) == ("i", 2, 1)
    pm = classify(F(1, 3), 1)
    assert (pm.case_tag, pm.q, pm.numerator) == ("ii", 3, 1)
    pm = classify(F(1, 2), F(5, 2))
    assert (pm.case_tag, pm.q, pm.k) == ("iii", 2, 2)
    assert classify(F(1, 3), F(1, 2)).case_tag == "unsupported"


def test_precedence():
    assert classify(0, 1).case_tag == "i"
    assert classify(F(1, 2), 1).case_tag == "ii"
    assert classify(0, 3).case_tag == "i"


def test_case_ii_forms():
    pm = param_map(F(1, 2), 1)
    assert pm.z_of_xi == 1 - XI ** 2
    assert pm.h == 1 / XI
    assert pm.Q == RationalFunction.const(-2)
    assert pm.R == 2 * XI / (XI ** 2 - 1)


def test_case_i_forms():
    pm = param_map(0, F(1, 2))
    assert pm.z_of_xi == XI ** 2 / (XI ** 2 + 1)
    assert pm.h == XI
    assert pm.R == 2 / (XI * (XI ** 2 + 1))


def test_case_iii_forms():
    pm = param_map(F(1, 2), F(5, 2))
    assert pm.z_of_xi == XI ** 2
    assert pm.h == XI ** -3 * (1 - XI ** 2)
    assert pm.R == 2 / XI
    assert verify_map(pm).ok


def test_trivial_map():
    pm = param_map(0, 1)
    assert pm.h == RationalFunction.const(1)
    assert pm.z_of_xi == XI / (XI + 1)
    assert pm.Q == 1 / (XI + 1)


def test_unsupported_raises():
    with pytest.raises(DomainError):
        one_forms(classify(F(1, 3), F(1, 2)))


def test_corrupted_forms_fail():
    pm = param_map(F(1, 3), 1)
    bad = dataclasses.replace(pm, P1=pm.P1 * 2)
    report = verify_map(bad)
    assert not report.ok
    assert "R^2 = P1*P2" in report.failures


def test_battery():
    pairs = map_battery()
    assert len(pairs) == 30
    assert {classify(A, B).case_tag for A, B in pairs} == {"i", "ii", "iii"}
    for A, B in pairs:
        assert verify_map(param_map(A, B)).ok, (A, B)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(-6, 6), st.floats(0.05, 0.95))
def test_h_matches_closed_form(q, u, z):
    A = F(u, q)
    if A == 0:
        return
    pm = param_map(A, 1)
    xi = float(pm.xi(z))
    assert abs(float(pm.z_of_xi(xi)) - z) < 1e-12
    h = float(h_factor(A, 1, z))
    assert abs(float(pm.h(xi)) - h) < 1e-10 * max(1.0, h)


def test_to_dict():
    d = param_map(0, F(1, 2)).to_dict()
    assert d["case"] == "i" and d["q"] == 2 and d["xi_of_z"] == "xi = (z/(1-z))^(1/2)"
    assert "P2" in d
