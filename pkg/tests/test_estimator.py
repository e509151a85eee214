import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hyperexp.errors import DomainError
from hyperexp.estimator import EpsilonExpansion
from hyperexp.oracle import EpsParam, HyperSpec, hyper_eps_coeffs

Z = np.array([[0.1], [0.4], [0.7]])
REF_SPEC = HyperSpec((EpsParam(0, 1), EpsParam(0, -1)), (EpsParam(1),))


@pytest.mark.parametrize("method", ["ode", "oracle", "hyperlog"])
def test_transform_matches_series(method):
    est = EpsilonExpansion(order=3, method=method).fit(Z)
    out = est.transform(Z)
    assert out.shape == (3, 4)
    ref = np.array([hyper_eps_coeffs(REF_SPEC, z, 3) for z in Z[:, 0]])
    assert np.allclose(out, ref, atol=1e-8, rtol=0)


def test_feature_names_and_params():
    est = EpsilonExpansion(order=2)
    assert est.get_params()["order"] == 2
    twin = clone(est).set_params(order=4)
    assert twin.order == 4 and est.order == 2
    est.fit(Z)
    assert list(est.get_feature_names_out()) == ["w0", "w1", "w2"]
    assert est.n_features_in_ == 1


def test_not_fitted():
    with pytest.raises(NotFittedError):
        EpsilonExpansion().transform(Z)


def test_bad_input():
    with pytest.raises(ValueError):
        EpsilonExpansion(method="magic").fit(Z)
    with pytest.raises(ValueError):
        EpsilonExpansion().fit(np.ones((3, 2)) * 0.2)
    est = EpsilonExpansion().fit(Z)
    with pytest.raises(DomainError):
        est.transform([[0.95]])
