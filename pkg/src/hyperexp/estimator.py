"""scikit-learn style wrapper around the expansion engines.

``X`` holds evaluation points ``z`` (one column); ``transform`` returns the
coefficients ``w_0(z) .. w_order(z)`` as columns.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import epsode, hyperlog, oracle
from .parammap import param_map
from .cli import parse_param
from .epsode import BaseSpec, EpsSolution
from .errors import DomainError
from .oracle import EpsParam, HyperSpec
from .quadrature import QuadConfig

__all__ = ["EpsilonExpansion"]


def _param(x) -> EpsParam:
    if isinstance(x, EpsParam):
        return x
    if isinstance(x, str):
        return parse_param(x)
    if isinstance(x, tuple):
        return EpsParam(*x)
    return EpsParam(x)


class EpsilonExpansion(TransformerMixin, BaseEstimator):
    """Epsilon coefficients of ``pF(p-1)(upper; lower; z)``.

    Parameters
    ----------
    upper, lower : sequences of parameters, given as strings like ``"0+1e"``,
        ``(fixed, slope)`` tuples or numbers.
    order : highest epsilon power.
    method : ``"ode"`` (adaptive quadrature of the ODE recursion),
        ``"oracle"`` (defining series) or ``"hyperlog"`` (exact words).
    quad_tol : panel truncation tolerance of the ODE engine.
    tail_tol : series tail tolerance of the oracle.

    ``fit`` solves once on the range spanned by ``X``; later calls to
    ``transform`` may use any points inside that range.
    """

    def __init__(self, upper=("0+1e", "0-1e"), lower=("1",), order=2, method="ode",
                 quad_tol=1e-12, tail_tol=1e-15):
        self.upper = upper
        self.lower = lower
        self.order = order
        self.method = method
        self.quad_tol = quad_tol
        self.tail_tol = tail_tol

    def _z(self, X) -> np.ndarray:
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"expected a single column of z values, got shape {X.shape}")
            X = X[:, 0]
        return X

    def fit(self, X, y=None):
        z = self._z(X)
        self.spec_ = HyperSpec(tuple(_param(u) for u in self.upper), tuple(_param(b) for b in self.lower))
        if self.method not in ("ode", "oracle", "hyperlog"):
            raise ValueError(f"unknown method {self.method!r}")
        self.z_range_ = (float(z.min()), float(z.max()))
        self.solution_ = None
        self.exprs_ = None
        if self.method != "oracle":
            base = BaseSpec.from_hyperspec(self.spec_)
            if self.method == "ode":
                self.solution_: EpsSolution = epsode.solve(base, self.order, self.z_range_[1],
                                                           QuadConfig(tol=self.quad_tol), z_min=self.z_range_[0])
            else:
                self.pmap_ = param_map(base.A, base.B)
                self.exprs_ = hyperlog.symbolic_expand(base, self.order, self.pmap_)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        z = self._z(X)
        if self.method == "oracle":
            return np.array([oracle.hyper_eps_coeffs(self.spec_, t, self.order, self.tail_tol) for t in z])
        if self.method == "hyperlog":
            return np.array([[hyperlog.eval_expr(e, t, self.pmap_) for e in self.exprs_] for t in z])
        lo, hi = self.solution_.state.mesh.a, self.solution_.state.mesh.b
        if np.any(z < lo) or np.any(z > hi):
            raise DomainError(f"points outside the fitted range [{lo:g}, {hi:g}]")
        return np.asarray(self.solution_(z)).T

    def get_feature_names_out(self, input_features=None):
        return np.array([f"w{m}" for m in range(self.order + 1)], dtype=object)
