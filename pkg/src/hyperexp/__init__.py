"""Epsilon expansion of pF(p-1) hypergeometric functions.

Three independent routes compute the coefficients ``w_m(z)``: the defining
series (:mod:`~hyperexp.oracle`), the order-by-order ODE with adaptive
quadrature (:mod:`~hyperexp.epsode`) and exact hyperlogarithm expressions
(:mod:`~hyperexp.hyperlog`).  Integer parameter shifts are handled by
:mod:`~hyperexp.reduction`.
"""

from .algebra import EpsPoly, Polynomial, RationalFunction, elem_sym, merge_check
from .epsode import BaseSpec, expand, first_order, solve
from .errors import (
    ConvergenceError,
    DomainError,
    HyperExpError,
    NonInvertibleError,
    ParseError,
    ReductionError,
    UnsupportedError,
)
from .estimator import EpsilonExpansion
from .hyperlog import HyperlogExpr, HyperlogWord, eval_expr, eval_word, shuffle, symbolic_expand
from .oracle import (
    BinomialSumSpec,
    EpsParam,
    EpsSeriesTable,
    HyperSpec,
    binomial_sum,
    catalog_hyper_rep,
    hyper_eps_coeffs,
    theta_hyper_eps_coeffs,
)
from .parammap import ParamMap, classify, one_forms, param_map, verify_map
from .reduction import ThetaRep, companion, reduce, step, verify_rep

__version__ = "0.1.0"

__all__ = [
    "BaseSpec", "BinomialSumSpec", "ConvergenceError", "DomainError", "EpsParam", "EpsPoly",
    "EpsSeriesTable", "EpsilonExpansion", "HyperExpError", "HyperSpec", "HyperlogExpr", "HyperlogWord",
    "NonInvertibleError", "ParamMap", "ParseError", "Polynomial", "RationalFunction", "ReductionError",
    "ThetaRep", "UnsupportedError", "binomial_sum", "catalog_hyper_rep", "classify", "companion",
    "elem_sym", "eval_expr", "eval_word", "expand", "first_order", "hyper_eps_coeffs", "merge_check",
    "one_forms", "param_map", "reduce", "shuffle", "solve", "step", "symbolic_expand",
    "theta_hyper_eps_coeffs", "verify_map", "verify_rep",
]
