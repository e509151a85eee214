"""Ground truth from the defining series.

Every term of ``pF(p-1)`` is expanded in epsilon with exact rational
arithmetic; only the final accumulation ``sum_j c_j z**j`` happens in
floating point.  The same machinery evaluates multiple (inverse) binomial
sums directly and checks a small catalog of their hypergeometric
representations.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import EpsPoly, to_rational
from .errors import ConvergenceError, DomainError, NonInvertibleError, UnsupportedError

__all__ = [
    "EpsParam",
    "HyperSpec",
    "BinomialSumSpec",
    "EpsSeriesTable",
    "pochhammer_eps",
    "hyper_eps_coeffs",
    "theta_hyper_eps_coeffs",
    "oracle_table",
    "harmonic_sum",
    "binomial_sum",
    "CatalogTerm",
    "CatalogRep",
    "catalog_hyper_rep",
]

MAX_TERMS = 10**6
DEFAULT_TAIL_TOL = 1e-15


@dataclass(frozen=True)
class EpsParam:
    """A parameter ``fixed + slope*eps``."""

    fixed: Fraction
    slope: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "fixed", to_rational(self.fixed))
        object.__setattr__(self, "slope", to_rational(self.slope))

    def at(self, eps) -> Fraction:
        return self.fixed + self.slope * to_rational(eps)

    def __str__(self):
        if self.slope == 0:
            return _rat(self.fixed)
        sign = "-" if self.slope < 0 else "+"
        return f"{_rat(self.fixed)}{sign}{_rat(abs(self.slope))}e"


def _rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _as_param(x) -> EpsParam:
    if isinstance(x, EpsParam):
        return x
    if isinstance(x, tuple):
        return EpsParam(*x)
    return EpsParam(x)


@dataclass(frozen=True)
class HyperSpec:
    """Parameter set of ``pF(p-1)(upper; lower; z)``."""

    upper: tuple
    lower: tuple

    def __post_init__(self):
        up = tuple(_as_param(u) for u in self.upper)
        lo = tuple(_as_param(b) for b in self.lower)
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "lower", lo)
        if len(up) != len(lo) + 1:
            raise DomainError(f"need p upper and p-1 lower parameters, got {len(up)} and {len(lo)}")
        for b in lo:
            if b.slope == 0 and b.fixed <= 0 and b.fixed.denominator == 1:
                raise DomainError(f"lower parameter {b} is a nonpositive integer")

    @property
    def p(self) -> int:
        return len(self.upper)

    def at(self, eps) -> "HyperSpec":
        """Freeze epsilon at a rational value."""
        return HyperSpec(tuple(EpsParam(u.at(eps)) for u in self.upper),
                         tuple(EpsParam(b.at(eps)) for b in self.lower))

    def scaled(self, lam) -> "HyperSpec":
        lam = to_rational(lam)
        return HyperSpec(tuple(EpsParam(u.fixed, u.slope * lam) for u in self.upper),
                         tuple(EpsParam(b.fixed, b.slope * lam) for b in self.lower))

    def is_deformed(self) -> bool:
        return any(x.slope for x in self.upper + self.lower)

    def to_dict(self) -> dict:
        return {"upper": [str(u) for u in self.upper], "lower": [str(b) for b in self.lower]}

    def __str__(self):
        up = ", ".join(map(str, self.upper))
        lo = ", ".join(map(str, self.lower))
        return f"{self.p}F{self.p - 1}({up}; {lo}; z)"


@dataclass(frozen=True)
class BinomialSumSpec:
    """``sum_j binom(2j,j)**(-k) z**j / j**c * prod S_a(j-1) * prod S_b(2j-1)``."""

    k: int
    a_list: tuple = ()
    b_list: tuple = ()
    c: int = 0
    z: object = Fraction(0)

    def __post_init__(self):
        if self.k not in (1, -1):
            raise DomainError("k must be +1 (inverse binomial) or -1 (binomial)")
        object.__setattr__(self, "a_list", tuple(int(a) for a in self.a_list))
        object.__setattr__(self, "b_list", tuple(int(b) for b in self.b_list))
        if any(a < 1 for a in self.a_list + self.b_list):
            raise DomainError("harmonic indices must be positive")
        if self.c < 0:
            raise DomainError("power c must be nonnegative")


@dataclass
class EpsSeriesTable:
    """Epsilon coefficients ``w_m(z)`` for ``m = 0..order`` at a set of points."""

    spec: HyperSpec
    order: int
    z: tuple
    values: np.ndarray  # shape (order + 1, len(z))
    provenance: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z = tuple(float(t) for t in self.z)
        self.values = np.asarray(self.values, dtype=float).reshape(self.order + 1, len(self.z))
        if not np.all(np.isfinite(self.values)):
            raise ConvergenceError(f"non-finite entries in {self.provenance} table")

    @property
    def entries(self) -> dict:
        return {(m, t): float(self.values[m, i]) for m in range(self.order + 1)
                for i, t in enumerate(self.z)}

    def w(self, m: int, z: float) -> float:
        return float(self.values[m, self.z.index(float(z))])

    def max_deviation(self, other: "EpsSeriesTable") -> float:
        if self.z != other.z:
            raise ValueError("tables sampled at different points")
        n = min(self.order, other.order) + 1
        return float(np.max(np.abs(self.values[:n] - other.values[:n])))


# ---------------------------------------------------------------------------
# series kernels


def pochhammer_eps(base: EpsParam, j: int, N: int) -> EpsPoly:
    """Exact ``(fixed + slope*eps)_j`` truncated after ``eps**N``."""
    if j < 0:
        raise ValueError("Pochhammer index must be nonnegative")
    base = _as_param(base)
    out = [Fraction(1)] + [Fraction(0)] * N
    for l in range(j):
        _mul_linear(out, base.fixed + l, base.slope)
    return EpsPoly(out, N)


def _mul_linear(c: list, alpha: Fraction, beta: Fraction) -> None:
    """In place ``c *= alpha + beta*eps`` (truncated)."""
    for m in range(len(c) - 1, 0, -1):
        c[m] = alpha * c[m] + beta * c[m - 1]
    c[0] = alpha * c[0]


def _div_linear(c: list, alpha: Fraction, beta: Fraction) -> None:
    """In place ``c /= alpha + beta*eps`` (truncated)."""
    if alpha == 0:
        raise NonInvertibleError("lower parameter factor with zero constant term")
    inv = 1 / alpha
    c[0] = c[0] * inv
    for m in range(1, len(c)):
        c[m] = (c[m] - beta * c[m - 1]) * inv


def _term_coefficients(spec: HyperSpec, N: int):
    """Yield ``(j, [eps^m] of term j)`` without the ``z**j`` factor."""
    coeff = [Fraction(1)] + [Fraction(0)] * N
    j = 0
    ups = [(u.fixed, u.slope) for u in spec.upper]
    los = [(b.fixed, b.slope) for b in spec.lower]
    while True:
        yield j, coeff
        for f, s in ups:
            _mul_linear(coeff, f + j, s)
        for f, s in los:
            _div_linear(coeff, f + j, s)
        j += 1
        _div_linear(coeff, Fraction(j), Fraction(0))


class _TailMonitor:
    """Geometric tail certificate per order.

    An order is settled once five consecutive term ratios stay below some
    ``r < 1`` and ``|t_j| r/(1-r)`` is under the tolerance; an order whose
    last five terms vanish is settled too.
    """

    window = 5

    def __init__(self, n: int, tol: float):
        self.tol = tol
        self.prev = [None] * n
        self.ratios = [deque(maxlen=self.window) for _ in range(n)]
        self.zeros = [0] * n
        self.bound = [math.inf] * n

    def update(self, j: int, mags: Sequence[float]) -> bool:
        done = True
        for m, a in enumerate(mags):
            prev = self.prev[m]
            self.prev[m] = a
            if a == 0.0:
                self.zeros[m] += 1
                self.ratios[m].clear()
                if self.zeros[m] >= self.window:
                    self.bound[m] = 0.0
                    continue
                done = False
                continue
            self.zeros[m] = 0
            if prev:
                self.ratios[m].append(a / prev)
            rs = self.ratios[m]
            if len(rs) < self.window:
                self.bound[m] = math.inf
                done = False
                continue
            r = max(rs)
            if r >= 1.0:
                self.bound[m] = math.inf
                done = False
                continue
            self.bound[m] = a * r / (1.0 - r)
            if self.bound[m] >= self.tol:
                done = False
        return done and j >= 2 * self.window


def _check_z(z) -> float:
    zf = float(z)
    if not abs(zf) < 1.0:
        raise DomainError(f"series oracle needs |z| < 1, got {zf}")
    return zf


def theta_hyper_eps_coeffs(spec: HyperSpec, k: int, z, N: int,
                           tail_tol: float = DEFAULT_TAIL_TOL, max_terms: int = MAX_TERMS) -> list:
    """Epsilon coefficients of ``theta**k`` applied to the series (``theta = z d/dz``)."""
    if k < 0:
        raise ValueError("theta power must be nonnegative")
    zf = _check_z(z)
    sums = [[] for _ in range(N + 1)]
    if zf == 0.0:
        return [1.0 if (m == 0 and k == 0) else 0.0 for m in range(N + 1)]
    mon = _TailMonitor(N + 1, tail_tol)
    for j, coeff in _term_coefficients(spec, N):
        weight = zf ** j * (j ** k if k else 1)
        mags = []
        for m in range(N + 1):
            c = coeff[m]
            t = float(c) * weight if c else 0.0
            if t:
                sums[m].append(t)
            mags.append(abs(t))
        if mon.update(j, mags):
            break
        if j >= max_terms:
            raise ConvergenceError(f"series tail above {tail_tol} after {max_terms} terms at z={zf}")
        if not all(math.isfinite(t) for t in mags):
            raise ConvergenceError("overflow while summing the series")
    return [math.fsum(s) for s in sums]


def hyper_eps_coeffs(spec: HyperSpec, z, N: int, tail_tol: float = DEFAULT_TAIL_TOL,
                     max_terms: int = MAX_TERMS) -> list:
    """``[w_0(z), ..., w_N(z)]`` from the defining series, for ``|z| < 1``."""
    return theta_hyper_eps_coeffs(spec, 0, z, N, tail_tol, max_terms)


def oracle_table(spec: HyperSpec, z_points: Sequence, N: int, tail_tol: float = DEFAULT_TAIL_TOL,
                 theta: int = 0, executor=None) -> EpsSeriesTable:
    """Evaluate :func:`theta_hyper_eps_coeffs` on several points."""
    zs = [float(t) for t in z_points]
    if executor is None:
        cols = [theta_hyper_eps_coeffs(spec, theta, t, N, tail_tol) for t in zs]
    else:
        cols = list(executor.map(theta_hyper_eps_coeffs, [spec] * len(zs), [theta] * len(zs), zs,
                                 [N] * len(zs), [tail_tol] * len(zs)))
    values = np.array(cols, dtype=float).T.reshape(N + 1, len(zs))
    return EpsSeriesTable(spec, N, zs, values, "oracle", {"tail_tol": tail_tol, "theta": theta})


# ---------------------------------------------------------------------------
# harmonic and binomial sums


def harmonic_sum(a: int, n: int) -> Fraction:
    """``S_a(n) = sum_{j=1}^n 1/j**a``."""
    if a < 1:
        raise ValueError("harmonic index must be positive")
    if n < 0:
        raise ValueError("harmonic sum needs n >= 0")
    return sum((Fraction(1, j ** a) for j in range(1, n + 1)), Fraction(0))


def _binomial_terms(spec: BinomialSumSpec):
    """Yield ``(j, exact coefficient)`` of the sum, without ``z**j``."""
    central = 1  # binom(2j, j)
    sa = {a: Fraction(0) for a in set(spec.a_list)}  # S_a(j-1)
    sb = {b: Fraction(0) for b in set(spec.b_list)}  # S_b(2j-1)
    j = 0
    while True:
        j += 1
        central = central * (2 * j) * (2 * j - 1) // (j * j)
        if j > 1:
            for a in sa:
                sa[a] += Fraction(1, (j - 1) ** a)
            for b in sb:
                sb[b] += Fraction(1, (2 * j - 2) ** b)
        for b in sb:
            sb[b] += Fraction(1, (2 * j - 1) ** b)
        weight = Fraction(1, central) if spec.k == 1 else Fraction(central)
        coeff = weight / Fraction(j) ** spec.c
        for a in spec.a_list:
            coeff *= sa[a]
        for b in spec.b_list:
            coeff *= sb[b]
        yield j, coeff


def binomial_sum(spec: BinomialSumSpec, tol: float = 1e-15, max_terms: int = MAX_TERMS) -> float:
    """Direct evaluation with a geometric tail certificate.

    Only the open convergence disc is accepted (``|z| < 4`` for inverse
    binomial weights, ``|z| < 1/4`` for binomial ones); points on the
    boundary are rejected.
    """
    zf = float(spec.z)
    radius = 4.0 if spec.k == 1 else 0.25
    if not abs(zf) < radius:
        raise DomainError(f"|z| must be below {radius} for k={spec.k:+d}, got {zf}")
    terms = []
    mon = _TailMonitor(1, tol)
    log_z = math.log(abs(zf)) if zf else 0.0
    for j, coeff in _binomial_terms(spec):
        if coeff and zf:
            # near the radius both coeff and z**j leave the float range separately
            mag = math.exp(math.log(abs(coeff.numerator)) - math.log(coeff.denominator) + j * log_z)
            negative = (coeff < 0) != (zf < 0 and j % 2 == 1)
            t = -mag if negative else mag
        else:
            t = 0.0
        terms.append(t)
        if mon.update(j, [abs(t)]):
            break
        if j >= max_terms:
            raise ConvergenceError("binomial sum tail bound not reached")
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# catalog of hypergeometric representations


@dataclass(frozen=True)
class CatalogTerm:
    """``prefactor * theta**theta [eps**order] F(spec; scale*z)``."""

    prefactor: Fraction
    spec: HyperSpec
    order: int
    theta: int
    scale: Fraction

    def describe(self) -> str:
        op = f"theta^{self.theta} " if self.theta else ""
        return f"{_rat(self.prefactor)} * {op}[e^{self.order}] {str(self.spec).replace('; z)', '; ' + _rat(self.scale) + '*z)')}"

    def evaluate(self, z: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
        coeffs = theta_hyper_eps_coeffs(self.spec, self.theta, float(self.scale) * z, self.order, tail_tol)
        return float(self.prefactor) * coeffs[self.order]


@dataclass(frozen=True)
class CatalogRep:
    terms: tuple
    constant: Fraction

    def describe(self) -> str:
        body = " + ".join(t.describe() for t in self.terms)
        if self.constant:
            body += f" + ({_rat(self.constant)})"
        return body

    def evaluate(self, z: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
        return math.fsum([t.evaluate(z, tail_tol) for t in self.terms]) + float(self.constant)


def _hs(upper, lower) -> HyperSpec:
    return HyperSpec(tuple(EpsParam(*u) if isinstance(u, tuple) else EpsParam(u) for u in upper),
                     tuple(EpsParam(*b) if isinstance(b, tuple) else EpsParam(b) for b in lower))


_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)

# binom(2j, j) = 4**j (1/2)_j / j!  and  (eps)_j = eps (j-1)! (1 + eps S_1(j-1) + ...)
_CATALOG = {
    (1, (), (), 0): CatalogRep((CatalogTerm(Fraction(1), _hs([1, 1], [_HALF]), 0, 0, _QUARTER),), Fraction(-1)),
    (1, (), (), 1): CatalogRep((CatalogTerm(Fraction(1), _hs([(0, 1), 1], [_HALF]), 1, 0, _QUARTER),), Fraction(0)),
    (1, (), (), 2): CatalogRep((CatalogTerm(Fraction(1), _hs([(0, 1), (0, 1), 1], [_HALF, 1]), 2, 0, _QUARTER),), Fraction(0)),
    (-1, (), (), 0): CatalogRep((CatalogTerm(Fraction(1), _hs([_HALF], []), 0, 0, Fraction(4)),), Fraction(-1)),
    (-1, (), (), 1): CatalogRep((CatalogTerm(Fraction(1), _hs([(0, 1), _HALF], [1]), 1, 0, Fraction(4)),), Fraction(0)),
    (-1, (), (), 2): CatalogRep((CatalogTerm(Fraction(1), _hs([(0, 1), (0, 1), _HALF], [1, 1]), 2, 0, Fraction(4)),), Fraction(0)),
    (1, (1,), (), 1): CatalogRep((CatalogTerm(Fraction(1), _hs([(0, 1), 1], [_HALF]), 2, 0, _QUARTER),), Fraction(0)),
    (1, (1,), (), 0): CatalogRep((CatalogTerm(Fraction(1), _hs([(0, 1), 1], [_HALF]), 2, 1, _QUARTER),), Fraction(0)),
}


def catalog_hyper_rep(spec: BinomialSumSpec, tol: float = 1e-15) -> tuple:
    """Look up the stored hypergeometric form of a binomial sum.

    Returns ``(rep, residual)`` where ``residual = |direct - rep(z)|``.
    Sums outside the catalog raise :class:`UnsupportedError`.
    """
    key = (spec.k, tuple(sorted(spec.a_list)), tuple(sorted(spec.b_list)), spec.c)
    rep = _CATALOG.get(key)
    if rep is None:
        raise UnsupportedError(f"no catalog representation for k={spec.k}, a={spec.a_list}, "
                               f"b={spec.b_list}, c={spec.c}")
    direct = binomial_sum(spec, tol)
    return rep, abs(direct - rep.evaluate(float(spec.z)))
