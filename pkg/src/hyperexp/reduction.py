"""Differential reduction of integer parameter shifts.

A function whose parameters differ from a base ``pF(p-1)`` by integers is
written as ``(1/R_{p+1}) sum_k R_k theta^{k-1} F_base`` with polynomial
``R_k``.  Everything happens at a fixed rational value of epsilon.

Forward steps use the contiguity operators

    F(U + 1) = (theta + U)/U F(U),     F(L - 1) = (theta + L - 1)/(L - 1) F(L),

and ``theta^p F`` is eliminated with the hypergeometric equation.  The
opposite steps are obtained exactly: in the basis of the *shifted*
function the forward operator gives a p x p matrix over Q(z) whose
inverse expresses the shifted function through the current one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Polynomial, RationalFunction, elem_sym_all, to_rational
from .errors import DomainError, ReductionError
from .oracle import EpsParam, HyperSpec, theta_hyper_eps_coeffs

__all__ = ["CompanionMatrix", "ThetaRep", "companion", "step", "reduce", "verify_rep", "identity_rep"]

_Z = RationalFunction.x()
_ONE = RationalFunction.const(1)
_ZERO = RationalFunction.const(0)


@dataclass(frozen=True)
class CompanionMatrix:
    """``theta (F, ..., theta^{p-1} F)^T = rows (F, ..., theta^{p-1} F)^T``."""

    rows: tuple

    @property
    def p(self) -> int:
        return len(self.rows)

    @property
    def last_row(self) -> tuple:
        return self.rows[-1]


def _values_at(spec: HyperSpec, eps) -> tuple[list[Fraction], list[Fraction]]:
    eps = to_rational(eps)
    return [u.at(eps) for u in spec.upper], [b.at(eps) for b in spec.lower]


def companion(spec: HyperSpec, at_eps=0) -> CompanionMatrix:
    """Companion matrix of ``z prod(theta + U_i) - theta prod(theta + L_k - 1)``."""
    ups, los = _values_at(spec, at_eps)
    p = len(ups)
    if p == 0:
        raise DomainError("degenerate hypergeometric equation (p = 0)")
    # coefficient lists indexed by the power of theta
    alpha = list(reversed(elem_sym_all(ups)))
    beta = [Fraction(0)] + list(reversed(elem_sym_all([l - 1 for l in los])))
    one_minus_z = RationalFunction(Polynomial((1, -1)))
    last = tuple((_Z * alpha[j] - beta[j]) / one_minus_z for j in range(p))
    rows = []
    for k in range(p - 1):
        rows.append(tuple(_ONE if j == k + 1 else _ZERO for j in range(p)))
    rows.append(last)
    return CompanionMatrix(tuple(rows))


def _theta_vec(v: Sequence[RationalFunction], comp: CompanionMatrix) -> list[RationalFunction]:
    """Coefficients of ``theta (sum v_k theta^k F)`` in the basis ``theta^k F``."""
    p = comp.p
    last = comp.last_row
    out = []
    for j in range(p):
        y = v[j].theta()
        if j >= 1:
            y = y + v[j - 1]
        if not v[p - 1].is_zero():
            y = y + v[p - 1] * last[j]
        out.append(y)
    return out


def _solve_left(rows: list[list[RationalFunction]], rhs: list[RationalFunction]) -> list[RationalFunction]:
    """Solve ``y M = rhs`` for the row vector ``y`` (Gaussian elimination over Q(z))."""
    p = len(rows)
    # transpose: M^T y^T = rhs^T
    a = [[rows[j][i] for j in range(p)] + [rhs[i]] for i in range(p)]
    for col in range(p):
        piv = next((r for r in range(col, p) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ReductionError("contiguity matrix is singular at these parameter values")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(p):
            if r != col and not a[r][col].is_zero():
                fac = a[r][col]
                a[r] = [x - fac * y for x, y in zip(a[r], a[col])]
    return [a[i][p] for i in range(p)]


def _lcm(polys: Sequence[Polynomial]) -> Polynomial:
    out = Polynomial.const(1)
    for q in polys:
        out = (out * q).exact_div(out.gcd(q)).monic()
    return out


@dataclass(frozen=True)
class ThetaRep:
    """``target = (1/normalizer) sum_k coeffs[k] theta^k base`` at ``eps``."""

    base: HyperSpec
    target: HyperSpec
    eps: Fraction
    coeffs: tuple
    normalizer: RationalFunction

    @classmethod
    def from_vector(cls, base, target, eps, vector) -> "ThetaRep":
        """Canonical form: monic normalizer = lcm of the denominators."""
        vector = [v if isinstance(v, RationalFunction) else RationalFunction(v) for v in vector]
        norm = _lcm([v.den for v in vector])
        coeffs = tuple(v * RationalFunction(norm) for v in vector)
        return cls(base, target, to_rational(eps), coeffs, RationalFunction(norm))

    @property
    def p(self) -> int:
        return len(self.coeffs)

    @property
    def vector(self) -> list[RationalFunction]:
        return [c / self.normalizer for c in self.coeffs]

    def evaluate(self, z: float, base_thetas: Sequence[float]) -> float:
        n = float(self.normalizer(z))
        return math.fsum(float(c(z)) * t for c, t in zip(self.coeffs, base_thetas)) / n

    def to_strings(self) -> dict:
        return {"R": [str(c) for c in self.coeffs], "normalizer": str(self.normalizer)}


def identity_rep(base: HyperSpec, eps=0) -> ThetaRep:
    vec = [_ONE] + [_ZERO] * (base.p - 1)
    return ThetaRep.from_vector(base, base, eps, vec)


def _replace(spec: HyperSpec, which: str, index: int, delta: int) -> HyperSpec:
    ups, los = list(spec.upper), list(spec.lower)
    seq = ups if which == "upper" else los
    old = seq[index]
    seq[index] = EpsParam(old.fixed + delta, old.slope)
    return HyperSpec(tuple(ups), tuple(los))


def step(rep: ThetaRep, which: str, index: int, direction: int) -> ThetaRep:
    """Shift one parameter of ``rep.target`` by ``direction`` (+1 or -1)."""
    if which not in ("upper", "lower") or direction not in (1, -1):
        raise ValueError("which must be 'upper'/'lower' and direction +1/-1")
    eps = rep.eps
    try:
        new_target = _replace(rep.target, which, index, direction)
    except DomainError as exc:
        raise ReductionError(str(exc)) from exc
    _, new_los = _values_at(new_target, eps)
    if any(l <= 0 and l.denominator == 1 for l in new_los):
        raise ReductionError(f"lower parameter becomes a nonpositive integer at eps={eps}")
    base_comp = companion(rep.base, eps)
    v = rep.vector
    cur_ups, cur_los = _values_at(rep.target, eps)

    forward = (which == "upper" and direction == 1) or (which == "lower" and direction == -1)
    if forward:
        shift = cur_ups[index] if which == "upper" else cur_los[index] - 1
        if shift == 0:
            raise ReductionError(f"contiguity operator singular ({which}[{index}] step at eps={eps}); "
                                 "use a different epsilon or route")
        tv = _theta_vec(v, base_comp)
        new_v = [(t + x * shift) / shift for t, x in zip(tv, v)]
        return ThetaRep.from_vector(rep.base, new_target, eps, new_v)

    # inverse step: old = (theta + s)/s new, with s taken from the new parameters
    new_ups, new_los = _values_at(new_target, eps)
    shift = new_ups[index] if which == "upper" else new_los[index] - 1
    if shift == 0:
        raise ReductionError(f"contiguity operator singular ({which}[{index}] step at eps={eps})")
    new_comp = companion(new_target, eps)
    p = rep.p
    e0 = [_ONE] + [_ZERO] * (p - 1)
    te0 = _theta_vec(e0, new_comp)
    g = [a + b / shift for a, b in zip(e0, te0)]
    s_rows = [g]
    t_rows = [list(v)]
    for _ in range(p - 1):
        s_rows.append(_theta_vec(s_rows[-1], new_comp))
        t_rows.append(_theta_vec(t_rows[-1], base_comp))
    y = _solve_left(s_rows, e0)
    new_v = []
    for j in range(p):
        acc = _ZERO
        for i in range(p):
            if not y[i].is_zero() and not t_rows[i][j].is_zero():
                acc = acc + y[i] * t_rows[i][j]
        new_v.append(acc)
    return ThetaRep.from_vector(rep.base, new_target, eps, new_v)


def _shift_vector(target: HyperSpec, base: HyperSpec) -> tuple[list[int], list[int]]:
    if target.p != base.p:
        raise DomainError("target and base must have the same p")
    shifts = []
    for t, b in zip(target.upper + target.lower, base.upper + base.lower):
        d = t.fixed - b.fixed
        if t.slope != b.slope or d.denominator != 1:
            raise DomainError(f"parameters {b} -> {t} do not differ by an integer")
        shifts.append(int(d))
    return shifts[: target.p], shifts[target.p:]


def reduce(target: HyperSpec, base: HyperSpec, eps=0) -> ThetaRep:
    """Express ``target`` through ``base`` and its theta derivatives at ``eps``.

    Steps run in a canonical order: all raises (upper, then lower,
    left to right), then all lowerings in the same order.
    """
    up_shift, lo_shift = _shift_vector(target, base)
    rep = identity_rep(base, eps)
    for sign in (1, -1):
        for which, shifts in (("upper", up_shift), ("lower", lo_shift)):
            for i, d in enumerate(shifts):
                if d * sign > 0:
                    for _ in range(abs(d)):
                        rep = step(rep, which, i, sign)
    return rep


def verify_rep(rep: ThetaRep, target: HyperSpec, z: float, eps=None, N: int = 0,
               tail_tol: float = 1e-16) -> float:
    """Max mismatch between ``target`` and the representation, via the series oracle.

    Parameters are frozen at ``eps`` (default: the representation's own),
    so every order above 0 vanishes on both sides; they are compared anyway.
    """
    eps = rep.eps if eps is None else to_rational(eps)
    base = rep.base.at(eps)
    tgt = target.at(eps)
    thetas = [theta_hyper_eps_coeffs(base, k, z, N, tail_tol) for k in range(rep.p)]
    lhs = theta_hyper_eps_coeffs(tgt, 0, z, N, tail_tol)
    worst = 0.0
    for m in range(N + 1):
        rhs = rep.evaluate(z, [thetas[k][m] for k in range(rep.p)])
        worst = max(worst, abs(lhs[m] - rhs))
    return worst
