"""Order-by-order solution of the epsilon-expanded hypergeometric ODE.

The base function is

    omega(z) = pF(p-1)(a_1 e, ..., a_{p-1} e, A + c e;
                       1 + b_1 e, ..., 1 + b_{p-2} e, B + f e; z)
             = 1 + sum_m w_m(z) e^m.

Expanding ``z (theta + A + c e) prod (theta + a_j e)
- theta (theta + B - 1 + f e) prod (theta + b_k e)`` in ``e`` gives, for
``u_m = theta^{p-1} w_m``,

    [(1 - z) d/dz + (B - 1)/z - A] u_m = RHS_m,

with ``RHS_m`` built from lower orders.  ``h(z) = z^{1-B} (1-z)^{B-A-1}``
solves the homogeneous equation, so ``u_m = h * int_0^z RHS_m/((1-t) h)``,
and ``theta^{-1}`` steps recover the lower theta powers down to ``w_m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import elem_sym, to_rational
from .errors import DomainError
from .oracle import EpsParam, EpsSeriesTable, HyperSpec, theta_hyper_eps_coeffs
from .quadrature import PanelMesh, QuadConfig, graded_edges

__all__ = [
    "BaseSpec",
    "OrderState",
    "EpsSolution",
    "h_factor",
    "first_order",
    "rhs_terms",
    "build_rhs",
    "solve_order",
    "solve_first_order",
    "solve",
    "expand",
    "ode_residual",
]


@dataclass(frozen=True)
class BaseSpec:
    """Parameters of the base function ``omega``."""

    p: int
    a_slopes: tuple
    A: Fraction
    c: Fraction
    b_slopes: tuple
    B: Fraction
    f: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a_slopes", tuple(to_rational(a) for a in self.a_slopes))
        object.__setattr__(self, "b_slopes", tuple(to_rational(b) for b in self.b_slopes))
        for name in ("A", "c", "B", "f"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if self.p < 2:
            raise DomainError("base form needs p >= 2")
        if len(self.a_slopes) != self.p - 1 or len(self.b_slopes) != self.p - 2:
            raise DomainError(f"need {self.p - 1} a-slopes and {self.p - 2} b-slopes")
        if self.B <= 0:
            # t^(B-1) is not integrable at the origin; also covers nonpositive integers
            raise DomainError(f"B = {self.B} is outside the supported range B > 0")

    def to_hyperspec(self) -> HyperSpec:
        upper = tuple(EpsParam(0, a) for a in self.a_slopes) + (EpsParam(self.A, self.c),)
        lower = tuple(EpsParam(1, b) for b in self.b_slopes) + (EpsParam(self.B, self.f),)
        return HyperSpec(upper, lower)

    @classmethod
    def from_hyperspec(cls, spec: HyperSpec) -> "BaseSpec":
        """Recognise the base pattern in a general parameter set.

        Upper parameters must be pure ``a e`` except one, lower parameters
        must have fixed part 1 except one.  When several choices fit, the
        last admissible entry plays the role of ``A + c e`` / ``B + f e``.
        """
        p = spec.p
        ups, los = list(spec.upper), list(spec.lower)
        idx_a = [i for i, u in enumerate(ups) if u.fixed != 0]
        if len(idx_a) > 1:
            raise DomainError(f"{spec} is not in base form: more than one upper parameter with nonzero fixed part")
        ia = idx_a[0] if idx_a else p - 1
        idx_b = [i for i, b in enumerate(los) if b.fixed != 1]
        if len(idx_b) > 1:
            raise DomainError(f"{spec} is not in base form: more than one lower parameter with fixed part != 1")
        if p < 2:
            raise DomainError("base form needs p >= 2")
        ib = idx_b[0] if idx_b else p - 2
        a_sl = tuple(u.slope for i, u in enumerate(ups) if i != ia)
        b_sl = tuple(b.slope for i, b in enumerate(los) if i != ib)
        return cls(p, a_sl, ups[ia].fixed, ups[ia].slope, b_sl, los[ib].fixed, los[ib].slope)


def h_factor(A, B, z):
    """Real positive branch of ``z^{1-B} (1-z)^{B-A-1}`` on ``0 < z < 1``."""
    A, B = float(A), float(B)
    z = np.asarray(z, dtype=float)
    return np.power(z, 1.0 - B) * np.power(1.0 - z, B - A - 1.0)


def first_order(spec: BaseSpec) -> tuple[int, Fraction]:
    """First order that can be nonzero and the constant driving it."""
    prod_a = elem_sym(spec.p - 1, spec.a_slopes)
    if spec.A == 0:
        return spec.p, spec.c * prod_a
    return spec.p - 1, spec.A * prod_a


def rhs_terms(spec: BaseSpec) -> list[tuple[int, int, Fraction, Fraction]]:
    """Terms ``(j, k, alpha, beta)`` of ``RHS_m = sum (alpha + beta/z) theta^k w_{m-j}``."""
    p = spec.p
    ac = list(spec.a_slopes) + [spec.c]
    bf = list(spec.b_slopes) + [spec.f]
    acc: dict[tuple[int, int], list[Fraction]] = {}

    def add(j, k, alpha=Fraction(0), beta=Fraction(0)):
        slot = acc.setdefault((j, k), [Fraction(0), Fraction(0)])
        slot[0] += alpha
        slot[1] += beta

    for j in range(1, p + 1):
        add(j, p - j, alpha=elem_sym(j, ac))
        if j <= p - 1:
            add(j, p - j, beta=-elem_sym(j, bf))
            add(j, p - 1 - j, alpha=spec.A * elem_sym(j, spec.a_slopes))
        if j <= p - 2:
            add(j, p - 1 - j, beta=-(spec.B - 1) * elem_sym(j, spec.b_slopes))
    return sorted((j, k, a, b) for (j, k), (a, b) in acc.items() if a or b)


@dataclass
class OrderState:
    """Node values of ``theta^k w_j`` (and ``phi_j``) on a panel mesh.

    ``funcs[(j, k)]`` holds ``theta^k w_j``; ``phi[j]`` holds ``u_j / h``.
    """

    spec: BaseSpec
    mesh: PanelMesh
    m: int = 0
    funcs: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)
    start: dict = field(default_factory=dict)  # series values at the left mesh edge

    def __post_init__(self):
        if not self.funcs:
            shape = self.mesh.nodes.shape
            self.funcs[(0, 0)] = np.ones(shape)
            for k in range(1, self.spec.p):
                self.funcs[(0, k)] = np.zeros(shape)
            self.phi[0] = np.zeros(shape)

    def function(self, j: int, k: int):
        values = self.funcs[(j, k)]
        return lambda z: self.mesh.evaluate(values, z)


def _start_values(spec: BaseSpec, t0: float, N: int) -> dict:
    """Series values of ``theta^k w_m`` at the hand-over point."""
    hs = spec.to_hyperspec()
    out = {}
    for k in range(spec.p):
        coeffs = theta_hyper_eps_coeffs(hs, k, t0, N, tail_tol=1e-18)
        for m, v in enumerate(coeffs):
            out[(m, k)] = v
    return out


def _rhs_nodes(spec: BaseSpec, m: int, state: OrderState) -> np.ndarray:
    nodes = state.mesh.nodes
    out = np.zeros_like(nodes)
    inv_z = 1.0 / nodes
    for j, k, alpha, beta in rhs_terms(spec):
        if m - j < 0:
            continue
        key = (m - j, k)
        if key not in state.funcs:
            raise DomainError(f"order {m - j} missing from state while building order {m}")
        coef = float(alpha) + float(beta) * inv_z
        out += coef * state.funcs[key]
    return out


def build_rhs(spec: BaseSpec, m: int, state: OrderState):
    """Right side of the order-``m`` equation as a callable of ``z``."""
    values = _rhs_nodes(spec, m, state)
    return lambda z: state.mesh.evaluate(values, z)


def solve_first_order(mesh: PanelMesh, rhs: np.ndarray, A, B, start: float = 0.0) -> tuple:
    """Solve ``[(1-z) d/dz + (B-1)/z - A] u = rhs`` by variation of parameters.

    ``start`` is ``u/h`` at the left mesh edge; returns node values of
    ``(u, u/h)``.
    """
    h = h_factor(A, B, mesh.nodes)
    phi = mesh.cumulative(rhs / ((1.0 - mesh.nodes) * h), start)
    return h * phi, phi


def solve_order(spec: BaseSpec, m: int, state: OrderState, quad: QuadConfig | None = None) -> OrderState:
    """Add order ``m`` (all theta powers) to ``state``."""
    p = spec.p
    t0 = state.mesh.a
    rhs = _rhs_nodes(spec, m, state)
    u0 = state.start.get((m, p - 1), 0.0)
    u, phi = solve_first_order(state.mesh, rhs, spec.A, spec.B, u0 / float(h_factor(spec.A, spec.B, t0)))
    state.funcs[(m, p - 1)] = u
    state.phi[m] = phi
    inv_z = 1.0 / state.mesh.nodes
    for k in range(p - 1, 0, -1):
        state.funcs[(m, k - 1)] = state.mesh.cumulative(state.funcs[(m, k)] * inv_z,
                                                        state.start.get((m, k - 1), 0.0))
    state.m = m
    return state


def _initial_mesh(t0: float, z_max: float, n: int) -> PanelMesh:
    return PanelMesh(graded_edges(t0, z_max, left=0.0, right=1.0, ratio=0.5), n)


@dataclass
class EpsSolution:
    """All orders on one mesh; callable at any point of the mesh."""

    spec: BaseSpec
    order: int
    state: OrderState
    refinements: int
    max_tail: float

    def __call__(self, z) -> np.ndarray:
        """Array of shape ``(order + 1, len(z))``."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        return np.array([self.state.mesh.evaluate(self.state.funcs[(m, 0)], z)
                         for m in range(self.order + 1)])

    def theta(self, k: int, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        return np.array([self.state.mesh.evaluate(self.state.funcs[(m, k)], z)
                         for m in range(self.order + 1)])


def solve(spec: BaseSpec, N: int, z_max: float, quad: QuadConfig | None = None,
          z_min: float | None = None) -> EpsSolution:
    """Solve orders ``0..N`` on an adaptive mesh covering ``[delta, z_max]``."""
    quad = quad or QuadConfig()
    if not 0.0 < z_max < 1.0:
        raise DomainError(f"ODE engine covers 0 < z < 1, got z_max={z_max}")
    t0 = quad.delta if z_min is None else min(quad.delta, 0.5 * z_min)
    start = _start_values(spec, t0, N)
    mesh = _initial_mesh(t0, z_max, quad.grid_size)
    for depth in range(quad.max_depth + 1):
        state = OrderState(spec, mesh, start=start)
        for m in range(1, N + 1):
            solve_order(spec, m, state, quad)
        flags = np.zeros(mesh.n_panels, dtype=bool)
        worst = 0.0
        for values in list(state.funcs.values()) + list(state.phi.values()):
            scale = max(1.0, float(np.max(np.abs(values))))
            tail = mesh.tail(values) / scale
            worst = max(worst, float(tail.max()))
            flags |= tail > quad.tol
        if not flags.any() or depth == quad.max_depth:
            return EpsSolution(spec, N, state, depth, worst)
        mesh = mesh.refine(flags)
    raise AssertionError("unreachable")


def expand(spec: BaseSpec, N: int, z_points: Sequence, quad: QuadConfig | None = None) -> EpsSeriesTable:
    """Table of ``w_m(z)``, ``m <= N``, from the ODE recursion."""
    zs = [float(t) for t in z_points]
    if any(not 0.0 < t < 1.0 for t in zs):
        raise DomainError("ODE engine covers 0 < z < 1 only")
    sol = solve(spec, N, max(zs), quad, z_min=min(zs))
    values = sol(zs)
    return EpsSeriesTable(spec.to_hyperspec(), N, zs, values, "ode",
                          {"panels": sol.state.mesh.n_panels, "refinements": sol.refinements,
                           "max_tail": sol.max_tail})


def ode_residual(spec: BaseSpec, state: OrderState, m: int) -> float:
    """Max scaled residual of the order-``m`` equation on the mesh.

    The equation is checked in integrated form,
    ``(1-t) u(t) - (1-t0) u(t0) + int_t0^t [u + ((B-1)/s - A) u - RHS] ds``,
    which avoids the noise of differentiating the interpolant on the
    short panels near ``z = 1``.
    """
    mesh = state.mesh
    z = mesh.nodes
    u = state.funcs[(m, spec.p - 1)]
    u0 = state.start.get((m, spec.p - 1), 0.0)
    integrand = u + ((float(spec.B) - 1.0) / z - float(spec.A)) * u - _rhs_nodes(spec, m, state)
    resid = (1.0 - z) * u - (1.0 - mesh.a) * u0 + mesh.cumulative(integrand)
    scale = max(1.0, float(np.max(np.abs(u))))
    return float(np.max(np.abs(resid))) / scale
