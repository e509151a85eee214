"""Piecewise Chebyshev representation of functions on an interval.

Functions are stored by their values at first-kind Chebyshev nodes on each
panel of a mesh.  Cumulative integration is exact for the interpolant,
so nested integrals cost one matrix product per level instead of nested
adaptive quadrature.  Panels whose trailing Chebyshev coefficients exceed
the tolerance are split, giving an adaptive mesh with a tracked error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

__all__ = ["QuadConfig", "PanelMesh", "graded_edges"]


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances for the panel integrator.

    ``tol`` is the per-panel truncation target, ``delta`` the point where
    series start values are handed over to quadrature, ``max_depth`` the
    number of refinement sweeps and ``grid_size`` the nodes per panel.
    """

    tol: float = 1e-12
    delta: float = 1e-2
    max_depth: int = 8
    grid_size: int = 24


@lru_cache(maxsize=16)
def _reference(n: int):
    theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
    x = -np.cos(theta)  # ascending
    vander = C.chebvander(x, n - 1)
    to_coef = np.linalg.inv(vander)
    # cumulative integral from -1 of each Lagrange basis function
    cum = np.empty((n, n))
    total = np.empty(n)
    for j in range(n):
        anti = C.chebint(to_coef[:, j], lbnd=-1)
        cum[:, j] = C.chebval(x, anti)
        total[j] = C.chebval(1.0, anti)
    bary = (-1.0) ** np.arange(n) * np.sin(theta)
    # derivative matrix for residual checks
    diff = np.empty((n, n))
    for j in range(n):
        diff[:, j] = C.chebval(x, C.chebder(to_coef[:, j]))
    return x, to_coef, cum, total, bary, diff


def graded_edges(a: float, b: float, left: float | None = None, right: float | None = None,
                 ratio: float = 0.5) -> np.ndarray:
    """Panel edges on ``[a, b]`` graded geometrically toward singular points.

    ``left``/``right`` are singularity locations just outside the interval
    (``left <= a``, ``right >= b``); every panel ends up no wider than
    ``ratio`` times its distance to the nearer singularity.
    """
    def width_ok(l, r):
        d = np.inf
        if left is not None:
            d = min(d, l - left)
        if right is not None:
            d = min(d, right - r)
        return (r - l) <= ratio * d

    out = []
    stack = [(a, b)]
    while stack:
        l, r = stack.pop()
        if width_ok(l, r) or r - l < 1e-14 * max(1.0, abs(r)):
            out.append((l, r))
        else:
            # split at the point that balances toward the nearer singularity
            m = 0.5 * (l + r)
            if left is not None and right is None:
                m = left + np.sqrt((l - left) * (r - left)) if l > left else m
            elif right is not None and left is None:
                m = right - np.sqrt((right - l) * (right - r)) if r < right else m
            stack.append((m, r))
            stack.append((l, m))
    out.sort()
    edges = [out[0][0]] + [r for _, r in out]
    return np.array(edges)


class PanelMesh:
    """A mesh of panels carrying ``n`` Chebyshev nodes each."""

    def __init__(self, edges, n: int = 24):
        self.edges = np.asarray(edges, dtype=float)
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("panel edges must increase")
        self.n = n
        x, self._to_coef, self._cum, self._total, self._bary, self._diff = _reference(n)
        self._xref = x
        self.left = self.edges[:-1]
        self.right = self.edges[1:]
        self.half = 0.5 * (self.right - self.left)
        self.mid = 0.5 * (self.right + self.left)
        self.nodes = self.mid[:, None] + self.half[:, None] * x[None, :]

    @property
    def n_panels(self) -> int:
        return len(self.left)

    @property
    def a(self) -> float:
        return float(self.edges[0])

    @property
    def b(self) -> float:
        return float(self.edges[-1])

    def cumulative(self, values: np.ndarray, start: float = 0.0) -> np.ndarray:
        """Node values of ``start + int_a^t f``."""
        local = (values @ self._cum.T) * self.half[:, None]
        totals = (values @ self._total) * self.half
        offsets = start + np.concatenate(([0.0], np.cumsum(totals)[:-1]))
        return local + offsets[:, None]

    def integral(self, values: np.ndarray) -> float:
        return float(np.sum((values @ self._total) * self.half))

    def derivative(self, values: np.ndarray) -> np.ndarray:
        return (values @ self._diff.T) / self.half[:, None]

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        return values @ self._to_coef.T

    def tail(self, values: np.ndarray) -> np.ndarray:
        """Per-panel size of the last two Chebyshev coefficients."""
        c = self.coefficients(values)
        return np.abs(c[:, -1]) + np.abs(c[:, -2])

    def locate(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tol = 1e-12 * max(1.0, abs(self.b))
        if np.any(t < self.a - tol) or np.any(t > self.b + tol):
            raise ValueError(f"points outside mesh [{self.a}, {self.b}]")
        return np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, self.n_panels - 1)

    def evaluate(self, values: np.ndarray, t) -> np.ndarray:
        """Barycentric interpolation of stored node values at points ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self.locate(t)
        s = (t - self.mid[idx]) / self.half[idx]
        diff = s[:, None] - self._xref[None, :]
        exact = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            w = self._bary[None, :] / diff
            out = np.sum(w * values[idx], axis=1) / np.sum(w, axis=1)
        hit = exact.any(axis=1)
        if hit.any():
            rows = np.nonzero(hit)[0]
            cols = exact[rows].argmax(axis=1)
            out[rows] = values[idx[rows], cols]
        return out

    def refine(self, flags: np.ndarray) -> "PanelMesh":
        """Split every flagged panel in two."""
        new = [self.edges[0]]
        for i in range(self.n_panels):
            if flags[i]:
                new.append(self.mid[i])
            new.append(self.edges[i + 1])
        return PanelMesh(new, self.n)

    def map(self, func) -> np.ndarray:
        return func(self.nodes)
