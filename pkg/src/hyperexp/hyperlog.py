"""Hyperlogarithms and the symbolic route to the epsilon coefficients.

Words follow the outermost-first convention

    I(x; a_k, ..., a_1) = int_0^x dt/(t - a_k) I(t; a_{k-1}, ..., a_1),   I(x; ) = 1,

so ``I(x; 1) = ln(1 - x)`` and ``I(x; 0, 1) = -Li2(x)``.

Symbolic construction works in a shifted variable ``x = xi - xi(0)`` so
that every word is based at the point corresponding to ``z = 0``.
Prefactors are exact rational functions of ``x``; integration splits them
into partial fractions over Q and integrates by parts, and the lower
limit is enforced by subtracting the finite part of the antiderivative at
``x = 0``, computed from exact Taylor coefficients of the words.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import Polynomial, RationalFunction, series_div, to_rational
from .epsode import BaseSpec, rhs_terms
from .errors import ConvergenceError, DomainError, UnsupportedError
from .oracle import EpsSeriesTable
from .parammap import ParamMap, classify, param_map
from .quadrature import PanelMesh, graded_edges

__all__ = [
    "HyperlogWord",
    "HyperlogExpr",
    "eval_word",
    "eval_words",
    "shuffle",
    "symbolic_expand",
    "eval_expr",
    "integrate",
    "word_series",
    "integral_rep_expr",
    "expand_table",
    "WEIGHT_CAP",
]

WEIGHT_CAP = 12

_ONE = RationalFunction.const(1)


def _letter(a):
    if isinstance(a, (int, Fraction, np.integer)):
        return Fraction(int(a)) if isinstance(a, np.integer) else to_rational(a)
    return float(a)


@dataclass(frozen=True)
class HyperlogWord:
    """Letters ``(a_k, ..., a_1)``, outermost first."""

    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(_letter(a) for a in self.letters))

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def regular(self) -> bool:
        return not self.letters or self.letters[-1] != 0

    def __str__(self):
        return f"I(x; {','.join(str(a) for a in self.letters)})"

    def __len__(self):
        return len(self.letters)


# ---------------------------------------------------------------------------
# numerical evaluation


class _Evaluator:
    """Node values of words at one argument, sharing suffixes.

    ``I(x; a_k..a_1) = I(1; a_k/x, ..., a_1/x)``, so all words are computed
    on one panel mesh over ``[0, 1]`` graded toward the nearest letters.
    """

    def __init__(self, x: float, letters: Iterable, tol: float = 1e-13, n: int = 24, max_depth: int = 6):
        self.x = float(x)
        self.tol = tol
        self.max_depth = max_depth
        scaled = []
        for a in set(letters):
            if a == 0:
                continue
            b = float(a) / self.x
            if 0.0 < b <= 1.0:
                raise DomainError(f"letter {a} lies on the integration path [0, {x}]")
            scaled.append(b)
        neg = [b for b in scaled if b < 0]
        pos = [b for b in scaled if b > 1]
        left = max(neg) if neg else None
        right = min(pos) if pos else None
        self.mesh = PanelMesh(graded_edges(0.0, 1.0, left, right, ratio=0.25), n)
        self._cache: dict = {}

    def _scaled(self, a) -> float:
        return float(a) / self.x

    def nodes(self, word: tuple) -> np.ndarray:
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        s = self.mesh.nodes
        if len(word) == 1:
            b = self._scaled(word[0])
            out = np.log1p(-s / b)
        else:
            out = self.mesh.cumulative(self._integrand(word))
        self._cache[word] = out
        return out

    def _integrand(self, word: tuple) -> np.ndarray:
        inner = self.nodes(word[1:])
        a = word[0]
        return inner / self.mesh.nodes if a == 0 else inner / (self.mesh.nodes - self._scaled(a))

    def value(self, word: tuple) -> float:
        if not word:
            return 1.0
        if word[-1] == 0:
            raise DomainError("innermost letter 0 makes the word divergent")
        if len(word) == 1:
            return math.log1p(-1.0 / self._scaled(word[0]))
        return self.mesh.integral(self._integrand(word))

    def max_tail(self) -> np.ndarray:
        tails = np.zeros(self.mesh.n_panels)
        for vals in self._cache.values():
            tails = np.maximum(tails, self.mesh.tail(vals))
        return tails

    def refine(self) -> bool:
        flags = self.max_tail() > self.tol
        if not flags.any():
            return False
        self.mesh = self.mesh.refine(flags)
        self._cache.clear()
        return True


def eval_words(x: float, words: Sequence, tol: float = 1e-13) -> list[float]:
    """Values of several words at ``x``; letters may not lie in ``(0, x]``."""
    words = [tuple(w.letters) if isinstance(w, HyperlogWord) else tuple(_letter(a) for a in w) for w in words]
    if x == 0:
        return [1.0 if not w else 0.0 for w in words]
    ev = _Evaluator(x, itertools.chain.from_iterable(words), tol)
    for _ in range(ev.max_depth + 1):
        vals = [ev.value(w) for w in words]
        if not ev.refine():
            return vals
    raise ConvergenceError(f"word quadrature at x={x} did not settle below {tol}")


def eval_word(z: float, word, tol: float = 1e-13) -> float:
    """``I(z; word)`` for real ``z``."""
    return eval_words(z, [word], tol)[0]


def shuffle(w1, w2) -> list[HyperlogWord]:
    """All interleavings of two words, keeping the internal order of each."""
    a = tuple(w1.letters if isinstance(w1, HyperlogWord) else w1)
    b = tuple(w2.letters if isinstance(w2, HyperlogWord) else w2)
    n = len(a) + len(b)
    out = []
    for pos in itertools.combinations(range(n), len(a)):
        pos = set(pos)
        ia, ib = iter(a), iter(b)
        out.append(HyperlogWord(tuple(next(ia) if i in pos else next(ib) for i in range(n))))
    return out


# ---------------------------------------------------------------------------
# expressions


def _add_into(acc: dict, word: tuple, coeff: RationalFunction) -> None:
    if coeff.is_zero():
        return
    cur = acc.get(word)
    new = coeff if cur is None else cur + coeff
    if new.is_zero():
        acc.pop(word, None)
    else:
        acc[word] = new


class HyperlogExpr:
    """``sum_w prefactor_w(x) I(x; w)`` with exact rational prefactors.

    ``variable`` documents the argument: ``x = xi - xi0`` for a parameter map.
    """

    def __init__(self, terms: Mapping | None = None, variable: str = "x", xi0=0):
        self.terms: dict = {}
        for w, c in (terms or {}).items():
            key = tuple(w.letters) if isinstance(w, HyperlogWord) else tuple(_letter(a) for a in w)
            _add_into(self.terms, key, c if isinstance(c, RationalFunction) else RationalFunction(c))
        self.variable = variable
        self.xi0 = to_rational(xi0)

    def __len__(self):
        return len(self.terms)

    def is_empty(self) -> bool:
        return not self.terms

    @property
    def weight(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    @property
    def letters(self) -> set:
        return {a for w in self.terms for a in w}

    def words(self) -> list[HyperlogWord]:
        return [HyperlogWord(w) for w in sorted(self.terms, key=lambda w: (len(w), w))]

    def __add__(self, other: "HyperlogExpr") -> "HyperlogExpr":
        out = HyperlogExpr(self.terms, self.variable, self.xi0)
        for w, c in other.terms.items():
            _add_into(out.terms, w, c)
        return out

    def scale(self, f) -> "HyperlogExpr":
        f = f if isinstance(f, RationalFunction) else RationalFunction(f)
        return HyperlogExpr({w: c * f for w, c in self.terms.items()}, self.variable, self.xi0)

    def __eq__(self, other):
        return isinstance(other, HyperlogExpr) and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            pre = self.terms[w].to_string("x")
            parts.append(pre if not w else f"({pre}) * {HyperlogWord(w)}")
        return " + ".join(parts)

    def __call__(self, x: float, tol: float = 1e-13) -> float:
        """Numerical value at the (shifted) argument ``x``."""
        if not self.terms:
            return 0.0
        words = list(self.terms)
        vals = eval_words(x, words, tol)
        return math.fsum(float(self.terms[w](x)) * v for w, v in zip(words, vals))


def eval_expr(expr: HyperlogExpr, z: float, pmap: ParamMap | None = None, tol: float = 1e-13) -> float:
    """Evaluate at physical ``z`` (through ``pmap``) or at ``x = z`` without a map."""
    if pmap is None:
        return expr(z, tol)
    x = float(pmap.xi(z)) - float(pmap.xi_origin)
    return expr(x, tol)


# ---------------------------------------------------------------------------
# exact series of words at the origin


@lru_cache(maxsize=None)
def _word_series(word: tuple, order: int) -> tuple:
    """Taylor coefficients ``c[0..order]`` of ``I(x; word)``."""
    if not word:
        return tuple([Fraction(1)] + [Fraction(0)] * order)
    a = word[0]
    if len(word) == 1:
        if a == 0:
            raise DomainError("word with innermost letter 0 has no Taylor series")
        return tuple([Fraction(0)] + [-1 / (n * a ** n) for n in range(1, order + 1)])
    inner = _word_series(word[1:], order)
    out = [Fraction(0)] * (order + 1)
    if a == 0:
        for n in range(1, order + 1):
            out[n] = inner[n] / n
        return tuple(out)
    # inner/(t - a) = -(1/a) sum_j (t/a)^j inner
    quot = [Fraction(0)] * order
    for n in range(order):
        acc = Fraction(0)
        for j in range(n + 1):
            if inner[n - j]:
                acc += inner[n - j] / a ** j
        quot[n] = -acc / a
    for n in range(1, order + 1):
        out[n] = quot[n - 1] / n
    return tuple(out)


def word_series(word, order: int) -> list[Fraction]:
    key = tuple(word.letters) if isinstance(word, HyperlogWord) else tuple(to_rational(a) for a in word)
    return list(_word_series(key, order))


# ---------------------------------------------------------------------------
# exact integration


@lru_cache(maxsize=None)
def _linear_factors(den: Polynomial) -> tuple:
    roots = den.rational_roots()
    if sum(m for _, m in roots) != den.degree:
        raise UnsupportedError(f"denominator {den.to_string('x')} has non-rational roots")
    return tuple(roots)


def _partial_fractions(f: RationalFunction) -> tuple[Polynomial, list[tuple[Fraction, int, Fraction]]]:
    """``f = poly + sum c/(x - a)^j``; returns ``(poly, [(a, j, c), ...])``."""
    poly, rem = divmod(f.num, f.den)
    pieces = []
    if rem.is_zero():
        return poly, pieces
    roots = _linear_factors(f.den)
    for a, m in roots:
        other = Polynomial.const(1)
        for b, k in roots:
            if b != a:
                other = other * Polynomial((-b, 1)) ** k
        # Taylor coefficients of rem/other at x = a
        t = series_div(list(rem.shift(a).coeffs), list(other.shift(a).coeffs), m)
        for i, c in enumerate(t):
            if c:
                pieces.append((a, m - i, c))
    return poly, pieces


def _integrate_term(f: RationalFunction, word: tuple, acc: dict) -> None:
    """Add an antiderivative of ``f(x) I(x; word)`` to ``acc``."""
    poly, pieces = _partial_fractions(f)
    # by parts: int g' I(w) = g I(w) - int g I(w[1:])/(t - w[0])
    g_total = RationalFunction(poly.antiderivative()) if not poly.is_zero() else RationalFunction(Polynomial())
    for a, j, c in pieces:
        if j == 1:
            _add_into(acc, (a,) + word, RationalFunction.const(c))
        else:
            g_total = g_total + RationalFunction(Polynomial.const(-c / (j - 1)), Polynomial((-a, 1)) ** (j - 1))
    if g_total.is_zero():
        return
    _add_into(acc, word, g_total)
    if word:
        kern = RationalFunction(Polynomial.const(1), Polynomial((-word[0], 1)))
        sub: dict = {}
        _integrate_term(g_total * kern, word[1:], sub)
        for w, c in sub.items():
            _add_into(acc, w, -c)


def _finite_part(acc: Mapping) -> Fraction:
    """``lim_{x->0}`` of ``sum c_w(x) I(x; w)``; rejects divergent pieces."""
    const = Fraction(0)
    neg: dict[int, Fraction] = {}
    for w, c in acc.items():
        v, lc = c.laurent_at_zero(0)
        if not lc:
            continue
        ser = _word_series(w, max(0, -v))
        for i, ci in enumerate(lc):
            if not ci:
                continue
            for n, sn in enumerate(ser):
                power = v + i + n
                if power > 0:
                    break
                if sn:
                    if power == 0:
                        const += ci * sn
                    else:
                        neg[power] = neg.get(power, Fraction(0)) + ci * sn
    bad = {k: v for k, v in neg.items() if v}
    if bad:
        raise DomainError(f"integrand not integrable at the origin (pole terms {sorted(bad)})")
    return const


def integrate(expr: HyperlogExpr | Mapping) -> HyperlogExpr:
    """``int_0^x`` of an expression, exactly."""
    terms = expr.terms if isinstance(expr, HyperlogExpr) else expr
    acc: dict = {}
    for w, c in terms.items():
        if w and w[-1] == 0:
            raise DomainError("cannot integrate a word with innermost letter 0")
        _integrate_term(c, w, acc)
    divergent = [w for w in acc if w and w[-1] == 0]
    if divergent:
        raise DomainError(f"logarithmic divergence at the origin ({HyperlogWord(divergent[0])})")
    c0 = _finite_part(acc)
    if c0:
        _add_into(acc, (), RationalFunction.const(-c0))
    variable = expr.variable if isinstance(expr, HyperlogExpr) else "x"
    xi0 = expr.xi0 if isinstance(expr, HyperlogExpr) else 0
    return HyperlogExpr(acc, variable, xi0)


# ---------------------------------------------------------------------------
# symbolic expansion


@dataclass(frozen=True)
class _Forms:
    """Map data composed to the shifted variable ``x``."""

    h: RationalFunction
    Q: RationalFunction
    R: RationalFunction
    inv_z: RationalFunction


def _forms(pm: ParamMap) -> _Forms:
    shift = RationalFunction(Polynomial((pm.xi_origin, 1)))
    comp = lambda f: f.compose(shift)  # noqa: E731
    z = comp(pm.z_of_xi)
    forms = _Forms(comp(pm.h), comp(pm.Q), comp(pm.R), z.inverse())
    for f in (forms.h, forms.h.inverse(), forms.Q, forms.R, forms.inv_z):
        _linear_factors(f.den)
    return forms


def _check_supported(spec: BaseSpec, N: int, pm: ParamMap) -> _Forms:
    if N * spec.p > WEIGHT_CAP:
        raise UnsupportedError(f"order {N} with p={spec.p} exceeds the weight cap {WEIGHT_CAP}")
    if not pm.supported:
        raise UnsupportedError(f"(A, B) = ({spec.A}, {spec.B}) has no rationalizing map")
    if pm.A != spec.A or pm.B != spec.B:
        raise DomainError("parameter map does not match (A, B) of the base function")
    try:
        return _forms(pm if pm.complete else param_map(pm.A, pm.B))
    except UnsupportedError as exc:
        raise UnsupportedError(f"case {pm.case_tag} with q={pm.q} needs non-rational letters: {exc}") from None


def symbolic_expand(spec: BaseSpec, N: int, pmap: ParamMap | None = None) -> list[HyperlogExpr]:
    """Exact hyperlogarithm expressions for ``w_0 .. w_N``.

    Index ``m`` of the result holds ``w_m`` as a function of ``x = xi - xi0``;
    ``w_0 = 1`` and orders below the first non-vanishing one are empty.
    """
    pm = pmap if pmap is not None else classify(spec.A, spec.B)
    if not pm.complete and pm.supported:
        pm = param_map(pm.A, pm.B)
    forms = _check_supported(spec, N, pm)
    var = f"x = xi - {pm.xi_origin}, {pm.xi_of_z}"
    empty = lambda: HyperlogExpr({}, var, pm.xi_origin)  # noqa: E731
    p = spec.p
    terms = rhs_terms(spec)
    # table[m][k] = theta^k w_m
    table = [[HyperlogExpr({(): _ONE}, var, pm.xi_origin)] + [empty() for _ in range(p - 1)]]
    for m in range(1, N + 1):
        rhs: dict = {}
        for j, k, alpha, beta in terms:
            if m - j < 0:
                continue
            src = table[m - j][k]
            if src.is_empty():
                continue
            fac = RationalFunction.const(alpha) + forms.inv_z * beta
            for w, c in src.terms.items():
                _add_into(rhs, w, c * fac)
        row = [empty() for _ in range(p)]
        if rhs:
            integrand = {w: c * forms.Q for w, c in rhs.items()}
            u = integrate(HyperlogExpr(integrand, var, pm.xi_origin)).scale(forms.h)
            row[p - 1] = u
            for k in range(p - 1, 0, -1):
                row[k - 1] = integrate(row[k].scale(forms.R))
        table.append(row)
    return [row[0] for row in table]


def integral_rep_expr(A, B) -> tuple[HyperlogExpr, ParamMap]:
    """``z 2F1(1+A, 1; 1+B; z) = B h(z) int_0^z dt/((1-t) h(t))`` as an expression."""
    pm = param_map(A, B)
    forms = _forms(pm)
    var = f"x = xi - {pm.xi_origin}, {pm.xi_of_z}"
    inner = integrate(HyperlogExpr({(): forms.Q}, var, pm.xi_origin))
    return inner.scale(forms.h * to_rational(B)), pm


def expand_table(spec: BaseSpec, N: int, z_points: Sequence, tol: float = 1e-13) -> EpsSeriesTable:
    """Table of ``w_m(z)`` from the symbolic expressions."""
    pm = classify(spec.A, spec.B)
    if not pm.supported:
        raise UnsupportedError(f"(A, B) = ({spec.A}, {spec.B}) has no rationalizing map")
    pm = param_map(spec.A, spec.B)
    exprs = symbolic_expand(spec, N, pm)
    zs = [float(t) for t in z_points]
    if any(not 0.0 <= t < 1.0 for t in zs):
        raise DomainError("hyperlogarithm route covers 0 <= z < 1")
    values = np.array([[eval_expr(e, t, pm, tol) for t in zs] for e in exprs])
    diag = {"case": pm.case_tag, "q": pm.q, "terms": [len(e) for e in exprs],
            "weight": max(e.weight for e in exprs)}
    return EpsSeriesTable(spec.to_hyperspec(), N, zs, values, "hyperlog", diag)

