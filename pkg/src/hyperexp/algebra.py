"""Exact arithmetic kernels.

Rationals are :class:`fractions.Fraction`.  On top of them this module
provides dense univariate polynomials, rational functions, truncated
epsilon polynomials and the elementary symmetric polynomials ``P_j`` used
throughout the epsilon recursion.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import NonInvertibleError, ParseError

__all__ = [
    "Rational",
    "to_rational",
    "parse_rational",
    "Polynomial",
    "RationalFunction",
    "EpsPoly",
    "elem_sym_all",
    "elem_sym",
    "merge_check",
    "eps_inverse",
]

Rational = Fraction


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions and rational strings to :class:`Fraction`.

    Floats are rejected on purpose; pass ``Fraction(x)`` explicitly if a
    binary float really is meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"n/d"`` or ``"n"`` (optionally signed)."""
    s = text.strip()
    if not s:
        raise ParseError("empty rational", text, 0)
    num, sep, den = s.partition("/")
    try:
        n = int(num)
    except ValueError:
        raise ParseError("bad integer", text, 0) from None
    if not sep:
        return Fraction(n)
    try:
        d = int(den)
    except ValueError:
        raise ParseError("bad denominator", text, len(num) + 1) from None
    if d == 0:
        raise ParseError("zero denominator", text, len(num) + 1)
    return Fraction(n, d)


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Dense polynomial with rational coefficients, ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs", "_float", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_rational(c) if not isinstance(c, Fraction) else c for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._float = None
        self._hash = None

    # constructors
    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Sequence) -> "Polynomial":
        """Monic polynomial ``prod (x - r)``."""
        return reduce(lambda acc, r: acc * cls((-to_rational(r), 1)), roots, cls.const(1))

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        if lc == 1:
            return self
        return Polynomial(c / lc for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("P", self.coeffs))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        return self.to_string()

    def to_string(self, var: str = "z") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and abs(c) == 1:
                body = mono
            elif mono:
                body = f"{_fmt(abs(c))}*{mono}"
            else:
                body = _fmt(abs(c))
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Polynomial"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lc = other.lc
        if len(rem) - 1 < dd:
            return Polynomial(), self
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            c = rem[k + dd] / lc
            quot[k] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    rem[k + j] -= c * y
        return Polynomial(quot), Polynomial(rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Monic gcd by the Euclidean algorithm over Q."""
        a, b = self.monic(), self._coerce(other).monic()
        while not b.is_zero():
            a, b = b, (a % b).monic()
        return a

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def antiderivative(self) -> "Polynomial":
        return Polynomial([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def compose(self, inner: "Polynomial") -> "Polynomial":
        out = Polynomial()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def shift(self, a) -> "Polynomial":
        """Return ``self(x + a)``."""
        return self.compose(Polynomial((to_rational(a), 1)))

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if self._float is None:
            self._float = np.array([float(c) for c in reversed(self.coeffs)] or [0.0])
        return np.polyval(self._float, x)

    def content_free(self) -> "Polynomial":
        """Scale to integer coefficients with gcd 1 and positive leading term."""
        if not self.coeffs:
            return self
        den = math.lcm(*[c.denominator for c in self.coeffs])
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints) * (1 if ints[-1] > 0 else -1)
        return Polynomial(Fraction(c, g) for c in ints)

    def squarefree_part(self) -> "Polynomial":
        if self.degree < 1:
            return Polynomial.const(1)
        return self.exact_div(self.gcd(self.derivative())).monic()

    def rational_roots(self) -> list[tuple[Fraction, int]]:
        """Rational roots with multiplicity.

        Candidates come from the floating roots of the square-free part and
        are confirmed by exact evaluation; irrational or complex roots are
        simply not reported.
        """
        out = []
        if self.degree < 1:
            return out
        sqf = self.squarefree_part()
        cands = []
        if sqf.coeffs[0] == 0:
            cands.append(Fraction(0))
        if sqf.degree >= 1:
            for r in np.roots([float(c) for c in reversed(sqf.coeffs)]):
                if abs(r.imag) > 1e-6 * max(1.0, abs(r.real)):
                    continue
                for maxden in (1, 12, 1000, 10**6):
                    f = Fraction(float(r.real)).limit_denominator(maxden)
                    if abs(float(f) - r.real) > 1e-6 * max(1.0, abs(r.real)):
                        continue
                    if sqf(f) == 0:
                        cands.append(f)
                        break
        rest = self
        for r in sorted(set(cands)):
            lin = Polynomial((-r, 1))
            mult = 0
            while True:
                q, rem = divmod(rest, lin)
                if not rem.is_zero():
                    break
                rest, mult = q, mult + 1
            if mult:
                out.append((r, mult))
        return out

    def exact_root(self, q: int) -> "Polynomial | None":
        """Monic polynomial ``r`` with ``r**q == self`` for monic ``self``, or None."""
        if q == 1:
            return self
        if self.is_zero() or self.lc != 1 or self.degree % q:
            return None
        d = self.degree // q
        # work on the reversed polynomial whose constant term is 1
        rev = list(reversed(self.coeffs))
        root = [Fraction(1)]
        # power series (1 + s)^(1/q) through degree d using r' * P = (1/q) r * P'
        for n in range(1, d + 1):
            # coefficient extraction from r^q = rev, solve for root[n]
            # compute r^q coefficient n with root[n] unknown (linear in root[n])
            trial = root + [Fraction(0)]
            pw = _series_pow(trial, q, n)
            root.append((rev[n] - pw[n]) / q)
        cand = Polynomial(reversed(root))
        return cand if cand ** q == self else None


def _series_pow(series: list, q: int, n: int) -> list:
    """Coefficients 0..n of ``series**q`` (truncated)."""
    out = [Fraction(1)] + [Fraction(0)] * n
    for _ in range(q):
        new = [Fraction(0)] * (n + 1)
        for i, a in enumerate(out):
            if a == 0:
                continue
            for j in range(0, n + 1 - i):
                if j < len(series) and series[j]:
                    new[i + j] += a * series[j]
        out = new
    return out


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """``num/den`` in lowest terms with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, _normalized=False):
        num = num if isinstance(num, Polynomial) else Polynomial.const(num)
        if den is None:
            den = Polynomial.const(1)
        elif not isinstance(den, Polynomial):
            den = Polynomial.const(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            if num.is_zero():
                den = Polynomial.const(1)
            else:
                if den.degree > 0:
                    g = num.gcd(den)
                    if g.degree > 0:
                        num, den = num.exact_div(g), den.exact_div(g)
                lc = den.lc
                if lc != 1:
                    num = Polynomial(c / lc for c in num.coeffs)
                    den = Polynomial(c / lc for c in den.coeffs)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def x(cls) -> "RationalFunction":
        return cls(Polynomial.x())

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls(Polynomial.const(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.coeffs[0] if self.num.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalFunction(other)
        return isinstance(other, RationalFunction) and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        return self.to_string()

    def to_string(self, var: str = "z") -> str:
        if self.den.degree == 0:
            return self.num.to_string(var)
        return f"({self.num.to_string(var)})/({self.den.to_string(var)})"

    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction, Polynomial, np.integer)):
            return RationalFunction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalFunction(Polynomial())
            return RationalFunction(self.num * other, self.den, _normalized=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RationalFunction(Polynomial())
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n >= 0:
            return RationalFunction(self.num ** n, self.den ** n)
        return self.inverse() ** (-n)

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den
        )

    def theta(self) -> "RationalFunction":
        """Euler operator ``z d/dz``."""
        return RationalFunction.x() * self.derivative()

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """Substitute ``inner`` for the variable."""
        inner = self._coerce(inner)
        n, d = inner.num, inner.den
        deg = max(self.num.degree, self.den.degree, 0)

        def hom(poly: Polynomial) -> Polynomial:
            out = Polynomial()
            for i, c in enumerate(poly.coeffs):
                if c:
                    out = out + (n ** i) * (d ** (deg - i)) * c
            return out

        return RationalFunction(hom(self.num), hom(self.den))

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(self.num(x)) / Fraction(self.den(x))
        return self.num(x) / self.den(x)

    def laurent_at_zero(self, order: int) -> tuple[int, list[Fraction]]:
        """Laurent coefficients at 0: returns ``(v, c)`` with ``self = sum c[i] x**(v+i)``.

        Coefficients run up to ``x**order`` inclusive.
        """
        if self.is_zero():
            return 0, []
        v_den = next(i for i, c in enumerate(self.den.coeffs) if c)
        v_num = next(i for i, c in enumerate(self.num.coeffs) if c)
        v = v_num - v_den
        a = list(self.num.coeffs[v_num:])
        b = list(self.den.coeffs[v_den:])
        n_terms = order - v + 1
        if n_terms <= 0:
            return v, []
        return v, series_div(a, b, n_terms)


def series_div(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    """First ``n`` coefficients of the power series ``a/b`` (``b[0] != 0``)."""
    if not b or b[0] == 0:
        raise NonInvertibleError("power series division by a series with zero constant term")
    out = []
    inv = 1 / Fraction(b[0])
    for k in range(n):
        acc = Fraction(a[k]) if k < len(a) else Fraction(0)
        for j in range(1, min(k, len(b) - 1) + 1):
            acc -= b[j] * out[k - j]
        out.append(acc * inv)
    return out


# ---------------------------------------------------------------------------
# truncated epsilon polynomials


class EpsPoly:
    """Polynomial in epsilon truncated after ``eps**order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int):
        cs = [to_rational(c) for c in coeffs][: order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def linear(cls, fixed, slope, order: int) -> "EpsPoly":
        return cls((fixed, slope), order)

    @classmethod
    def one(cls, order: int) -> "EpsPoly":
        return cls((1,), order)

    def __getitem__(self, m: int) -> Fraction:
        return self.coeffs[m]

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, EpsPoly):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def __repr__(self):
        body = " + ".join(f"{_fmt(c)}*e^{i}" for i, c in enumerate(self.coeffs) if c) or "0"
        return f"EpsPoly({body}; O(e^{self.order + 1}))"

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return EpsPoly((other,), self.order)
        if other.order != self.order:
            raise ValueError("truncation orders differ")
        return other

    def __add__(self, other):
        other = self._check(other)
        return EpsPoly([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return EpsPoly([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return EpsPoly([a * other for a in self.coeffs], self.order)
        other = self._check(other)
        n = self.order + 1
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(n - i):
                    out[i + j] += a * other.coeffs[j]
        return EpsPoly(out, self.order)

    __rmul__ = __mul__

    def inverse(self) -> "EpsPoly":
        return eps_inverse(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * eps_inverse(self._check(other))


def eps_inverse(p: EpsPoly) -> EpsPoly:
    """Reciprocal of a truncated epsilon polynomial.

    Raises :class:`NonInvertibleError` when the constant term vanishes.
    """
    if p.coeffs[0] == 0:
        raise NonInvertibleError("epsilon polynomial with zero constant term is not invertible")
    return EpsPoly(series_div([1], p.coeffs, p.order + 1), p.order)


# ---------------------------------------------------------------------------
# elementary symmetric polynomials


def elem_sym_all(roots: Sequence) -> list[Fraction]:
    """``[P_0, ..., P_p]`` with ``prod (x + r_k) = sum_j P_{p-j} x**j``."""
    out = [Fraction(1)]
    for r in roots:
        r = to_rational(r)
        out = [a + r * b for a, b in zip(out + [Fraction(0)], [Fraction(0)] + out)]
    return out


def elem_sym(j: int, roots: Sequence) -> Fraction:
    """The ``j``-th elementary symmetric polynomial of ``roots``."""
    if not 0 <= j <= len(roots):
        raise IndexError(f"P_{j} undefined for {len(roots)} roots")
    return elem_sym_all(roots)[j]


def _elem_sym_brute(j: int, roots: Sequence) -> Fraction:
    acc = Fraction(0)
    for combo in combinations(roots, j):
        acc += reduce(lambda a, b: a * b, combo, Fraction(1))
    return acc


def merge_check(roots_r: Sequence, roots_q: Sequence) -> bool:
    """Check the concatenation identity for ``P`` and its single-append form.

    ``P^{(p+k)}_i(r, q) = sum_n P^{(p)}_{i-n}(r) P^{(k)}_n(q)`` for all ``i``,
    where out-of-range indices contribute zero, plus
    ``P^{(p+1)}_i(r, f) = P^{(p)}_i(r) + f P^{(p)}_{i-1}(r)``.  Both sides
    are also cross-checked against brute-force subset sums.
    """
    r = [to_rational(x) for x in roots_r]
    q = [to_rational(x) for x in roots_q]
    p, k = len(r), len(q)
    pr, pq, prq = elem_sym_all(r), elem_sym_all(q), elem_sym_all(r + q)

    def get(seq, i):
        return seq[i] if 0 <= i < len(seq) else Fraction(0)

    for i in range(p + k + 1):
        if prq[i] != sum((get(pr, i - n) * get(pq, n) for n in range(k + 1)), Fraction(0)):
            return False
        if prq[i] != _elem_sym_brute(i, r + q):
            return False
    # the forward and backward readings of the coefficient list must agree
    expanded = Polynomial.const(1)
    for x in r + q:
        expanded = expanded * Polynomial((x, 1))
    full = list(expanded.coeffs) + [Fraction(0)] * (p + k + 1 - len(expanded.coeffs))
    if [get(prq, p + k - j) for j in range(p + k + 1)] != full:
        return False
    for f in q:
        pf = elem_sym_all(r + [f])
        for i in range(p + 2):
            if pf[i] != get(pr, i) + f * get(pr, i - 1):
                return False
    return True
