"""Rationalizing substitutions for the integrating factor h(z).

For the three parameter families handled here a variable xi exists in
which ``z``, ``h = z^{1-B}(1-z)^{B-A-1}`` and the one-forms

    dz/((1-z) h) = Q dxi,   dz/z = R dxi,   dz/(z h) = P1 dxi,   h dz/z = P2 dxi

are all rational.  Maps are built with exact arithmetic and the claim is
checked (``h^q`` against the defining power product), not assumed.

Case tags:

* ``i``   A = 0, B = 1 - u/q:  xi = (z/(1-z))^{1/q},  z = xi^q/(1+xi^q),  h = xi^u
* ``ii``  B = 1, A = u/q:      xi = (1-z)^{1/q},      z = 1 - xi^q,       h = xi^{-u}
* ``iii`` B - A = k integer:   xi = z^{1/q}, q = den(B), h = xi^{q(1-B)} (1-xi^q)^{k-1}
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import Polynomial, RationalFunction, to_rational
from .epsode import h_factor
from .errors import DomainError

__all__ = ["ParamMap", "MapReport", "classify", "one_forms", "verify_map", "param_map"]

_XI = RationalFunction.x()
_ONE = RationalFunction.const(1)


@dataclass(frozen=True)
class ParamMap:
    A: Fraction
    B: Fraction
    case_tag: str
    q: int = 1
    numerator: int = 0
    k: int | None = None
    z_of_xi: RationalFunction | None = None
    h: RationalFunction | None = None
    Q: RationalFunction | None = None
    R: RationalFunction | None = None
    P1: RationalFunction | None = None
    P2: RationalFunction | None = None

    @property
    def supported(self) -> bool:
        return self.case_tag != "unsupported"

    @property
    def complete(self) -> bool:
        return self.R is not None

    @property
    def xi_of_z(self) -> str:
        q = "" if self.q == 1 else f"^(1/{self.q})"
        return {
            "i": f"xi = (z/(1-z)){q}",
            "ii": f"xi = (1-z){q}",
            "iii": f"xi = z{q}",
        }.get(self.case_tag, "n/a")

    @property
    def xi_origin(self) -> Fraction:
        """Value of xi at z = 0."""
        return Fraction(1) if self.case_tag == "ii" else Fraction(0)

    def xi(self, z):
        z = np.asarray(z, dtype=float)
        if self.case_tag == "i":
            return (z / (1.0 - z)) ** (1.0 / self.q)
        if self.case_tag == "ii":
            return (1.0 - z) ** (1.0 / self.q)
        if self.case_tag == "iii":
            return z ** (1.0 / self.q)
        raise DomainError(f"no map for (A, B) = ({self.A}, {self.B})")

    def to_dict(self) -> dict:
        out = {"A": str(self.A), "B": str(self.B), "case": self.case_tag, "q": self.q, "u": self.numerator}
        if self.k is not None:
            out["k"] = self.k
        if self.complete:
            out["xi_of_z"] = self.xi_of_z
            for name in ("z_of_xi", "h", "Q", "R", "P1", "P2"):
                out[name] = getattr(self, name).to_string("xi")
        return out


def classify(A, B) -> ParamMap:
    """Case skeleton for ``(A, B)``; precedence i > ii > iii."""
    A, B = to_rational(A), to_rational(B)
    if A == 0:
        s = 1 - B
        return ParamMap(A, B, "i", q=s.denominator, numerator=s.numerator)
    if B == 1:
        return ParamMap(A, B, "ii", q=A.denominator, numerator=A.numerator)
    if (B - A).denominator == 1:
        return ParamMap(A, B, "iii", q=B.denominator, numerator=B.numerator, k=int(B - A))
    return ParamMap(A, B, "unsupported")


def _xi_pow(n: int) -> RationalFunction:
    return _XI ** n


def one_forms(skel: ParamMap) -> ParamMap:
    """Fill in ``z(xi)``, ``h(xi)`` and the four one-forms."""
    if not skel.supported:
        raise DomainError(f"(A, B) = ({skel.A}, {skel.B}) is outside the supported families")
    q, u = skel.q, skel.numerator
    xq = _xi_pow(q)
    if skel.case_tag == "i":
        z = xq / (xq + 1)
        h = _xi_pow(u)
    elif skel.case_tag == "ii":
        z = 1 - xq
        h = _xi_pow(-u)
    else:
        e = (1 - skel.B) * q
        h = _xi_pow(int(e)) * (1 - xq) ** (skel.k - 1)
        z = xq
    # h^q must equal z^{(1-B) q} (1-z)^{(B-A-1) q} identically
    e1, e2 = (1 - skel.B) * q, (skel.B - skel.A - 1) * q
    if e1.denominator != 1 or e2.denominator != 1:
        raise DomainError("internal: exponents not integral after scaling by q")
    if h ** q != z ** int(e1) * (1 - z) ** int(e2):
        raise DomainError(f"h is not rational in xi for case {skel.case_tag}; misclassified map")
    dz = z.derivative()
    Q = dz / ((1 - z) * h)
    R = dz / z
    P1 = dz / (z * h)
    P2 = h * dz / z
    return dataclasses.replace(skel, z_of_xi=z, h=h, Q=Q, R=R, P1=P1, P2=P2)


def param_map(A, B) -> ParamMap:
    return one_forms(classify(A, B))


@dataclass
class MapReport:
    ok: bool
    failures: list = field(default_factory=list)
    h_error: float = 0.0
    fd_error: float = 0.0

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failures": list(self.failures),
                "h_error": self.h_error, "fd_error": self.fd_error}


def verify_map(pm: ParamMap, samples=(0.1, 0.3, 0.5, 0.7, 0.9)) -> MapReport:
    """Check ``R^2 = P1 P2`` exactly, ``h = R/P1`` and ``dz/z = R dxi`` numerically."""
    if not pm.complete:
        pm = one_forms(pm)
    failures = []
    if pm.R * pm.R != pm.P1 * pm.P2:
        failures.append("R^2 = P1*P2")
    h_err = 0.0
    fd_err = 0.0
    for z in samples:
        if not 0.0 < z < 1.0:
            raise DomainError(f"sample z={z} outside (0, 1)")
        xi = float(pm.xi(z))
        h_ref = float(h_factor(pm.A, pm.B, z))
        h_err = max(h_err, abs(h_ref - float(pm.R(xi)) / float(pm.P1(xi))) / max(1.0, abs(h_ref)))
        # dxi/dz by central differences on the closed-form xi(z)
        d = 1e-6 * min(z, 1.0 - z)
        dxi = (float(pm.xi(z + d)) - float(pm.xi(z - d))) / (2 * d)
        lhs = 1.0 / z
        fd_err = max(fd_err, abs(float(pm.R(xi)) * dxi - lhs) / abs(lhs))
    if not h_err < 1e-10:
        failures.append("h = R/P1")
    if not fd_err < 1e-6:
        failures.append("dz/z = R dxi")
    return MapReport(not failures, failures, h_err, fd_err)
