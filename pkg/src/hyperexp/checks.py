"""The acceptance battery.

Each check is deterministic (fixed seeds), returns a :class:`CheckResult`
and is shared by ``hyperexp verify`` and the test-suite.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate as sp_integrate

from . import epsode, hyperlog, oracle, parammap, reduction
from .algebra import merge_check
from .epsode import BaseSpec, first_order, h_factor
from .errors import HyperExpError, ReductionError
from .oracle import BinomialSumSpec, EpsParam, HyperSpec

__all__ = ["CheckResult", "CHECKS", "run_checks", "battery_specs"]


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    summary: str
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.key} {self.title}: {self.summary} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"key": self.key, "title": self.title, "passed": self.passed,
                "summary": self.summary, "metrics": self.metrics, "seconds": self.seconds}


def _hs(upper, lower) -> HyperSpec:
    return HyperSpec(tuple(EpsParam(*u) for u in upper), tuple(EpsParam(*b) for b in lower))


def battery_specs() -> dict:
    half = Fraction(1, 2)
    return {
        "2F1(e,-e;1)": _hs([(0, 1), (0, -1)], [(1, 0)]),
        "2F1(e,-e;1+e/2)": _hs([(0, 1), (0, -1)], [(1, half)]),
        "2F1(e,1/2+e;1)": _hs([(0, 1), (half, 1)], [(1, 0)]),
        "3F2(e,e,1/2;1+e,1)": _hs([(0, 1), (0, 1), (half, 0)], [(1, 1), (1, 0)]),
    }


# 1 -------------------------------------------------------------------------

def check_three_way(N: int = 4, zs=(0.1, 0.3, 0.5, 0.7, 0.9), tol: float = 1e-8) -> CheckResult:
    ode_dev = 0.0
    hl_dev = 0.0
    covered = []
    for name, spec in battery_specs().items():
        base = BaseSpec.from_hyperspec(spec)
        ref = oracle.oracle_table(spec, zs, N)
        ode_dev = max(ode_dev, epsode.expand(base, N, zs).max_deviation(ref))
        try:
            hl = hyperlog.expand_table(base, N, zs)
        except HyperExpError:
            continue
        covered.append(name)
        hl_dev = max(hl_dev, hl.max_deviation(ref))
    ok = ode_dev <= tol and hl_dev <= tol
    return CheckResult("C1", "three-way agreement", ok,
                       f"max|ode-oracle|={ode_dev:.2e}, max|hyperlog-oracle|={hl_dev:.2e} "
                       f"on {len(covered)}/{len(battery_specs())} symbolic specs, tol {tol:g}",
                       {"ode": ode_dev, "hyperlog": hl_dev, "hyperlog_specs": covered})


# 2 -------------------------------------------------------------------------

def random_base_spec(rng: random.Random) -> BaseSpec:
    while True:
        p = rng.choice([2, 3])
        a = tuple(Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2, 3])) for _ in range(p - 1))
        b = tuple(Fraction(rng.randint(-2, 2), rng.choice([1, 2])) for _ in range(p - 2))
        A = Fraction(0) if rng.random() < 0.3 else Fraction(rng.randint(1, 8), rng.choice([2, 3, 4]))
        c = Fraction(rng.randint(-3, 3), rng.choice([1, 2]))
        B = Fraction(rng.randint(1, 10), rng.choice([2, 3, 4, 5]))
        f = Fraction(rng.randint(-2, 2), rng.choice([1, 2]))
        spec = BaseSpec(p, a, A, c, b, B, f)
        if first_order(spec)[1] != 0:
            return spec


def first_order_quadrature(spec: BaseSpec, z: float) -> float:
    """``w_{m0}`` from the closed integral form, by adaptive quadrature.

    ``theta^{p-1} w = S h(z) int_0^z ds/((1-s) h(s))`` followed by ``p-1``
    inverse theta steps, written as one weighted integral.
    """
    _, S = first_order(spec)
    A, B, p = float(spec.A), float(spec.B), spec.p
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)

    def inner(t):
        # int_0^t s^(B-1) (1-s)^(A-B) ds
        return sp_integrate.quad(lambda s: (1.0 - s) ** (A - B), 0.0, t, weight="alg", wvar=(B - 1.0, 0.0), **opts)[0]

    def outer(t):
        u_over_t = t ** (-B) * (1.0 - t) ** (B - A - 1.0) * inner(t)
        return u_over_t * math.log(z / t) ** (p - 2) / math.factorial(p - 2)

    return float(S) * sp_integrate.quad(outer, 0.0, z, **opts)[0]


def check_first_order(n_specs: int = 10, zs=(0.2, 0.5, 0.8), seed: int = 7) -> CheckResult:
    rng = random.Random(seed)
    worst_low = 0.0
    worst_m0 = 0.0
    for _ in range(n_specs):
        spec = random_base_spec(rng)
        m0, _ = first_order(spec)
        table = epsode.expand(spec, m0, zs)
        if m0 > 1:
            worst_low = max(worst_low, float(np.max(np.abs(table.values[1:m0]))))
        for i, z in enumerate(zs):
            worst_m0 = max(worst_m0, abs(table.values[m0, i] - first_order_quadrature(spec, z)))
    ok = worst_low <= 1e-10 and worst_m0 <= 1e-8
    return CheckResult("C2", "first non-vanishing order", ok,
                       f"max|w_m<m0|={worst_low:.2e} (tol 1e-10), max|w_m0 - quadrature|={worst_m0:.2e} (tol 1e-8)",
                       {"below_m0": worst_low, "m0": worst_m0})


# 3 -------------------------------------------------------------------------

def random_reduction_case(rng: random.Random, eps: Fraction):
    """A generic base (no integer parameter differences at ``eps``) and a shifted target."""
    while True:
        p = rng.choice([2, 3])
        up = [EpsParam(Fraction(rng.randint(-9, 9), rng.choice([2, 3, 5, 7])), rng.randint(-2, 2)) for _ in range(p)]
        lo = [EpsParam(Fraction(rng.randint(1, 19), rng.choice([2, 3, 5, 7])), rng.randint(-2, 2)) for _ in range(p - 1)]
        vu = [u.at(eps) for u in up]
        vl = [b.at(eps) for b in lo]
        if any(v.denominator == 1 for v in vu + vl):
            continue
        if any((x - y).denominator == 1 for x in vu for y in vl):
            continue
        base = HyperSpec(tuple(up), tuple(lo))
        shifts = [rng.randint(-3, 3) for _ in range(2 * p - 1)]
        target = HyperSpec(tuple(EpsParam(u.fixed + s, u.slope) for u, s in zip(up, shifts)),
                           tuple(EpsParam(b.fixed + s, b.slope) for b, s in zip(lo, shifts[p:])))
        return base, target, shifts


def check_reduction(n_cases: int = 20, zs=(0.2, 0.5), seed: int = 11, eps=Fraction(1, 13)) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    trips = 0
    trip_fail = []
    for n in range(n_cases):
        base, target, shifts = random_reduction_case(rng, eps)
        rep = reduction.reduce(target, base, eps)
        for z in zs:
            worst = max(worst, reduction.verify_rep(rep, target, z))
        which = rng.choice(["upper", "lower"])
        idx = rng.randrange(base.p if which == "upper" else base.p - 1)
        for d in (1, -1):
            try:
                back = reduction.step(reduction.step(rep, which, idx, d), which, idx, -d)
            except ReductionError as exc:
                trip_fail.append(f"case {n}: {exc}")
                continue
            trips += 1
            if back != rep:
                trip_fail.append(f"case {n}: {which}[{idx}] {d:+d} round trip differs")
    ok = worst <= 1e-9 and not trip_fail
    return CheckResult("C3", "differential reduction", ok,
                       f"max verify_rep residual={worst:.2e} (tol 1e-9), {trips} exact round trips, "
                       f"{len(trip_fail)} failures",
                       {"residual": worst, "round_trips": trips, "failures": trip_fail})


# 4 -------------------------------------------------------------------------

def check_merge(n: int = 100, seed: int = 3) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        r = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(rng.randint(0, 5))]
        q = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(rng.randint(0, 5))]
        if not merge_check(r, q):
            bad += 1
    return CheckResult("C4", "elementary symmetric identities", bad == 0,
                       f"{n - bad}/{n} exact merge checks hold", {"failures": bad})


# 5 -------------------------------------------------------------------------

def map_battery(seed: int = 5, per_case: int = 10) -> list:
    rng = random.Random(seed)
    pairs = set()
    while len(pairs) < per_case:
        q = rng.randint(1, 6)
        B = 1 - Fraction(rng.choice([i for i in range(-6, 6) if i]), q)
        if B > 0:
            pairs.add((Fraction(0), B))
    out = sorted(pairs)
    pairs = set()
    while len(pairs) < per_case:
        pairs.add((Fraction(rng.choice([i for i in range(-7, 8) if i]), rng.randint(1, 6)), Fraction(1)))
    out += sorted(pairs)
    pairs = set()
    while len(pairs) < per_case:
        B = Fraction(rng.randint(1, 18), rng.randint(1, 6))
        A = B - rng.randint(-2, 3)
        if A != 0 and B != 1:
            pairs.add((A, B))
    return out + sorted(pairs)


def check_maps(samples=(0.1, 0.3, 0.5, 0.7, 0.9)) -> CheckResult:
    pairs = map_battery()
    failures = []
    h_err = fd_err = 0.0
    cases = {}
    for A, B in pairs:
        pm = parammap.param_map(A, B)
        cases[pm.case_tag] = cases.get(pm.case_tag, 0) + 1
        rep = parammap.verify_map(pm, samples)
        h_err, fd_err = max(h_err, rep.h_error), max(fd_err, rep.fd_error)
        if not rep.ok:
            failures.append(f"({A}, {B}): {', '.join(rep.failures)}")
    ok = not failures and len(pairs) == 30
    return CheckResult("C5", "one-form consistency", ok,
                       f"{len(pairs) - len(failures)}/{len(pairs)} maps pass (cases {cases}); "
                       f"max|h - R/P1|={h_err:.1e}, max fd={fd_err:.1e}",
                       {"failures": failures, "h_error": h_err, "fd_error": fd_err})


# 6 -------------------------------------------------------------------------

def check_hyperlog_calculus(seed: int = 13, n_pairs: int = 25, tol: float = 1e-13, z: float = 0.4) -> CheckResult:
    rng = random.Random(seed)
    letters = [1, -1, 2]
    shuffle_err = 0.0
    for _ in range(n_pairs):
        k1 = rng.randint(1, 3)
        k2 = rng.randint(1, 3 if k1 < 3 else 2) if rng.random() < 0.7 else rng.randint(1, 3)
        w1 = tuple(rng.choice(letters) for _ in range(k1))
        w2 = tuple(rng.choice(letters) for _ in range(k2))
        lhs = hyperlog.eval_word(z, w1, tol) * hyperlog.eval_word(z, w2, tol)
        rhs = math.fsum(hyperlog.eval_words(z, hyperlog.shuffle(w1, w2), tol))
        shuffle_err = max(shuffle_err, abs(lhs - rhs))
    deriv_err = 0.0
    for _ in range(n_pairs):
        w = tuple(rng.choice(letters + [0]) for _ in range(rng.randint(1, 3)))
        if w[-1] == 0:
            w = w[:-1] + (1,)
        d = 1e-5
        fd = (hyperlog.eval_word(z + d, w, tol) - hyperlog.eval_word(z - d, w, tol)) / (2 * d)
        exact = hyperlog.eval_word(z, w[1:], tol) / (z - w[0])
        deriv_err = max(deriv_err, abs(fd - exact) / max(abs(exact), 1e-300))
    ok = shuffle_err <= 10 * tol and deriv_err <= 1e-6
    return CheckResult("C6", "hyperlogarithm calculus", ok,
                       f"shuffle error {shuffle_err:.1e} (tol {10 * tol:.0e}), derivative relation rel. error "
                       f"{deriv_err:.1e} (tol 1e-6)",
                       {"shuffle": shuffle_err, "derivative": deriv_err})


# 7 -------------------------------------------------------------------------

def _exact_inverse_binomial_c2(n_terms: int = 60) -> tuple:
    """Exact partial sum of ``sum 1/(j^2 binom(2j,j))`` and a bound on the rest."""
    total = Fraction(0)
    for j in range(1, n_terms + 1):
        total += Fraction(1, j * j * math.comb(2 * j, j))
    # term ratios stay below 1/4 * (j/(j+1))^2 * (2j+2)/(2j+1) < 1/3
    last = Fraction(1, (n_terms + 1) ** 2 * math.comb(2 * n_terms + 2, n_terms + 1))
    return total, float(last * Fraction(3, 2))


def check_binomial(seed: int = 17, n_z: int = 10) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    entries = sorted(oracle._CATALOG)
    for k, a_list, b_list, c in entries:
        radius = 4.0 if k == 1 else 0.25
        for _ in range(n_z):
            z = rng.uniform(-0.8, 0.8) * radius
            spec = BinomialSumSpec(k, a_list, b_list, c, z)
            _, resid = oracle.catalog_hyper_rep(spec)
            worst = max(worst, resid)
    direct = oracle.binomial_sum(BinomialSumSpec(1, (), (), 2, 1))
    exact, bound = _exact_inverse_binomial_c2()
    err_exact = abs(direct - float(exact)) + bound
    err_pi = abs(direct - math.pi ** 2 / 18)
    ok = worst <= 1e-10 and err_exact <= 1e-10 and err_pi <= 1e-10
    return CheckResult("C7", "binomial sums", ok,
                       f"max catalog residual {worst:.1e} over {len(entries)}x{n_z} points; "
                       f"c=2,z=1 sum {direct:.15f}: vs exact {err_exact:.1e}, vs pi^2/18 {err_pi:.1e}",
                       {"catalog": worst, "exact": err_exact, "pi2_18": err_pi, "value": direct})


# 8 -------------------------------------------------------------------------

def check_closed_form(zs=(0.2, 0.5, 0.8), tol: float = 1e-8) -> CheckResult:
    A, B = Fraction(1, 2), Fraction(1)
    expr, pm = hyperlog.integral_rep_expr(A, B)
    spec = HyperSpec((EpsParam(1 + A), EpsParam(1)), (EpsParam(1 + B),))
    worst = 0.0
    for z in zs:
        ref = z * oracle.hyper_eps_coeffs(spec, z, 0)[0]
        worst = max(worst, abs(hyperlog.eval_expr(expr, z, pm) - ref))
    h_check = max(abs(float(h_factor(A, B, z)) - float(pm.R(pm.xi(z)) / pm.P1(pm.xi(z)))) for z in zs)
    ok = worst <= tol and expr.weight <= 1 and h_check <= 1e-10
    return CheckResult("C8", "closed-form desk check", ok,
                       f"z*2F1(3/2,1;2;z) = {expr} with {pm.xi_of_z}, x = xi - 1: max error {worst:.1e}",
                       {"error": worst, "expr": str(expr)})


CHECKS = {
    "C1": check_three_way,
    "C2": check_first_order,
    "C3": check_reduction,
    "C4": check_merge,
    "C5": check_maps,
    "C6": check_hyperlog_calculus,
    "C7": check_binomial,
    "C8": check_closed_form,
}


def _run_one(key: str) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = CHECKS[key]()
    except HyperExpError as exc:
        res = CheckResult(key, CHECKS[key].__name__, False, f"error: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(keys=None, jobs: int = 1) -> list:
    keys = list(CHECKS) if not keys else [k.upper() for k in keys]
    unknown = [k for k in keys if k not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_one, keys))
    return [_run_one(k) for k in keys]
