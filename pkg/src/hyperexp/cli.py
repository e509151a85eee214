"""Command-line front end: ``hyperexp <verb> [options]``.

Exit codes: 0 success, 2 malformed input, 3 outside the supported domain,
4 a requested tolerance check failed, 5 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import checks, epsode, hyperlog, oracle, parammap, reduction
from .epsode import BaseSpec
from .errors import DomainError, HyperExpError, ParseError
from .oracle import BinomialSumSpec, EpsParam, EpsSeriesTable, HyperSpec
from .quadrature import QuadConfig

__all__ = ["parse_param", "parse_spec", "Command", "parse_args", "run", "main", "emit_json", "tables_from_json"]

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_TOL, EXIT_INTERNAL = 0, 2, 3, 4, 5
ENV_QUAD_TOL = "HYPEREXP_QUAD_TOL"
METHODS = ("oracle", "ode", "hyperlog")


# ---------------------------------------------------------------------------
# parsing


class _Scanner:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, msg: str):
        raise ParseError(msg, self.text, self.pos + 1 + self.offset)

    def integer(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected digits")
        return int(self.text[start:self.pos])

    def rational(self, signed: bool = True) -> Fraction:
        sign = 1
        if signed and self.peek() == "-":
            sign = -1
            self.pos += 1
        num = self.integer()
        den = 1
        if self.peek() == "/":
            self.pos += 1
            at = self.pos
            den = self.integer()
            if den == 0:
                self.pos = at
                self.fail("zero denominator")
        return sign * Fraction(num, den)


def parse_param(text: str) -> EpsParam:
    """``RAT [("+"|"-") RAT "e"]`` with ``RAT := ["-"] INT ["/" INT]``."""
    s = _Scanner(text.strip())
    fixed = s.rational()
    slope = Fraction(0)
    if s.peek() in "+-" and s.peek():
        sign = 1 if s.peek() == "+" else -1
        s.pos += 1
        slope = sign * s.rational(signed=False)
        if s.peek() != "e":
            s.fail("expected 'e' after the slope")
        s.pos += 1
    if s.pos != len(s.text):
        s.fail("unexpected character")
    return EpsParam(fixed, slope)


def _split(values) -> list[str]:
    out = []
    for v in values or []:
        out.extend(x for x in v.split(",") if x.strip())
    return out


def parse_params(values) -> tuple:
    return tuple(parse_param(v) for v in _split(values))


def parse_spec(text: str) -> HyperSpec:
    """``"upper,...;lower,..."``, e.g. ``"0+1e,0-1e;1"``."""
    if text.count(";") != 1:
        raise ParseError("expected exactly one ';' between upper and lower parameters", text, len(text))
    up_text, lo_text = text.split(";")
    ups, los = [], []
    col = 0
    for chunk, dest in ((up_text, ups), (lo_text, los)):
        for item in chunk.split(","):
            if item.strip():
                try:
                    dest.append(parse_param(item))
                except ParseError as exc:
                    raise ParseError("malformed parameter", text, col + (exc.column or 1)) from None
            col += len(item) + 1
    return HyperSpec(tuple(ups), tuple(los))


def _rational_arg(text: str) -> Fraction:
    s = _Scanner(text.strip())
    val = s.rational()
    if s.pos != len(s.text):
        s.fail("unexpected character")
    return val


def _number_arg(text: str) -> float | Fraction:
    try:
        return _rational_arg(text)
    except ParseError:
        try:
            return float(text)
        except ValueError:
            raise ParseError("expected a rational or decimal number", text, 1) from None


def _z_list(values) -> list[float]:
    return [float(_number_arg(v)) for v in _split(values)]


# ---------------------------------------------------------------------------
# output


def _num(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return json.dumps(str(x))
    if x == int(x) and abs(x) < 1e17:
        return f"{int(x)}.0" if x or math.copysign(1, x) > 0 else "-0.0"
    return format(x, ".17g")


def emit_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if len(obj) <= 4 and all(not isinstance(v, (dict, list, tuple)) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {emit_json(v, indent, _level + 1)}"
                                   for k, v in obj.items()) + "}"
        items = [f"{pad}{json.dumps(str(k))}: {emit_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(emit_json(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + emit_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    return json.dumps(str(obj))


def _orders(table: EpsSeriesTable) -> list:
    return [{"m": m, "values": [{"z": z, "w": float(table.values[m, i])} for i, z in enumerate(table.z)]}
            for m in range(table.order + 1)]


def table_document(table: EpsSeriesTable) -> dict:
    return {"spec": table.spec.to_dict(), "method": table.provenance,
            "orders": _orders(table), "diagnostics": _plain(table.diagnostics)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def tables_from_json(text: str) -> dict:
    """Inverse of the JSON emitter: ``{method: EpsSeriesTable}``."""
    doc = json.loads(text)
    spec = HyperSpec(tuple(parse_param(u) for u in doc["spec"]["upper"]),
                     tuple(parse_param(b) for b in doc["spec"]["lower"]))
    blocks = doc.get("methods") or {doc.get("method", "unknown"): doc}
    out = {}
    for name, block in blocks.items():
        orders = sorted(block["orders"], key=lambda o: o["m"])
        zs = [v["z"] for v in orders[0]["values"]]
        values = [[v["w"] for v in o["values"]] for o in orders]
        out[name] = EpsSeriesTable(spec, len(orders) - 1, zs, values, name, block.get("diagnostics", {}))
    return out


def _csv(tables: dict) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["method", "m", "z", "w"])
    for name, t in tables.items():
        for m in range(t.order + 1):
            for i, z in enumerate(t.z):
                wr.writerow([name, m, _num(z), _num(t.values[m, i])])
    return buf.getvalue()


def _text(tables: dict, spec: HyperSpec, extra: dict) -> str:
    lines = [str(spec)]
    for name, t in tables.items():
        lines.append(f"-- {name}")
        lines.append("  m  " + "".join(f"{'z=' + format(z, 'g'):>24}" for z in t.z))
        for m in range(t.order + 1):
            lines.append(f"{m:3d}  " + "".join(f"{t.values[m, i]:24.16e}" for i in range(len(t.z))))
    for k, v in extra.items():
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verbs


@dataclass
class Command:
    verb: str
    options: dict = field(default_factory=dict)


def _quad_tol(opt) -> float:
    if opt is not None:
        return float(opt)
    env = os.environ.get(ENV_QUAD_TOL)
    if env:
        try:
            return float(env)
        except ValueError:
            raise ParseError(f"{ENV_QUAD_TOL} is not a number", env, 1) from None
    return QuadConfig().tol


def _compute(method: str, spec: HyperSpec, order: int, zs: list, quad_tol: float, jobs: int) -> EpsSeriesTable:
    if method == "oracle":
        if jobs > 1 and len(zs) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                return oracle.oracle_table(spec, zs, order, executor=ex)
        return oracle.oracle_table(spec, zs, order)
    base = BaseSpec.from_hyperspec(spec)
    if method == "ode":
        return epsode.expand(base, order, zs, QuadConfig(tol=quad_tol))
    if method == "hyperlog":
        return hyperlog.expand_table(base, order, zs)
    raise ParseError(f"unknown method {method!r}", method, 1)


def _run_expand(o: dict) -> tuple[int, str]:
    spec = HyperSpec(parse_params(o["upper"]), parse_params(o["lower"]))
    zs = _z_list(o["z"])
    if not zs:
        raise ParseError("no z points given", "", 1)
    order = o["order"]
    if order < 0:
        raise DomainError("order must be nonnegative")
    quad_tol = _quad_tol(o.get("quad_tol"))
    methods = METHODS if o["method"] == "all" else (o["method"],)
    tables, skipped = {}, {}
    for m in methods:
        try:
            tables[m] = _compute(m, spec, order, zs, quad_tol, o.get("jobs", 1))
        except HyperExpError as exc:
            if o["method"] != "all" or m == "oracle":
                raise
            skipped[m] = str(exc)
    # stable output order: sorted by m, then z; adding 0.0 folds -0.0 into 0.0
    perm = np.argsort(zs, kind="stable")
    for k, t in tables.items():
        tables[k] = EpsSeriesTable(t.spec, t.order, [t.z[i] for i in perm], t.values[:, perm] + 0.0, t.provenance,
                                   t.diagnostics)
    code = EXIT_OK
    diag: dict = {"quad_tol": quad_tol}
    if o["method"] == "all":
        names = list(tables)
        cross = {}
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                cross[f"{a}-{b}"] = tables[a].max_deviation(tables[b])
        diag["cross_check"] = cross
        diag["tol"] = o["tol"]
        if skipped:
            diag["skipped"] = skipped
        if any(not v <= o["tol"] for v in cross.values()):
            code = EXIT_TOL
    main_table = next(iter(tables.values()))
    fmt = o["format"]
    if fmt == "csv":
        return code, _csv(tables)
    if fmt == "text":
        return code, _text(tables, spec, diag)
    doc = {"spec": spec.to_dict(), "orders": _orders(main_table),
           "diagnostics": {**_plain(main_table.diagnostics), **_plain(diag), "method": main_table.provenance}}
    if o["method"] == "all":
        doc["methods"] = {k: {"orders": _orders(t), "diagnostics": _plain(t.diagnostics)} for k, t in tables.items()}
    else:
        doc["method"] = main_table.provenance
    return code, emit_json(doc) + "\n"


def _run_oracle(o: dict) -> tuple[int, str]:
    spec = HyperSpec(parse_params(o["upper"]), parse_params(o["lower"]))
    zs = sorted(_z_list(o["z"]))
    table = oracle.oracle_table(spec, zs, o["order"], o["tail_tol"], theta=o["theta"])
    if o["format"] == "csv":
        return EXIT_OK, _csv({"oracle": table})
    if o["format"] == "text":
        return EXIT_OK, _text({"oracle": table}, spec, {})
    return EXIT_OK, emit_json(table_document(table)) + "\n"


def _run_reduce(o: dict) -> tuple[int, str]:
    target, base = parse_spec(o["target"]), parse_spec(o["base"])
    eps = _rational_arg(o["eps"])
    rep = reduction.reduce(target, base, eps)
    residuals = [{"z": z, "residual": reduction.verify_rep(rep, target, z, eps, o["order"])}
                 for z in sorted(_z_list(o["check"]))]
    code = EXIT_TOL if any(not r["residual"] <= o["tol"] for r in residuals) else EXIT_OK
    doc = {"target": str(target), "base": str(base), "eps": str(eps), **rep.to_strings(),
           "checks": residuals, "tol": o["tol"]}
    if o["format"] == "text":
        lines = [f"{target} = (1/({rep.normalizer})) * ["]
        lines += [f"  + ({c}) theta^{k} {base}" for k, c in enumerate(rep.coeffs)]
        lines.append(f"]  at eps = {eps}")
        lines += [f"residual at z={r['z']:g}: {r['residual']:.3e}" for r in residuals]
        return code, "\n".join(lines) + "\n"
    return code, emit_json(doc) + "\n"


def _run_sum(o: dict) -> tuple[int, str]:
    z = _number_arg(o["z"])
    spec = BinomialSumSpec(o["k"], tuple(int(a) for a in _split(o["a"])), tuple(int(b) for b in _split(o["b"])),
                           o["c"], z)
    value = oracle.binomial_sum(spec, o["tail_tol"])
    doc = {"k": spec.k, "a": list(spec.a_list), "b": list(spec.b_list), "c": spec.c, "z": float(z), "value": value}
    try:
        rep, resid = oracle.catalog_hyper_rep(spec, o["tail_tol"])
        if abs(float(z)) < (4.0 if spec.k == 1 else 0.25):
            doc["hypergeometric"] = rep.describe()
            doc["catalog_residual"] = resid
    except HyperExpError:
        pass
    if o["format"] == "text":
        return EXIT_OK, "\n".join(f"{k}: {v}" for k, v in doc.items()) + "\n"
    return EXIT_OK, emit_json(doc) + "\n"


def _run_classify(o: dict) -> tuple[int, str]:
    A, B = _rational_arg(o["A"]), _rational_arg(o["B"])
    pm = parammap.classify(A, B)
    doc = pm.to_dict()
    code = EXIT_OK
    if pm.supported:
        pm = parammap.one_forms(pm)
        doc = pm.to_dict()
        rep = parammap.verify_map(pm)
        doc["verify"] = rep.to_dict()
        if not rep.ok:
            code = EXIT_TOL
    if o["format"] == "text":
        return code, "\n".join(f"{k}: {v}" for k, v in doc.items()) + "\n"
    return code, emit_json(_plain(doc)) + "\n"


def _run_verify(o: dict) -> tuple[int, str]:
    results = checks.run_checks(_split(o["only"]) or None, o.get("jobs", 1))
    code = EXIT_OK if all(r.passed for r in results) else EXIT_TOL
    if o["format"] == "json":
        return code, emit_json(_plain({"checks": [r.to_dict() for r in results]})) + "\n"
    return code, "\n".join(r.line() for r in results) + "\n"


_VERBS = {
    "expand": _run_expand,
    "oracle": _run_oracle,
    "reduce": _run_reduce,
    "sum": _run_sum,
    "classify": _run_classify,
    "verify": _run_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperexp", description="Epsilon expansion of pF(p-1) hypergeometric functions.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def params(sp):
        sp.add_argument("--upper", action="append", required=True,
                        help="upper parameters, comma separated, e.g. 0+1e,1/2")
        sp.add_argument("--lower", action="append", default=[], help="lower parameters, e.g. 1-1/2e")
        sp.add_argument("--order", type=int, default=2)
        sp.add_argument("--z", action="append", required=True, help="evaluation points, comma separated")
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("expand", help="epsilon coefficients by one or all methods")
    params(sp)
    sp.add_argument("--method", choices=METHODS + ("all",), default="ode")
    sp.add_argument("--tol", type=float, default=1e-8, help="cross-check tolerance for --method all")
    sp.add_argument("--quad-tol", type=float, default=None, help=f"quadrature tolerance (env {ENV_QUAD_TOL})")

    sp = sub.add_parser("oracle", help="epsilon coefficients from the defining series")
    params(sp)
    sp.add_argument("--theta", type=int, default=0, help="apply theta^k before expanding")
    sp.add_argument("--tail-tol", type=float, default=oracle.DEFAULT_TAIL_TOL)

    sp = sub.add_parser("reduce", help="differential reduction of an integer parameter shift")
    sp.add_argument("--target", required=True, help="'upper,...;lower,...'")
    sp.add_argument("--base", required=True, help="'upper,...;lower,...'")
    sp.add_argument("--eps", default="0")
    sp.add_argument("--check", action="append", default=["0.2,0.5"])
    sp.add_argument("--order", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("sum", help="multiple (inverse) binomial sum")
    sp.add_argument("--k", type=int, choices=(1, -1), required=True)
    sp.add_argument("--a", action="append", default=[])
    sp.add_argument("--b", action="append", default=[])
    sp.add_argument("--c", type=int, default=0)
    sp.add_argument("--z", required=True)
    sp.add_argument("--tail-tol", type=float, default=1e-15)
    sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("classify", help="rationalizing map for (A, B)")
    sp.add_argument("--A", required=True)
    sp.add_argument("--B", required=True)
    sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("verify", help="run the acceptance battery")
    sp.add_argument("--only", action="append", default=[], help="check keys, e.g. C1,C3")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    return p


def parse_args(argv=None) -> Command:
    ns = build_parser().parse_args(argv)
    opts = vars(ns)
    verb = opts.pop("verb")
    if verb == "reduce" and len(opts["check"]) > 1:
        opts["check"] = opts["check"][1:]  # explicit --check replaces the default
    return Command(verb, opts)


def run(cmd: Command) -> tuple[int, str]:
    return _VERBS[cmd.verb](cmd.options)


def main(argv=None) -> int:
    try:
        code, out = run(parse_args(argv))
    except ParseError as exc:
        print(f"hyperexp: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, HyperExpError) as exc:
        print(f"hyperexp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:  # noqa: BLE001
        print(f"hyperexp: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
