"""Command-line front end.

Every command prints one JSON document (``"schema": 1``) unless ``--format
csv`` is requested.  Exit codes: 0 pass or dominates, 1 violated or fail,
2 inconclusive, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .dominance import (
    DominanceRelation,
    TriggerModel,
    check_sd,
    check_sd_cp,
    check_sd_star,
    check_sd_triggered,
    check_sd_truncated,
    check_tail_type,
)
from .dsl import build, canonical
from .errors import HTDError, ParseError
from .majorization import WeightVector, majorizes, t_transform_chain
from .membership import (
    CLASSES,
    DEFAULT_TOL,
    GridSpec,
    check_concave_lambda,
    check_g,
    check_h,
    check_hstar,
    check_v,
    classify,
)
from .montecarlo import MC

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _clean(obj):
    """Make an object JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump(doc: dict) -> str:
    return json.dumps(_clean({"schema": SCHEMA, **doc}), indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse numbers from {text!r}") from exc


def _weights(text: str | None, flag: str) -> WeightVector | None:
    if text is None:
        return None
    return WeightVector.parse(text)


def _grid(text: str | None) -> GridSpec | None:
    return None if text is None else GridSpec.parse(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

_CHECKS = {"H": check_h, "V": check_v, "Hstar": check_hstar, "G": check_g, "concave_lambda": check_concave_lambda}


def cmd_classify(args) -> int:
    F = build(args.expr)
    reports = classify(F, _grid(args.grid), _grid(args.grid_2d), tol=args.tol, workers=args.threads)
    doc = {"command": "classify", "expr": F.to_dsl(), "classes": {k: reports[k].to_dict() for k in CLASSES}}
    _emit(_dump(doc), args.out)
    return EXIT_FAIL if any(r.violated for r in reports.values()) else EXIT_OK


def cmd_check(args) -> int:
    F = build(args.expr)
    fn = _CHECKS[args.cls]
    kwargs = {"tol": args.tol}
    if args.cls == "H":
        kwargs["mode"] = args.mode
    if args.cls in ("Hstar", "G"):
        kwargs["workers"] = args.threads
    if args.probe:
        vals = _floats(args.probe)
        kwargs["probes"] = [tuple(vals[i : i + 2]) for i in range(0, len(vals) - 1, 2)]
    rep = fn(F, _grid(args.grid), **kwargs)
    _emit(_dump({"command": "check", "expr": F.to_dsl(), "report": rep.to_dict()}), args.out)
    return EXIT_FAIL if rep.violated else EXIT_OK


def _method(args):
    if args.mc_n is None:
        return "quad"
    return MC(n=args.mc_n, seed=args.seed)


def _xs(args):
    if args.x is not None:
        return np.asarray(_floats(args.x))
    if args.grid is not None:
        return GridSpec.parse(args.grid)
    return None


def cmd_dominance(args) -> int:
    kind = args.kind
    exprs = [build(e) for e in args.exprs]
    F = exprs[0]
    theta = _weights(args.theta, "--theta")
    eta = _weights(args.eta, "--eta")
    x = _xs(args)
    tol = args.tol
    if theta is None:
        raise UsageError("--theta is required")
    if kind in ("sd", "truncated") and eta is None:
        raise UsageError(f"{kind} needs --eta")
    if kind != "sdcp" and len(exprs) != 1:
        raise UsageError(f"{kind} takes one distribution expression")
    if kind == "sd":
        v = check_sd(F, theta, eta, x=x, method=_method(args), tol=tol)
    elif kind == "sdstar":
        v = check_sd_star(F, theta, x=x, method=_method(args), tol=tol)
    elif kind == "sdcp":
        comps = exprs if len(exprs) > 1 else exprs * len(theta)
        v = check_sd_cp(comps, theta, x=x, method=MC(n=args.mc_n or 1_000_000, seed=args.seed), tol=tol)
    elif kind == "triggered":
        if args.p is None:
            raise UsageError("triggered needs --p")
        table = tuple(_floats(args.joint)) if args.joint else None
        trig = TriggerModel(len(theta), args.p, args.dependence.upper(), table)
        v = check_sd_triggered(F, trig, theta, eta, x=x, method=_method(args), variant=args.variant, tol=tol)
    elif kind == "truncated":
        if args.c is None:
            raise UsageError("truncated needs --c")
        v = check_sd_truncated(F, args.c, theta, eta, x=x, tol=tol)
    else:
        if args.c is None:
            raise UsageError("tailtype needs --c")
        v = check_tail_type(F, args.c, theta, eta, x=x, part=args.part, tol=tol)
    if args.format == "csv":
        _emit(v.to_csv(), args.out)
    else:
        doc = {"command": "dominance", "kind": kind, "exprs": [e.to_dsl() for e in exprs], **v.to_dict()}
        _emit(_dump(doc), args.out)
    return {
        DominanceRelation.DOMINATES_ON_GRID: EXIT_OK,
        DominanceRelation.VIOLATED: EXIT_FAIL,
        DominanceRelation.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[v.relation]


def cmd_reproduce(args) -> int:
    from .reproduce import TARGETS, load_fixtures, reproduce

    targets = list(TARGETS) if args.target == "all" else [args.target]
    fixtures = load_fixtures()
    results = [reproduce(t, fixtures) for t in targets]
    if args.format == "text":
        lines = []
        for r in results:
            lines.append(f"{r.target}: {'PASS' if r.passed else 'FAIL'}  {r.title}")
            for row in r.rows:
                val = f"{row.actual:.6f}" if isinstance(row.actual, float) else str(row.actual)
                lines.append(f"  {row.name} = {val}  (expected {row.expected}, {row.origin})")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump({"command": "reproduce", "results": [r.to_dict() for r in results]}), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_plotdata(args) -> int:
    F = build(args.expr)
    grid = _grid(args.grid) or GridSpec(1e-3, 1e3, 200)
    x = grid.points()
    t = 1.0 / x
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x", "survival", "cdf", "t", "eta", "Lambda"])
    sf = np.asarray(F.survival(x), dtype=float)
    cdf = np.asarray(F.cdf(x), dtype=float)
    eta = np.asarray(F.eta(t), dtype=float)
    lam = np.asarray(F.lambda_fn(t), dtype=float)
    for row in zip(x, sf, cdf, t, eta, lam):
        wr.writerow([repr(float(v)) for v in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_survival(args) -> int:
    F = build(args.expr)
    x = np.asarray(_floats(args.x))
    doc = {"command": "survival", "expr": F.to_dsl(), "x": x.tolist(), "survival": np.asarray(F.survival(x), dtype=float).tolist()}
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_majorize(args) -> int:
    a, b = WeightVector.parse(args.a), WeightVector.parse(args.b)
    rel = majorizes(a, b)
    doc = {"command": "majorize", "a": list(a.w), "b": list(b.w), "relation": rel.value}
    if args.chain:
        frm, to = (a, b) if rel.value in ("B_MAJ_A", "EQUAL") else (b, a)
        if rel.value == "INCOMPARABLE":
            raise HTDError("NOT_COMPARABLE", "the vectors are not comparable")
        doc["chain"] = [list(v.w) for v in t_transform_chain(frm, to)]
    _emit(_dump(doc), args.out)
    return EXIT_FAIL if rel.value == "INCOMPARABLE" else EXIT_OK


def cmd_canonical(args) -> int:
    _emit(canonical(args.expr) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, grid: bool = True) -> None:
    if grid:
        p.add_argument("--grid", help="evaluation grid lo,hi,n,log|lin")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="violation tolerance (default %(default)g)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for 2-D sweeps")
    p.add_argument("--seed", type=int, default=None, help="base seed (default: HTD_SEED or 0)")
    p.add_argument("--out", help="write output to FILE")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="htd", description="Heavy-tailed distribution classes and diversification dominance checks.")
    ap.add_argument("--version", action="version", version=f"htd {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("classify", help="run all four class certifiers")
    p.add_argument("expr")
    p.add_argument("--grid-2d", dest="grid_2d", help="grid for the two-dimensional sweeps")
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", help="run one certifier")
    p.add_argument("cls", choices=sorted(_CHECKS))
    p.add_argument("expr")
    p.add_argument("--mode", default="CONCAVITY", choices=["CONCAVITY", "DENSITY"])
    p.add_argument("--probe", help="probe pairs as x1,y1,x2,y2,...")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dominance", help="check a stochastic dominance statement")
    p.add_argument("kind", choices=["sd", "sdstar", "sdcp", "triggered", "truncated", "tailtype"])
    p.add_argument("exprs", nargs="+")
    p.add_argument("--theta", help="diversified weights, e.g. 2/5,3/5")
    p.add_argument("--eta", help="more concentrated weights")
    p.add_argument("--x", help="comma-separated evaluation points")
    p.add_argument("--mc-n", dest="mc_n", type=int, default=None, help="use Monte Carlo with N draws")
    p.add_argument("--p", type=float, help="trigger probability")
    p.add_argument("--dependence", default="independent", choices=["independent", "comonotone", "joint"])
    p.add_argument("--joint", help="joint pattern probabilities (2^n values)")
    p.add_argument("--variant", default="sd", choices=["sd", "single"])
    p.add_argument("--c", type=float, help="truncation or tail threshold")
    p.add_argument("--part", default="i", choices=["i", "ii"])
    p.add_argument("--format", default="json", choices=["json", "csv"])
    _common(p)
    p.set_defaults(func=cmd_dominance)

    p = sub.add_parser("reproduce", help="check a named target against stored values")
    p.add_argument("target")
    p.add_argument("--format", default="json", choices=["json", "text"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("plotdata", help="CSV of survival, eta and Lambda curves")
    p.add_argument("expr")
    p.add_argument("--grid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("survival", help="evaluate the survival function")
    p.add_argument("expr")
    p.add_argument("--x", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_survival)

    p = sub.add_parser("majorize", help="compare two weight vectors")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--chain", action="store_true", help="also print a T-transform chain")
    p.add_argument("--out")
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("canonical", help="print the canonical form of an expression")
    p.add_argument("expr")
    p.add_argument("--out")
    p.set_defaults(func=cmd_canonical)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return int(args.func(args))
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except HTDError as exc:
        err = {"code": exc.code, "message": exc.message}
        if isinstance(exc, ParseError):
            err.update(offset=exc.offset, expected=list(exc.expected))
        sys.stderr.write(_dump({"error": err}))
        return EXIT_USAGE
