"""Named reproduction targets checked against stored reference values.

Reference values live in ``data/fixtures.json``.  Every check records an
``origin`` (``published``, ``derived`` or ``exact``), a ``source`` note and
a ``tolerance``; a fixture missing any of them is rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable

import numpy as np

from .compound import CompoundSpec, check_compound_dominance, compound_survival, small_p_expansion_check
from .distributions import make_example, make_frechet, make_logcauchy, make_pareto, make_piecewise_eta
from .dominance import check_h_monotone, check_power_product_inequality, check_sd, h_function, survival_weighted_sum
from .errors import HTDError
from .membership import check_g, check_h, check_hr_order, check_hstar, check_v
from .montecarlo import MC
from .transforms import ConvexMap, convex_map, pow_cdf, sum_iid_closed

ORIGINS = ("published", "derived", "exact")

ETA_1 = ((0, 0), (1, 0.5), (2, 0.5), (4, 1))
ETA_2 = ((0, 0), (1, 0.5), (3, 0.5), (4, 1))
ETA_BETA_BASE = ((0, 0), (1, 0.5), (3, 1))


def load_fixtures() -> dict:
    text = resources.files("htd").joinpath("data/fixtures.json").read_text(encoding="utf-8")
    data = json.loads(text)
    validate_fixtures(data)
    return data


def validate_fixtures(data: dict) -> None:
    for key, fx in data["fixtures"].items():
        for chk in fx["checks"]:
            for field in ("name", "kind", "expected", "tolerance", "origin", "source"):
                if field not in chk:
                    raise HTDError("FIXTURE_PROVENANCE", f"{key}/{chk.get('name', '?')} lacks {field!r}")
            if chk["origin"] not in ORIGINS:
                raise HTDError("FIXTURE_PROVENANCE", f"{key}/{chk['name']} has unknown origin {chk['origin']!r}")


# ---------------------------------------------------------------------------
# Computations
# ---------------------------------------------------------------------------


def _v(report) -> str:
    return report.verdict.value


def _ex3_1():
    e1 = make_piecewise_eta(ETA_1)
    cubic = make_example("EX_V_NOT_H")
    g = check_g(e1)
    return {
        "eta1.V": _v(check_v(e1)),
        "eta1.H": _v(check_h(e1)),
        "eta1.G.witness": g.witness.kind if g.witness else "NONE",
        "cubic.V": _v(check_v(cubic)),
        "cubic.H": _v(check_h(cubic)),
    }


def _ex3_2():
    e2 = make_piecewise_eta(ETA_2)
    return {"eta2.Hstar": _v(check_hstar(e2)), "eta2.V": _v(check_v(e2))}


def _ex3_3():
    lc = make_logcauchy()
    half = pow_cdf(lc, 0.5)
    return {
        "logcauchy.H": _v(check_h(lc)),
        "logcauchy.G": _v(check_g(lc)),
        "powcdf_half.H": _v(check_h(half)),
        "powcdf_half.G": _v(check_g(half)),
    }


def _ex3_4():
    G = make_example("G_MIN")
    r = check_g(G, probes=[(0.4, 0.4)])
    return {"G": _v(r), "lhs": r.witness.lhs, "rhs": r.witness.rhs}


def _ex3_5():
    F = make_example("SQRT_LAMBDA")
    g = lambda x: float(F.survival(1.0 / x)) / x
    return {"g(1)": g(1.0), "g(1.01)": g(1.01), "V": _v(check_v(F)), "G": _v(check_g(F))}


def _ex3_6():
    F, G = make_example("EX_HR_PAIR_F"), make_example("EX_HR_PAIR_G")
    return {"F.H": _v(check_h(F)), "G.H": _v(check_h(G)), "hr": _v(check_hr_order(F, G))}


def _pair_excess(beta: float) -> float:
    F = pow_cdf(make_piecewise_eta(ETA_BETA_BASE), beta)
    return float(F.eta(3.0) - F.eta(1.0) - F.eta(2.0))


def _ex3_7():
    from scipy.optimize import brentq

    base = make_piecewise_eta(ETA_BETA_BASE)
    root = brentq(_pair_excess, 0.5, 0.9, xtol=1e-14)
    return {
        "pair_threshold": root,
        "base.H": _v(check_h(base)),
        "beta_half.Hstar": _v(check_hstar(pow_cdf(base, 0.5))),
    }


def _ex3_8():
    L = sum_iid_closed("LOMAX1")
    P = sum_iid_closed("PARETO1")
    rg = check_g(L, probes=[(0.02, 0.18)])
    rh = check_hstar(P, probes=[(0.1, 0.1)])
    return {
        "lomax.Lambda(0.2)": float(L.lambda_fn(0.2)),
        "lomax.Lambda(0.02)+Lambda(0.18)": float(L.lambda_fn(0.02) + L.lambda_fn(0.18)),
        "lomax.G": _v(rg),
        "pareto.lhs": rh.witness.lhs,
        "pareto.rhs": rh.witness.rhs,
        "pareto.Hstar": _v(rh),
    }


def _ex3_9():
    fr = make_frechet(1)
    shifted = convex_map(fr, ConvexMap.shift(1.0))
    return {"frechet.H": _v(check_h(fr, mode="DENSITY")), "shifted.H": _v(check_h(shifted, mode="DENSITY"))}


def _ex3_10():
    shifted = convex_map(make_piecewise_eta(ETA_2), ConvexMap.shift(1.0))
    r = check_hstar(shifted, probes=[(0.4, 0.4)])
    return {"Hstar": _v(r), "lhs": r.witness.lhs, "rhs": r.witness.rhs}


def _ex3_11():
    out = {}
    for n in (1, 10, 1000):
        F = make_example("FN_FAMILY", n)
        out[f"n={n}.H"] = _v(check_h(F))
        out[f"n={n}.G"] = _v(check_g(F))
    return out


def _ex4_1():
    F = make_example("EX_SD_COUNTER")
    v = check_sd(F, (0.4, 0.6), (0.25, 0.75), x=[1.5])
    return {
        "S_eta(1.5)": float(survival_weighted_sum(F, (0.25, 0.75), 1.5)),
        "S_theta(1.5)": float(survival_weighted_sum(F, (0.4, 0.6), 1.5)),
        "relation": v.relation.value,
        "witness.x": v.witness.x if v.witness else math.nan,
    }


def _lemma_a1():
    return {"inequality": _v(check_power_product_inequality(10_000, seed=0))}


def _app_b():
    F = make_pareto(1)
    a = np.arange(1, 11) * 0.05
    gap = max(abs(h_function(F, 3.0, v) - (1 - survival_weighted_sum(F, (v, 1 - v), 3.0))) for v in a)
    return {"monotone": _v(check_h_monotone(F, 3.0, a)), "consistency_gap": gap}


def _thm5_1():
    p5 = make_pareto(0.5)
    rep = check_compound_dominance(2, p5, "SD", p_list=(0.3,), theta=(0.4, 0.6), eta=(0.2, 0.8), mc=MC(1_000_000, seed=0))
    exp = small_p_expansion_check(2, p5, (0.25, 0.75), 2.0, (0.1, 0.03, 0.01), seed=0)
    return {
        "survival(m=2,p=0.5,x=4)": float(compound_survival(CompoundSpec.binomial(2, 0.5, make_pareto(1)), 4.0)),
        "sufficiency": rep.results[0][1].relation.value,
        "expansion": "PASS" if exp.passed else "FAIL",
    }


TARGETS: dict[str, Callable[[], dict]] = {
    "ex3.1": _ex3_1,
    "ex3.2": _ex3_2,
    "ex3.3": _ex3_3,
    "ex3.4": _ex3_4,
    "ex3.5": _ex3_5,
    "ex3.6": _ex3_6,
    "ex3.7": _ex3_7,
    "ex3.8": _ex3_8,
    "ex3.9": _ex3_9,
    "ex3.10": _ex3_10,
    "ex3.11": _ex3_11,
    "ex4.1": _ex4_1,
    "lemmaA1": _lemma_a1,
    "appB": _app_b,
    "thm5.1": _thm5_1,
}


@dataclass(frozen=True)
class CheckRow:
    name: str
    expected: object
    actual: object
    tolerance: float
    origin: str
    source: str
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "actual": self.actual, "tolerance": self.tolerance,
                "origin": self.origin, "source": self.source, "passed": self.passed}


@dataclass(frozen=True)
class Reproduction:
    target: str
    title: str
    rows: tuple[CheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {"target": self.target, "title": self.title, "passed": self.passed, "checks": [r.to_dict() for r in self.rows]}


def _compare(kind: str, expected, actual, tol: float) -> bool:
    if kind == "value":
        return actual is not None and abs(float(actual) - float(expected)) <= tol
    if kind == "max":
        return float(actual) <= float(expected) + tol
    return actual == expected


def reproduce(target: str, fixtures: dict | None = None) -> Reproduction:
    """Run one target and compare with its stored values."""
    if target not in TARGETS:
        raise HTDError("UNKNOWN_NAME", f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    fixtures = fixtures or load_fixtures()
    fx = fixtures["fixtures"][target]
    actual = TARGETS[target]()
    rows = []
    for chk in fx["checks"]:
        got = actual.get(chk["name"])
        ok = _compare(chk["kind"], chk["expected"], got, float(chk["tolerance"]))
        if isinstance(got, (np.floating, np.integer)):
            got = got.item()
        rows.append(CheckRow(chk["name"], chk["expected"], got, float(chk["tolerance"]), chk["origin"], chk["source"], ok))
    return Reproduction(target, fx["title"], tuple(rows))


def reproduce_all() -> list[Reproduction]:
    fixtures = load_fixtures()
    return [reproduce(t, fixtures) for t in TARGETS]
