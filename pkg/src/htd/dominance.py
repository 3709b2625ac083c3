"""Survival of weighted sums and first-order dominance checks between portfolios.

Two evaluation routes are available:

``"quad"``
    Exact up to quadrature error, for two nonzero weights.  With
    ``S(x) = P(t1 X1 + t2 X2 > x)`` we integrate over the survival level of
    ``X2``::

        S(x) = ∫_0^1 survival_1((x - t2 * isf_2(s)) / t1) ds

    which needs no density and handles atoms exactly.  The interval is split
    wherever the integrand has a kink or a jump.
:class:`~htd.montecarlo.MC`
    Seeded Monte Carlo.  Component ``i`` in batch ``k`` always uses the
    stream ``(seed, i, k)``, so statistics that compare the same components
    under different weights share their random numbers.

A check compares ``lhs <=_st rhs`` pointwise: ``margin = S_rhs - S_lhs``.
A point is significant when ``|margin| > tol + 3 se``.  The verdict is
``VIOLATED`` if any margin is significantly negative, ``DOMINATES_ON_GRID``
if some margin is significantly positive (or all margins are exactly within
``tol``), and ``INCONCLUSIVE`` otherwise.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .distributions import Distribution
from .errors import HTDError
from .majorization import WeightVector, is_majorized_by
from .membership import CheckReport, GridSpec, Verdict, Witness, check_h, check_hstar, check_v
from .montecarlo import MC, MCEstimate, component_draws, paired_difference, stream, survival_counts
from .quadrature import integrate
from .transforms import ConditionExceed, Mixture, TruncateUpper

DEFAULT_TOL = 1e-9
QUAD_RTOL = 1e-10
N_GRID = 40


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------


def _weights(theta) -> np.ndarray:
    w = theta.array() if isinstance(theta, WeightVector) else np.asarray(theta, dtype=float).ravel()
    if w.size == 0 or np.any(~np.isfinite(w)) or np.any(w < 0):
        raise HTDError("BAD_WEIGHTS", f"weights must be finite and nonnegative, got {w}")
    return w


def _components(F, n: int) -> list[Distribution]:
    if isinstance(F, Distribution):
        return [F] * n
    comps = list(F)
    if len(comps) != n:
        raise HTDError("LENGTH_MISMATCH", f"{len(comps)} components for {n} weights")
    return comps


def _is_mc(method) -> bool:
    return isinstance(method, MC)


def _method_name(method) -> str:
    return "MC" if _is_mc(method) else "QUAD"


def _resolve_method(method):
    if method is None or (isinstance(method, str) and method.lower() == "quad"):
        return "quad"
    if isinstance(method, str) and method.lower() == "mc":
        return MC()
    if _is_mc(method):
        return method
    raise HTDError("PARAM_OUT_OF_RANGE", f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Survival of a weighted sum
# ---------------------------------------------------------------------------


def _pair_survival(F1: Distribution, F2: Distribution, t1: float, t2: float, x: float, rtol: float) -> float:
    """``P(t1 X1 + t2 X2 > x)`` by quadrature over the survival level of ``X2``."""
    lo = t1 * F1.lower + t2 * F2.lower
    if x < lo:
        return 1.0
    hi = t1 * F1.upper + t2 * F2.upper
    if x >= hi:
        return 0.0
    cuts = []
    for b in F1.breakpoints():
        if np.isfinite(b):
            cuts.append(float(F2.survival((x - t1 * b) / t2)))
    for b in F2.breakpoints():
        if np.isfinite(b):
            cuts.append(float(F2.survival(b)))
    for a, m in F2.atoms():
        sa = float(F2.survival(a))
        cuts.extend((sa, sa + m))
    cuts.append(float(F2.survival(x / t2)))

    def f(s):
        return np.asarray(F1.survival((x - t2 * np.asarray(F2.isf(s))) / t1))

    return float(integrate(f, 0.0, 1.0, breakpoints=cuts, rtol=rtol).value)


def survival_weighted_sum(F_list, theta, x, method="quad", *, rtol: float = QUAD_RTOL):
    """``P(sum_i theta_i X_i > x)`` for independent ``X_i``.

    ``F_list`` is one distribution (iid components) or one per weight.
    Returns a float (or array) for ``"quad"`` and an :class:`MCEstimate`
    (or list of them) for :class:`MC`.
    """
    w = _weights(theta)
    comps = _components(F_list, w.size)
    method = _resolve_method(method)
    live = [(wi, c) for wi, c in zip(w, comps) if wi > 0]
    if not live:
        raise HTDError("ZERO_WEIGHTS", "all weights are zero")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.ndim(x) == 0

    if _is_mc(method):
        counts = survival_counts(lambda b, size: _sum_draws(live, method.seed, b, size, [i for i, wi in enumerate(w) if wi > 0]), xs, method)
        ests = [MCEstimate.from_indicators(int(c), method.n, method.seed) for c in counts]
        return ests[0] if scalar else ests

    if len(live) == 1:
        (t1, F1), = live
        out = np.asarray(F1.survival(xs / t1), dtype=float)
    elif len(live) == 2:
        (t1, F1), (t2, F2) = live
        out = np.array([_pair_survival(F1, F2, t1, t2, float(xi), rtol) for xi in xs])
    else:
        raise HTDError("UNSUPPORTED_QUAD", "quadrature handles at most two nonzero weights; use MC")
    return float(out[0]) if scalar else out


def _sum_draws(live, seed: int, batch: int, size: int, index: list[int]) -> np.ndarray:
    total = np.zeros(size)
    for (wi, comp), i in zip(live, index):
        total += wi * component_draws(comp, seed, i, batch, size)
    return total


def weighted_sum_quantile(F_list, theta, u, method="quad") -> float:
    """Left-continuous quantile of ``sum_i theta_i X_i`` at level ``u``."""
    if not 0.0 < u < 1.0:
        raise HTDError("PARAM_OUT_OF_RANGE", "u must lie in (0, 1)")
    method = _resolve_method(method)
    w = _weights(theta)
    comps = _components(F_list, w.size)
    if _is_mc(method):
        live = [(wi, c) for wi, c in zip(w, comps) if wi > 0]
        idx = [i for i, wi in enumerate(w) if wi > 0]
        draws = np.concatenate([_sum_draws(live, method.seed, b, s, idx) for b, s in method.batches()])
        return float(np.quantile(draws, u, method="inverted_cdf"))
    target = 1.0 - u
    lo = float(sum(wi * c.lower for wi, c in zip(w, comps) if wi > 0))
    lo = lo if np.isfinite(lo) else -1.0
    hi = max(abs(lo), 1.0) * 2.0
    sf = lambda v: survival_weighted_sum(comps, w, v) - target
    while sf(hi) > 0:
        hi *= 2.0
        if hi > 1e300:
            raise HTDError("RANGE", "quantile is not finite")
    if sf(lo) <= 0:
        return lo
    return float(brentq(sf, lo, hi, xtol=1e-12, rtol=1e-12))


def _u_levels(n: int) -> np.ndarray:
    return 1.0 - np.geomspace(0.5, 1e-4, n)


def quantile_grid(dist: Distribution, n: int = N_GRID) -> np.ndarray:
    """Quantile images of ``u`` from 0.5 to 0.9999, log-spaced in ``1 - u``."""
    return np.unique(np.asarray(dist.quantile(_u_levels(n)), dtype=float))


def _sample_grid(draws: np.ndarray, n: int) -> np.ndarray:
    draws = np.asarray(draws)
    pos = draws[draws > draws.min()]
    if pos.size < 10:
        pos = draws
    return np.unique(np.quantile(pos, _u_levels(n)))


def _sum_quantile_grid(comps, w, n: int, method) -> np.ndarray:
    live = [(wi, c) for wi, c in zip(w, comps) if wi > 0]
    if len(live) == 1:
        (t, c), = live
        return t * quantile_grid(c, n)
    if len(live) == 2 and not _is_mc(method):
        return np.unique([weighted_sum_quantile(comps, w, u) for u in _u_levels(n)])
    draws = _sum_draws(live, 2**31 - 1, 0, 100_000, list(range(len(live))))
    return _sample_grid(draws, n)


def _kink_points(comps, weight_vectors, max_points: int = 256) -> np.ndarray:
    """Points ``sum w_i b_i`` built from component breakpoints.

    Survival curves of weighted sums of piecewise laws change slope there,
    so crossings of two such curves tend to sit on or near these points.
    """
    out = []
    for w in weight_vectors:
        live = [(wi, c) for wi, c in zip(w, comps) if wi > 0]
        bps = [[b for b in c.breakpoints() if np.isfinite(b)] for _, c in live]
        if not all(bps) or np.prod([len(b) for b in bps]) > max_points:
            continue
        floor = sum(wi * c.lower for wi, c in live)
        for combo in itertools.product(*bps):
            v = sum(wi * b for (wi, _), b in zip(live, combo))
            if v > floor:
                out.append(v)
    return np.unique(np.asarray(out, dtype=float))


def _x_points(x, fallback) -> np.ndarray:
    if x is None:
        return np.asarray(fallback(), dtype=float)
    if isinstance(x, GridSpec):
        return x.points()
    return np.atleast_1d(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


class DominanceRelation(str, Enum):
    DOMINATES_ON_GRID = "DOMINATES_ON_GRID"
    VIOLATED = "VIOLATED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class DominanceRow:
    x: float
    s_lhs: float | None
    s_rhs: float | None
    margin: float | None
    method: str
    se: float = 0.0
    region: str = "IN"

    def to_dict(self) -> dict:
        return {"x": self.x, "S_lhs": self.s_lhs, "S_rhs": self.s_rhs, "margin": self.margin,
                "method": self.method, "se": self.se, "region": self.region}


@dataclass(frozen=True)
class DominanceVerdict:
    """Pointwise comparison of ``S_lhs`` and ``S_rhs``; dominance means ``S_lhs <= S_rhs``."""

    relation: DominanceRelation
    rows: tuple[DominanceRow, ...]
    witness: DominanceRow | None
    tol: float
    lhs: str = ""
    rhs: str = ""
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def margins(self) -> np.ndarray:
        return np.array([r.margin for r in self.rows if r.region == "IN"], dtype=float)

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.rows if r.region == "IN"], dtype=float)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tolerance": self.tol,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "rows": [r.to_dict() for r in self.rows],
            "notes": list(self.notes),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "S_lhs", "S_rhs", "margin", "method", "se"])
        for r in self.rows:
            if r.region != "IN":
                continue
            wr.writerow([repr(r.x), repr(r.s_lhs), repr(r.s_rhs), repr(r.margin), r.method, repr(r.se)])
        return buf.getvalue()


def _decide(rows: Sequence[DominanceRow], tol: float, lhs: str, rhs: str, notes=()) -> DominanceVerdict:
    inside = [r for r in rows if r.region == "IN"]
    if not inside:
        raise HTDError("REGION_EMPTY", "no evaluation point lies in the admissible region")
    m = np.array([r.margin for r in inside])
    se = np.array([r.se for r in inside])
    thr = tol + 3.0 * se
    neg = m < -thr
    pos = m > thr
    if np.any(neg):
        i = int(np.argmin(np.where(neg, m, np.inf)))
        return DominanceVerdict(DominanceRelation.VIOLATED, tuple(rows), inside[i], tol, lhs, rhs, tuple(notes))
    if np.any(pos) or np.all((np.abs(m) <= tol) & (se == 0)):
        return DominanceVerdict(DominanceRelation.DOMINATES_ON_GRID, tuple(rows), None, tol, lhs, rhs, tuple(notes))
    return DominanceVerdict(DominanceRelation.INCONCLUSIVE, tuple(rows), None, tol, lhs, rhs, tuple(notes))


def _rows(xs, s_lhs, s_rhs, method: str, se=None) -> list[DominanceRow]:
    se = np.zeros(len(xs)) if se is None else np.asarray(se, dtype=float)
    return [
        DominanceRow(float(x), float(a), float(b), float(b - a), method, float(e))
        for x, a, b, e in zip(xs, s_lhs, s_rhs, se)
    ]


def _label(w) -> str:
    return "(" + ", ".join(f"{v:g}" for v in w) + ")"


# ---------------------------------------------------------------------------
# (SD), (SD*) and the concentrated portfolio
# ---------------------------------------------------------------------------


def check_sd(F, theta, eta, x=None, method="quad", *, tol: float = DEFAULT_TOL, n_grid: int = N_GRID) -> DominanceVerdict:
    """Check ``sum eta_i X_i <=_st sum theta_i X_i`` for ``theta ⪯ eta``."""
    th, et = _weights(theta), _weights(eta)
    if th.size != et.size:
        raise HTDError("LENGTH_MISMATCH", "theta and eta differ in length")
    if not is_majorized_by(th, et):
        raise HTDError("NOT_COMPARABLE", f"theta={th.tolist()} is not majorized by eta={et.tolist()}")
    comps = _components(F, th.size)
    method = _resolve_method(method)
    xs = _x_points(
        x, lambda: np.union1d(_sum_quantile_grid(comps, et, n_grid, method), _kink_points(comps, (th, et)))
    )
    lhs, rhs = f"sum eta_i X_i, eta={_label(et)}", f"sum theta_i X_i, theta={_label(th)}"
    if _is_mc(method):
        def sampler(b, size):
            draws = [component_draws(c, method.seed, i, b, size) for i, c in enumerate(comps)]
            return np.stack([sum(e * d for e, d in zip(et, draws)), sum(t * d for t, d in zip(th, draws))], axis=1)

        pa, pb, _, se = paired_difference(sampler, xs, method)
        return _decide(_rows(xs, pa, pb, "MC", se), tol, lhs, rhs, (f"n={method.n}", f"seed={method.seed}"))
    s_l = survival_weighted_sum(comps, et, xs)
    s_r = survival_weighted_sum(comps, th, xs)
    return _decide(_rows(xs, s_l, s_r, "QUAD"), tol, lhs, rhs)


def check_sd_star(F, theta, x=None, method="quad", *, tol: float = DEFAULT_TOL, n_grid: int = N_GRID) -> DominanceVerdict:
    """Check ``(sum theta_i) X_1 <=_st sum theta_i X_i``."""
    th = _weights(theta)
    comps = _components(F, th.size)
    total = float(th.sum())
    if total <= 0:
        raise HTDError("ZERO_WEIGHTS", "all weights are zero")
    method = _resolve_method(method)
    xs = _x_points(x, lambda: total * quantile_grid(comps[0], n_grid))
    s_l = np.asarray(comps[0].survival(xs / total), dtype=float)
    lhs, rhs = f"{total:g} X_1", f"sum theta_i X_i, theta={_label(th)}"
    if _is_mc(method):
        ests = survival_weighted_sum(comps, th, xs, method)
        s_r = np.array([e.value for e in ests])
        se = np.array([e.std_error for e in ests])
        return _decide(_rows(xs, s_l, s_r, "MC", se), tol, lhs, rhs, (f"n={method.n}", f"seed={method.seed}"))
    s_r = survival_weighted_sum(comps, th, xs)
    return _decide(_rows(xs, s_l, s_r, "QUAD"), tol, lhs, rhs)


def check_sd_cp(
    F_list,
    theta,
    x=None,
    method: MC | None = None,
    *,
    tol: float = DEFAULT_TOL,
    n_grid: int = N_GRID,
    check_members: bool = True,
) -> DominanceVerdict:
    """Check that the concentrated portfolio ``sum I_i X_i`` is dominated by ``sum theta_i X_i``.

    The index ``J`` with ``P(J = i) = theta_i`` is drawn from its own stream
    and the concentrated loss reuses the component draw ``X_J``, so both
    sides share random numbers.
    """
    th = _weights(theta)
    if abs(th.sum() - 1.0) > 1e-12:
        raise HTDError("BAD_WEIGHTS", f"weights must sum to 1, got {th.sum()!r}")
    comps = _components(F_list, th.size)
    method = method if _is_mc(method) else MC()
    notes = [f"n={method.n}", f"seed={method.seed}"]
    if check_members:
        for i, c in enumerate(comps):
            if check_v(c).violated:
                notes.append(f"warning: component {i} ({c.to_dsl()}) shows a V violation")
    conc = Mixture(tuple(th), tuple(comps))
    xs = _x_points(x, lambda: quantile_grid(conc, n_grid))
    cum = np.cumsum(th)
    n = th.size

    def sampler(b, size):
        draws = np.stack([component_draws(c, method.seed, i, b, size) for i, c in enumerate(comps)], axis=1)
        j = np.minimum(np.searchsorted(cum, stream(method.seed, n, b).random(size), side="right"), n - 1)
        concentrated = draws[np.arange(size), j]
        return np.stack([concentrated, draws @ th], axis=1)

    pa, pb, _, se = paired_difference(sampler, xs, method)
    return _decide(_rows(xs, pa, pb, "MC", se), tol, "sum I_i X_i", f"sum theta_i X_i, theta={_label(th)}", notes)


# ---------------------------------------------------------------------------
# Triggered losses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriggerModel:
    """Triggering events ``A_1..A_n`` with common probability ``p``.

    ``dependence`` is ``INDEPENDENT``, ``COMONOTONE`` (all events equal) or
    ``JOINT`` with ``table[k]`` the probability of the pattern whose bit
    ``i`` says whether ``A_i`` occurs.
    """

    n: int
    p: float
    dependence: str = "INDEPENDENT"
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        dep = self.dependence.upper()
        object.__setattr__(self, "dependence", dep)
        if int(self.n) < 1:
            raise HTDError("PARAM_OUT_OF_RANGE", "need at least one event")
        if not 0.0 <= float(self.p) <= 1.0:
            raise HTDError("PARAM_OUT_OF_RANGE", "p must lie in [0, 1]")
        if dep not in ("INDEPENDENT", "COMONOTONE", "JOINT"):
            raise HTDError("PARAM_OUT_OF_RANGE", f"unknown dependence {self.dependence!r}")
        if dep == "JOINT":
            t = np.asarray(self.table, dtype=float)
            if t.shape != (2**self.n,):
                raise HTDError("BAD_JOINT", f"need {2 ** self.n} probabilities")
            if np.any(t < -1e-15) or abs(t.sum() - 1.0) > 1e-12:
                raise HTDError("BAD_JOINT", "pattern probabilities must be nonnegative and sum to 1")
            bits = (np.arange(2**self.n)[:, None] >> np.arange(self.n)[None, :]) & 1
            marg = t @ bits
            if np.any(np.abs(marg - self.p) > 1e-12):
                raise HTDError("BAD_JOINT", f"marginals {marg.tolist()} differ from p={self.p}")
            object.__setattr__(self, "table", tuple(float(v) for v in t))

    def pattern_probs(self) -> np.ndarray:
        n, p = self.n, float(self.p)
        k = np.arange(2**n)
        bits = (k[:, None] >> np.arange(n)[None, :]) & 1
        if self.dependence == "INDEPENDENT":
            return np.prod(np.where(bits == 1, p, 1.0 - p), axis=1)
        if self.dependence == "COMONOTONE":
            out = np.zeros(2**n)
            out[0] += 1.0 - p
            out[-1] += p
            return out
        return np.asarray(self.table)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Boolean array ``(size, n)`` of event indicators."""
        probs = self.pattern_probs()
        k = np.minimum(np.searchsorted(np.cumsum(probs), rng.random(size), side="right"), probs.size - 1)
        return ((k[:, None] >> np.arange(self.n)[None, :]) & 1).astype(bool)


def triggered_survival(F, trigger: TriggerModel, theta, x, method="quad"):
    """``P(sum theta_i 1{A_i} X_i > x)``: exact decomposition for ``n = 2``, MC otherwise."""
    th = _weights(theta)
    if th.size != trigger.n:
        raise HTDError("LENGTH_MISMATCH", "weights and trigger model differ in size")
    comps = _components(F, th.size)
    method = _resolve_method(method)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.ndim(x) == 0
    if not _is_mc(method) and trigger.n <= 2:
        probs = trigger.pattern_probs()
        out = np.where(xs < 0, 1.0, 0.0) * probs[0]
        for k in range(1, probs.size):
            if probs[k] == 0:
                continue
            mask = [(k >> i) & 1 for i in range(trigger.n)]
            w = th * np.array(mask)
            if w.sum() == 0:
                out = out + probs[k] * (xs < 0)
                continue
            out = out + probs[k] * survival_weighted_sum(comps, w, xs)
        return float(out[0]) if scalar else out
    if not _is_mc(method):
        raise HTDError("UNSUPPORTED_QUAD", "the exact route covers n <= 2; use MC")

    def sampler(b, size):
        draws = np.stack([component_draws(c, method.seed, i, b, size) for i, c in enumerate(comps)], axis=1)
        on = trigger.sample(stream(method.seed, trigger.n, b), size)
        return (draws * on) @ th

    counts = survival_counts(sampler, xs, method)
    ests = [MCEstimate.from_indicators(int(c), method.n, method.seed) for c in counts]
    return ests[0] if scalar else ests


def check_sd_triggered(
    F,
    trigger: TriggerModel,
    theta,
    eta=None,
    x=None,
    method="quad",
    *,
    variant: str = "sd",
    tol: float = DEFAULT_TOL,
    n_grid: int = N_GRID,
) -> DominanceVerdict:
    """Triggered-loss dominance.

    ``variant="sd"``: ``sum eta_i 1{A_i} X_i <=_st sum theta_i 1{A_i} X_i`` for
    ``theta ⪯ eta``.  ``variant="single"``: ``1{A_1} X_1 <=_st sum theta_i 1{A_i} X_i``.
    """
    th = _weights(theta)
    comps = _components(F, th.size)
    method = _resolve_method(method)
    variant = variant.lower()
    notes = []
    if variant == "sd":
        if eta is None:
            raise HTDError("PARAM_OUT_OF_RANGE", "variant 'sd' needs eta")
        et = _weights(eta)
        if not is_majorized_by(th, et):
            raise HTDError("NOT_COMPARABLE", f"theta={th.tolist()} is not majorized by eta={et.tolist()}")
        if check_h(comps[0]).violated:
            notes.append("warning: the loss law shows an H violation")
    elif variant == "single":
        et = np.zeros(th.size)
        et[0] = 1.0
        if check_hstar(comps[0]).violated:
            notes.append("warning: the loss law shows an H* violation")
    else:
        raise HTDError("PARAM_OUT_OF_RANGE", f"unknown variant {variant!r}")
    base = comps[0]
    xs = _x_points(x, lambda: _sum_quantile_grid(comps, et, n_grid, "quad" if th.size <= 2 else MC()))
    lhs = "1{A_1} X_1" if variant == "single" else f"sum eta_i 1{{A_i}} X_i, eta={_label(et)}"
    rhs = f"sum theta_i 1{{A_i}} X_i, theta={_label(th)}"
    if _is_mc(method):
        def sampler(b, size):
            draws = np.stack([component_draws(c, method.seed, i, b, size) for i, c in enumerate(comps)], axis=1)
            on = trigger.sample(stream(method.seed, trigger.n, b), size)
            z = draws * on
            return np.stack([z @ et, z @ th], axis=1)

        pa, pb, _, se = paired_difference(sampler, xs, method)
        notes += [f"n={method.n}", f"seed={method.seed}"]
        return _decide(_rows(xs, pa, pb, "MC", se), tol, lhs, rhs, notes)
    if variant == "single":
        s_l = trigger.p * np.asarray(base.survival(xs), dtype=float)
    else:
        s_l = triggered_survival(comps, trigger, et, xs)
    s_r = triggered_survival(comps, trigger, th, xs)
    return _decide(_rows(xs, s_l, s_r, "QUAD"), tol, lhs, rhs, notes)


# ---------------------------------------------------------------------------
# Truncated losses and H-type tails
# ---------------------------------------------------------------------------


def check_sd_truncated(F, c: float, theta, eta, x=None, *, tol: float = DEFAULT_TOL, n_grid: int = 20) -> DominanceVerdict:
    """Dominance of truncated sums ``sum w_i min(X_i, c)`` on ``[0, c/b)`` with ``b = 1/min(eta)``.

    Points outside the region are kept as ``OUT_OF_REGION`` rows without a
    comparison.  Each row's note records the largest gap between truncated
    and untruncated survivals over the region.
    """
    th, et = _weights(theta), _weights(eta)
    if not is_majorized_by(th, et):
        raise HTDError("NOT_COMPARABLE", f"theta={th.tolist()} is not majorized by eta={et.tolist()}")
    if et.min() <= 0:
        raise HTDError("REGION_EMPTY", "the smallest eta weight must be positive")
    c = float(c)
    b = 1.0 / et.min()
    if c <= b:
        raise HTDError("REGION_EMPTY", f"c={c} does not exceed b={b}")
    edge = c / b
    xs = _x_points(x, lambda: np.linspace(0.0, edge, n_grid, endpoint=False))
    base = _components(F, th.size)
    trunc = [TruncateUpper(d, c) for d in base]
    inside = (xs >= 0) & (xs < edge)
    xi = xs[inside]
    s_l = survival_weighted_sum(trunc, et, xi)
    s_r = survival_weighted_sum(trunc, th, xi)
    gap = max(
        float(np.max(np.abs(s_l - survival_weighted_sum(base, et, xi)))),
        float(np.max(np.abs(s_r - survival_weighted_sum(base, th, xi)))),
    )
    rows_in = iter(_rows(xi, s_l, s_r, "QUAD"))
    rows = [next(rows_in) if ok else DominanceRow(float(v), None, None, None, "QUAD", 0.0, "OUT_OF_REGION")
            for v, ok in zip(xs, inside)]
    return _decide(rows, tol, f"sum eta_i min(X_i, {c:g})", f"sum theta_i min(X_i, {c:g})",
                   (f"region=[0, {edge:g})", f"truncation_gap={gap:.3e}"))


def tail_decomposition(G: Distribution, c: float, theta, x: float, *, rtol: float = QUAD_RTOL) -> tuple[float, float]:
    """``(S1, S2)`` with ``S1`` the part where one summand is at most ``c`` and
    ``S2`` the part where both exceed ``c``; valid for ``x >= c`` and ``n = 2``."""
    t1, t2 = _weights(theta)
    x, c = float(x), float(c)
    if x < c:
        raise HTDError("OUT_OF_REGION", f"x={x} lies below c={c}")
    s_c = float(G.survival(c))

    def part(wa, wb):
        # P(wa Y_a + wb Y_b > x, Y_b <= c) over the survival level of Y_b
        if wa == 0:
            return 0.0
        f = lambda s: np.asarray(G.survival((x - wb * np.asarray(G.isf(s))) / wa))
        cuts = [float(G.survival(v)) for v in G.breakpoints() if np.isfinite(v)]
        return float(integrate(f, s_c, 1.0, breakpoints=cuts, rtol=rtol).value)

    s1 = part(t1, t2) + part(t2, t1)
    s2 = 0.0
    if s_c > 0:
        star = ConditionExceed(G, c)
        s2 = s_c**2 * survival_weighted_sum(star, (t1, t2), x, rtol=rtol)
    return s1, s2


def check_tail_type(
    G: Distribution,
    c: float,
    theta,
    eta=None,
    x=None,
    *,
    part: str = "i",
    tol: float = DEFAULT_TOL,
    n_grid: int = N_GRID,
) -> DominanceVerdict:
    """Two-summand dominance for a law whose tail beyond ``c`` is of H (or H*) type.

    Part ``"i"`` compares ``eta`` against ``theta``; part ``"ii"`` compares a
    single ``Y_1`` against ``theta_1 Y_1 + theta_2 Y_2``.  Only ``x >= c`` is
    compared.
    """
    th = _weights(theta)
    if th.size != 2:
        raise HTDError("N_UNSUPPORTED", "the tail-type comparison is available for two summands only")
    part = part.lower()
    c = float(c)
    notes = []
    tail_grid = GridSpec(1e-6, 1.0 / c, 512)
    if part == "i":
        if eta is None:
            raise HTDError("PARAM_OUT_OF_RANGE", "part (i) needs eta")
        et = _weights(eta)
        if et.size != 2:
            raise HTDError("N_UNSUPPORTED", "the tail-type comparison is available for two summands only")
        if not is_majorized_by(th, et):
            raise HTDError("NOT_COMPARABLE", f"theta={th.tolist()} is not majorized by eta={et.tolist()}")
        tail_check = check_h(G, tail_grid)
    elif part == "ii":
        et = None
        tail_check = check_hstar(G, GridSpec(1e-6, 0.5 / c, 128))
    else:
        raise HTDError("PARAM_OUT_OF_RANGE", f"unknown part {part!r}")
    if tail_check.violated:
        notes.append(f"warning: tail beyond c shows a {tail_check.cls} violation")
    xs = _x_points(x, lambda: c * np.geomspace(1.0, 1e4, n_grid))
    inside = xs >= c
    xi = xs[inside]
    s_r = np.array([sum(tail_decomposition(G, c, th, v)) for v in xi])
    if part == "i":
        s_l = np.array([sum(tail_decomposition(G, c, et, v)) for v in xi])
        lhs = f"eta_1 Y_1 + eta_2 Y_2, eta={_label(et)}"
    else:
        s_l = np.asarray(G.survival(xi), dtype=float)
        lhs = "Y_1"
    rows_in = iter(_rows(xi, s_l, s_r, "QUAD"))
    rows = [next(rows_in) if ok else DominanceRow(float(v), None, None, None, "QUAD", 0.0, "OUT_OF_REGION")
            for v, ok in zip(xs, inside)]
    return _decide(rows, tol, lhs, f"theta_1 Y_1 + theta_2 Y_2, theta={_label(th)}", notes)


# ---------------------------------------------------------------------------
# Value-at-Risk
# ---------------------------------------------------------------------------


def var_quantile(F: Distribution, alpha: float) -> float:
    """``VaR_alpha(X) = F^{-1}(alpha)``; ``alpha = 0`` gives the lower support bound."""
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise HTDError("PARAM_OUT_OF_RANGE", "alpha must lie in [0, 1)")
    return float(F.quantile(alpha))


@dataclass(frozen=True)
class VarRow:
    alpha: float
    var_sum: float
    sum_var: float
    gap: float
    sign: str

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "var_sum": self.var_sum, "sum_var": self.sum_var, "gap": self.gap, "sign": self.sign}


def var_additivity_probe(F_list, theta, alphas, method="quad", *, comonotone: bool = False) -> list[VarRow]:
    """EXPERIMENTAL: compare ``VaR_alpha(sum theta_i X_i)`` with ``sum theta_i VaR_alpha(X_i)``.

    The sign of the gap is reported as data; no general claim is made.
    With ``comonotone=True`` every summand is driven by the same uniform,
    so the sum is a nondecreasing function of it and quantiles add exactly.
    """
    th = _weights(theta)
    comps = _components(F_list, th.size)
    method = _resolve_method(method)
    out = []
    for a in alphas:
        a = float(a)
        sum_var = float(sum(t * var_quantile(c, a) for t, c in zip(th, comps)))
        if comonotone:
            var_sum = float(sum(t * float(c.quantile(a)) for t, c in zip(th, comps)))
        else:
            var_sum = weighted_sum_quantile(comps, th, a, method)
        gap = var_sum - sum_var
        sign = "superadditive" if gap > 0 else ("subadditive" if gap < 0 else "additive")
        out.append(VarRow(a, var_sum, sum_var, gap, sign))
    return out


# ---------------------------------------------------------------------------
# Checks of auxiliary inequalities
# ---------------------------------------------------------------------------


def h_function(F: Distribution, x: float, a: float, *, rtol: float = QUAD_RTOL) -> float:
    """``H(a) = ∫_0^{x/a} F((x - a t)/(1 - a)) f(t) dt`` by quadrature in ``t``."""
    if not F.has_density:
        raise HTDError("NO_DENSITY", f"{F.to_dsl()} has no density")
    if not 0.0 < a < 1.0:
        raise HTDError("PARAM_OUT_OF_RANGE", "a must lie in (0, 1)")
    lo = max(F.lower, 0.0)
    hi = x / a
    if hi <= lo:
        return 0.0
    cuts = [b for b in F.breakpoints() if lo < b < hi]
    cuts += [(x - (1 - a) * b) / a for b in F.breakpoints() if np.isfinite(b)]
    f = lambda t: np.asarray(F.cdf((x - a * t) / (1.0 - a))) * np.asarray(F.density(t))
    return float(integrate(f, lo, hi, breakpoints=cuts, rtol=rtol).value)


def check_h_monotone(F: Distribution, x: float, a_grid: Sequence[float], *, tol: float = DEFAULT_TOL) -> CheckReport:
    """Check that ``H(a)`` does not increase along ``a_grid`` (sorted ascending)."""
    a = np.sort(np.asarray(a_grid, dtype=float))
    if np.any(a <= 0) or np.any(a > 0.5):
        raise HTDError("PARAM_OUT_OF_RANGE", "a values must lie in (0, 1/2]")
    h = np.array([h_function(F, x, v) for v in a])
    exc = h[1:] - h[:-1]
    worst = float(np.max(exc)) if exc.size else -np.inf
    notes = tuple(f"H({v:g})={hv:.12g}" for v, hv in zip(a, h))
    if exc.size and worst > tol:
        i = int(np.argmax(exc))
        w = Witness("PAIR", float(a[i]), float(a[i + 1]), lhs=float(h[i + 1]), rhs=float(h[i]), margin=worst,
                    relation="H(a2) <= H(a1)")
        return CheckReport("H_monotone", Verdict.VIOLATED, w, None, tol, worst, notes)
    return CheckReport("H_monotone", Verdict.NO_VIOLATION_ON_GRID, None, None, tol, worst, notes)


def check_power_product_inequality(n: int = 10_000, seed: int = 0, *, tol: float = 1e-12) -> CheckReport:
    """``(1 - x y)^b <= (1-x)^b + (1-y)^b - (1-x)^b (1-y)^b`` on random ``(x, y, b)`` in ``(0, 1)^3``."""
    rng = stream(seed, 0xA1)
    x, y, b = rng.random((3, n))
    lhs = (1 - x * y) ** b
    u, v = (1 - x) ** b, (1 - y) ** b
    rhs = u + v - u * v
    exc = lhs - rhs
    worst = float(np.max(exc))
    if worst > tol:
        i = int(np.argmax(exc))
        w = Witness("TRIPLE", float(x[i]), float(y[i]), float(b[i]), lhs=float(lhs[i]), rhs=float(rhs[i]),
                    margin=worst, relation="(1-xy)^b <= (1-x)^b + (1-y)^b - (1-x)^b (1-y)^b")
        return CheckReport("power_product", Verdict.VIOLATED, w, None, tol, worst, (f"n={n}",))
    return CheckReport("power_product", Verdict.NO_VIOLATION_ON_GRID, None, None, tol, worst, (f"n={n}",))
