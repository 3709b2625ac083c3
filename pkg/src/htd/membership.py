"""Grid certifiers for the classes V, H, H*, G and related orders.

Every check works in the inverse domain ``t = 1/x`` where the classes are
defined: ``eta(t) = survival(1/t)`` and ``Lambda(t) = -log cdf(1/t)``.

* V:  ``eta(t)/t`` is nonincreasing (equivalently ``x * survival(x)`` increases)
* H:  ``eta`` is concave (equivalently ``x**2 * density(x)`` increases)
* H*: ``eta`` is subadditive
* G:  ``Lambda`` is subadditive

A certifier either returns ``VIOLATED`` with a witness whose excess
``lhs - rhs`` exceeds the tolerance, or ``NO_VIOLATION_ON_GRID`` with the
largest excess observed.  The latter is evidence on a finite grid, not a
membership proof.

Callers may pass ``probes``: extra points (pairs or triples, matching the
check) that are evaluated exactly.  A violating probe is preferred as the
reported witness over the worst grid point, which lets known counterexamples
be reported at their canonical coordinates.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .distributions import (
    CauchyStd,
    Distribution,
    Frechet,
    Pareto,
    make_cauchy_std,
    make_frechet,
    make_pareto,
)
from .errors import HTDError

DEFAULT_TOL = 1e-9
KINK_OFFSET = 1e-9
JUMP_PROBE = 1e-13


class Verdict(str, Enum):
    VIOLATED = "VIOLATED"
    NO_VIOLATION_ON_GRID = "NO_VIOLATION_ON_GRID"


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: ``n_points`` between ``lo`` and ``hi``.

    ``LOG`` spacing needs ``lo > 0``.  ``LINEAR`` grids may start at or
    below zero, which the Cauchy-based convex-order check needs.
    """

    lo: float
    hi: float
    n_points: int
    spacing: str = "LOG"

    def __post_init__(self):
        sp = str(self.spacing).upper()
        if sp in ("LIN",):
            sp = "LINEAR"
        object.__setattr__(self, "spacing", sp)
        lo, hi, n = float(self.lo), float(self.hi), int(self.n_points)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n_points", n)
        if sp not in ("LOG", "LINEAR"):
            raise HTDError("BAD_GRID", f"spacing must be LOG or LINEAR, got {self.spacing!r}")
        if not (np.isfinite(lo) and np.isfinite(hi)) or not hi > lo:
            raise HTDError("BAD_GRID", f"need finite lo < hi, got ({lo}, {hi})")
        if n < 16:
            raise HTDError("BAD_GRID", f"need at least 16 points, got {n}")
        if sp == "LOG" and lo <= 0:
            raise HTDError("BAD_GRID", "LOG spacing requires lo > 0")

    def points(self) -> np.ndarray:
        if self.spacing == "LOG":
            return np.geomspace(self.lo, self.hi, self.n_points)
        return np.linspace(self.lo, self.hi, self.n_points)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n_points": self.n_points, "spacing": self.spacing}

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"lo,hi,n,log|lin"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (3, 4):
            raise HTDError("BAD_GRID", f"expected lo,hi,n[,log|lin], got {text!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise HTDError("BAD_GRID", f"cannot parse grid {text!r}") from exc
        spacing = parts[3] if len(parts) == 4 else "log"
        return cls(lo, hi, n, spacing)


DEFAULT_GRID = GridSpec(1e-6, 1e6, 2048, "LOG")
DEFAULT_GRID_2D = GridSpec(1e-6, 1e6, 256, "LOG")


@dataclass(frozen=True)
class Witness:
    """Points where ``lhs <= rhs`` (the inequality named by ``relation``) fails."""

    kind: str
    x: float | None
    y: float | None = None
    z: float | None = None
    lhs: float = 0.0
    rhs: float = 0.0
    margin: float = 0.0
    relation: str = ""
    points: tuple | None = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        for key in ("x", "y", "z"):
            v = getattr(self, key)
            if v is not None:
                d[key] = v
        if self.points is not None:
            d["points"] = [list(p) for p in self.points]
        d.update(lhs=_json_float(self.lhs), rhs=_json_float(self.rhs), margin=_json_float(self.margin),
                 relation=self.relation)
        return d


@dataclass(frozen=True)
class CheckReport:
    cls: str
    verdict: Verdict
    witness: Witness | None
    grid: GridSpec | None
    tolerance: float
    worst_margin: float
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATED

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.NO_VIOLATION_ON_GRID

    @property
    def message(self) -> str:
        if self.violated:
            return f"violation found ({self.witness.kind})"
        return "no violation found on grid"

    def to_dict(self) -> dict:
        return {
            "class": self.cls,
            "verdict": self.verdict.value,
            "message": self.message,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "grid": None if self.grid is None else self.grid.to_dict(),
            "tolerance": self.tolerance,
            "worst_margin": _json_float(self.worst_margin),
            "notes": list(self.notes),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _json_float(v: float):
    v = float(v)
    if np.isnan(v):
        return None
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _precheck(F: Distribution, allow_negative: bool = False) -> None:
    if F.is_degenerate:
        raise HTDError("DEGENERATE", f"{F.to_dsl()} puts all its mass on one point")
    if not allow_negative and F.lower < 0:
        raise HTDError("NEGATIVE_SUPPORT", f"{F.to_dsl()} has support below zero")


def _excess(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """``lhs - rhs`` with ``inf - inf`` treated as no excess."""
    with np.errstate(invalid="ignore"):
        d = np.asarray(lhs, dtype=float) - np.asarray(rhs, dtype=float)
    return np.where(np.isnan(d), -np.inf, d)


def _noise(F: Distribution, pts: Sequence[np.ndarray], transform=None) -> np.ndarray | float:
    """Combined standard error of ``eta`` values at several point arrays (MC-backed laws)."""
    probe = F.survival_se(1.0)
    if probe is None:
        return 0.0
    total = 0.0
    for t in pts:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            y = np.where(t > 0, 1.0 / np.where(t > 0, t, 1.0), np.inf)
        se = np.asarray(F.survival_se(y), dtype=float)
        if transform is not None:
            se = transform(y, se)
        total = total + se**2
    return np.sqrt(total)


def _threshold(tol: float, se) -> np.ndarray | float:
    return tol + 3.0 * np.asarray(se)


def _refined(base: np.ndarray, kinks: Iterable[float], lo: float, hi: float, offsets: bool) -> np.ndarray:
    pts = [base]
    k = np.array([v for v in kinks if np.isfinite(v) and lo <= v <= hi], dtype=float)
    if k.size:
        pts.append(k)
        if offsets:
            d = KINK_OFFSET * np.maximum(1.0, np.abs(k))
            pts.extend([k - d, k + d])
    out = np.unique(np.concatenate(pts))
    return out[(out >= lo) & (out <= hi)]


def _interior_jumps(F: Distribution) -> list[tuple[float, float]]:
    jumps = [(float(a), float(m)) for a, m in F.atoms() if a > 0 and m > DEFAULT_TOL]
    seen = {a for a, _ in jumps}
    for b in F.breakpoints():
        if not (np.isfinite(b) and b > 0) or b in seen:
            continue
        d = JUMP_PROBE * max(1.0, abs(b))
        m = float(F.survival(b - d)) - float(F.survival(b + d))
        # a true atom keeps its mass as the window shrinks; a steep but
        # continuous cdf (infinite slope at b) does not
        m_small = float(F.survival(b - 1e-3 * d)) - float(F.survival(b + 1e-3 * d))
        if m > DEFAULT_TOL and m_small >= 0.5 * m:
            jumps.append((float(b), m))
    return sorted(jumps)


def _jump_report(cls: str, F: Distribution, grid: GridSpec | None, tol: float) -> CheckReport | None:
    jumps = _interior_jumps(F)
    if not jumps:
        return None
    loc, mass = max(jumps, key=lambda p: p[1])
    w = Witness("JUMP", loc, lhs=mass, rhs=0.0, margin=mass, relation="cdf jump <= 0")
    return CheckReport(cls, Verdict.VIOLATED, w, grid, tol, mass, ("distribution has an atom away from 0",))


def _finish(
    cls: str,
    grid: GridSpec,
    tol: float,
    grid_best: tuple[float, Witness | None],
    probe_best: tuple[float, Witness | None],
    notes: tuple[str, ...] = (),
) -> CheckReport:
    g_excess, g_w = grid_best
    p_excess, p_w = probe_best
    worst = max(g_excess, p_excess)
    if p_w is not None:
        return CheckReport(cls, Verdict.VIOLATED, p_w, grid, tol, worst, notes)
    if g_w is not None:
        return CheckReport(cls, Verdict.VIOLATED, g_w, grid, tol, worst, notes)
    return CheckReport(cls, Verdict.NO_VIOLATION_ON_GRID, None, grid, tol, worst, notes)


def _pick(excess: np.ndarray, thresh, make) -> tuple[float, Witness | None]:
    """Largest excess and, if it beats its threshold, a witness for the worst violator."""
    excess = np.asarray(excess, dtype=float)
    if excess.size == 0:
        return -np.inf, None
    worst = float(np.max(excess))
    thresh = np.broadcast_to(np.asarray(thresh, dtype=float), excess.shape)
    bad = excess > thresh
    if not np.any(bad):
        return worst, None
    idx = int(np.argmax(np.where(bad, excess, -np.inf)))
    return worst, make(idx)


def _as_tuples(probes, k: int) -> np.ndarray:
    if probes is None:
        return np.empty((0, k))
    arr = np.asarray(probes, dtype=float).reshape(-1, k)
    return arr


# ---------------------------------------------------------------------------
# V: eta(t)/t nonincreasing
# ---------------------------------------------------------------------------


def _v_pairs(F: Distribution, a: np.ndarray, b: np.ndarray, tol: float):
    ea, eb = np.asarray(F.eta(a)), np.asarray(F.eta(b))
    ga, gb = ea / a, eb / b
    exc = gb - ga
    se = _noise(F, [a, b])
    se = se / np.minimum(a, b) if np.ndim(se) else se

    def make(i):
        return Witness("PAIR", float(a[i]), float(b[i]), lhs=float(gb[i]), rhs=float(ga[i]),
                       margin=float(exc[i]), relation="eta(y)/y <= eta(x)/x")

    return _pick(exc, _threshold(tol, se), make)


def check_v(
    F: Distribution,
    grid: GridSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    probes: Sequence[tuple[float, float]] | None = None,
) -> CheckReport:
    """Certify that ``eta(t)/t`` does not increase between adjacent grid points."""
    _precheck(F)
    grid = grid or DEFAULT_GRID
    if (r := _jump_report("V", F, grid, tol)) is not None:
        return r
    t = _refined(grid.points(), F.eta_breakpoints(), grid.lo, grid.hi, offsets=True)
    gbest = _v_pairs(F, t[:-1], t[1:], tol)
    pr = _as_tuples(probes, 2)
    pr = np.sort(pr, axis=1)
    pbest = _v_pairs(F, pr[:, 0], pr[:, 1], tol) if len(pr) else (-np.inf, None)
    return _finish("V", grid, tol, gbest, pbest)


# ---------------------------------------------------------------------------
# H: concavity of eta, or monotonicity of x^2 f(x)
# ---------------------------------------------------------------------------


def _concavity_triples(fn, a, b, c, tol, se_fn=None, label="eta", rel_tol=False):
    fa, fb, fc = np.asarray(fn(a)), np.asarray(fn(b)), np.asarray(fn(c))
    with np.errstate(invalid="ignore"):
        chord = fa + (fc - fa) * (b - a) / (c - a)
    exc = _excess(chord, fb)
    se = se_fn([a, b, c]) if se_fn is not None else 0.0
    thresh = _threshold(tol, se)
    if rel_tol:
        thresh = thresh * np.maximum(1.0, np.abs(np.where(np.isfinite(chord), chord, 0.0)))

    def make(i):
        return Witness("TRIPLE", float(a[i]), float(b[i]), float(c[i]), lhs=float(chord[i]), rhs=float(fb[i]),
                       margin=float(exc[i]), relation=f"chord of {label} <= {label}(y)")

    return _pick(exc, thresh, make)


def _triples(t: np.ndarray):
    return t[:-2], t[1:-1], t[2:]


def check_h(
    F: Distribution,
    grid: GridSpec | None = None,
    mode: str = "CONCAVITY",
    *,
    tol: float = DEFAULT_TOL,
    probes: Sequence[Sequence[float]] | None = None,
) -> CheckReport:
    """Certify membership evidence for H.

    ``CONCAVITY`` tests the chord inequality for ``eta`` on adjacent grid
    triples (the grid is augmented with 0 and the kinks of ``eta``);
    probes are triples ``(a, b, c)``.  ``DENSITY`` tests that ``x**2 f(x)``
    does not decrease between adjacent points of the grid ``x = 1/t``;
    probes are pairs ``(x1, x2)``.
    """
    _precheck(F)
    grid = grid or DEFAULT_GRID
    mode = mode.upper()
    if mode not in ("CONCAVITY", "DENSITY"):
        raise HTDError("PARAM_OUT_OF_RANGE", f"mode must be CONCAVITY or DENSITY, got {mode!r}")
    if mode == "DENSITY" and not F.has_density:
        raise HTDError("NO_DENSITY", f"{F.to_dsl()} has no density")
    if (r := _jump_report("H", F, grid, tol)) is not None:
        return r

    if mode == "CONCAVITY":
        t = _refined(grid.points(), F.eta_breakpoints(), grid.lo, grid.hi, offsets=False)
        t = np.concatenate([[0.0], t])
        se_fn = (lambda pts: _noise(F, pts)) if F.survival_se(1.0) is not None else None
        gbest = _concavity_triples(F.eta, *_triples(t), tol, se_fn)
        pr = np.sort(_as_tuples(probes, 3), axis=1)
        pbest = _concavity_triples(F.eta, pr[:, 0], pr[:, 1], pr[:, 2], tol, se_fn) if len(pr) else (-np.inf, None)
        return _finish("H", grid, tol, gbest, pbest, ("mode=CONCAVITY",))

    xs = np.sort(1.0 / grid.points())
    x = _refined(xs, [b for b in F.breakpoints() if b > 0], xs[0], xs[-1], offsets=True)
    x = x[x > F.lower] if np.isfinite(F.lower) else x

    def pairs(a, b):
        ha = a * a * np.asarray(F.density(a))
        hb = b * b * np.asarray(F.density(b))
        exc = ha - hb

        def make(i):
            return Witness("PAIR", float(a[i]), float(b[i]), lhs=float(ha[i]), rhs=float(hb[i]),
                           margin=float(exc[i]), relation="x^2 f(x) <= y^2 f(y)")

        return _pick(exc, tol, make)

    gbest = pairs(x[:-1], x[1:])
    pr = np.sort(_as_tuples(probes, 2), axis=1)
    pbest = pairs(pr[:, 0], pr[:, 1]) if len(pr) else (-np.inf, None)
    return _finish("H", grid, tol, gbest, pbest, ("mode=DENSITY",))


# ---------------------------------------------------------------------------
# Subadditivity sweeps (H* and G)
# ---------------------------------------------------------------------------


def _subadditive(
    fn,
    se_fn,
    t: np.ndarray,
    probes: np.ndarray,
    tol: float,
    label: str,
    workers: int,
):
    """Sweep ``fn(x + y) <= fn(x) + fn(y)`` over ``x <= y`` on ``t`` and over the probes."""
    ft = np.asarray(fn(t), dtype=float)
    se_t = se_fn(t) if se_fn is not None else None
    n = t.size
    rows = np.array_split(np.arange(n), max(1, int(workers)) * 4 if workers > 1 else 1)

    def sweep(idx: np.ndarray):
        best = (-np.inf, None)
        best_exc = -np.inf
        for i in idx:
            y = t[i:]
            s = t[i] + y
            lhs = np.asarray(fn(s), dtype=float)
            rhs = ft[i] + ft[i:]
            exc = _excess(lhs, rhs)
            if se_fn is not None:
                thr = _threshold(tol, np.sqrt(se_fn(s) ** 2 + se_t[i] ** 2 + se_t[i:] ** 2))
            else:
                thr = tol
            worst = float(np.max(exc))
            if worst > best_exc:
                best_exc = worst
            bad = exc > thr
            if np.any(bad):
                j = int(np.argmax(np.where(bad, exc, -np.inf)))
                if best[1] is None or exc[j] > best[1].margin:
                    best = (0.0, Witness("PAIR", float(t[i]), float(y[j]), lhs=float(lhs[j]), rhs=float(rhs[j]),
                                         margin=float(exc[j]), relation=f"{label}(x+y) <= {label}(x) + {label}(y)"))
        return best_exc, best[1]

    if workers > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            parts = list(pool.map(sweep, rows))
    else:
        parts = [sweep(r) for r in rows]
    g_exc = max(p[0] for p in parts)
    witnesses = [p[1] for p in parts if p[1] is not None]
    g_w = max(witnesses, key=lambda w: (w.margin, -w.x, -w.y)) if witnesses else None

    if len(probes):
        px, py = probes[:, 0], probes[:, 1]
        lhs = np.asarray(fn(px + py), dtype=float)
        rhs = np.asarray(fn(px), dtype=float) + np.asarray(fn(py), dtype=float)
        exc = _excess(lhs, rhs)
        if se_fn is not None:
            thr = _threshold(tol, np.sqrt(se_fn(px + py) ** 2 + se_fn(px) ** 2 + se_fn(py) ** 2))
        else:
            thr = tol

        def make(i):
            return Witness("PAIR", float(px[i]), float(py[i]), lhs=float(lhs[i]), rhs=float(rhs[i]),
                           margin=float(exc[i]), relation=f"{label}(x+y) <= {label}(x) + {label}(y)")

        pbest = _pick(exc, thr, make)
    else:
        pbest = (-np.inf, None)
    return (g_exc, g_w), pbest


def _eta_se_fn(F: Distribution):
    if F.survival_se(1.0) is None:
        return None
    return lambda t: _noise(F, [t])


def _lambda_se_fn(F: Distribution):
    if F.survival_se(1.0) is None:
        return None

    def fn(t):
        t = np.asarray(t, dtype=float)
        y = 1.0 / t
        cdf = np.maximum(np.asarray(F.cdf(y)), 1e-300)
        return np.asarray(F.survival_se(y)) / cdf

    return fn


def check_hstar(
    F: Distribution,
    grid: GridSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    probes: Sequence[tuple[float, float]] | None = None,
    workers: int = 1,
) -> CheckReport:
    """Certify subadditivity of ``eta`` over all grid pairs ``x <= y``."""
    _precheck(F)
    grid = grid or DEFAULT_GRID_2D
    if (r := _jump_report("Hstar", F, grid, tol)) is not None:
        return r
    t = _refined(grid.points(), F.eta_breakpoints(), grid.lo, grid.hi, offsets=False)
    gbest, pbest = _subadditive(F.eta, _eta_se_fn(F), t, _as_tuples(probes, 2), tol, "eta", workers)
    return _finish("Hstar", grid, tol, gbest, pbest)


def check_g(
    F: Distribution,
    grid: GridSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    probes: Sequence[tuple[float, float]] | None = None,
    workers: int = 1,
) -> CheckReport:
    """Certify subadditivity of ``Lambda``.

    Probes are evaluated first.  Without a violating probe, a positive
    essential infimum gives an immediate ``ESS_INF`` witness, an atom away
    from zero a ``JUMP`` witness, and otherwise the grid is swept.
    """
    _precheck(F)
    grid = grid or DEFAULT_GRID_2D
    pr = _as_tuples(probes, 2)
    if len(pr):
        _, pbest = _subadditive(F.lambda_fn, _lambda_se_fn(F), np.empty(0), pr, tol, "Lambda", 1)
        if pbest[1] is not None:
            return CheckReport("G", Verdict.VIOLATED, pbest[1], grid, tol, pbest[0])
    if F.lower > 0:
        w = Witness("ESS_INF", float(F.lower), lhs=float(F.lower), rhs=0.0, margin=float(F.lower),
                    relation="ess-inf <= 0")
        return CheckReport("G", Verdict.VIOLATED, w, grid, tol, float(F.lower), ("positive essential infimum",))
    if (r := _jump_report("G", F, grid, tol)) is not None:
        return r
    t = _refined(grid.points(), F.eta_breakpoints(), grid.lo, grid.hi, offsets=False)
    gbest, pbest = _subadditive(F.lambda_fn, _lambda_se_fn(F), t, pr, tol, "Lambda", workers)
    return _finish("G", grid, tol, gbest, pbest)


# ---------------------------------------------------------------------------
# Concave Lambda
# ---------------------------------------------------------------------------


def check_concave_lambda(
    F: Distribution,
    grid: GridSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    probes: Sequence[Sequence[float]] | None = None,
) -> CheckReport:
    """Chord test for concavity of ``Lambda`` where it is finite."""
    _precheck(F)
    grid = grid or DEFAULT_GRID
    t = _refined(grid.points(), F.eta_breakpoints(), grid.lo, grid.hi, offsets=False)
    lam = np.asarray(F.lambda_fn(t))
    t = t[np.isfinite(lam)]
    notes = ()
    if t.size < grid.points().size:
        notes = ("grid clipped to the region where the cdf is positive",)
    t = np.concatenate([[0.0], t])
    gbest = _concavity_triples(F.lambda_fn, *_triples(t), tol, label="Lambda")
    pr = np.sort(_as_tuples(probes, 3), axis=1)
    pbest = _concavity_triples(F.lambda_fn, pr[:, 0], pr[:, 1], pr[:, 2], tol, label="Lambda") if len(pr) else (-np.inf, None)
    return _finish("concave_Lambda", grid, tol, gbest, pbest, notes)


# ---------------------------------------------------------------------------
# Hazard-rate order
# ---------------------------------------------------------------------------


def check_hr_order(F: Distribution, G: Distribution, grid: GridSpec | None = None, *, tol: float = DEFAULT_TOL) -> CheckReport:
    """Evidence for ``F <=_hr G``: ``survival_G / survival_F`` nondecreasing on ``x = 1/t``."""
    grid = grid or DEFAULT_GRID
    x = np.sort(1.0 / grid.points())
    sf, sg = np.asarray(F.survival(x)), np.asarray(G.survival(x))
    keep = sf > 0
    x, r = x[keep], sg[keep] / sf[keep]
    exc = r[:-1] - r[1:]

    def make(i):
        return Witness("PAIR", float(x[i]), float(x[i + 1]), lhs=float(r[i]), rhs=float(r[i + 1]),
                       margin=float(exc[i]), relation="G/F survival ratio nondecreasing")

    return _finish("hr_order", grid, tol, _pick(exc, tol, make), (-np.inf, None))


# ---------------------------------------------------------------------------
# Convex transform order
# ---------------------------------------------------------------------------

PARETO_BASE_GRID = GridSpec(1.001, 1e6, 2048, "LOG")
FRECHET_BASE_GRID = GridSpec(1e-2, 1e6, 2048, "LOG")
CAUCHY_BASE_GRID = GridSpec(-1e3, 1e3, 2048, "LINEAR")


def _transform(F: Distribution, G: Distribution, x: np.ndarray) -> np.ndarray:
    """``G^{-1}(F(x))`` using whichever tail of ``F`` is more accurate."""
    x = np.asarray(x, dtype=float)
    cdf = np.asarray(F.cdf(x))
    sf = np.asarray(F.survival(x))
    out = np.empty_like(x)
    lower = cdf < 0.5
    if np.any(lower):
        out[lower] = np.asarray(G.quantile(cdf[lower]))
    if np.any(~lower):
        out[~lower] = np.asarray(G.isf(sf[~lower]))
    return out


def check_convex_transform_order(
    F: Distribution,
    G: Distribution,
    grid: GridSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    probes: Sequence[Sequence[float]] | None = None,
) -> CheckReport:
    """Evidence for ``F <=_c G``: convexity of ``x -> G^{-1}(F(x))`` on grid triples.

    The tolerance is relative: a triple violates when the chord falls below
    the function by more than ``tol * max(1, |chord|)``.
    """
    grid = grid or DEFAULT_GRID
    x = grid.points()
    interior = x[1:-1]
    cdf, sf = np.asarray(F.cdf(interior)), np.asarray(F.survival(interior))
    if np.any(cdf <= 0) or np.any(sf <= 0):
        raise HTDError("RANGE", f"cdf of {F.to_dsl()} leaves (0, 1) inside the grid")
    fn = lambda v: _transform(F, G, v)
    a, b, c = _triples(x)
    # convexity: h(b) <= chord, so the excess is h(b) - chord
    fa, fb, fc = fn(a), fn(b), fn(c)
    chord = fa + (fc - fa) * (b - a) / (c - a)
    exc = _excess(fb, chord)
    thr = tol * np.maximum(1.0, np.abs(chord))

    def make_from(a, b, c, fb, chord, exc):
        def make(i):
            return Witness("TRIPLE", float(a[i]), float(b[i]), float(c[i]), lhs=float(fb[i]), rhs=float(chord[i]),
                           margin=float(exc[i]), relation="h(y) <= chord of h")
        return make

    gbest = _pick(exc, thr, make_from(a, b, c, fb, chord, exc))
    pr = np.sort(_as_tuples(probes, 3), axis=1)
    if len(pr):
        pa, pb, pc = pr[:, 0], pr[:, 1], pr[:, 2]
        qa, qb, qc = fn(pa), fn(pb), fn(pc)
        pch = qa + (qc - qa) * (pb - pa) / (pc - pa)
        pexc = _excess(qb, pch)
        pbest = _pick(pexc, tol * np.maximum(1.0, np.abs(pch)), make_from(pa, pb, pc, qb, pch, pexc))
    else:
        pbest = (-np.inf, None)
    return _finish("convex_order", grid, tol, gbest, pbest, (f"base={F.to_dsl()}",))


def is_super_pareto(G: Distribution, grid: GridSpec | None = None, *, tol: float = DEFAULT_TOL) -> CheckReport:
    return check_convex_transform_order(make_pareto(1.0), G, grid or PARETO_BASE_GRID, tol=tol)


def is_super_frechet(G: Distribution, grid: GridSpec | None = None, *, tol: float = DEFAULT_TOL) -> CheckReport:
    return check_convex_transform_order(make_frechet(1.0), G, grid or FRECHET_BASE_GRID, tol=tol)


def is_super_cauchy(G: Distribution, grid: GridSpec | None = None, *, tol: float = DEFAULT_TOL) -> CheckReport:
    return check_convex_transform_order(make_cauchy_std(), G, grid or CAUCHY_BASE_GRID, tol=tol)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

CLASSES = ("H", "V", "Hstar", "G")


def classify(
    F: Distribution,
    grid: GridSpec | None = None,
    grid_2d: GridSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> dict[str, CheckReport]:
    """Run all four certifiers and check the answers against the inclusions
    ``H ⊂ V ⊂ H*`` and ``G ⊂ H*``."""
    out = {
        "H": check_h(F, grid, tol=tol),
        "V": check_v(F, grid, tol=tol),
        "Hstar": check_hstar(F, grid_2d, tol=tol, workers=workers),
        "G": check_g(F, grid_2d, tol=tol, workers=workers),
    }
    ok = {k: r.passed for k, r in out.items()}
    implications = (("H", "V"), ("V", "Hstar"), ("G", "Hstar"))
    for small, big in implications:
        if ok[small] and not ok[big]:
            raise HTDError(
                "INTERNAL",
                f"{F.to_dsl()}: {small} shows no violation but {big} is violated; the grids disagree",
            )
    return out
