"""Compound binomial and Poisson aggregate losses.

``C_b(m, p; F)`` is the law of ``Z_1 + ... + Z_N`` with ``N ~ Binomial(m, p)``
and iid severities ``Z_k ~ F``.  Equivalently it is ``sum_k I_k Z_k`` with iid
Bernoulli(p) indicators, which gives the representation used for exact
survival evaluation::

    P(Y > x) = sum_k C(m, k) p^k (1-p)^(m-k) P(Z_1 + ... + Z_k > x)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import stats

from .distributions import Distribution, Lomax, Pareto, format_number
from .dominance import DominanceVerdict, check_sd, check_sd_star, survival_weighted_sum
from .errors import HTDError
from .membership import check_h, check_hstar
from .montecarlo import MC, MCEstimate, stream, survival_counts

MAX_DRAWS = 100_000_000
DEFAULT_P_LIST = (0.1, 0.03, 0.01, 0.003)


@dataclass(frozen=True)
class CompoundSpec:
    """Frequency ``BINOMIAL(m, p)`` or ``POISSON(lam)`` with a severity law."""

    frequency: str
    severity: Distribution
    m: int | None = None
    p: float | None = None
    lam: float | None = None

    def __post_init__(self):
        freq = self.frequency.upper()
        object.__setattr__(self, "frequency", freq)
        if freq == "BINOMIAL":
            if self.m is None or int(self.m) != self.m or int(self.m) < 1:
                raise HTDError("PARAM_OUT_OF_RANGE", f"m must be an integer >= 1, got {self.m!r}")
            if self.p is None or not 0.0 <= float(self.p) <= 1.0:
                raise HTDError("PARAM_OUT_OF_RANGE", f"p must lie in [0, 1], got {self.p!r}")
            object.__setattr__(self, "m", int(self.m))
            object.__setattr__(self, "p", float(self.p))
        elif freq == "POISSON":
            if self.lam is None or not float(self.lam) > 0:
                raise HTDError("PARAM_OUT_OF_RANGE", f"lambda must be positive, got {self.lam!r}")
            object.__setattr__(self, "lam", float(self.lam))
        else:
            raise HTDError("PARAM_OUT_OF_RANGE", f"unknown frequency {self.frequency!r}")

    @classmethod
    def binomial(cls, m: int, p: float, severity: Distribution) -> "CompoundSpec":
        return cls("BINOMIAL", severity, m=m, p=p)

    @classmethod
    def poisson(cls, lam: float, severity: Distribution) -> "CompoundSpec":
        return cls("POISSON", severity, lam=lam)

    def count_sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.frequency == "BINOMIAL":
            return rng.binomial(self.m, self.p, size)
        return rng.poisson(self.lam, size)

    def pmf(self, k) -> np.ndarray:
        if self.frequency == "BINOMIAL":
            return stats.binom.pmf(k, self.m, self.p)
        return stats.poisson.pmf(k, self.lam)

    def to_dsl(self) -> str:
        if self.frequency == "BINOMIAL":
            return f"compound_binomial({self.m}, {format_number(self.p)}, {self.severity.to_dsl()})"
        return f"compound_poisson({format_number(self.lam)}, {self.severity.to_dsl()})"


def compound_sample(spec: CompoundSpec, rng: np.random.Generator, size: int | None = None):
    """Draw ``N`` then sum ``N`` severities; ``N = 0`` gives 0."""
    n = 1 if size is None else int(np.prod(size))
    counts = spec.count_sample(rng, n)
    total = int(counts.sum())
    out = np.zeros(n)
    if total:
        sev = np.asarray(spec.severity.sample(rng, total), dtype=float)
        owner = np.repeat(np.arange(n), counts)
        np.add.at(out, owner, sev)
    return float(out[0]) if size is None else out.reshape(size)


# ---------------------------------------------------------------------------
# k-fold severity tails
# ---------------------------------------------------------------------------


def _closed_pair_sum(F: Distribution):
    """Closed-form law of ``Z_1 + Z_2`` for standard Pareto(1) and Lomax(1)."""
    from .transforms import SumLomax1, SumPareto1

    if isinstance(F, Pareto) and F.alpha == 1.0:
        return SumPareto1()
    if isinstance(F, Lomax) and F.alpha == 1.0:
        return SumLomax1()
    return None


def kfold_survival(F: Distribution, k: int, x, mc: MC | None = None):
    """``P(Z_1 + ... + Z_k > x)`` and its standard error (0 when exact).

    ``k <= 2`` is exact (closed form or quadrature); larger ``k`` uses the
    shared-seed Monte Carlo in ``mc``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if k == 0:
        return (xs < 0).astype(float), np.zeros(xs.size)
    if k == 1:
        return np.asarray(F.survival(xs), dtype=float), np.zeros(xs.size)
    if k == 2:
        closed = _closed_pair_sum(F)
        if closed is not None:
            return np.asarray(closed.survival(xs), dtype=float), np.zeros(xs.size)
        return survival_weighted_sum(F, (1.0, 1.0), xs), np.zeros(xs.size)
    mc = mc or MC()

    def sampler(b, size):
        return sum(np.asarray(F.sample(stream(mc.seed, 1000 + k, i, b), size)) for i in range(k))

    counts = survival_counts(sampler, xs, mc)
    est = counts / mc.n
    return est, np.sqrt(est * (1 - est) / mc.n)


def compound_survival(spec: CompoundSpec, x, method="representation"):
    """Survival of the compound law.

    ``"representation"`` (binomial only) conditions on the number of active
    indicators; terms with ``k >= 3`` summands use Monte Carlo with
    ``10^6 / m`` draws each, and the result is then an :class:`MCEstimate`.
    An :class:`MC` method samples the compound law directly.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.ndim(x) == 0
    if isinstance(method, MC):
        counts = survival_counts(lambda b, size: compound_sample(spec, stream(method.seed, 0, b), size), xs, method)
        ests = [MCEstimate.from_indicators(int(c), method.n, method.seed) for c in counts]
        return ests[0] if scalar else ests
    if str(method).lower() != "representation":
        raise HTDError("PARAM_OUT_OF_RANGE", f"unknown method {method!r}")
    if spec.frequency != "BINOMIAL":
        raise HTDError("UNSUPPORTED", "the representation route covers compound binomial laws only")
    m = spec.m
    weights = spec.pmf(np.arange(m + 1))
    mc = MC(n=max(1_000_000 // m, 2))
    value = np.zeros(xs.size)
    var = np.zeros(xs.size)
    for k in range(m + 1):
        if weights[k] == 0:
            continue
        s, se = kfold_survival(spec.severity, k, xs, mc)
        value += weights[k] * s
        var += (weights[k] * se) ** 2
    if m <= 2:
        return float(value[0]) if scalar else value
    ests = [MCEstimate(float(v), mc.n, float(np.sqrt(e)), mc.seed) for v, e in zip(value, var)]
    return ests[0] if scalar else ests


@dataclass(frozen=True)
class CompoundDistribution(Distribution):
    """A compound law usable wherever a :class:`Distribution` is expected.

    Survival uses the binomial representation (Monte Carlo point estimates
    for ``m >= 3``); sampling is exact.  Poisson laws support sampling only.
    """

    spec: CompoundSpec

    @property
    def lower(self):
        return min(0.0, self.spec.severity.lower)

    @property
    def upper(self):
        return np.inf

    @property
    def has_density(self):
        return False

    @cached_property
    def _p0(self) -> float:
        return float(self.spec.pmf(0))

    def _sf(self, x):
        res = compound_survival(self.spec, np.asarray(x, dtype=float).ravel())
        if not isinstance(res, np.ndarray):
            res = np.array([e.value for e in res])
        return res.reshape(np.shape(x))

    def atoms(self):
        out = [(0.0, self._p0)] if self._p0 > 0 else []
        sev_atoms = self.spec.severity.atoms()
        if self.spec.frequency == "BINOMIAL" and sev_atoms and len(sev_atoms) == 1 and self.spec.severity.is_degenerate:
            (a, _), = sev_atoms
            out = [(k * a, float(self.spec.pmf(k))) for k in range(self.spec.m + 1) if self.spec.pmf(k) > 0]
        return tuple(out)

    def breakpoints(self):
        return tuple(sorted({0.0, *self.spec.severity.breakpoints()}))

    def sample(self, rng, size=None):
        return compound_sample(self.spec, rng, size)

    def to_dsl(self):
        return self.spec.to_dsl()


def compound_binomial(m: int, p: float, severity: Distribution) -> CompoundDistribution:
    return CompoundDistribution(CompoundSpec.binomial(m, p, severity))


def compound_poisson(lam: float, severity: Distribution) -> CompoundDistribution:
    return CompoundDistribution(CompoundSpec.poisson(lam, severity))


# ---------------------------------------------------------------------------
# Small-p expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionRow:
    p: float
    n: int
    estimate: float
    std_error: float
    approx: float
    ratio: float
    ratio_se: float

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.ratio - 1.96 * self.ratio_se, self.ratio + 1.96 * self.ratio_se)

    def to_dict(self) -> dict:
        lo, hi = self.ci95
        return {"p": self.p, "n": self.n, "estimate": self.estimate, "std_error": self.std_error,
                "approx": self.approx, "ratio": self.ratio, "ratio_se": self.ratio_se, "ratio_ci95": [lo, hi]}


@dataclass(frozen=True)
class ExpansionReport:
    """Ratios of the simulated two-summand tail to its first-order term ``m p [...]``."""

    rows: tuple[ExpansionRow, ...]
    passed: bool
    x: float
    weights: tuple[float, float]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "x": self.x, "weights": list(self.weights),
                "rows": [r.to_dict() for r in self.rows], "notes": list(self.notes)}


def draws_for(p: float, base: float = 1e4) -> int:
    """Sample size ``ceil(base / p)``; more than ``MAX_DRAWS`` raises BUDGET_EXCEEDED."""
    n = math.ceil(base / p)
    if n > MAX_DRAWS:
        raise HTDError("BUDGET_EXCEEDED", f"p={p} needs {n} draws, above the cap of {MAX_DRAWS}")
    return n


def first_order_term(m: int, severity: Distribution, weights, x: float) -> float:
    """``m [S(x/w_1) + S(x/w_2)]`` with ``S`` the severity survival; zero weights contribute nothing."""
    total = 0.0
    for w in weights:
        if w > 0:
            total += float(severity.survival(x / w))
        elif x < 0:
            total += 1.0
    return m * total


def small_p_expansion_check(
    m: int,
    severity: Distribution,
    weights,
    x: float,
    p_list=(0.1, 0.03, 0.01),
    *,
    seed: int | None = None,
    base_draws: float = 1e4,
) -> ExpansionReport:
    """Compare ``P(w_1 Y_1 + w_2 Y_2 > x)`` with ``m p [F(x/w_1) + F(x/w_2)]`` as ``p`` decreases.

    ``Y_1, Y_2`` are iid ``C_b(m, p; F)``.  The check passes when the ratio's
    95% interval at the smallest ``p`` contains 1 and the ratio at the
    smallest ``p`` is no further from 1 than at the next one, up to three
    combined standard errors.
    """
    w = tuple(float(v) for v in weights)
    if len(w) != 2:
        raise HTDError("N_UNSUPPORTED", "the expansion check uses two summands")
    ps = sorted((float(p) for p in p_list), reverse=True)
    if not ps or any(not 0 < p < 1 for p in ps):
        raise HTDError("PARAM_OUT_OF_RANGE", "every p must lie in (0, 1)")
    mc_seed = MC(n=2, seed=seed).seed
    coef = first_order_term(m, severity, w, x)
    if coef <= 0:
        raise HTDError("ZERO_TAIL", "the first-order term vanishes at this x")
    rows = []
    for j, p in enumerate(ps):
        n = draws_for(p, base_draws)
        spec = CompoundSpec.binomial(m, p, severity)
        mc = MC(n=n, seed=mc_seed)

        def sampler(b, size, spec=spec, j=j):
            y1 = compound_sample(spec, stream(mc.seed, j, 0, b), size)
            y2 = compound_sample(spec, stream(mc.seed, j, 1, b), size)
            return w[0] * y1 + w[1] * y2

        hits = int(survival_counts(sampler, np.array([x]), mc)[0])
        est = MCEstimate.from_indicators(hits, n, mc.seed)
        approx = p * coef
        rows.append(ExpansionRow(p, n, est.value, est.std_error, approx, est.value / approx, est.std_error / approx))
    last = rows[-1]
    lo, hi = last.ci95
    passed = lo <= 1.0 <= hi
    if len(rows) >= 2:
        prev = rows[-2]
        slack = 3.0 * math.hypot(last.ratio_se, prev.ratio_se)
        passed = passed and abs(last.ratio - 1.0) <= abs(prev.ratio - 1.0) + slack
    notes = tuple(f"p={r.p:g}: ratio={r.ratio:.4f} ± {1.96 * r.ratio_se:.4f}" for r in rows)
    return ExpansionReport(tuple(rows), passed, float(x), w, notes)


# ---------------------------------------------------------------------------
# Dominance of compound laws
# ---------------------------------------------------------------------------


def schur_gap_witness(severity: Distribution, n_scale: int = 121, n_split: int = 51) -> tuple[float, tuple, tuple, float] | None:
    """Find ``(x, theta, eta, gap)`` with ``theta ⪯ eta`` and
    ``F(x/theta_1) + F(x/theta_2) < F(x/eta_1) + F(x/eta_2)`` (survivals) by grid search.

    Returns None when no positive gap is found.  ``theta`` is always the
    equal split, the least spread vector with the same total.
    """
    eta_fn = severity.eta
    best = None
    for total in np.geomspace(1e-3, 1e3, n_scale):
        u = np.linspace(0.0, 0.5, n_split)[1:]
        spread = eta_fn(u * total) + eta_fn((1 - u) * total)
        gap = float(np.max(spread)) - float(2 * eta_fn(0.5 * total))
        if gap > 0 and (best is None or gap > best[3]):
            i = int(np.argmax(spread))
            best = (1.0 / total, (0.5, 0.5), (float(u[i]), float(1 - u[i])), gap)
    return best


@dataclass(frozen=True)
class CompoundDominanceReport:
    direction: str
    side: str
    severity_check: str
    results: tuple[tuple[float, DominanceVerdict], ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        if self.side == "SUFFICIENCY":
            return all(v.relation.value == "DOMINATES_ON_GRID" for _, v in self.results)
        return any(v.relation.value == "VIOLATED" for _, v in self.results)

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "side": self.side,
            "severity_check": self.severity_check,
            "passed": self.passed,
            "results": [{"p": p, **v.to_dict()} for p, v in self.results],
            "notes": list(self.notes),
        }


def check_compound_dominance(
    m: int,
    severity: Distribution,
    direction: str = "SD",
    p_list=DEFAULT_P_LIST,
    x=None,
    theta=(0.4, 0.6),
    eta=(0.2, 0.8),
    *,
    mc: MC | None = None,
) -> CompoundDominanceReport:
    """Dominance for iid compound binomial summands.

    When the severity shows no violation of the relevant class (H for
    ``SD``, H* for ``SDSTAR``) every ``p`` is checked for dominance.
    Otherwise the severity's Schur gap gives a point ``x`` and weights at
    which the compound comparison should reverse for small ``p``; each
    ``p`` is then checked at that point.
    """
    direction = direction.upper()
    if direction not in ("SD", "SDSTAR"):
        raise HTDError("PARAM_OUT_OF_RANGE", f"unknown direction {direction!r}")
    mc = mc or MC()
    sev_report = check_h(severity) if direction == "SD" else check_hstar(severity)
    results = []
    notes = [f"n={mc.n}", f"seed={mc.seed}"]
    if not sev_report.violated:
        for p in p_list:
            law = compound_binomial(m, p, severity)
            if direction == "SD":
                v = check_sd(law, theta, eta, x=x, method=mc)
            else:
                v = check_sd_star(law, theta, x=x, method=mc)
            results.append((float(p), v))
        return CompoundDominanceReport(direction, "SUFFICIENCY", sev_report.verdict.value, tuple(results), tuple(notes))
    found = schur_gap_witness(severity)
    if found is None:
        notes.append("no Schur gap found on the search grid")
        return CompoundDominanceReport(direction, "NECESSITY", sev_report.verdict.value, (), tuple(notes))
    xw, th, et, gap = found
    notes.append(f"x={xw:.6g}, theta={th}, eta={et}, gap={gap:.6g}")
    for p in p_list:
        law = compound_binomial(m, p, severity)
        results.append((float(p), check_sd(law, th, et, x=[xw], method=mc)))
    return CompoundDominanceReport(direction, "NECESSITY", sev_report.verdict.value, tuple(results), tuple(notes))
