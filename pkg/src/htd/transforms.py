"""Operations that build new laws from existing ones.

Each transform is an immutable :class:`~htd.distributions.Distribution`
that keeps a reference to its inputs, tracks its support bounds, atoms and
breakpoints exactly, and overrides ``eta``/``lambda_fn`` where a closed
expression is more accurate than the generic route through the cdf.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .distributions import (
    Distribution,
    Lomax,
    Pareto,
    _arr,
    _positive,
    _ret,
    format_number,
)
from .errors import HTDError
from .quadrature import integrate


def _atom_mass(dist: Distribution, a: float) -> float:
    return float(sum(m for loc, m in dist.atoms() if loc == a))


def _merge_atoms(pairs) -> tuple[tuple[float, float], ...]:
    acc: dict[float, float] = {}
    for loc, m in pairs:
        if m > 0:
            acc[float(loc)] = acc.get(float(loc), 0.0) + float(m)
    return tuple(sorted(acc.items()))


# ---------------------------------------------------------------------------
# Powers of the cdf and of the survival function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowCdf(Distribution):
    """Law of the maximum-type transform with cdf ``F**beta``."""

    base: Distribution
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    @property
    def lower(self):
        return self.base.lower

    @property
    def upper(self):
        return self.base.upper

    @property
    def has_density(self):
        return self.base.has_density

    def _cdf(self, x):
        with np.errstate(divide="ignore"):
            return np.exp(self.beta * np.asarray(self.base.log_cdf(x)))

    def _sf(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            lc = np.asarray(self.base.log_cdf(x))
            return np.where(np.isneginf(lc), 1.0, -np.expm1(self.beta * lc))

    def _isf(self, s):
        u = -np.expm1(np.log1p(-s) / self.beta)
        return self.base.isf(np.clip(u, 0.0, 1.0))

    def _pdf(self, x):
        F = np.asarray(self.base.cdf(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.beta * np.where(F > 0, F ** (self.beta - 1.0), 0.0) * np.asarray(self.base.density(x))
        return np.nan_to_num(val, nan=0.0, posinf=0.0)

    def eta(self, t):
        t = _arr(t)
        e = np.minimum(np.asarray(self.base.eta(t)), 1.0)
        with np.errstate(divide="ignore"):
            out = np.where(e >= 1.0, 1.0, -np.expm1(self.beta * np.log1p(-np.minimum(e, 1 - 1e-300))))
        return _ret(t, out)

    def lambda_fn(self, t):
        t = _arr(t)
        return _ret(t, self.beta * np.asarray(self.base.lambda_fn(t)))

    def atoms(self):
        out = []
        for a, m in self.base.atoms():
            Fa = float(self.base.cdf(a))
            out.append((a, Fa**self.beta - max(Fa - m, 0.0) ** self.beta))
        return _merge_atoms(out)

    def breakpoints(self):
        return self.base.breakpoints()

    def sample(self, rng, size=None):
        return self.isf(1.0 - rng.random(size))

    def to_dsl(self):
        return f"powcdf({self.base.to_dsl()}, {format_number(self.beta)})"


@dataclass(frozen=True)
class PowSurvival(Distribution):
    """Law with survival ``Fbar**beta`` for ``beta`` in (0, 1)."""

    base: Distribution
    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not (0.0 < b < 1.0):
            raise HTDError("PARAM_OUT_OF_RANGE", f"beta must lie in (0, 1), got {b}")
        object.__setattr__(self, "beta", b)

    @property
    def lower(self):
        return self.base.lower

    @property
    def upper(self):
        return self.base.upper

    @property
    def has_density(self):
        return self.base.has_density

    def _sf(self, x):
        return np.asarray(self.base.survival(x)) ** self.beta

    def _log_base_sf(self, x):
        F = np.asarray(self.base.cdf(x), dtype=float)
        S = np.asarray(self.base.survival(x), dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(F < 0.5, np.log1p(-F), np.log(S))

    def _cdf(self, x):
        # 1 - S**beta loses everything once S rounds to 1
        return -np.expm1(self.beta * self._log_base_sf(x))

    def log_cdf(self, x):
        x = _arr(x)
        with np.errstate(divide="ignore"):
            return _ret(x, np.log(np.clip(self._cdf(x), 0.0, 1.0)))

    def lambda_fn(self, t):
        t = _arr(t)
        Lb = np.asarray(self.base.lambda_fn(t), dtype=float)
        eta = np.asarray(self.base.eta(t), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            F = np.exp(-Lb)
            logS = np.where(F < 0.5, np.log1p(-F), np.log(eta))
            direct = -np.log(-np.expm1(self.beta * logS))
            # for tiny F, 1 - S**beta = beta*F*(1 + O(F))
            out = np.where(Lb > 30.0, Lb - np.log(self.beta), direct)
        out = np.where(t > 0, out, 0.0)
        return _ret(t, out + 0.0)

    def _isf(self, s):
        return self.base.isf(s ** (1.0 / self.beta))

    def _pdf(self, x):
        S = np.asarray(self.base.survival(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.beta * np.where(S > 0, S ** (self.beta - 1.0), 0.0) * np.asarray(self.base.density(x))
        return np.nan_to_num(val, nan=0.0, posinf=0.0)

    def eta(self, t):
        t = _arr(t)
        return _ret(t, np.asarray(self.base.eta(t)) ** self.beta)

    def atoms(self):
        out = []
        for a, m in self.base.atoms():
            Sa = float(self.base.survival(a))
            out.append((a, (Sa + m) ** self.beta - Sa**self.beta))
        return _merge_atoms(out)

    def breakpoints(self):
        return self.base.breakpoints()

    def to_dsl(self):
        return f"powsurv({self.base.to_dsl()}, {format_number(self.beta)})"


# ---------------------------------------------------------------------------
# Maxima, excesses, conditioning, truncation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxOf(Distribution):
    """Law of ``max(X, Y)`` for independent ``X ~ first`` and ``Y ~ second``."""

    first: Distribution
    second: Distribution

    @property
    def lower(self):
        return max(self.first.lower, self.second.lower)

    @property
    def upper(self):
        return max(self.first.upper, self.second.upper)

    @property
    def has_density(self):
        return self.first.has_density and self.second.has_density

    def _cdf(self, x):
        return np.asarray(self.first.cdf(x)) * np.asarray(self.second.cdf(x))

    def _sf(self, x):
        a = np.asarray(self.first.survival(x))
        b = np.asarray(self.second.survival(x))
        return a + b - a * b

    def _pdf(self, x):
        return np.asarray(self.first.density(x)) * np.asarray(self.second.cdf(x)) + np.asarray(
            self.first.cdf(x)
        ) * np.asarray(self.second.density(x))

    def log_cdf(self, x):
        x = _arr(x)
        return _ret(x, np.asarray(self.first.log_cdf(x)) + np.asarray(self.second.log_cdf(x)))

    def lambda_fn(self, t):
        t = _arr(t)
        return _ret(t, np.asarray(self.first.lambda_fn(t)) + np.asarray(self.second.lambda_fn(t)))

    def atoms(self):
        out = []
        locs = {a for a, _ in self.first.atoms()} | {a for a, _ in self.second.atoms()}
        for a in locs:
            Fa, Ga = float(self.first.cdf(a)), float(self.second.cdf(a))
            Fl = Fa - _atom_mass(self.first, a)
            Gl = Ga - _atom_mass(self.second, a)
            out.append((a, Fa * Ga - Fl * Gl))
        return _merge_atoms(out)

    def breakpoints(self):
        bps = set(self.first.breakpoints()) | set(self.second.breakpoints())
        return tuple(sorted(b for b in bps if b >= self.lower))

    def sample(self, rng, size=None):
        return np.maximum(self.first.sample(rng, size), self.second.sample(rng, size))

    def to_dsl(self):
        return f"maxof({self.first.to_dsl()}, {self.second.to_dsl()})"


@dataclass(frozen=True)
class Excess(Distribution):
    """Law of ``(X - c)_+``: atom at 0 of mass ``F(c)``, shifted tail above."""

    base: Distribution
    c: float

    def __post_init__(self):
        c = _positive("c", self.c)
        if not np.isfinite(c):
            raise HTDError("PARAM_OUT_OF_RANGE", "threshold must be finite")
        object.__setattr__(self, "c", c)

    @cached_property
    def _atom0(self) -> float:
        return float(self.base.cdf(self.c))

    @property
    def lower(self):
        return 0.0 if self._atom0 > 0 else max(self.base.lower - self.c, 0.0)

    @property
    def upper(self):
        return max(self.base.upper - self.c, 0.0)

    @property
    def has_density(self):
        return self._atom0 == 0.0 and self.base.has_density

    def _sf(self, x):
        return np.where(x < 0, 1.0, np.asarray(self.base.survival(x + self.c)))

    def _cdf(self, x):
        return np.where(x < 0, 0.0, np.asarray(self.base.cdf(x + self.c)))

    def _isf(self, s):
        s0 = float(self.base.survival(self.c))
        inner = np.asarray(self.base.isf(np.minimum(s, 1.0))) - self.c
        return np.where(s >= s0, 0.0, np.maximum(inner, 0.0))

    def _pdf(self, x):
        return np.where(x >= 0, np.asarray(self.base.density(x + self.c)), 0.0)

    def lambda_fn(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore"):
            arg = np.where(t > 0, 1.0 / np.where(t > 0, t, 1.0), np.inf) + self.c
            inner = np.asarray(self.base.lambda_fn(np.where(arg > 0, 1.0 / np.where(arg > 0, arg, 1.0), 1.0)))
            fallback = -np.asarray(self.base.log_cdf(arg))
        out = np.where(arg > 0, inner, fallback)
        return _ret(t, np.where(t > 0, out, 0.0))

    def atoms(self):
        out = [(0.0, self._atom0)] if self._atom0 > 0 else []
        out += [(a - self.c, m) for a, m in self.base.atoms() if a > self.c]
        return _merge_atoms(out)

    def breakpoints(self):
        bps = {b - self.c for b in self.base.breakpoints() if b - self.c > 0}
        bps.add(self.lower)
        return tuple(sorted(bps))

    def sample(self, rng, size=None):
        return np.maximum(np.asarray(self.base.sample(rng, size)) - self.c, 0.0)

    def to_dsl(self):
        return f"excess({self.base.to_dsl()}, {format_number(self.c)})"


@dataclass(frozen=True)
class ExcessRandom(Distribution):
    """Law of ``(X - Y)_+`` for independent ``X ~ base`` and ``Y ~ threshold >= 0``.

    ``method="quad"`` integrates ``survival_X(x + y)`` over the quantile
    function of ``Y`` (exact for any ``Y``); ``method="mc"`` averages over a
    fixed-seed sample of ``Y`` and reports standard errors.
    """

    base: Distribution
    threshold: Distribution
    method: str = "quad"
    n_mc: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.threshold.lower < 0:
            raise HTDError("NEGATIVE_SUPPORT", "the random threshold must be nonnegative")
        if self.method not in ("quad", "mc"):
            raise HTDError("PARAM_OUT_OF_RANGE", "method must be 'quad' or 'mc'")

    @cached_property
    def _y_sample(self) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(7,)))
        return np.asarray(self.threshold.sample(rng, self.n_mc))

    @cached_property
    def _y_breaks(self) -> np.ndarray:
        """Probability levels where the threshold quantile is not smooth."""
        y = self.threshold
        levels = set()
        for b in y.breakpoints():
            levels.add(float(y.survival(b)))
        for a, m in y.atoms():
            sa = float(y.survival(a))
            levels.update((sa, sa + m))
        return np.array(sorted(v for v in levels if 0.0 < v < 1.0))

    def _integrand_breaks(self, x: float) -> list[float]:
        y = self.threshold
        pts = list(self._y_breaks)
        for b in self.base.breakpoints():
            z = b - x
            if z > y.lower and z < y.upper:
                pts.append(float(y.survival(z)))
        return pts

    def _sf_quad(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape)
        flat = x.ravel()
        res = np.empty(flat.size)
        for i, xi in enumerate(flat):
            if xi < 0:
                res[i] = 1.0
                continue
            f = lambda s, xi=xi: np.asarray(self.base.survival(xi + np.asarray(self.threshold.isf(s))))
            res[i] = integrate(f, 0.0, 1.0, breakpoints=self._integrand_breaks(xi)).value
        out[...] = res.reshape(x.shape)
        return out

    def _sf(self, x):
        x = np.asarray(x, dtype=float)
        if self.method == "quad":
            return self._sf_quad(x)
        flat = x.ravel()
        res = np.empty(flat.size)
        ys = self._y_sample
        for start in range(0, flat.size, 64):
            chunk = flat[start : start + 64]
            vals = np.asarray(self.base.survival(chunk[:, None] + ys[None, :]))
            res[start : start + 64] = np.where(chunk < 0, 1.0, vals.mean(axis=1))
        return res.reshape(x.shape)

    def survival_se(self, x):
        if self.method == "quad":
            return None
        x = _arr(x)
        flat = x.ravel()
        res = np.empty(flat.size)
        ys = self._y_sample
        for start in range(0, flat.size, 64):
            chunk = flat[start : start + 64]
            vals = np.asarray(self.base.survival(chunk[:, None] + ys[None, :]))
            res[start : start + 64] = np.where(chunk < 0, 0.0, vals.std(axis=1, ddof=1) / np.sqrt(ys.size))
        return _ret(x, res.reshape(x.shape))

    @cached_property
    def _atom0(self) -> float:
        return float(max(1.0 - self._sf(np.array([0.0]))[0], 0.0))

    @property
    def lower(self):
        if self._atom0 > 1e-15:
            return 0.0
        return max(self.base.lower - self.threshold.upper, 0.0)

    @property
    def upper(self):
        return max(self.base.upper - self.threshold.lower, 0.0)

    @property
    def has_density(self):
        return False

    def atoms(self):
        return ((0.0, self._atom0),) if self._atom0 > 1e-15 else ()

    def breakpoints(self):
        return (0.0,)

    def sample(self, rng, size=None):
        x = np.asarray(self.base.sample(rng, size))
        y = np.asarray(self.threshold.sample(rng, size))
        return np.maximum(x - y, 0.0)

    def to_dsl(self):
        return f"excess_rand({self.base.to_dsl()}, {self.threshold.to_dsl()})"


@dataclass(frozen=True)
class ConditionExceed(Distribution):
    """Law of ``X`` given ``X > c``."""

    base: Distribution
    c: float

    def __post_init__(self):
        c = float(self.c)
        object.__setattr__(self, "c", c)
        if float(self.base.survival(c)) <= 0.0:
            raise HTDError("ZERO_TAIL", f"P(X > {c}) is zero")

    @cached_property
    def _tail(self) -> float:
        return float(self.base.survival(self.c))

    @property
    def lower(self):
        return max(self.c, self.base.lower)

    @property
    def upper(self):
        return self.base.upper

    @property
    def has_density(self):
        return self.base.has_density

    def _sf(self, x):
        return np.where(x < self.c, 1.0, np.minimum(np.asarray(self.base.survival(x)) / self._tail, 1.0))

    def _isf(self, s):
        return np.maximum(np.asarray(self.base.isf(np.clip(s * self._tail, 0.0, 1.0))), self.c)

    def _pdf(self, x):
        return np.where(x > self.c, np.asarray(self.base.density(x)) / self._tail, 0.0)

    def atoms(self):
        return _merge_atoms((a, m / self._tail) for a, m in self.base.atoms() if a > self.c)

    def breakpoints(self):
        bps = {b for b in self.base.breakpoints() if b > self.c}
        bps.add(self.lower)
        return tuple(sorted(bps))

    def to_dsl(self):
        return f"cond({self.base.to_dsl()}, {format_number(self.c)})"


@dataclass(frozen=True)
class TruncateUpper(Distribution):
    """Law of ``min(X, c)``: the mass above ``c`` collapses to an atom at ``c``."""

    base: Distribution
    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))

    @property
    def lower(self):
        return min(self.base.lower, self.c)

    @property
    def upper(self):
        return min(self.base.upper, self.c)

    @cached_property
    def _atom(self) -> float:
        return float(self.base.survival(self.c)) + _atom_mass(self.base, self.c)

    @property
    def has_density(self):
        return self._atom == 0.0 and self.base.has_density

    def _sf(self, x):
        return np.where(x < self.c, np.asarray(self.base.survival(x)), 0.0)

    def _cdf(self, x):
        return np.where(x < self.c, np.asarray(self.base.cdf(x)), 1.0)

    def _isf(self, s):
        return np.minimum(np.asarray(self.base.isf(s)), self.c)

    def _pdf(self, x):
        return np.where(x < self.c, np.asarray(self.base.density(x)), 0.0)

    def lambda_fn(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore"):
            y = np.where(t > 0, 1.0 / np.where(t > 0, t, 1.0), np.inf)
        return _ret(t, np.where(y < self.c, np.asarray(self.base.lambda_fn(t)), 0.0))

    def atoms(self):
        out = [(a, m) for a, m in self.base.atoms() if a < self.c]
        if self._atom > 0:
            out.append((self.c, self._atom))
        return _merge_atoms(out)

    def breakpoints(self):
        bps = {b for b in self.base.breakpoints() if b < self.c}
        bps.add(self.c)
        return tuple(sorted(bps))

    def sample(self, rng, size=None):
        return np.minimum(np.asarray(self.base.sample(rng, size)), self.c)

    def to_dsl(self):
        return f"trunc({self.base.to_dsl()}, {format_number(self.c)})"


# ---------------------------------------------------------------------------
# Convex maps
# ---------------------------------------------------------------------------

_MAP_KINDS = ("power", "shift", "scale", "exp", "polyline")


@dataclass(frozen=True)
class ConvexMap:
    """Increasing convex map ``psi`` with an explicit generalised inverse.

    Kinds: ``power`` (``x**p``, ``p >= 1``), ``shift`` (``x + c``), ``scale``
    (``k x``), ``exp`` (``e**x``, for laws on the whole line) and ``polyline``
    (linear interpolation of ``points``, continued with the last slope).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _MAP_KINDS:
            raise HTDError("UNKNOWN_NAME", f"unknown map kind {self.kind!r}")
        if self.kind == "power":
            (p,) = self.params
            if not p >= 1:
                raise HTDError("PARAM_OUT_OF_RANGE", "power maps need p >= 1")
        elif self.kind == "scale":
            (k,) = self.params
            _positive("scale", k)
        elif self.kind == "polyline":
            pts = tuple((float(a), float(b)) for a, b in self.params)
            if len(pts) < 2:
                raise HTDError("PARAM_OUT_OF_RANGE", "a polyline needs two points")
            xs = np.array([p[0] for p in pts])
            ys = np.array([p[1] for p in pts])
            if np.any(np.diff(xs) <= 0):
                raise HTDError("PARAM_OUT_OF_RANGE", "polyline abscissae must increase")
            slopes = np.diff(ys) / np.diff(xs)
            if np.any(slopes < 0):
                raise HTDError("NOT_INVERTIBLE", "polyline decreases")
            if np.any(np.diff(slopes) < -1e-12):
                raise HTDError("NOT_CONVEX", "polyline slopes must be nondecreasing")
            if slopes[-1] <= 0:
                raise HTDError("NOT_INVERTIBLE", "polyline is constant")
            object.__setattr__(self, "params", pts)
        object.__setattr__(self, "params", tuple(self.params))

    # named constructors
    @classmethod
    def power(cls, p: float) -> "ConvexMap":
        return cls("power", (float(p),))

    @classmethod
    def shift(cls, c: float) -> "ConvexMap":
        return cls("shift", (float(c),))

    @classmethod
    def scale(cls, k: float) -> "ConvexMap":
        return cls("scale", (float(k),))

    @classmethod
    def exp(cls) -> "ConvexMap":
        return cls("exp", ())

    @classmethod
    def polyline(cls, points: Sequence[tuple[float, float]]) -> "ConvexMap":
        return cls("polyline", tuple(tuple(p) for p in points))

    @property
    def anchored(self) -> bool:
        """True when ``psi(0) = 0``."""
        return bool(self(0.0) == 0.0) if self.kind != "exp" else False

    def _poly(self):
        xs = np.array([p[0] for p in self.params])
        ys = np.array([p[1] for p in self.params])
        return xs, ys, np.diff(ys) / np.diff(xs)

    def flat_until(self) -> float:
        """Right end of an initial flat stretch (``-inf`` when there is none)."""
        if self.kind != "polyline":
            return -np.inf
        xs, _, slopes = self._poly()
        flat = np.flatnonzero(slopes == 0)
        return float(xs[flat[-1] + 1]) if flat.size else -np.inf

    def __call__(self, x):
        x = _arr(x)
        k = self.kind
        if k == "power":
            out = np.maximum(x, 0.0) ** self.params[0]
        elif k == "shift":
            out = x + self.params[0]
        elif k == "scale":
            out = self.params[0] * x
        elif k == "exp":
            out = np.exp(x)
        else:
            xs, ys, sl = self._poly()
            out = np.where(x <= xs[-1], np.interp(x, xs, ys), ys[-1] + sl[-1] * (x - xs[-1]))
            out = np.where(x < xs[0], ys[0] + sl[0] * (x - xs[0]), out)
        return _ret(x, out)

    def inverse(self, y):
        """Largest ``x`` with ``psi(x) <= y``; ``-inf`` below the range."""
        y = _arr(y)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "power":
                out = np.where(y >= 0, np.maximum(y, 0.0) ** (1.0 / self.params[0]), -np.inf)
            elif k == "shift":
                out = y - self.params[0]
            elif k == "scale":
                out = y / self.params[0]
            elif k == "exp":
                out = np.where(y > 0, np.log(np.maximum(y, 1e-300)), -np.inf)
            else:
                xs, ys, sl = self._poly()
                last = xs[-1] + (y - ys[-1]) / sl[-1]
                j = np.clip(np.searchsorted(ys, y, side="right") - 1, 0, len(sl) - 1)
                seg = np.where(sl[j] > 0, xs[j] + (y - ys[j]) / np.where(sl[j] > 0, sl[j], 1.0), xs[j + 1])
                out = np.where(y >= ys[-1], last, seg)
                below = y < ys[0]
                out = np.where(below, xs[0] + (y - ys[0]) / sl[0] if sl[0] > 0 else -np.inf, out)
        return _ret(y, out)

    def inverse_derivative(self, y):
        y = _arr(y)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "power":
                p = self.params[0]
                out = np.where(y > 0, (1.0 / p) * np.maximum(y, 1e-300) ** (1.0 / p - 1.0), 0.0)
            elif k == "shift":
                out = np.ones_like(y)
            elif k == "scale":
                out = np.full_like(y, 1.0 / self.params[0])
            elif k == "exp":
                out = np.where(y > 0, 1.0 / np.maximum(y, 1e-300), 0.0)
            else:
                xs, ys, sl = self._poly()
                j = np.clip(np.searchsorted(ys, y, side="right") - 1, 0, len(sl) - 1)
                out = np.where(sl[j] > 0, 1.0 / np.where(sl[j] > 0, sl[j], 1.0), 0.0)
        return _ret(y, out)

    def kinks(self) -> tuple[float, ...]:
        """Images of the points where ``psi`` is not smooth."""
        if self.kind == "polyline":
            return tuple(p[1] for p in self.params)
        return ()

    def reciprocal_inverse_concave(self, grid: np.ndarray, tol: float = 1e-9) -> bool:
        """Grid test of concavity of ``x -> 1 / psi^{-1}(1 / x)``."""
        x = np.sort(np.asarray(grid, dtype=float))
        with np.errstate(divide="ignore"):
            h = 1.0 / np.asarray(self.inverse(1.0 / x))
        if not np.all(np.isfinite(h)):
            return False
        a, b, c = x[:-2], x[1:-1], x[2:]
        chord = h[:-2] + (h[2:] - h[:-2]) * (b - a) / (c - a)
        return bool(np.all(h[1:-1] >= chord - tol * np.maximum(1.0, np.abs(chord))))

    def to_dsl(self) -> str:
        k = self.kind
        if k == "power":
            return f"pow({format_number(self.params[0])})"
        if k == "shift":
            return f"add({format_number(self.params[0])})"
        if k == "scale":
            return f"mul({format_number(self.params[0])})"
        if k == "exp":
            return "exp()"
        body = ", ".join(f"({format_number(a)}, {format_number(b)})" for a, b in self.params)
        return f"poly({body})"


@dataclass(frozen=True)
class ConvexMapped(Distribution):
    """Law of ``psi(X)`` for an increasing convex map ``psi``."""

    base: Distribution
    psi: ConvexMap

    def __post_init__(self):
        flat_end = self.psi.flat_until()
        if flat_end > self.base.lower:
            raise HTDError("NOT_INVERTIBLE", "psi is flat on part of the support")

    @property
    def lower(self):
        return float(self.psi(self.base.lower)) if np.isfinite(self.base.lower) else (
            0.0 if self.psi.kind == "exp" else -np.inf
        )

    @property
    def upper(self):
        return float(self.psi(self.base.upper)) if np.isfinite(self.base.upper) else np.inf

    @property
    def has_density(self):
        return self.base.has_density

    def _sf(self, y):
        inv = np.asarray(self.psi.inverse(y))
        return np.where(np.isneginf(inv), 1.0, np.asarray(self.base.survival(np.where(np.isneginf(inv), 0.0, inv))))

    def _cdf(self, y):
        inv = np.asarray(self.psi.inverse(y))
        return np.where(np.isneginf(inv), 0.0, np.asarray(self.base.cdf(np.where(np.isneginf(inv), 0.0, inv))))

    def _isf(self, s):
        return np.asarray(self.psi(np.asarray(self.base.isf(s))))

    def _pdf(self, y):
        inv = np.asarray(self.psi.inverse(y))
        ok = np.isfinite(inv)
        safe = np.where(ok, inv, 0.0)
        return np.where(ok, np.asarray(self.base.density(safe)) * np.asarray(self.psi.inverse_derivative(y)), 0.0)

    def lambda_fn(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore"):
            y = np.where(t > 0, 1.0 / np.where(t > 0, t, 1.0), np.inf)
            inv = np.asarray(self.psi.inverse(y))
            pos = inv > 0
            via_base = np.asarray(self.base.lambda_fn(np.where(pos, 1.0 / np.where(pos, inv, 1.0), 1.0)))
            generic = -np.asarray(self.base.log_cdf(np.where(np.isneginf(inv), -1.0, inv)))
        out = np.where(pos, via_base, np.where(np.isneginf(inv), np.inf, generic))
        return _ret(t, np.where(t > 0, out, 0.0))

    def atoms(self):
        return _merge_atoms((float(self.psi(a)), m) for a, m in self.base.atoms())

    def breakpoints(self):
        bps = {float(self.psi(b)) for b in self.base.breakpoints() if np.isfinite(b)}
        bps.update(k for k in self.psi.kinks() if k >= self.lower)
        bps.add(self.lower)
        return tuple(sorted(b for b in bps if np.isfinite(b)))

    def sample(self, rng, size=None):
        return np.asarray(self.psi(np.asarray(self.base.sample(rng, size))))

    def to_dsl(self):
        k = self.psi.kind
        if k == "shift":
            return f"shift({self.base.to_dsl()}, {format_number(self.psi.params[0])})"
        if k == "scale":
            return f"scale({self.base.to_dsl()}, {format_number(self.psi.params[0])})"
        return f"convexmap({self.base.to_dsl()}, {self.psi.to_dsl()})"


# ---------------------------------------------------------------------------
# Mixtures and closed-form convolutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mixture(Distribution):
    """Finite mixture ``sum_i w_i F_i`` with weights summing to one."""

    weights: tuple[float, ...]
    components: tuple[Distribution, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not w:
            raise HTDError("LENGTH_MISMATCH", "weights and components differ in length")
        if any(v < 0 for v in w):
            raise HTDError("PARAM_OUT_OF_RANGE", "weights must be nonnegative")
        if abs(sum(w) - 1.0) > 1e-12:
            raise HTDError("WEIGHT_SUM", f"weights sum to {sum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    def _live(self):
        return [(w, c) for w, c in zip(self.weights, self.components) if w > 0]

    @property
    def lower(self):
        return min(c.lower for _, c in self._live())

    @property
    def upper(self):
        return max(c.upper for _, c in self._live())

    @property
    def has_density(self):
        return all(c.has_density for _, c in self._live())

    def _sf(self, x):
        return sum(w * np.asarray(c.survival(x)) for w, c in self._live())

    def _cdf(self, x):
        return sum(w * np.asarray(c.cdf(x)) for w, c in self._live())

    def _pdf(self, x):
        return sum(w * np.asarray(c.density(x)) for w, c in self._live())

    def log_cdf(self, x):
        x = _arr(x)
        terms = np.stack([np.log(w) + np.asarray(c.log_cdf(x), dtype=float) for w, c in self._live()])
        with np.errstate(invalid="ignore"):
            m = np.max(terms, axis=0)
            safe = np.where(np.isfinite(m), m, 0.0)
            out = safe + np.log(np.sum(np.exp(terms - safe), axis=0))
        return _ret(x, np.where(np.isneginf(m), -np.inf, out))

    def atoms(self):
        return _merge_atoms((a, w * m) for w, c in self._live() for a, m in c.atoms())

    def breakpoints(self):
        return tuple(sorted({b for _, c in self._live() for b in c.breakpoints()}))

    def sample(self, rng, size=None):
        n = 1 if size is None else int(np.prod(size))
        idx = rng.choice(len(self.weights), size=n, p=np.array(self.weights))
        out = np.empty(n)
        for i, comp in enumerate(self.components):
            sel = idx == i
            if np.any(sel):
                out[sel] = comp.sample(rng, int(sel.sum()))
        return float(out[0]) if size is None else out.reshape(size)

    def to_dsl(self):
        body = ", ".join(f"{format_number(w)}:{c.to_dsl()}" for w, c in zip(self.weights, self.components))
        return f"mixture({body})"


def _log1p_minus_x_series(eps: np.ndarray) -> np.ndarray:
    """``eps^2 + 2 * sum_{k>=2} (-1)^k eps^k / k`` for small ``eps``."""
    out = eps * eps
    term = np.ones_like(eps)
    for k in range(2, 14):
        term = term * eps if k > 2 else eps * eps
        out = out + 2.0 * ((-1) ** k) * term / k
    return out


@dataclass(frozen=True)
class SumPareto1(Distribution):
    """Law of ``X1 + X2`` for iid Pareto(1)."""

    has_density = True

    @property
    def lower(self):
        return 2.0

    def _sf(self, x):
        xx = np.clip(x, 2.0, 1e300)
        out = np.where(x <= 2.0, 1.0, 2.0 / xx + 2.0 * np.log1p(xx - 2.0) / xx / xx)
        return np.where(np.isposinf(x), 0.0, out)

    def _cdf(self, x):
        xx = np.clip(x, 2.0, 1e300)
        eps = xx - 2.0
        small = eps < 1e-2
        series = _log1p_minus_x_series(np.where(small, eps, 0.0)) / xx / xx
        direct = 1.0 - 2.0 / xx - 2.0 * np.log1p(eps) / xx / xx
        return np.where(x <= 2.0, 0.0, np.where(small, series, direct))

    def _pdf(self, x):
        xx = np.clip(x, 2.0, 1e300)
        val = 2.0 * (xx - 2.0) / xx / xx / (xx - 1.0) + 4.0 * np.log1p(xx - 2.0) / xx / xx / xx
        return np.where((x > 2.0) & np.isfinite(x), val, 0.0)

    def breakpoints(self):
        return (2.0,)

    def sample(self, rng, size=None):
        p = Pareto(1.0)
        return np.asarray(p.sample(rng, size)) + np.asarray(p.sample(rng, size))

    def to_dsl(self):
        return "sum2(pareto(1))"


_LOMAX_SUM_SERIES = (0.0, 0.0, 1 / 2, -2 / 3, 2 / 3, -3 / 5, 31 / 60, -46 / 105, 13 / 35)


@dataclass(frozen=True)
class SumLomax1(Distribution):
    """Law of ``X1 + X2`` for iid Lomax(1), i.e. ``F(x) = x / (1 + x)``."""

    has_density = True

    def _sf(self, z):
        zz = np.clip(z, 0.0, 1e300)
        out = np.where(z <= 0, 1.0, 2.0 / (zz + 2.0) + 2.0 * np.log1p(zz) / (zz + 2.0) / (zz + 2.0))
        return np.where(np.isposinf(z), 0.0, out)

    def _cdf(self, z):
        zz = np.clip(z, 0.0, 1e300)
        small = zz < 1e-2
        zs = np.where(small, zz, 0.0)
        series = sum(c * zs**k for k, c in enumerate(_LOMAX_SUM_SERIES))
        direct = zz / (zz + 2.0) - 2.0 * np.log1p(zz) / (zz + 2.0) / (zz + 2.0)
        return np.where(z <= 0, 0.0, np.where(small, series, direct))

    def _pdf(self, z):
        zz = np.clip(z, 0.0, 1e300)
        w = zz + 2.0
        val = 2.0 * zz / (zz + 1.0) / w / w + 4.0 * np.log1p(zz) / w / w / w
        return np.where((z >= 0) & np.isfinite(z), val, 0.0)

    def breakpoints(self):
        return (0.0,)

    def sample(self, rng, size=None):
        lx = Lomax(1.0)
        return np.asarray(lx.sample(rng, size)) + np.asarray(lx.sample(rng, size))

    def to_dsl(self):
        return "sum2(lomax(1))"


# ---------------------------------------------------------------------------
# Constructor functions
# ---------------------------------------------------------------------------


def pow_cdf(F: Distribution, beta: float) -> PowCdf:
    return PowCdf(F, beta)


def pow_survival(F: Distribution, beta: float) -> PowSurvival:
    return PowSurvival(F, beta)


def max_of(F: Distribution, G: Distribution) -> MaxOf:
    return MaxOf(F, G)


def excess(F: Distribution, c: float) -> Excess:
    return Excess(F, c)


def excess_random(F: Distribution, Y: Distribution, method: str = "quad", n_mc: int = 100_000, seed: int = 0) -> ExcessRandom:
    return ExcessRandom(F, Y, method=method, n_mc=n_mc, seed=seed)


def condition_exceed(F: Distribution, c: float) -> ConditionExceed:
    return ConditionExceed(F, c)


def truncate_upper(F: Distribution, c: float) -> TruncateUpper:
    return TruncateUpper(F, c)


def convex_map(F: Distribution, psi: ConvexMap) -> ConvexMapped:
    return ConvexMapped(F, psi)


def mixture(weights: Sequence[float], components: Sequence[Distribution]) -> Mixture:
    return Mixture(tuple(weights), tuple(components))


def sum_iid_closed(F: Distribution | str, n: int = 2) -> Distribution:
    """Closed-form law of ``X1 + X2`` for iid Pareto(1) or Lomax(1) summands."""
    if n != 2:
        raise HTDError("UNSUPPORTED_CASE", "only n = 2 has a closed form")
    if isinstance(F, str):
        key = F.upper()
        if key == "PARETO1":
            return SumPareto1()
        if key == "LOMAX1":
            return SumLomax1()
        raise HTDError("UNSUPPORTED_CASE", f"no closed form for {F!r}")
    if isinstance(F, Pareto) and F.alpha == 1.0:
        return SumPareto1()
    if isinstance(F, Lomax) and F.alpha == 1.0:
        return SumLomax1()
    raise HTDError("UNSUPPORTED_CASE", f"no closed form for the sum of two {F.to_dsl()}")
