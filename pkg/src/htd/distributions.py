"""Distributions of nonnegative heavy-tailed losses.

Every law is an immutable object with vectorised ``cdf``, ``survival``,
``quantile`` and ``isf`` (inverse survival) methods.  The survival function is
always computed from its own closed form rather than as ``1 - cdf`` so that
tail probabilities keep full relative precision.

Two derived functions drive the class certifiers in :mod:`htd.membership`:

* ``eta(t) = survival(1 / t)``
* ``lambda_fn(t) = -log cdf(1 / t)``  (``+inf`` where the cdf vanishes)

Quantiles are left-continuous, ``quantile(u) = inf{x : F(x) >= u}``, with
the convention ``quantile(0) = inf{x : F(x) > 0}`` (the essential infimum).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import HTDError

_BISECT_RTOL = 4 * np.finfo(float).eps


def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _ret(x, out: np.ndarray):
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(np.asarray(out).reshape(()))
    return out


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise HTDError("NON_POSITIVE_PARAM", f"{name} must be a positive finite number, got {value}")
    return value


def format_number(x: float) -> str:
    """Shortest round-tripping text for a float, integers without a point."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


class Distribution:
    """Base class for a univariate law.

    Subclasses override ``_sf`` (and usually ``_isf``); everything else has a
    generic fallback.  Inputs may be scalars or arrays; scalars give floats.
    """

    #: exact lower end of the support (the essential infimum)
    lower: float = 0.0
    #: upper end of the support
    upper: float = np.inf

    # -- primitives ---------------------------------------------------------
    def _sf(self, x: np.ndarray) -> np.ndarray:
        return 1.0 - self._cdf(x)

    def _cdf(self, x: np.ndarray) -> np.ndarray:
        return 1.0 - self._sf(x)

    def _isf(self, s: np.ndarray) -> np.ndarray:
        return _bisect_isf(self, s)

    def _ppf(self, u: np.ndarray) -> np.ndarray:
        # Families with a closed form override this to stay accurate for tiny u.
        return self._isf(1.0 - u)

    def _pdf(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover - overridden
        raise HTDError("NO_DENSITY", f"{self!r} has no density")

    has_density: bool = False

    # -- public evaluation --------------------------------------------------
    def cdf(self, x):
        x = _arr(x)
        return _ret(x, np.clip(self._cdf(x), 0.0, 1.0))

    def survival(self, x):
        x = _arr(x)
        return _ret(x, np.clip(self._sf(x), 0.0, 1.0))

    def log_cdf(self, x):
        """``log F(x)`` computed from whichever of F and 1-F is more accurate."""
        x = _arr(x)
        sf = np.clip(self._sf(x), 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(sf < 0.5, np.log1p(-sf), np.log(np.clip(self._cdf(x), 0.0, 1.0)))
        return _ret(x, out)

    def isf(self, s):
        """Inverse survival ``inf{x : survival(x) <= s}`` for ``s`` in [0, 1]."""
        s = _arr(s)
        if np.any((s < 0) | (s > 1)) or np.any(np.isnan(s)):
            raise HTDError("PARAM_OUT_OF_RANGE", "probabilities must lie in [0, 1]")
        out = np.empty(s.shape, dtype=float)
        top = s >= 1.0
        bottom = s <= 0.0
        mid = ~(top | bottom)
        out[top] = self.lower
        out[bottom] = self.upper
        if np.any(mid):
            out[mid] = self._isf(s[mid])
        return _ret(s, out)

    def quantile(self, u):
        """Left-continuous quantile; ``quantile(0)`` is the lower support bound."""
        u = _arr(u)
        if np.any((u < 0) | (u > 1)) or np.any(np.isnan(u)):
            raise HTDError("PARAM_OUT_OF_RANGE", "probabilities must lie in [0, 1]")
        out = np.empty(u.shape, dtype=float)
        bottom = u <= 0.0
        top = u >= 1.0
        mid = ~(top | bottom)
        out[bottom] = self.lower
        out[top] = self.upper
        if np.any(mid):
            low = mid & (u < 0.5)
            high = mid & ~low
            if np.any(low):
                out[low] = self._ppf(u[low])
            if np.any(high):
                out[high] = self._isf(1.0 - u[high])
        return _ret(u, out)

    def density(self, x):
        if not self.has_density:
            raise HTDError("NO_DENSITY", f"{self.to_dsl()} has no density")
        x = _arr(x)
        return _ret(x, self._pdf(x))

    def support(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    def atoms(self) -> tuple[tuple[float, float], ...]:
        """Point masses as ``(location, mass)`` pairs."""
        return ()

    def breakpoints(self) -> tuple[float, ...]:
        """Locations where the cdf is not smooth (kinks, jumps, support ends)."""
        return (self.lower,) if np.isfinite(self.lower) else ()

    def survival_se(self, x) -> np.ndarray | None:
        """Standard error of ``survival`` for Monte Carlo backed laws, else None."""
        return None

    @property
    def is_degenerate(self) -> bool:
        return bool(self.lower == self.upper)

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-transform sample driven by the supplied generator."""
        v = 1.0 - rng.random(size)
        return self.isf(v)

    # -- inverse-domain views -----------------------------------------------
    def eta(self, t):
        """``eta(t) = survival(1/t)`` with ``eta(0) = 0``."""
        t = _arr(t)
        with np.errstate(divide="ignore"):
            y = np.where(t > 0, 1.0 / np.where(t > 0, t, 1.0), np.inf)
        out = np.where(t > 0, np.clip(self._sf(y), 0.0, 1.0), 0.0)
        return _ret(t, out)

    def lambda_fn(self, t):
        """``Lambda(t) = -log cdf(1/t)``; ``+inf`` where the cdf is zero."""
        t = _arr(t)
        with np.errstate(divide="ignore"):
            y = np.where(t > 0, 1.0 / np.where(t > 0, t, 1.0), np.inf)
        out = -np.asarray(self.log_cdf(y), dtype=float)
        out = np.where(t > 0, out, 0.0)
        return _ret(t, out + 0.0)

    def eta_breakpoints(self) -> tuple[float, ...]:
        return tuple(sorted({1.0 / b for b in self.breakpoints() if b > 0 and np.isfinite(b)}))

    def to_dsl(self) -> str:
        return repr(self)


def _bisect_isf(dist: Distribution, s: np.ndarray) -> np.ndarray:
    """Smallest x with ``survival(x) <= s`` by bracketing and bisection."""
    s = np.asarray(s, dtype=float)
    flat = s.ravel()
    out = np.empty(flat.size)
    lower, upper = dist.lower, dist.upper
    if np.isfinite(lower):
        at_lower = dist._sf(np.full(flat.size, lower)) <= flat
    else:
        at_lower = np.zeros(flat.size, dtype=bool)
    out[at_lower] = lower
    idx = np.flatnonzero(~at_lower)
    if idx.size == 0:
        return out.reshape(s.shape)
    target = flat[idx]
    if np.isfinite(lower):
        lo = np.full(idx.size, lower)
    else:
        lo = np.full(idx.size, -1.0)
        for _ in range(1100):
            need = dist._sf(lo) <= target
            if not np.any(need):
                break
            lo[need] *= 2.0
    step = np.maximum(1.0, np.abs(lo))
    hi = lo + step
    if np.isfinite(upper):
        hi = np.minimum(hi, upper)
    for _ in range(1100):
        need = np.isfinite(hi) & (dist._sf(hi) > target)
        if not np.any(need):
            break
        step[need] *= 2.0
        hi[need] = lo[need] + step[need]
        if np.isfinite(upper):
            hi = np.minimum(hi, upper)
        hi[hi > 1e300] = np.inf
    res = np.full(idx.size, np.inf)
    act = np.isfinite(hi)
    lo_a, hi_a, tg = lo[act], hi[act], target[act]
    for _ in range(2200):
        live = (hi_a - lo_a) > _BISECT_RTOL * np.maximum(1.0, np.abs(hi_a))
        if not np.any(live):
            break
        l, h = lo_a[live], hi_a[live]
        geo = (l > 0) & (h > 4.0 * l)
        mid = np.where(geo, np.sqrt(np.abs(l * h)), 0.5 * (l + h))
        stuck = (mid <= l) | (mid >= h)
        go_left = dist._sf(mid) <= tg[live]
        new_l = np.where(stuck, h, np.where(go_left, l, mid))
        new_h = np.where(go_left | stuck, np.where(stuck, h, mid), h)
        lo_a[live], hi_a[live] = new_l, new_h
    res[act] = hi_a
    out[idx] = res
    return out.reshape(s.shape)


# ---------------------------------------------------------------------------
# Closed-form families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pareto(Distribution):
    """Pareto(alpha) on [1, inf): survival ``x**-alpha``."""

    alpha: float
    has_density = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    @property
    def lower(self) -> float:
        return 1.0

    def _sf(self, x):
        return np.where(x <= 1.0, 1.0, np.maximum(x, 1.0) ** -self.alpha)

    def _cdf(self, x):
        return np.where(x <= 1.0, 0.0, -np.expm1(-self.alpha * np.log(np.maximum(x, 1.0))))

    def _isf(self, s):
        return s ** (-1.0 / self.alpha)

    def _ppf(self, u):
        return np.exp(-np.log1p(-u) / self.alpha)

    def _pdf(self, x):
        return np.where(x >= 1.0, self.alpha * np.maximum(x, 1.0) ** (-self.alpha - 1.0), 0.0)

    def eta(self, t):
        t = _arr(t)
        return _ret(t, np.minimum(np.maximum(t, 0.0), 1.0) ** self.alpha)

    def lambda_fn(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore"):
            out = np.where(t < 1.0, -np.log1p(-np.minimum(np.maximum(t, 0.0), 1.0) ** self.alpha), np.inf)
        return _ret(t, out)

    def breakpoints(self):
        return (1.0,)

    def to_dsl(self):
        return f"pareto({format_number(self.alpha)})"


@dataclass(frozen=True)
class Frechet(Distribution):
    """Frechet(alpha): cdf ``exp(-x**-alpha)`` on (0, inf)."""

    alpha: float
    has_density = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            z = np.where(x > 0, np.maximum(x, 1e-300) ** -self.alpha, np.inf)
        return np.where(x > 0, -np.expm1(-z), 1.0)

    def _cdf(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            z = np.maximum(x, 1e-300) ** -self.alpha
        return np.where(x > 0, np.exp(-z), 0.0)

    def _isf(self, s):
        return (-np.log1p(-s)) ** (-1.0 / self.alpha)

    def _ppf(self, u):
        with np.errstate(divide="ignore"):
            return (-np.log(u)) ** (-1.0 / self.alpha)

    def _pdf(self, x):
        xp = np.maximum(x, 1e-300)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            z = xp ** -self.alpha
            val = self.alpha * z / xp * np.exp(-z)
        return np.where(x > 0, np.nan_to_num(val, nan=0.0, posinf=0.0), 0.0)

    def eta(self, t):
        t = _arr(t)
        return _ret(t, -np.expm1(-np.maximum(t, 0.0) ** self.alpha))

    def lambda_fn(self, t):
        t = _arr(t)
        return _ret(t, np.maximum(t, 0.0) ** self.alpha)

    def breakpoints(self):
        return ()

    def to_dsl(self):
        return f"frechet({format_number(self.alpha)})"


@dataclass(frozen=True)
class Lomax(Distribution):
    """Lomax(alpha): survival ``(1 + x)**-alpha`` on [0, inf)."""

    alpha: float
    has_density = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    def _sf(self, x):
        return np.where(x <= 0, 1.0, (1.0 + np.maximum(x, 0.0)) ** -self.alpha)

    def _cdf(self, x):
        return np.where(x <= 0, 0.0, -np.expm1(-self.alpha * np.log1p(np.maximum(x, 0.0))))

    def _isf(self, s):
        return np.expm1(-np.log(s) / self.alpha)

    def _ppf(self, u):
        return np.expm1(-np.log1p(-u) / self.alpha)

    def _pdf(self, x):
        return np.where(x >= 0, self.alpha * (1.0 + np.maximum(x, 0.0)) ** (-self.alpha - 1.0), 0.0)

    def eta(self, t):
        t = np.maximum(_arr(t), 0.0)
        return _ret(t, (t / (1.0 + t)) ** self.alpha)

    def lambda_fn(self, t):
        t = np.maximum(_arr(t), 0.0)
        with np.errstate(divide="ignore"):
            # F(1/t) = 1 - (t/(1+t))^a = 1 - exp(-a log1p(1/t))
            out = -np.log(-np.expm1(-self.alpha * np.log1p(1.0 / np.where(t > 0, t, 1.0))))
        return _ret(t, np.where(t > 0, out, 0.0))

    def breakpoints(self):
        return (0.0,)

    def to_dsl(self):
        return f"lomax({format_number(self.alpha)})"


@dataclass(frozen=True)
class LogCauchy(Distribution):
    """Log-Cauchy: cdf ``arctan(log x)/pi + 1/2`` on (0, inf)."""

    has_density = True

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            L = np.log(np.maximum(x, 0.0))
        return np.where(x <= 0, 1.0, _arctan_half_upper(L))

    def _cdf(self, x):
        with np.errstate(divide="ignore"):
            L = np.log(np.maximum(x, 0.0))
        return np.where(x <= 0, 0.0, _arctan_half_upper(-L))

    def _isf(self, s):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(1.0 / np.tan(np.pi * s))

    def _ppf(self, u):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(-1.0 / np.tan(np.pi * u))

    def _pdf(self, x):
        xp = np.maximum(x, 1e-300)
        L = np.log(xp)
        return np.where(x > 0, 1.0 / (np.pi * xp * (1.0 + L * L)), 0.0)

    def breakpoints(self):
        return ()

    def to_dsl(self):
        return "logcauchy()"


def _arctan_half_upper(L: np.ndarray) -> np.ndarray:
    """``1/2 - arctan(L)/pi`` without cancellation for large positive L."""
    L = np.asarray(L, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.arctan(1.0 / np.where(L > 0, L, 1.0)) / np.pi
    return np.where(L > 0, big, 0.5 + np.arctan(-L) / np.pi)


@dataclass(frozen=True)
class CauchyStd(Distribution):
    """Standard Cauchy on the real line (reference law for convex ordering)."""

    has_density = True

    @property
    def lower(self) -> float:
        return -np.inf

    def _sf(self, x):
        return _arctan_half_upper(x)

    def _cdf(self, x):
        return _arctan_half_upper(-x)

    def _isf(self, s):
        with np.errstate(divide="ignore"):
            return 1.0 / np.tan(np.pi * s)

    def _ppf(self, u):
        with np.errstate(divide="ignore"):
            return -1.0 / np.tan(np.pi * u)

    def _pdf(self, x):
        return 1.0 / (np.pi * (1.0 + x * x))

    def breakpoints(self):
        return ()

    def to_dsl(self):
        return "cauchy()"


@dataclass(frozen=True)
class Uniform(Distribution):
    """Uniform law on [a, b]; an auxiliary law for random thresholds."""

    a: float = 0.0
    b: float = 1.0
    has_density = True

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.b > self.a):
            raise HTDError("PARAM_OUT_OF_RANGE", "uniform needs finite a < b")

    @property
    def lower(self):
        return float(self.a)

    @property
    def upper(self):
        return float(self.b)

    def _sf(self, x):
        return np.clip((self.b - x) / (self.b - self.a), 0.0, 1.0)

    def _cdf(self, x):
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def _isf(self, s):
        return self.b - s * (self.b - self.a)

    def _pdf(self, x):
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def breakpoints(self):
        return (float(self.a), float(self.b))

    def to_dsl(self):
        return f"uniform({format_number(self.a)}, {format_number(self.b)})"


@dataclass(frozen=True)
class PointMass(Distribution):
    """Degenerate law at ``c``; auxiliary only, rejected by the certifiers."""

    c: float = 0.0

    @property
    def lower(self):
        return float(self.c)

    @property
    def upper(self):
        return float(self.c)

    def _sf(self, x):
        return np.where(x < self.c, 1.0, 0.0)

    def _cdf(self, x):
        return np.where(x < self.c, 0.0, 1.0)

    def _isf(self, s):
        return np.full(np.shape(s), float(self.c))

    def atoms(self):
        return ((float(self.c), 1.0),)

    def breakpoints(self):
        return (float(self.c),)

    def sample(self, rng, size=None):
        u = rng.random(size)  # keep stream consumption uniform across laws
        return np.full_like(u, float(self.c)) if size is not None else float(self.c)

    def to_dsl(self):
        return f"point({format_number(self.c)})"


# ---------------------------------------------------------------------------
# Piecewise-linear eta encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseEta(Distribution):
    """Law whose ``eta(t) = survival(1/t)`` is the linear interpolant of ``points``.

    ``points`` are ``(t, eta)`` pairs starting at ``(0, 0)`` with strictly
    increasing ``t``, nondecreasing ``eta`` and a final value of 1; beyond the
    last point ``eta`` stays at 1.
    """

    points: tuple[tuple[float, float], ...]
    label: str | None = None
    has_density = True

    def __post_init__(self):
        pts = tuple((float(t), float(e)) for t, e in self.points)
        if len(pts) < 2:
            raise HTDError("INVALID_ETA", "need at least two points")
        ts = np.array([p[0] for p in pts])
        es = np.array([p[1] for p in pts])
        if ts[0] != 0.0 or es[0] != 0.0:
            raise HTDError("INVALID_ETA", "eta must start at (0, 0)")
        if np.any(np.diff(ts) <= 0):
            raise HTDError("INVALID_ETA", "t values must be strictly increasing")
        if np.any(np.diff(es) < 0) or np.any(es < 0) or np.any(es > 1):
            raise HTDError("INVALID_ETA", "eta values must be nondecreasing within [0, 1]")
        if es[-1] != 1.0:
            raise HTDError("INVALID_ETA", "eta must end at 1")
        object.__setattr__(self, "points", pts)

    @property
    def _ts(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def _es(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def lower(self) -> float:
        ts, es = self._ts, self._es
        t_one = ts[np.argmax(es >= 1.0)]
        return float(1.0 / t_one)

    @property
    def upper(self) -> float:
        ts, es = self._ts, self._es
        zero = ts[es == 0.0]
        t_zero = zero.max()
        return float(np.inf if t_zero == 0.0 else 1.0 / t_zero)

    def eta(self, t):
        t = _arr(t)
        return _ret(t, np.interp(np.maximum(t, 0.0), self._ts, self._es, right=1.0))

    def _sf(self, y):
        with np.errstate(divide="ignore"):
            t = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
        return np.where(y <= 0, 1.0, np.interp(t, self._ts, self._es, right=1.0))

    def _isf(self, s):
        ts, es = self._ts, self._es
        j = np.searchsorted(es, s, side="right") - 1
        j = np.clip(j, 0, len(ts) - 2)
        e0, e1 = es[j], es[j + 1]
        t0, t1 = ts[j], ts[j + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            tstar = t0 + (s - e0) * (t1 - t0) / (e1 - e0)
            return np.where(tstar > 0, 1.0 / tstar, np.inf)

    def _pdf(self, y):
        ts, es = self._ts, self._es
        slopes = np.diff(es) / np.diff(ts)
        with np.errstate(divide="ignore"):
            t = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
        k = np.searchsorted(ts, t, side="right") - 1
        inside = (k >= 0) & (k < len(slopes))
        sl = np.where(inside, slopes[np.clip(k, 0, len(slopes) - 1)], 0.0)
        return np.where(y > 0, sl * t * t, 0.0)

    def breakpoints(self):
        return tuple(sorted({1.0 / t for t in self._ts if t > 0}))

    def eta_breakpoints(self):
        return tuple(float(t) for t in self._ts if t > 0)

    def to_dsl(self):
        if self.label is not None:
            return f"paper({self.label})"
        body = ", ".join(f"({format_number(t)}, {format_number(e)})" for t, e in self.points)
        return f"piecewise_eta({body})"


# ---------------------------------------------------------------------------
# Laws given through eta with an analytic derivative
# ---------------------------------------------------------------------------


class _EtaDefined(Distribution):
    """Law specified by a smooth-on-pieces ``eta`` with derivative ``deta``."""

    has_density = True

    def _eta(self, t: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def _deta(self, t: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def eta(self, t):
        t = _arr(t)
        return _ret(t, np.where(t > 0, self._eta(np.maximum(t, 0.0)), 0.0))

    def _sf(self, y):
        with np.errstate(divide="ignore"):
            t = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
        return np.where(y <= 0, 1.0, self._eta(t))

    def _pdf(self, y):
        with np.errstate(divide="ignore"):
            t = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
            val = np.where(np.isfinite(t), self._deta(np.where(np.isfinite(t), t, 1.0)) * t * t, 0.0)
        return np.where(y > 0, val, 0.0)


@dataclass(frozen=True)
class CubicEta(_EtaDefined):
    """``eta(t) = 3t^3 - 6t^2 + 4t`` on (0, 1]: in V but not in H."""

    def _eta(self, t):
        c = np.minimum(t, 1.0)
        return np.where(t >= 1.0, 1.0, 3 * c**3 - 6 * c**2 + 4 * c)

    def _deta(self, t):
        return np.where(t < 1.0, (3 * t - 2.0) ** 2, 0.0)

    @property
    def lower(self):
        return 1.0

    def breakpoints(self):
        return (1.0,)

    def to_dsl(self):
        return "paper(EX_V_NOT_H)"


@dataclass(frozen=True)
class HazardPairF(_EtaDefined):
    """Survival ``(11/5)/(x+1)`` on [6/5, inf)."""

    C = 11.0 / 5.0

    def _eta(self, t):
        c = np.minimum(t, 5.0 / 6.0)
        return np.where(t >= 5.0 / 6.0, 1.0, np.minimum(self.C * c / (1.0 + c), 1.0))

    def _deta(self, t):
        return np.where(t < 5.0 / 6.0, self.C / (1.0 + t) ** 2, 0.0)

    @property
    def lower(self):
        return 6.0 / 5.0

    def breakpoints(self):
        return (6.0 / 5.0,)

    def to_dsl(self):
        return "paper(EX_HR_PAIR_F)"


@dataclass(frozen=True)
class HazardPairG(_EtaDefined):
    """Survival ``(72/65)(3(1/x-1)^2+1)/x`` on [6/5, inf)."""

    C = 72.0 / 65.0

    def _eta(self, t):
        c = np.minimum(t, 5.0 / 6.0)
        return np.where(t >= 5.0 / 6.0, 1.0, np.minimum(self.C * (3 * (c - 1) ** 2 + 1) * c, 1.0))

    def _deta(self, t):
        return np.where(t < 5.0 / 6.0, self.C * (3 * t - 2) ** 2, 0.0)

    @property
    def lower(self):
        return 6.0 / 5.0

    def breakpoints(self):
        return (6.0 / 5.0,)

    def to_dsl(self):
        return "paper(EX_HR_PAIR_G)"


@dataclass(frozen=True)
class TruncatedFrechet(_EtaDefined):
    """Frechet(alpha) conditioned on exceeding 1.

    The density is ``c x^(-alpha-1) exp(-x^-alpha)`` on (1, inf) with
    ``c = alpha / (1 - e^-1)``.
    """

    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    @property
    def normalizing_constant(self) -> float:
        return self.alpha / -np.expm1(-1.0)

    def _eta(self, t):
        c = np.minimum(t, 1.0)
        return np.where(t >= 1.0, 1.0, -np.expm1(-(c**self.alpha)) / -np.expm1(-1.0))

    def _deta(self, t):
        c = np.minimum(t, 1.0)
        return np.where(t < 1.0, self.alpha * c ** (self.alpha - 1) * np.exp(-(c**self.alpha)) / -np.expm1(-1.0), 0.0)

    @property
    def lower(self):
        return 1.0

    def breakpoints(self):
        return (1.0,)

    def to_dsl(self):
        return f"paper(TRUNC_FRECHET, {format_number(self.alpha)})"


@dataclass(frozen=True)
class SqrtLambda(_EtaDefined):
    """Law with ``Lambda(t) = sqrt(t)`` on [0, 1] and ``sqrt(t - 0.99) + 0.9`` beyond."""

    @staticmethod
    def _lam(t):
        t = np.maximum(t, 0.0)
        return np.where(t <= 1.0, np.sqrt(np.minimum(t, 1.0)), np.sqrt(np.maximum(t - 0.99, 0.0)) + 0.9)

    @staticmethod
    def _dlam(t):
        with np.errstate(divide="ignore"):
            return np.where(t <= 1.0, 0.5 / np.sqrt(np.minimum(t, 1.0)), 0.5 / np.sqrt(np.maximum(t - 0.99, 1e-300)))

    def _eta(self, t):
        return -np.expm1(-self._lam(t))

    def _deta(self, t):
        return np.exp(-self._lam(t)) * self._dlam(t)

    def lambda_fn(self, t):
        t = _arr(t)
        return _ret(t, self._lam(t))

    def _cdf(self, y):
        with np.errstate(divide="ignore"):
            t = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
        return np.where(y <= 0, 0.0, np.exp(-self._lam(t)))

    @property
    def lower(self):
        return 0.0

    def breakpoints(self):
        return (0.0, 1.0)

    def to_dsl(self):
        return "paper(SQRT_LAMBDA)"


@dataclass(frozen=True)
class MinHazard(_EtaDefined):
    """Survival ``min(2/(1+x), 1)`` (essential infimum 1)."""

    def _eta(self, t):
        return np.minimum(2 * t / (1 + t), 1.0)

    def _deta(self, t):
        return np.where(t < 1.0, 2.0 / (1 + t) ** 2, 0.0)

    @property
    def lower(self):
        return 1.0

    def breakpoints(self):
        return (1.0,)

    def to_dsl(self):
        return "paper(G_MIN)"


@dataclass(frozen=True)
class ScaledLomax(_EtaDefined):
    """``F_n(x) = 1 - 1/(n x + 1)``; degenerates to a point mass as n grows."""

    n: float = 1.0

    def __post_init__(self):
        n = float(self.n)
        if not np.isfinite(n):
            raise HTDError("DEGENERATE", "the n -> infinity limit is the point mass at 0")
        object.__setattr__(self, "n", _positive("n", n))

    def _eta(self, t):
        return t / (self.n + t)

    def _deta(self, t):
        return self.n / (self.n + t) ** 2

    def _isf(self, s):
        return (1.0 / s - 1.0) / self.n

    def lambda_fn(self, t):
        t = np.maximum(_arr(t), 0.0)
        return _ret(t, np.log1p(t / self.n))

    @property
    def lower(self):
        return 0.0

    def breakpoints(self):
        return (0.0,)

    def to_dsl(self):
        return f"paper(FN_FAMILY, {format_number(self.n)})"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def make_pareto(alpha: float) -> Pareto:
    return Pareto(alpha)


def make_frechet(alpha: float) -> Frechet:
    return Frechet(alpha)


def make_lomax(alpha: float) -> Lomax:
    return Lomax(alpha)


def make_logcauchy() -> LogCauchy:
    return LogCauchy()


def make_cauchy_std() -> CauchyStd:
    return CauchyStd()


def make_uniform(a: float = 0.0, b: float = 1.0) -> Uniform:
    return Uniform(a, b)


def make_point_mass(c: float) -> PointMass:
    return PointMass(float(c))


def make_piecewise_eta(points: Sequence[tuple[float, float]]) -> PiecewiseEta:
    return PiecewiseEta(tuple(tuple(p) for p in points))


SD_COUNTER_POINTS = ((0.0, 0.0), (1.0 / 3.0, 0.5), (0.5, 0.5), (1.0, 1.0))

EXAMPLE_NAMES = (
    "EX_V_NOT_H",
    "EX_HR_PAIR_F",
    "EX_HR_PAIR_G",
    "TRUNC_FRECHET",
    "SQRT_LAMBDA",
    "FN_FAMILY",
    "EX_SD_COUNTER",
    "G_MIN",
)


def make_example(name: str, param: float | None = None) -> Distribution:
    """Named counterexample laws.

    ``TRUNC_FRECHET`` takes the tail index (default 1) and ``FN_FAMILY`` the
    scale ``n`` (default 1); the other names take no parameter.
    """
    key = name.upper()
    if key not in EXAMPLE_NAMES:
        raise HTDError("UNKNOWN_NAME", f"unknown example {name!r}")
    if param is not None and key not in ("TRUNC_FRECHET", "FN_FAMILY"):
        raise HTDError("ARITY", f"{key} takes no parameter")
    if key == "EX_V_NOT_H":
        return CubicEta()
    if key == "EX_HR_PAIR_F":
        return HazardPairF()
    if key == "EX_HR_PAIR_G":
        return HazardPairG()
    if key == "TRUNC_FRECHET":
        return TruncatedFrechet(1.0 if param is None else param)
    if key == "SQRT_LAMBDA":
        return SqrtLambda()
    if key == "FN_FAMILY":
        return ScaledLomax(1.0 if param is None else param)
    if key == "EX_SD_COUNTER":
        return PiecewiseEta(SD_COUNTER_POINTS, label="EX_SD_COUNTER")
    return MinHazard()
