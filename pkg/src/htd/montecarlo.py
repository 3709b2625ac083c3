"""Seeded Monte Carlo plumbing shared by the dominance and compound modules.

Every random draw comes from a stream indexed by ``(seed, *keys)``, so a
given component and batch always sees the same numbers regardless of how
work is split.  Comparisons that reuse a stream get common random numbers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import HTDError

DEFAULT_BATCH = 250_000


def default_seed() -> int:
    """Seed from ``HTD_SEED`` if set, else 0."""
    raw = os.environ.get("HTD_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise HTDError("PARAM_OUT_OF_RANGE", f"HTD_SEED must be an integer, got {raw!r}") from exc


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream labelled ``keys`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


@dataclass(frozen=True)
class MCEstimate:
    """Mean of ``n`` draws with its standard error."""

    value: float
    n: int
    std_error: float
    seed: int

    @property
    def ci95(self) -> tuple[float, float]:
        h = 1.96 * self.std_error
        return (self.value - h, self.value + h)

    def to_dict(self) -> dict:
        lo, hi = self.ci95
        return {"value": self.value, "n": self.n, "std_error": self.std_error, "ci95": [lo, hi], "seed": self.seed}

    @classmethod
    def from_indicators(cls, hits: int, n: int, seed: int) -> "MCEstimate":
        v = hits / n
        return cls(v, n, float(np.sqrt(max(v * (1.0 - v), 0.0) / n)), seed)


@dataclass(frozen=True)
class MC:
    """Monte Carlo method selector: sample size, base seed and batch size."""

    n: int = 1_000_000
    seed: int | None = None
    batch: int = DEFAULT_BATCH

    def __post_init__(self):
        if int(self.n) < 2:
            raise HTDError("PARAM_OUT_OF_RANGE", "MC needs at least two draws")
        object.__setattr__(self, "n", int(self.n))
        if self.seed is None:
            object.__setattr__(self, "seed", default_seed())

    def batches(self):
        """Yield ``(batch_index, size)`` pairs covering ``n`` draws."""
        done, k = 0, 0
        while done < self.n:
            size = min(self.batch, self.n - done)
            yield k, size
            done += size
            k += 1


def component_draws(dist, seed: int, component: int, batch: int, size: int) -> np.ndarray:
    """Draws of one component for one batch from its dedicated stream."""
    return np.asarray(dist.sample(stream(seed, component, batch), size), dtype=float)


def survival_counts(
    sampler: Callable[[int, int], np.ndarray],
    x: np.ndarray,
    mc: MC,
) -> np.ndarray:
    """Count ``sample > x_j`` for every threshold, accumulated over batches.

    ``sampler(batch_index, size)`` returns an array of shape ``(size,)``.
    """
    x = np.asarray(x, dtype=float)
    counts = np.zeros(x.shape, dtype=np.int64)
    for b, size in mc.batches():
        srt = np.sort(np.asarray(sampler(b, size), dtype=float))
        counts += size - np.searchsorted(srt, x, side="right")
    return counts


def paired_difference(
    sampler: Callable[[int, int], np.ndarray],
    x: np.ndarray,
    mc: MC,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Survival of two statistics computed on shared draws.

    ``sampler`` returns shape ``(size, 2)``.  Returns ``(p_a, p_b, se_pair,
    se_diff)`` where ``se_pair`` has shape ``(len(x), 2)`` and ``se_diff`` is
    the standard error of ``p_a - p_b`` including the covariance term.
    """
    x = np.asarray(x, dtype=float)
    n_a = np.zeros(x.size)
    n_b = np.zeros(x.size)
    n_ab = np.zeros(x.size)
    for b, size in mc.batches():
        s = np.asarray(sampler(b, size), dtype=float)
        for lo in range(0, x.size, 8):
            xs = x[lo : lo + 8]
            a = s[:, 0][:, None] > xs[None, :]
            c = s[:, 1][:, None] > xs[None, :]
            n_a[lo : lo + 8] += a.sum(axis=0)
            n_b[lo : lo + 8] += c.sum(axis=0)
            n_ab[lo : lo + 8] += (a & c).sum(axis=0)
    n = mc.n
    pa, pb, pab = n_a / n, n_b / n, n_ab / n
    var_diff = (pa + pb - 2 * pab) - (pa - pb) ** 2
    se_diff = np.sqrt(np.maximum(var_diff, 0.0) / n)
    se_pair = np.stack([np.sqrt(pa * (1 - pa) / n), np.sqrt(pb * (1 - pb) / n)], axis=-1)
    return pa, pb, se_pair, se_diff
