"""Majorization of weight vectors and T-transform chains.

``a`` is majorized by ``b`` (``a ⪯ b``, ``b`` more spread) when both have the
same total and every partial sum of the ``k`` smallest entries of ``a`` is at
least the corresponding partial sum of ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import HTDError
from .membership import CheckReport, Verdict, Witness

SLACK = 1e-10
NORMALIZE_TOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights; ``normalized`` asserts that they sum to one."""

    w: tuple[float, ...]
    normalized: bool = False

    def __post_init__(self):
        w = tuple(float(v) for v in np.atleast_1d(np.asarray(self.w, dtype=float)))
        if not w:
            raise HTDError("BAD_WEIGHTS", "a weight vector needs at least one entry")
        if any(not np.isfinite(v) or v < 0 for v in w):
            raise HTDError("BAD_WEIGHTS", f"weights must be finite and nonnegative, got {w}")
        if self.normalized and abs(sum(w) - 1.0) > NORMALIZE_TOL:
            raise HTDError("WEIGHT_SUM", f"normalized weights sum to {sum(w)!r}")
        object.__setattr__(self, "w", w)

    @classmethod
    def parse(cls, text: str, normalized: bool = False) -> "WeightVector":
        """Parse ``"2/5,3/5"`` or ``"0.4, 0.6"``."""
        try:
            vals = [float(Fraction(p.strip())) for p in text.split(",") if p.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise HTDError("BAD_WEIGHTS", f"cannot parse weights {text!r}") from exc
        return cls(tuple(vals), normalized)

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def total(self) -> float:
        return float(sum(self.w))

    def array(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)

    def sorted(self) -> np.ndarray:
        return np.sort(self.array())

    def __len__(self) -> int:
        return len(self.w)

    def __iter__(self):
        return iter(self.w)

    def __getitem__(self, i):
        return self.w[i]


def _wv(v) -> WeightVector:
    return v if isinstance(v, WeightVector) else WeightVector(tuple(v))


class Relation(str, Enum):
    A_MAJ_B = "A_MAJ_B"  # a is more spread: b ⪯ a
    B_MAJ_A = "B_MAJ_A"  # b is more spread: a ⪯ b
    EQUAL = "EQUAL"
    INCOMPARABLE = "INCOMPARABLE"


def majorizes(a, b, slack: float = SLACK) -> Relation:
    """Compare two vectors in the majorization order."""
    a, b = _wv(a), _wv(b)
    if a.n != b.n:
        raise HTDError("LENGTH_MISMATCH", f"lengths {a.n} and {b.n} differ")
    if abs(a.total - b.total) > slack:
        return Relation.INCOMPARABLE
    pa = np.cumsum(a.sorted())[:-1]
    pb = np.cumsum(b.sorted())[:-1]
    a_less = np.all(pa >= pb - slack)  # a ⪯ b
    b_less = np.all(pb >= pa - slack)  # b ⪯ a
    if a_less and b_less:
        return Relation.EQUAL
    if a_less:
        return Relation.B_MAJ_A
    if b_less:
        return Relation.A_MAJ_B
    return Relation.INCOMPARABLE


def is_majorized_by(a, b, slack: float = SLACK) -> bool:
    """True when ``a ⪯ b``."""
    return majorizes(a, b, slack) in (Relation.B_MAJ_A, Relation.EQUAL)


def _close(u: float, v: float) -> bool:
    return abs(u - v) <= 1e-15 * max(1.0, abs(u), abs(v))


def t_transform_chain(frm, to) -> list[WeightVector]:
    """Chain ``frm = v0 ⪯ v1 ⪯ ... ⪯ vm = to`` of two-coordinate moves.

    When ``frm`` and ``to`` are similarly ordered the chain has at most
    ``n - 1`` links, each moving mass between two coordinates so that one
    more coordinate matches ``to`` (largest-gap construction).  Otherwise
    the chain first rearranges ``frm`` into the rank order of ``to`` by
    transpositions, which are links of relation ``EQUAL``; the total is then
    at most ``2 (n - 1)``.
    """
    frm, to = _wv(frm), _wv(to)
    if frm.n != to.n:
        raise HTDError("LENGTH_MISMATCH", f"lengths {frm.n} and {to.n} differ")
    if not is_majorized_by(frm, to):
        raise HTDError("NOT_COMPARABLE", f"{frm.w} is not majorized by {to.w}")
    n = frm.n
    chain = [np.array(frm.w)]

    # rearrange frm into the rank order of to, one transposition at a time
    # ties in ``to`` are broken by ``frm`` so that no needless swaps occur
    perm = np.lexsort((-np.array(frm.w), -np.array(to.w)))
    target = np.empty(n)
    target[perm] = np.sort(np.array(frm.w))[::-1]
    cur = np.array(frm.w)
    for i in range(n):
        if cur[i] == target[i]:
            continue
        j = next(k for k in range(i + 1, n) if cur[k] == target[i] and cur[k] != target[k])
        cur = cur.copy()
        cur[i], cur[j] = cur[j], cur[i]
        chain.append(cur)

    # largest-gap T-transforms from the spread end, then reversed
    x = cur[perm]  # decreasing, the less spread vector
    y = np.array(to.w)[perm]  # decreasing, the more spread vector
    back = [y.copy()]
    for _ in range(2 * n):
        diff = y - x
        pos = [i for i in range(n) if diff[i] > 0]
        neg = [i for i in range(n) if diff[i] < 0]
        if not pos or not neg:
            break
        j = max(pos)
        later = [k for k in neg if k > j]
        k = min(later) if later else min(neg)
        d = min(y[j] - x[j], x[k] - y[k])
        y = y.copy()
        if d == y[j] - x[j]:
            y[j], y[k] = x[j], y[k] + d
            if _close(y[k], x[k]):
                y[k] = x[k]
        else:
            y[j], y[k] = y[j] - d, x[k]
            if _close(y[j], x[j]):
                y[j] = x[j]
        back.append(y.copy())
    if not np.array_equal(back[-1], x):
        back.append(x.copy())
    inv = np.empty(n, dtype=int)
    inv[perm] = np.arange(n)
    for v in reversed(back[:-1]):
        chain.append(v[inv])
    chain[-1] = np.array(to.w)
    # drop repeats (e.g. frm == to)
    out = [chain[0]]
    for v in chain[1:]:
        if not np.array_equal(v, out[-1]):
            out.append(v)
    return [WeightVector(tuple(v)) for v in out]


def random_comparable_pairs(
    rng: np.random.Generator,
    n_pairs: int,
    dim: int = 2,
    scale: tuple[float, float] = (1e-2, 1e2),
) -> list[tuple[WeightVector, WeightVector]]:
    """Random pairs ``(less, more)`` with ``less ⪯ more``.

    Totals are log-uniform on ``scale``; ``more`` is obtained from ``less``
    by a random T-transform that moves mass from a smaller coordinate to a
    larger one.
    """
    pairs = []
    lo, hi = np.log(scale[0]), np.log(scale[1])
    for _ in range(n_pairs):
        total = float(np.exp(rng.uniform(lo, hi)))
        a = rng.dirichlet(np.ones(dim)) * total
        i, j = rng.choice(dim, size=2, replace=False)
        if a[i] > a[j]:
            i, j = j, i
        moved = rng.uniform(0, a[i])
        b = a.copy()
        b[i] -= moved
        b[j] += moved
        pairs.append((WeightVector(tuple(a)), WeightVector(tuple(b))))
    return pairs


def schur_probe(
    phi: Callable[..., float],
    pairs: Iterable[tuple[WeightVector, WeightVector]],
    tol: float = 1e-9,
) -> CheckReport:
    """Look for a Schur-concavity violation: ``less ⪯ more`` but ``phi(less) < phi(more) - tol``.

    Pairs whose order cannot be confirmed are skipped.  ``phi`` receives the
    coordinates as separate arguments.
    """
    worst = -np.inf
    best: Witness | None = None
    checked = 0
    for a, b in pairs:
        a, b = _wv(a), _wv(b)
        rel = majorizes(a, b)
        if rel is Relation.A_MAJ_B:
            a, b = b, a
        elif rel not in (Relation.B_MAJ_A, Relation.EQUAL):
            continue
        checked += 1
        fa, fb = float(phi(*a.w)), float(phi(*b.w))
        exc = fb - fa
        worst = max(worst, exc)
        if exc > tol and (best is None or exc > best.margin):
            best = Witness("VECTORS", None, lhs=fb, rhs=fa, margin=exc, relation="phi(more) <= phi(less)",
                           points=(a.w, b.w))
    notes = (f"{checked} comparable pairs",)
    if best is not None:
        return CheckReport("schur_concave", Verdict.VIOLATED, best, None, tol, worst, notes)
    return CheckReport("schur_concave", Verdict.NO_VIOLATION_ON_GRID, None, None, tol, worst, notes)
