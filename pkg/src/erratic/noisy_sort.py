"""Quicksort and merge sort whose element comparisons err independently.

The error model: every element-vs-element comparison returns the wrong
answer with probability ``p``, independently of everything else.  Index
arithmetic never errs.  Quicksort takes the first element of each sublist as
pivot and partitions stably, so an input in uniform random order leaves both
sublists in uniform random order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .inversions import check_permutation, count_inversions

SEED_BOUND = 2**32


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"error probability must lie in [0, 1], got {p}")
    return p


def draw_seeds(rng: np.random.Generator, size: int) -> np.ndarray:
    """32-bit seeds for the compiled kernels, one per replicate."""
    return rng.integers(0, SEED_BOUND, size=size, dtype=np.int64)


@dataclass
class ErrorModel:
    """Error probability plus the randomness stream that decides which comparisons err."""

    p: float
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def __post_init__(self):
        self.p = _check_p(self.p)

    @classmethod
    def seeded(cls, p: float, seed: int) -> "ErrorModel":
        return cls(p, np.random.default_rng(seed))


@dataclass(frozen=True)
class FirstStep:
    pivot_rank: int
    s_ell: int  # items smaller than the pivot sent right
    s_r: int  # items larger than the pivot sent left
    toll: int  # output inversions between pairs split by the first pivot

    @property
    def z(self) -> int:
        """Final position of the first pivot."""
        return self.pivot_rank - self.s_ell + self.s_r


@dataclass(frozen=True)
class SortTrace:
    output: np.ndarray
    per_step_inversions: tuple  # entry k-1 holds I^(k)
    first_step: FirstStep | None

    @property
    def inversions(self) -> int:
        return sum(self.per_step_inversions)


def noisy_quicksort(seq, model: ErrorModel) -> SortTrace:
    """Run erratic Quicksort on a permutation and attribute inversions to steps.

    A pair of items is attributed to depth ``k`` when a depth-``k`` pivot
    first separates them (or is one of them).
    """
    a = check_permutation(seq).copy()
    n = a.shape[0]
    seed = int(model.rng.integers(0, SEED_BOUND))
    per_step, first = _kernels.seeded_quicksort(a, model.p, seed, True, max(n, 1))
    steps = per_step[1:].tolist()
    while steps and steps[-1] == 0:
        steps.pop()
    record = None
    if n >= 2:
        record = FirstStep(*(int(v) for v in first))
    return SortTrace(a, tuple(int(s) for s in steps), record)


def replicate_blocks(n: int, size: int, rng: np.random.Generator, max_cells: int = 2**21):
    """Yield ``(keys, seeds)`` blocks covering ``size`` replicates of length ``n``.

    Keys and error seeds come from two child streams of ``rng``, so the
    replicates do not depend on how they are blocked.
    """
    key_rng, err_rng = rng.spawn(2)
    block = max(1, max_cells // max(n, 1))
    for start in range(0, size, block):
        b = min(block, size - start)
        yield key_rng.random((b, n)), draw_seeds(err_rng, b)


def quicksort_inversions(n: int, p: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent draws of I(n, p)."""
    p = _check_p(p)
    parts = [_kernels.quicksort_inversions_batch(k, p, s) for k, s in replicate_blocks(n, size, rng)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def quicksort_step_table(n: int, p: float, rng: np.random.Generator, size: int, max_depth: int = 16) -> dict:
    """Instrumented replicates as named integer columns.

    ``steps[:, k-1]`` is I^(k) for ``k <= max_depth``; ``deeper`` collects the rest.
    """
    p = _check_p(p)
    rows = np.concatenate(
        [_kernels.quicksort_trace_batch(k, p, s, int(max_depth)) for k, s in replicate_blocks(n, size, rng)]
    )
    d = max_depth
    return {
        "total": rows[:, 0],
        "steps": rows[:, 1 : d + 1],
        "deeper": rows[:, d + 1],
        "pivot_rank": rows[:, d + 2],
        "s_ell": rows[:, d + 3],
        "s_r": rows[:, d + 4],
        "toll": rows[:, d + 5],
    }


def sample_X_np(n: int, p: float, rng: np.random.Generator, size: int | None = None):
    """Draws of ``I(n, p) / (n^2 p)``, each from a fresh uniform input."""
    if n < 1:
        raise ValueError("n must be positive")
    p = _check_p(p)
    if p == 0.0:
        raise ValueError("normalization I/(n^2 p) is undefined for p = 0")
    count = 1 if size is None else int(size)
    x = quicksort_inversions(n, p, rng, count) / (float(n) * n * p)
    return float(x[0]) if size is None else x


def first_step_table(n: int, p: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Rows ``(pivot_rank, s_ell, s_r, toll)`` of independent first partitions."""
    if n < 2:
        raise ValueError("the first step needs n >= 2")
    p = _check_p(p)
    return np.concatenate([_kernels.first_step_batch(k, p, s) for k, s in replicate_blocks(n, size, rng)])


def first_step_toll(n: int, p: float, rng: np.random.Generator, size: int | None = None):
    """Run only the first partition; return ``(s_ell, s_r, toll)``.

    The toll is measured directly as the inversion count of
    ``sorted(left) || pivot || sorted(right)``.
    """
    rows = first_step_table(n, p, rng, 1 if size is None else int(size))
    if size is None:
        return int(rows[0, 1]), int(rows[0, 2]), int(rows[0, 3])
    return rows[:, 1], rows[:, 2], rows[:, 3]


def sample_W_m(m: int, p: float, rng: np.random.Generator, size: int | None = None):
    """Inversions left after stably splitting m items into black (prob p) and white.

    Computed as ``sum(i * Y_i) - S(S+1)/2`` for i.i.d. Bernoulli(p) marks ``Y``.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    p = _check_p(p)
    count = 1 if size is None else int(size)
    marks = rng.random((count, m)) < p
    idx = np.arange(1, m + 1, dtype=np.int64)
    s = marks.sum(axis=1, dtype=np.int64)
    w = marks @ idx - s * (s + 1) // 2
    return int(w[0]) if size is None else w


def noisy_mergesort(seq, model: ErrorModel) -> np.ndarray:
    """Bottom-up merge sort with erratic merge comparisons; returns the output."""
    a = np.asarray(seq, dtype=np.int64).copy()
    seed = int(model.rng.integers(0, SEED_BOUND))
    _kernels.seeded_mergesort(a, model.p, seed)
    return a


def mergesort_inversions(n: int, p: float, rng: np.random.Generator, size: int) -> np.ndarray:
    p = _check_p(p)
    parts = [_kernels.mergesort_inversions_batch(k, p, s) for k, s in replicate_blocks(n, size, rng)]
    return np.concatenate(parts)


def sample_mergesort_X(n: int, p: float, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Draws of ``I / (n^2 p)`` for the erratic merge sort (exploratory)."""
    p = _check_p(p)
    if p == 0.0:
        raise ValueError("normalization is undefined for p = 0")
    inv = mergesort_inversions(n, p, rng, size)
    return inv / (float(n) * n * p)


__all__ = [
    "ErrorModel",
    "FirstStep",
    "SortTrace",
    "count_inversions",
    "draw_seeds",
    "first_step_table",
    "first_step_toll",
    "mergesort_inversions",
    "noisy_mergesort",
    "noisy_quicksort",
    "quicksort_inversions",
    "quicksort_step_table",
    "replicate_blocks",
    "sample_W_m",
    "sample_X_np",
    "sample_mergesort_X",
]
