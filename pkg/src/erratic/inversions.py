"""Permutations, inversion counts and the exact enumeration oracle."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._kernels import count_inversions_kernel, mean_inversions_kernel

#: largest n accepted by the exhaustive enumeration oracles
ORACLE_MAX_N = 7


def check_permutation(seq) -> np.ndarray:
    """Return ``seq`` as an int64 array, raising if it is not a permutation of 1..n."""
    a = np.asarray(seq, dtype=np.int64)
    if a.ndim != 1:
        raise ValueError("a permutation is one-dimensional")
    n = a.shape[0]
    if n and not np.array_equal(np.sort(a), np.arange(1, n + 1)):
        raise ValueError("sequence is not a permutation of 1..n")
    return a


def count_inversions(seq) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]``, by merge counting.

    Works on any sequence of comparable numbers, not only permutations.
    """
    a = np.asarray(seq)
    if a.shape[0] < 2:
        return 0
    if a.dtype.kind not in "iuf":
        a = a.astype(np.float64)
    return int(count_inversions_kernel(a))


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation of 1..n drawn from ``rng`` (Fisher-Yates)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return rng.permutation(n).astype(np.int64) + 1


def _normalize(values) -> tuple:
    order = sorted(values)
    rank = {v: i + 1 for i, v in enumerate(order)}
    return tuple(rank[v] for v in values)


def _partition_outcomes(pattern: tuple):
    """Yield ``(errors, left, right, cross)`` for every error-bit vector of one partition."""
    piv = pattern[0]
    rest = pattern[1:]
    for bits in itertools.product((False, True), repeat=len(rest)):
        left = []
        right = []
        for x, err in zip(rest, bits):
            if (x < piv) != err:
                left.append(x)
            else:
                right.append(x)
        merged = sorted(left) + [piv] + sorted(right)
        cross = count_inversions(merged) if len(merged) > 1 else 0
        yield sum(bits), tuple(left), tuple(right), cross


def _check_oracle_args(n: int, p) -> Fraction:
    if not 1 <= n <= ORACLE_MAX_N:
        raise ValueError(f"enumeration oracle needs 1 <= n <= {ORACLE_MAX_N}, got {n}")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return p


def exact_expected_inversions(n: int, p) -> Fraction:
    """Exact ``E[I(n, p)]`` by enumerating every input and every comparison outcome.

    ``p`` should be an exact rational (``Fraction`` or ``int``); floats are
    converted exactly.  Sublists with the same relative order are memoized,
    which leaves the enumerated sum unchanged.
    """
    p = _check_oracle_args(n, p)
    q = 1 - p

    @lru_cache(maxsize=None)
    def expected(pattern: tuple) -> Fraction:
        m = len(pattern)
        if m <= 1:
            return Fraction(0)
        total = Fraction(0)
        for errors, left, right, cross in _partition_outcomes(pattern):
            weight = p**errors * q ** (m - 1 - errors)
            if weight == 0:
                continue
            sub = expected(_normalize(left)) + expected(_normalize(right))
            total += weight * (cross + sub)
        return total

    perms = itertools.permutations(range(1, n + 1))
    return sum((expected(perm) for perm in perms), Fraction(0)) / math.factorial(n)


def exact_expected_toll(n: int, p) -> Fraction:
    """Exact expectation of the first-step toll (inversions separated by the first pivot)."""
    p = _check_oracle_args(n, p)
    q = 1 - p
    total = Fraction(0)
    for perm in itertools.permutations(range(1, n + 1)):
        for errors, _, _, cross in _partition_outcomes(perm):
            total += p**errors * q ** (n - 1 - errors) * cross
    return total / math.factorial(n)


def toll_mean_formula(n: int, p):
    """Closed-form mean toll ``p(n-1)(n+1)/3 - p^2(n-1)(n-2)/6``; exact for rational ``p``."""
    if isinstance(p, float):
        return p * (n - 1) * (n + 1) / 3 - p * p * (n - 1) * (n - 2) / 6
    p = Fraction(p)
    return p * (n - 1) * (n + 1) / 3 - p * p * (n - 1) * (n - 2) / 6


def mean_inversions_recursion(n: int, p: float, tail_sd: float = 12.0) -> np.ndarray:
    """``E[I(m, p)]`` for ``m = 0..n`` from the mean recursion, in floating point.

    Given its size, each sublist is again in uniform random order, so the mean
    satisfies ``a_m = t(m, p) + (1/m) sum_k E[a_L + a_{m-1-L}]`` with ``L`` the
    final pivot position minus one.  The misrouting counts are binomial; their
    pmfs are cut ``tail_sd`` standard deviations past ``n p``, so the cost is
    ``O(n^2 T^2)`` with ``T ~ n p``.  Meant for small ``n p`` (and small ``n``).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = float(p)
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    mu = n * p
    T = min(n, int(math.ceil(mu + tail_sd * math.sqrt(mu) + tail_sd)))
    return mean_inversions_kernel(int(n), p, max(T, 1))
