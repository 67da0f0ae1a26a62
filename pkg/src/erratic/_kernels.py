"""Compiled inner loops for the sorting simulators.

Input orders arrive as rows of i.i.d. uniform keys drawn by numpy; the
comparison errors come from numba's generator, reseeded per replicate with
an explicit 32-bit seed.  One replicate is therefore a pure function of its
key row and seed.
"""
import math

import numpy as np
from numba import njit

_NEVER = np.iinfo(np.int64).max


@njit(cache=True)
def _merge_count(a, buf, lo, mid, hi):
    i = lo
    j = mid
    k = lo
    inv = 0
    while i < mid and j < hi:
        ai = a[i]
        aj = a[j]
        t = 1 if aj < ai else 0
        buf[k] = aj if t else ai
        inv += t * (mid - i)
        j += t
        i += 1 - t
        k += 1
    while i < mid:
        buf[k] = a[i]
        i += 1
        k += 1
    while j < hi:
        buf[k] = a[j]
        j += 1
        k += 1
    for t in range(lo, hi):
        a[t] = buf[t]
    return inv


@njit(cache=True)
def count_inversions_kernel(seq):
    """Merge count over the natural ascending runs; ``seq`` is left untouched.

    Cost is O(n log r) for r runs, so nearly sorted outputs count in linear time.
    """
    n = seq.shape[0]
    if n < 2:
        return 0
    a = seq.copy()
    buf = np.empty_like(a)
    bounds = np.empty(n + 1, dtype=np.int64)
    nb = 1
    bounds[0] = 0
    for i in range(1, n):
        if a[i] < a[i - 1]:
            bounds[nb] = i
            nb += 1
    bounds[nb] = n
    runs = nb
    inv = 0
    while runs > 1:
        out = 0
        r = 0
        while r + 1 < runs:
            inv += _merge_count(a, buf, bounds[r], bounds[r + 1], bounds[r + 2])
            bounds[out] = bounds[r]
            out += 1
            r += 2
        if r < runs:
            bounds[out] = bounds[r]
            out += 1
        bounds[out] = n
        runs = out
    return inv


@njit(cache=True)
def _next_gap(p):
    # comparisons until (and including) the next erroneous one
    if p <= 0.0:
        return _NEVER
    if p >= 1.0:
        return 1
    # inversion with log1p stays finite for tiny p
    g = math.floor(math.log(1.0 - np.random.random()) / math.log1p(-p))
    if g >= 1e18:
        return _NEVER
    return np.int64(g) + 1


@njit(cache=True)
def _cross_inversions(left, piv, right):
    # inversions of sorted(left) || piv || sorted(right), i.e. every pair the
    # partition separated; independent of how the halves are sorted later
    ls = np.sort(left)
    rs = np.sort(right)
    nl = ls.shape[0]
    nr = rs.shape[0]
    s_r = 0
    for x in ls:
        if x > piv:
            s_r += 1
    s_ell = 0
    for y in rs:
        if y < piv:
            s_ell += 1
    pairs = 0
    i = 0
    for y in rs:
        while i < nl and ls[i] <= y:
            i += 1
        pairs += nl - i
    return s_ell, s_r, pairs + s_ell + s_r


@njit(cache=True)
def quicksort_kernel(a, p, trace, max_depth):
    """Sort ``a`` in place with erratic comparisons.

    Pivot is the first element of each sublist, partition is stable.  When
    ``trace`` is set, returns per-depth cross inversions (index = depth) and
    the first-step record ``(pivot, s_ell, s_r, toll)``.
    """
    n = a.shape[0]
    per_step = np.zeros(max_depth + 2, dtype=np.int64)
    first = np.zeros(4, dtype=np.int64)
    if n <= 1:
        return per_step, first
    lbuf = np.empty(n, dtype=a.dtype)
    rbuf = np.empty(n, dtype=a.dtype)
    stack = np.empty((2 * n + 2, 3), dtype=np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 1
    top = 1
    countdown = _next_gap(p)
    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        depth = stack[top, 2]
        if hi - lo <= 1:
            continue
        piv = a[lo]
        nl = 0
        nr = 0
        for i in range(lo + 1, hi):
            x = a[i]
            g = 1 if x < piv else 0
            countdown -= 1
            if countdown == 0:
                g = 1 - g
                countdown = _next_gap(p)
            # branch-free stable split
            lbuf[nl] = x
            rbuf[nr] = x
            nl += g
            nr += 1 - g
        if trace:
            s_ell, s_r, cross = _cross_inversions(lbuf[:nl], piv, rbuf[:nr])
            if depth <= max_depth:
                per_step[depth] += cross
            else:
                per_step[max_depth + 1] += cross
            if depth == 1:
                first[0] = piv
                first[1] = s_ell
                first[2] = s_r
                first[3] = cross
        for t in range(nl):
            a[lo + t] = lbuf[t]
        a[lo + nl] = piv
        for t in range(nr):
            a[lo + nl + 1 + t] = rbuf[t]
        if nr > 1:
            stack[top, 0] = lo + nl + 1
            stack[top, 1] = hi
            stack[top, 2] = depth + 1
            top += 1
        if nl > 1:
            stack[top, 0] = lo
            stack[top, 1] = lo + nl
            stack[top, 2] = depth + 1
            top += 1
    return per_step, first


@njit(cache=True)
def seeded_quicksort(a, p, seed, trace, max_depth):
    np.random.seed(seed)
    return quicksort_kernel(a, p, trace, max_depth)


@njit(cache=True)
def quicksort_inversions_batch(keys, p, seeds):
    """Inversion counts of erratic Quicksort, one row of ``keys`` per replicate.

    Each row holds i.i.d. uniform keys, whose rank order is a uniform
    permutation; ``seeds[r]`` drives the comparison errors of row ``r``.
    """
    R = keys.shape[0]
    out = np.empty(R, dtype=np.int64)
    for r in range(R):
        np.random.seed(seeds[r])
        a = keys[r].copy()
        quicksort_kernel(a, p, False, 0)
        out[r] = count_inversions_kernel(a)
    return out


@njit(cache=True)
def _ranks(row):
    order = np.argsort(row)
    a = np.empty(row.shape[0], dtype=np.int64)
    for i in range(order.shape[0]):
        a[order[i]] = i + 1
    return a


@njit(cache=True)
def quicksort_trace_batch(keys, p, seeds, max_depth):
    """Per-replicate rows ``[total, I^(1..max_depth), deeper, pivot, s_ell, s_r, toll]``."""
    R = keys.shape[0]
    out = np.zeros((R, max_depth + 6), dtype=np.int64)
    for r in range(R):
        np.random.seed(seeds[r])
        a = _ranks(keys[r])
        per_step, first = quicksort_kernel(a, p, True, max_depth)
        out[r, 0] = count_inversions_kernel(a)
        for k in range(1, max_depth + 2):
            out[r, k] = per_step[k]
        for t in range(4):
            out[r, max_depth + 2 + t] = first[t]
    return out


@njit(cache=True)
def first_step_batch(keys, p, seeds):
    """Step one only: rows ``(pivot_rank, s_ell, s_r, toll)``."""
    R = keys.shape[0]
    n = keys.shape[1]
    out = np.zeros((R, 4), dtype=np.int64)
    lbuf = np.empty(n, dtype=np.int64)
    rbuf = np.empty(n, dtype=np.int64)
    for r in range(R):
        np.random.seed(seeds[r])
        a = _ranks(keys[r])
        piv = a[0]
        nl = 0
        nr = 0
        countdown = _next_gap(p)
        for i in range(1, n):
            x = a[i]
            g = 1 if x < piv else 0
            countdown -= 1
            if countdown == 0:
                g = 1 - g
                countdown = _next_gap(p)
            lbuf[nl] = x
            rbuf[nr] = x
            nl += g
            nr += 1 - g
        s_ell, s_r, cross = _cross_inversions(lbuf[:nl], piv, rbuf[:nr])
        out[r, 0] = piv
        out[r, 1] = s_ell
        out[r, 2] = s_r
        out[r, 3] = cross
    return out


@njit(cache=True)
def mergesort_kernel(a, p):
    """Bottom-up merge sort of ``a`` in place with erratic merge comparisons."""
    n = a.shape[0]
    buf = np.empty_like(a)
    countdown = _next_gap(p)
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                take_left = a[i] < a[j]
                countdown -= 1
                if countdown == 0:
                    take_left = not take_left
                    countdown = _next_gap(p)
                if take_left:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    j += 1
                k += 1
            while i < mid:
                buf[k] = a[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = a[j]
                j += 1
                k += 1
            lo += 2 * width
        for t in range(n):
            a[t] = buf[t]
        width *= 2


@njit(cache=True)
def seeded_mergesort(a, p, seed):
    np.random.seed(seed)
    mergesort_kernel(a, p)


@njit(cache=True)
def mergesort_inversions_batch(keys, p, seeds):
    out = np.empty(keys.shape[0], dtype=np.int64)
    for r in range(keys.shape[0]):
        np.random.seed(seeds[r])
        a = keys[r].copy()
        mergesort_kernel(a, p)
        out[r] = count_inversions_kernel(a)
    return out


@njit(cache=True)
def _binom_head(m, p, T):
    out = np.zeros(T + 1)
    out[0] = (1.0 - p) ** m
    for j in range(min(T, m)):
        out[j + 1] = out[j] * (m - j) / (j + 1) * p / (1.0 - p)
    return out


@njit(cache=True)
def mean_inversions_kernel(n, p, T):
    # a[m] = t(m, p) + (1/m) sum_k E[a[L] + a[m-1-L]],  L = k-1 - Bin(k-1, p) + Bin(m-k, p)
    a = np.zeros(n + 1)
    for m in range(2, n + 1):
        acc = 0.0
        for k in range(1, m + 1):
            P1 = _binom_head(k - 1, p, T)
            P2 = _binom_head(m - k, p, T)
            for b1 in range(T + 1):
                if P1[b1] == 0.0:
                    continue
                for b2 in range(T + 1):
                    w = P1[b1] * P2[b2]
                    if w != 0.0:
                        L = k - 1 - b1 + b2
                        acc += w * (a[L] + a[m - 1 - L])
        a[m] = p * (m - 1) * (m + 1) / 3.0 - p * p * (m - 1) * (m - 2) / 6.0 + acc / m
    return a
