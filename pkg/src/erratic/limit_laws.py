"""Samplers and closed forms for the limit laws of normalized inversion counts.

Three regimes for ``X_{n,p} = I(n,p) / (n^2 p)``:

* ``p -> c > 0``: the fixed point ``X_c`` of a two-branch contraction,
  sampled here by population dynamics (:func:`sample_Xc_pool`);
* ``p -> 0`` with ``np -> inf``: the same equation at ``c = 0``, equal to half
  the area under the FIND process (:func:`erratic.fragmentation.sample_X_hat`);
* ``np -> lam``: ``X(lam)``, built from the fragmentation tree and a Poisson
  process of marks (:func:`sample_X_lambda`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .fragmentation import DEFAULT_DEPTH, FragmentationTree, _check_depth, locate_cut


def _rng(rng):
    return np.random.default_rng() if rng is None else rng


def _compound_sum(owner_counts, values_fn, rng, count):
    owner = np.repeat(np.arange(count), owner_counts)
    v = rng.random(owner.size)
    return np.bincount(owner, weights=values_fn(v, owner), minlength=count)


def sample_theta(lam: float, u, rng=None, size: int | None = None):
    """Toll limit ``(1/lam) * sum_{i <= N} |u - V_i|``, ``N ~ Poisson(lam)``, ``V_i`` uniform.

    ``u`` may be a scalar or an array of length ``size``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    rng = _rng(rng)
    count = 1 if size is None else int(size)
    u = np.broadcast_to(np.asarray(u, dtype=float), (count,))
    n = rng.poisson(lam, size=count)
    out = _compound_sum(n, lambda v, o: np.abs(u[o] - v), rng, count) / lam
    return float(out[0]) if size is None else out


def sample_xi(t, rng=None, size: int | None = None):
    """Compound Poisson sum of ``Poisson(t)`` uniforms on (0, 1]; ``t`` may be an array."""
    rng = _rng(rng)
    count = 1 if size is None else int(size)
    t = np.broadcast_to(np.asarray(t, dtype=float), (count,))
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    n = rng.poisson(t)
    out = _compound_sum(n, lambda v, o: 1.0 - v, rng, count)
    return float(out[0]) if size is None else out


def sample_X_lambda(lam, K: int = DEFAULT_DEPTH, rng=None, size: int | None = None, chunk: int = 20000):
    """Draws of ``X(lam)`` truncated to marks of levels ``1..K``.

    Level ``k`` carries ``Poisson(lam)`` uniform marks; a mark ``x``
    contributes ``|x - Y_{k,J_k(x)}| / lam``, its distance to the point
    cutting its level-``(k-1)`` interval.  Only the intervals that contain
    marks are realized, one uniform cut per interval, which is the law of the
    full tree restricted to those paths.  The mean lost to truncation is
    ``(2/3)**K``.  ``lam`` may be a positive scalar or an array of length
    ``size``.
    """
    K = _check_depth(K)
    rng = _rng(rng)
    count = 1 if size is None else int(size)
    lam = np.broadcast_to(np.asarray(lam, dtype=float), (count,))
    if np.any(lam <= 0):
        raise ValueError("lam must be positive")
    out = np.empty(count)
    for start in range(0, count, chunk):
        b = min(chunk, count - start)
        out[start : start + b] = _x_lambda_block(lam[start : start + b], K, rng)
    return float(out[0]) if size is None else out


def _x_lambda_block(lam, K, rng):
    b = lam.shape[0]
    counts = rng.poisson(lam[:, None], size=(b, K)).ravel()
    owner = np.repeat(np.repeat(np.arange(b), K), counts)
    level = np.repeat(np.tile(np.arange(1, K + 1), b), counts)
    x = rng.random(owner.size)
    lo = np.zeros_like(x)
    hi = np.ones_like(x)
    node = np.zeros(x.size, dtype=np.int64)
    acc = np.zeros(b)
    for d in range(K):
        if x.size == 0:
            break
        # one cut per occupied level-d interval
        key = (owner.astype(np.int64) << 31) | node
        uniq, inv = np.unique(key, return_inverse=True)
        cut = lo + rng.random(uniq.size)[inv] * (hi - lo)
        hit = level == d + 1
        acc += np.bincount(owner[hit], weights=np.abs(x[hit] - cut[hit]), minlength=b)
        keep = ~hit
        owner, level, x, lo, hi, node, cut = (a[keep] for a in (owner, level, x, lo, hi, node, cut))
        right = x >= cut
        lo = np.where(right, cut, lo)
        hi = np.where(right, hi, cut)
        node = 2 * node + right
    return acc / lam


def x_lambda_on_tree(tree: FragmentationTree, lam: float, rng=None) -> float:
    """``X(lam)`` evaluated on an explicit tree, using marks of levels ``1..tree.depth``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    rng = _rng(rng)
    total = 0.0
    for k in range(1, tree.depth + 1):
        x = rng.random(rng.poisson(lam))
        if x.size:
            total += float(np.sum(np.abs(x - locate_cut(tree, k, x))))
    return total / lam


def sample_X_lambda_one_step(lam: float, K: int = DEFAULT_DEPTH, rng=None, size: int = 1):
    """Right-hand side ``U^2 X(lam U) + (1-U)^2 X'(lam (1-U)) + Theta(lam, U)`` of the one-step identity."""
    rng = _rng(rng)
    u = rng.random(size)
    left = sample_X_lambda(lam * u, K, rng, size)
    right = sample_X_lambda(lam * (1.0 - u), K, rng, size)
    toll = sample_theta(lam, u, rng, size)
    return u * u * left + (1.0 - u) ** 2 * right + toll


# --- fixed point p -> c -----------------------------------------------------


def _check_c(c):
    if not 0 <= c <= 1:
        raise ValueError(f"c must lie in [0, 1], got {c}")


def coefficients_c(c: float, u):
    """``(A, B, T)`` of the fixed-point equation at ``c`` for uniforms ``u``."""
    a = ((1 - 2 * c) * u + c) ** 2
    b = ((2 * c - 1) * u + 1 - c) ** 2
    t = (1 - c) / 2 * (u * u + (1 - u) ** 2) + c * u * (1 - u)
    return a, b, t


def contraction_constant(c: float) -> float:
    """``E[A] + E[B] = (2/3)(1 - c + c^2)``, the d1 contraction factor of one generation."""
    return 2.0 / 3.0 * (1 - c + c * c)


@dataclass
class SamplePool:
    samples: np.ndarray
    generation: int = 0

    def __post_init__(self):
        if self.samples.size < 2:
            raise ValueError("pool needs at least two samples")

    def draw(self, size: int, rng=None) -> np.ndarray:
        """``size`` values; without replacement when the pool is large enough."""
        rng = _rng(rng)
        return rng.choice(self.samples, size=size, replace=size > self.samples.size)

    def sorted(self) -> np.ndarray:
        return np.sort(self.samples)

    def to_csv(self, path) -> None:
        np.savetxt(path, self.sorted(), fmt="%.17g")


def sample_Xc_pool(c: float, S: int = 100_000, m: int = 60, rng=None) -> SamplePool:
    """Population-dynamics approximation of ``X_c`` after ``m`` generations from ``delta_0``.

    Each generation maps the pool through ``A X' + B X'' + T`` with ``X', X''``
    resampled from the previous generation.
    """
    _check_c(c)
    if S < 2 or m < 1:
        raise ValueError("need S >= 2 and m >= 1")
    rng = _rng(rng)
    x = np.zeros(S)
    for _ in range(m):
        i1 = rng.integers(0, S, size=S)
        i2 = rng.integers(0, S, size=S)
        a, b, t = coefficients_c(c, rng.random(S))
        x = a * x[i1] + b * x[i2] + t
    return SamplePool(x, m)


def mean_var_Xc(c):
    """Closed-form mean and variance of ``X_c``; exact when ``c`` is a ``Fraction``."""
    _check_c(c)
    d = 1 + 2 * c - 2 * c * c
    q = 3 + 6 * c - 8 * c**2 + 4 * c**3 - 2 * c**4
    if d == 0 or q == 0:
        raise ZeroDivisionError("degenerate denominator")
    mean = (2 - c) / (2 * d)
    var = (1 - c) ** 2 * (1 - 2 * c) ** 2 / (4 * d**2 * q)
    return mean, var


def mean_var_X_lambda(lam):
    """Mean one and variance ``1/12 + 1/(3 lam)``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    if isinstance(lam, (int, Fraction)):
        return Fraction(1), Fraction(1, 12) + Fraction(1, 3) / lam
    return 1.0, 1.0 / 12.0 + 1.0 / (3.0 * lam)


# --- generic fixed-point moments ----------------------------------------------


@dataclass
class FixedPointSpec:
    """Moments of the coefficients of ``X = sum_i A_i X_i + T``.

    ``mean_A`` and ``mean_A_sq`` hold ``E[A_i]`` and ``E[A_i^2]`` per branch;
    ``mean_T_sumA`` is ``E[T sum_i A_i]`` and ``mean_sumA_sq`` is ``E[(sum_i A_i)^2]``.
    """

    mean_A: Sequence
    mean_A_sq: Sequence
    mean_T: object
    mean_T_sq: object
    mean_T_sumA: object
    mean_sumA_sq: object
    sampler: Callable | None = field(default=None, repr=False)


def fixed_point_moments(spec: FixedPointSpec):
    """Mean and variance of the fixed point from the coefficient moments."""
    sa = sum(spec.mean_A)
    sa2 = sum(spec.mean_A_sq)
    if sa >= 1:
        raise ValueError("contraction condition sum E[A_i] < 1 fails")
    if sa2 >= 1:
        raise ValueError("contraction condition sum E[A_i^2] < 1 fails")
    mean = spec.mean_T / (1 - sa)
    num = spec.mean_T_sq + 2 * mean * spec.mean_T_sumA + (spec.mean_sumA_sq - 1) * mean * mean
    return mean, num / (1 - sa2)


def case1_spec(c) -> FixedPointSpec:
    """Exact coefficient moments for the ``p -> c`` equation (pass a ``Fraction`` for exactness)."""
    from .moments import RationalPolynomial

    _check_c(c)
    c = Fraction(c)
    u = RationalPolynomial([0, 1])
    one = RationalPolynomial([1])
    a = ((1 - 2 * c) * u + c * one) ** 2
    b = ((2 * c - 1) * u + (1 - c) * one) ** 2
    t = (1 - c) / 2 * (u * u + (one - u) ** 2) + c * u * (one - u)

    def E(poly):
        return poly.integrate_unit()

    return FixedPointSpec(
        mean_A=(E(a), E(b)),
        mean_A_sq=(E(a * a), E(b * b)),
        mean_T=E(t),
        mean_T_sq=E(t * t),
        mean_T_sumA=E(t * (a + b)),
        mean_sumA_sq=E((a + b) ** 2),
        sampler=lambda rng, size: coefficients_c(float(c), _rng(rng).random(size)),
    )


# --- constants -----------------------------------------------------------------


def width_rate(alpha: float) -> float:
    """``(2 / (1 + alpha))**(1 / alpha)``, the geometric rate bounding ``E[M_k]`` via ``F_{k,alpha}``."""
    return (2.0 / (1.0 + alpha)) ** (1.0 / alpha)


def rho_equation(r: float) -> float:
    return 1.0 / r + 2.0 * math.e * math.log(r)


def solve_rho(tol: float = 1e-12) -> float:
    """Larger root of ``1/r = -2e ln r`` by bisection on (0.5, 0.99)."""
    return optimize.bisect(rho_equation, 0.5, 0.99, xtol=tol, maxiter=200)
