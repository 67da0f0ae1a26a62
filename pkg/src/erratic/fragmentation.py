"""Recursive uniform splitting of [0, 1] and the quantities built on it.

Level ``k`` of a tree holds the sorted cut points ``Y[k][0..2**k]``; every
interval of level ``k`` is split at a uniform point to give level ``k + 1``.
Levels are flat arrays so a point can be located by binary search.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

MAX_DEPTH = 30
DEFAULT_DEPTH = 25


def _check_depth(K: int) -> int:
    K = int(K)
    if K < 0:
        raise ValueError("depth must be nonnegative")
    if K > MAX_DEPTH:
        raise ValueError(f"depth {K} exceeds the cap of {MAX_DEPTH}")
    return K


def split_level(cuts: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Next level from ``cuts`` (shape ``(..., m + 1)``) and uniforms ``u`` (shape ``(..., m)``)."""
    m = cuts.shape[-1] - 1
    out = np.empty(cuts.shape[:-1] + (2 * m + 1,))
    out[..., 0::2] = cuts
    out[..., 1::2] = (1.0 - u) * cuts[..., :-1] + u * cuts[..., 1:]
    return out


def build_levels(K: int, rng: np.random.Generator, size: int | None = None) -> list:
    """Cut arrays for levels ``0..K``; with ``size`` each has a leading tree axis."""
    K = _check_depth(K)
    lead = () if size is None else (int(size),)
    level = np.broadcast_to(np.array([0.0, 1.0]), lead + (2,)).copy()
    levels = [level]
    for k in range(K):
        u = rng.random(lead + (2**k,))
        level = split_level(level, u)
        levels.append(level)
    return levels


@dataclass(frozen=True)
class FragmentationTree:
    levels: tuple  # levels[k] holds Y_{k,0..2^k}

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def widths(self, k: int) -> np.ndarray:
        return np.diff(self.levels[k])

    def max_width(self, k: int) -> float:
        return float(self.widths(k).max())

    def to_json(self) -> str:
        return json.dumps({"depth": self.depth, "levels": [lv.tolist() for lv in self.levels]})

    @classmethod
    def from_json(cls, text: str) -> "FragmentationTree":
        data = json.loads(text)
        return cls(tuple(np.asarray(lv, dtype=float) for lv in data["levels"]))


def build_tree(K: int, rng: np.random.Generator) -> FragmentationTree:
    """A fresh tree of depth ``K`` (at most 30, i.e. 2**30 intervals)."""
    return FragmentationTree(tuple(build_levels(K, rng)))


def martingale_F(tree: FragmentationTree, k: int, alpha: float) -> float:
    """``((1 + alpha) / 2)**k * sum_j w_{k,j}**alpha``; has mean one for every k."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0 <= k <= tree.depth:
        raise ValueError("level outside the tree")
    return float(((1.0 + alpha) / 2.0) ** k * np.sum(tree.widths(k) ** alpha))


def find_area(tree: FragmentationTree) -> float:
    """Area under the truncated FIND process, ``sum_{k=1..K} sum_j w_{k,j}**2``.

    The omitted levels have expected total ``2 * (2/3)**K``.
    """
    return float(sum(np.sum(tree.widths(k) ** 2) for k in range(1, tree.depth + 1)))


def x_hat_of_tree(tree: FragmentationTree) -> float:
    return 0.5 * find_area(tree)


def locate_cut(tree: FragmentationTree, k: int, x):
    """Cut point ``Y_{k, J_k(x)}`` splitting the level-``(k-1)`` interval that contains ``x``."""
    if not 1 <= k <= tree.depth:
        raise ValueError("need 1 <= k <= depth")
    parent = tree.levels[k - 1]
    j = np.searchsorted(parent, x, side="right")
    j = np.clip(j, 1, parent.shape[0] - 1)
    cut = tree.levels[k][2 * j - 1]
    return float(cut) if np.ndim(x) == 0 else cut


def level_statistics(K: int, rng: np.random.Generator, size: int, alphas=(2.0,), chunk: int = 1000) -> dict:
    """Per-tree diagnostics for ``size`` independent trees of depth ``K``.

    Returns arrays of shape ``(size, K + 1)``: ``mean_sq_width`` (average of
    ``w**2`` over the level), ``max_width`` and ``F[alpha]``.
    """
    K = _check_depth(K)
    mean_sq = np.empty((size, K + 1))
    max_w = np.empty((size, K + 1))
    F = {a: np.empty((size, K + 1)) for a in alphas}
    for start in range(0, size, chunk):
        b = min(chunk, size - start)
        levels = build_levels(K, rng, b)
        for k, lv in enumerate(levels):
            w = np.diff(lv, axis=1)
            mean_sq[start : start + b, k] = np.mean(w * w, axis=1)
            max_w[start : start + b, k] = w.max(axis=1)
            for a in alphas:
                F[a][start : start + b, k] = ((1.0 + a) / 2.0) ** k * np.sum(w**a, axis=1)
    return {"mean_sq_width": mean_sq, "max_width": max_w, "F": F}


def sample_X_hat(K: int = DEFAULT_DEPTH, rng: np.random.Generator = None, size: int | None = None,
                 prune_width: float = 1e-2):
    """Draws of ``(1/2) sum_{k=1..K} sum_j w_{k,j}**2`` on fresh trees.

    Only intervals wider than ``prune_width`` are split further; a narrower
    interval of width ``w`` at level ``k`` is credited with the expected
    contribution of its descendants, ``w**2 * (1 - (2/3)**(K-k))``.  That keeps
    the mean exact; the pruned leaves are disjoint, so the variance lost is at
    most ``prune_width**3 / 12``.  Use
    ``prune_width=0`` for the exact (exponential cost) sum.
    """
    K = _check_depth(K)
    rng = np.random.default_rng() if rng is None else rng
    count = 1 if size is None else int(size)
    acc = np.zeros(count)
    owner = np.arange(count)
    width = np.ones(count)
    for k in range(1, K + 1):
        if owner.size == 0:
            break
        u = rng.random(owner.size)
        owner = np.concatenate([owner, owner])
        width = np.concatenate([width * u, width * (1.0 - u)])
        acc += 0.5 * np.bincount(owner, weights=width * width, minlength=count)
        small = width < prune_width
        if k < K and small.any():
            tail = 1.0 - (2.0 / 3.0) ** (K - k)
            ws = width[small]
            acc += tail * np.bincount(owner[small], weights=ws * ws, minlength=count)
            owner = owner[~small]
            width = width[~small]
    return float(acc[0]) if size is None else acc
