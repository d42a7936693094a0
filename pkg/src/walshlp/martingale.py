"""Dyadic conditional expectations, martingale differences, square functions
and the spectral relocation operator G.

Levels beyond the grid resolution carry no spectrum, so ``Delta_k f = 0`` for
``k > K`` and every sum over levels below is finite.
"""
from __future__ import annotations

from typing import Mapping

import numpy as np

from .dyadic import delta_block
from .walsh import DyadicFunction, VecFunction, walsh_values

Index = tuple[int, int]
IndexedFamily = Mapping[Index, DyadicFunction]
RelocationAssignment = Mapping[Index, int]


def _averages(values: np.ndarray, k: int) -> np.ndarray:
    # Cell means at level k, broadcast back to the fine grid; works along the last axis.
    N = values.shape[-1]
    lead = values.shape[:-1]
    width = N >> k
    means = values.reshape(*lead, 1 << k, width).mean(axis=-1)
    return np.repeat(means, width, axis=-1)


def _check_level(k: int, K: int) -> None:
    if not 0 <= k <= K:
        raise ValueError(f"level k={k} outside [0, {K}]")


def conditional_expectation(f: DyadicFunction, k: int) -> DyadicFunction:
    """E_k f: average of f over each dyadic cell of length 2^-k."""
    _check_level(k, f.resolution)
    return DyadicFunction(_averages(f.values, k))


def martingale_difference(f: DyadicFunction, k: int) -> DyadicFunction:
    """Delta_0 f = E_0 f and Delta_k f = E_k f - E_{k-1} f."""
    _check_level(k, f.resolution)
    if k == 0:
        return DyadicFunction(_averages(f.values, 0))
    return DyadicFunction(_averages(f.values, k) - _averages(f.values, k - 1))


def martingale_differences(values: np.ndarray) -> np.ndarray:
    """All differences Delta_0..Delta_K stacked on a new leading axis.

    ``values`` may be batched: shape ``(..., 2^K)`` gives ``(K+1, ..., 2^K)``.
    """
    N = values.shape[-1]
    K = N.bit_length() - 1
    levels = [_averages(values, k) for k in range(K + 1)]
    out = np.empty((K + 1,) + values.shape)
    out[0] = levels[0]
    for k in range(1, K + 1):
        out[k] = levels[k] - levels[k - 1]
    return out


def squared_differences(values: np.ndarray) -> np.ndarray:
    """Pointwise sum over k (and over leading batch axes) of |Delta_k|^2.

    Works level by level on the coarse grids, so the cost is O(2^K) per row
    rather than O(K 2^K).
    """
    v = np.asarray(values, dtype=np.float64).reshape(-1, values.shape[-1])
    K = v.shape[1].bit_length() - 1
    means = [v]
    for _ in range(K):
        means.append(means[-1].reshape(v.shape[0], -1, 2).mean(axis=-1))
    means.reverse()  # means[k] holds the level-k cell averages
    acc = np.sum(means[0] ** 2, axis=0)
    for k in range(1, K + 1):
        d = means[k] - np.repeat(means[k - 1], 2, axis=-1)
        acc = np.repeat(acc, 2) + np.sum(d ** 2, axis=0)
    return acc


def square_function(f: DyadicFunction) -> DyadicFunction:
    """Pointwise (sum_k |Delta_k f|^2)^(1/2), the k = 0 term included."""
    return DyadicFunction(np.sqrt(squared_differences(f.values)))


def square_function_vec(v: VecFunction) -> DyadicFunction:
    """l2-valued square function: Delta_k acts on each component."""
    return DyadicFunction(np.sqrt(squared_differences(v.values)))


def check_relocation(a: RelocationAssignment, K: int | None = None) -> None:
    """Raise ValueError unless the sets ``a[j,k] XOR delta_k`` are pairwise disjoint.

    With ``K`` given, also require every such set to lie in ``[0, 2^K)``.
    """
    seen: set[int] = set()
    for (j, k), shift in a.items():
        if shift < 0 or k < 0:
            raise ValueError(f"bad relocation entry {(j, k)} -> {shift}")
        block = delta_block(k)
        image = np.arange(block.a, block.b, dtype=np.int64) ^ shift
        if K is not None and int(image.max()) >= (1 << K):
            raise ValueError(
                f"relocated block for index {(j, k)} leaves the resolved spectrum [0, 2^{K})")
        before = len(seen)
        seen.update(image.tolist())
        if len(seen) != before + image.size:
            raise ValueError(f"relocated block for index {(j, k)} overlaps an earlier one")


def operator_G(h: IndexedFamily, a: RelocationAssignment) -> DyadicFunction:
    """G h = sum over the index set of w_{a[j,k]} * Delta_k h[j,k]."""
    if set(h) != set(a):
        raise ValueError("index sets of the family and the relocation differ")
    if not h:
        raise ValueError("empty index set")
    Ks = {f.resolution for f in h.values()}
    if len(Ks) != 1:
        raise ValueError("family members must share one resolution")
    K = Ks.pop()
    check_relocation(a, K)
    total = np.zeros(1 << K)
    for key in sorted(h):
        d = martingale_difference(h[key], key[1]).values
        total += walsh_values(a[key], K) * d
    return DyadicFunction(total)


def distribution_tail(f: DyadicFunction, lam: float) -> float:
    """Measure of ``{|f| > lam}``."""
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    return np.count_nonzero(np.abs(f.values) > lam) / f.values.size


def weak_type_sup(f: DyadicFunction) -> float:
    """Exact ``sup_lam lam * |{|f| > lam}|`` for a step function.

    The supremum is approached as ``lam`` rises to each attained value ``v``,
    where the measure is that of ``{|f| >= v}``.
    """
    v = np.sort(np.abs(f.values))[::-1]
    if v[0] == 0:
        return 0.0
    # -v is ascending; this counts entries >= each value, ties included
    at_least = np.searchsorted(-v, -v, side="right")
    return float(np.max(v * at_least)) / v.size


def weak_type_on_grid(f: DyadicFunction, lambdas) -> float:
    """``max_lam lam * |{|f| > lam}|`` over a finite grid of levels."""
    a = np.sort(np.abs(f.values))
    lam = np.asarray(lambdas, dtype=np.float64)
    if np.any(lam <= 0):
        raise ValueError("lambda grid must be positive")
    above = a.size - np.searchsorted(a, lam, side="right")
    return float(np.max(lam * above) / a.size)


def geometric_lambda_grid(f: DyadicFunction, points: int = 61) -> np.ndarray:
    """Geometric levels spanning [1e-3, 1e3] times the median of |f|."""
    med = float(np.median(np.abs(f.values)))
    if med == 0.0:
        med = float(np.max(np.abs(f.values))) or 1.0
    return med * np.logspace(-3, 3, points)
