"""Dyadic step functions, Walsh-Paley functions and the fast Walsh transform.

A function at resolution K is stored as its 2^K cell values; cell ``i`` is
``[i 2^-K, (i+1) 2^-K)``.  Walsh coefficients use the ``(f, w_n) = int f w_n``
normalization: analysis carries the 2^-K factor, synthesis carries none.

In Paley ordering ``w_n`` on cell ``i`` equals ``(-1)^popcount(n & rev_K(i))``,
where ``rev_K`` reverses the K-bit address (the first binary digit of x is
the top bit of ``i`` and drives r_1).  So the Paley transform is the
natural-order Hadamard transform composed with a bit-reversal permutation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .dyadic import IntervalZ

MAX_RESOLUTION = 20


def _resolution_of(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    K = n.bit_length() - 1
    if K > MAX_RESOLUTION:
        raise ValueError(f"resolution {K} exceeds the maximum {MAX_RESOLUTION}")
    return K


@dataclass(frozen=True, eq=False)
class DyadicFunction:
    """Real step function on [0, 1] constant on the 2^K dyadic cells."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        _resolution_of(v.size)
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def resolution(self) -> int:
        return self.values.size.bit_length() - 1

    @classmethod
    def zeros(cls, K: int) -> "DyadicFunction":
        return cls(np.zeros(1 << K))

    @classmethod
    def constant(cls, c: float, K: int) -> "DyadicFunction":
        return cls(np.full(1 << K, float(c)))

    def _other(self, other) -> np.ndarray:
        if isinstance(other, DyadicFunction):
            if other.resolution != self.resolution:
                raise ValueError(
                    f"resolution mismatch: {self.resolution} vs {other.resolution}")
            return other.values
        return other

    def __add__(self, other):
        return DyadicFunction(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return DyadicFunction(self.values - self._other(other))

    def __neg__(self):
        return DyadicFunction(-self.values)

    def __mul__(self, other):
        return DyadicFunction(self.values * self._other(other))

    __rmul__ = __mul__

    def __abs__(self):
        return DyadicFunction(np.abs(self.values))

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"DyadicFunction(K={self.resolution}, values={np.array2string(self.values, threshold=8)})"


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    """Walsh-Paley coefficients ``coeffs[n] = (f, w_n)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 1:
            raise ValueError("coeffs must be one-dimensional")
        _resolution_of(c.size)
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def resolution(self) -> int:
        return self.coeffs.size.bit_length() - 1

    @classmethod
    def indicator(cls, n: int, K: int) -> "WalshSpectrum":
        c = np.zeros(1 << K)
        c[n] = 1.0
        return cls(c)


@dataclass(frozen=True, eq=False)
class VecFunction:
    """Finite family ``{f_m}`` of step functions at one resolution.

    Stored as an ``(M, 2^K)`` array; row ``m`` holds the cell values of ``f_m``.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] == 0:
            raise ValueError("need a nonempty (M, 2^K) array")
        _resolution_of(v.shape[1])
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, components: Sequence[DyadicFunction]) -> "VecFunction":
        if not components:
            raise ValueError("VecFunction needs at least one component")
        K = components[0].resolution
        for c in components:
            if c.resolution != K:
                raise ValueError("components must share one resolution")
        return cls(np.stack([c.values for c in components]))

    @property
    def resolution(self) -> int:
        return self.values.shape[1].bit_length() - 1

    @property
    def components(self) -> list[DyadicFunction]:
        return [DyadicFunction(row) for row in self.values]

    def __len__(self) -> int:
        return self.values.shape[0]

    def __add__(self, other: "VecFunction") -> "VecFunction":
        # Concatenation of families (the union of two l2 sequences).
        if other.resolution != self.resolution:
            raise ValueError("resolution mismatch")
        return VecFunction(np.concatenate([self.values, other.values]))


@lru_cache(maxsize=None)
def bit_reversal(K: int) -> np.ndarray:
    """Permutation ``i -> rev_K(i)`` as an index array."""
    idx = np.arange(1 << K, dtype=np.int64)
    rev = np.zeros_like(idx)
    for j in range(K):
        rev |= ((idx >> j) & 1) << (K - 1 - j)
    rev.flags.writeable = False
    return rev


def hadamard(x: np.ndarray) -> np.ndarray:
    """Unnormalized natural-order Walsh-Hadamard transform along the last axis.

    Butterfly passes in a fixed order, so results are bit-identical run to run.
    """
    x = np.array(x, dtype=np.float64)
    n = x.shape[-1]
    _resolution_of(n)
    lead = x.shape[:-1]
    h = 1
    while h < n:
        y = x.reshape(*lead, n // (2 * h), 2, h)
        lo = y[..., 0, :].copy()
        y[..., 0, :] += y[..., 1, :]
        np.subtract(lo, y[..., 1, :], out=y[..., 1, :])
        h *= 2
    return x


def paley_analyze(values: np.ndarray) -> np.ndarray:
    """Coefficients ``int f w_n`` for cell values along the last axis."""
    n = values.shape[-1]
    K = _resolution_of(n)
    return hadamard(values[..., bit_reversal(K)]) / n


def paley_synthesize(coeffs: np.ndarray) -> np.ndarray:
    """Cell values of ``sum_n coeffs[n] w_n`` along the last axis."""
    K = _resolution_of(coeffs.shape[-1])
    return hadamard(coeffs)[..., bit_reversal(K)]


def walsh_values(n: int, K: int) -> np.ndarray:
    if not 0 <= n < (1 << K):
        raise ValueError(f"w_{n} is not resolved at K={K} (need n < 2^K)")
    i = bit_reversal(K) & n
    parity = np.zeros_like(i)
    while i.any():
        parity ^= i & 1
        i = i >> 1
    return 1.0 - 2.0 * parity


def walsh_function(n: int, K: int) -> DyadicFunction:
    """The Walsh-Paley function ``w_n`` sampled on the level-K grid."""
    return DyadicFunction(walsh_values(n, K))


def rademacher(k: int, K: int) -> DyadicFunction:
    """``r_k = sign sin(2^k pi x)`` taken on cell interiors; requires 1 <= k <= K."""
    if not 1 <= k <= K:
        raise ValueError("need 1 <= k <= K")
    i = np.arange(1 << K)
    digit = (i >> (K - k)) & 1
    return DyadicFunction(1.0 - 2.0 * digit)


def fwht_analyze(f: DyadicFunction) -> WalshSpectrum:
    return WalshSpectrum(paley_analyze(f.values))


def fwht_synthesize(s: WalshSpectrum) -> DyadicFunction:
    return DyadicFunction(paley_synthesize(s.coeffs))


def _index_mask(s, K: int) -> np.ndarray:
    N = 1 << K
    mask = np.zeros(N, dtype=bool)
    if isinstance(s, IntervalZ):
        if s.b > N:
            raise ValueError(f"spectral indices must lie in [0, {N}), got {s}")
        mask[s.a:s.b] = True
        return mask
    if isinstance(s, range):
        s = np.arange(s.start, s.stop, s.step)
    idx = np.fromiter(s, dtype=np.int64) if not isinstance(s, np.ndarray) else s.astype(np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= N):
        raise ValueError(f"spectral indices must lie in [0, {N})")
    mask[idx] = True
    return mask


def project_spectrum(f: DyadicFunction, s: Iterable[int]) -> DyadicFunction:
    """Keep the Walsh coefficients of ``f`` indexed by ``s``, zero the rest."""
    mask = _index_mask(s, f.resolution)
    c = paley_analyze(f.values)
    c[~mask] = 0.0
    return DyadicFunction(paley_synthesize(c))


def multiply_pointwise(f: DyadicFunction, g: DyadicFunction) -> DyadicFunction:
    return f * g


def lp_norm(f: DyadicFunction, p: float) -> float:
    """Exact L^p([0,1]) norm of a step function."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return _lp_of_abs(np.abs(f.values), p)


def lp_l2_norm(v: VecFunction, p: float) -> float:
    """Norm of an l2-valued step function in L^p([0,1], l2)."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return _lp_of_abs(np.sqrt(np.sum(v.values ** 2, axis=0)), p)


def _lp_of_abs(a: np.ndarray, p: float) -> float:
    # Rescale by the max so large p cannot overflow.
    top = float(a.max()) if a.size else 0.0
    if top == 0.0:
        return 0.0
    return top * float(np.mean((a / top) ** p)) ** (1.0 / p)
