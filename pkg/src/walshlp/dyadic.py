"""Integer arithmetic for the dyadic group (Z+, XOR).

Intervals are half-open ``[a, b)`` throughout; ``IntervalZ.last`` gives the
inclusive right end when the closed form is needed.
"""
from __future__ import annotations

from functools import total_ordering
from typing import Iterable

import numpy as np

# Interval sums stay well inside int64.
MAX_INT = 1 << 62


def _check_nonneg(*values: int) -> None:
    for v in values:
        if v < 0 or v > MAX_INT:
            raise ValueError(f"expected an integer in [0, 2^62], got {v}")


@total_ordering
class IntervalZ:
    """Half-open integer interval ``[a, b)`` with ``0 <= a < b``.

    Treat as immutable; equality, hashing and ordering go by ``(a, b)``.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int):
        if not 0 <= a < b <= MAX_INT:
            if a < b:
                raise ValueError(f"interval ends must lie in [0, 2^62], got [{a}, {b})")
            raise ValueError(f"empty interval [{a}, {b})")
        self.a = int(a)
        self.b = int(b)

    def __eq__(self, other):
        if not isinstance(other, IntervalZ):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __lt__(self, other):
        if not isinstance(other, IntervalZ):
            return NotImplemented
        return (self.a, self.b) < (other.a, other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def __reduce__(self):
        return (IntervalZ, (self.a, self.b))

    @classmethod
    def closed(cls, lo: int, hi: int) -> "IntervalZ":
        """Build from inclusive ends ``[lo, hi]``."""
        return cls(lo, hi + 1)

    @property
    def last(self) -> int:
        return self.b - 1

    def __len__(self) -> int:
        return self.b - self.a

    def __contains__(self, n: int) -> bool:
        return self.a <= n < self.b

    def __iter__(self):
        return iter(range(self.a, self.b))

    def to_list(self) -> list[int]:
        return list(range(self.a, self.b))

    def arange(self) -> np.ndarray:
        return np.arange(self.a, self.b, dtype=np.int64)

    def intersect(self, other: "IntervalZ") -> "IntervalZ | None":
        lo, hi = max(self.a, other.a), min(self.b, other.b)
        return IntervalZ(lo, hi) if lo < hi else None

    def __repr__(self) -> str:
        return f"[{self.a}, {self.b})"


def xor_add(a: int, b: int) -> int:
    """Digitwise mod-2 sum of the binary expansions of ``a`` and ``b``."""
    _check_nonneg(a, b)
    return a ^ b


def bit(n: int, k: int) -> int:
    """Binary digit ``k`` of ``n`` (0 or 1)."""
    return (n >> k) & 1


def dyadic_exponents(n: int) -> list[int]:
    """Exponents of the set binary digits of ``n``, strictly descending."""
    _check_nonneg(n)
    return [k for k in range(n.bit_length() - 1, -1, -1) if (n >> k) & 1]


def complement_exponents(n: int, count: int) -> list[int]:
    """First ``count`` nonnegative integers that are not exponents of ``n``, ascending."""
    _check_nonneg(n)
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    k = 0
    while len(out) < count:
        if not (n >> k) & 1:
            out.append(k)
        k += 1
    return out


def delta_block(k: int) -> IntervalZ:
    """The block delta_k: ``{0}`` for k = 0, ``[2^(k-1), 2^k)`` otherwise."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return IntervalZ(0, 1)
    return IntervalZ(1 << (k - 1), 1 << k)


def delta_level(n: int) -> int:
    """The k with ``n`` in delta_k."""
    _check_nonneg(n)
    return n.bit_length()


def xor_translate_set(s: Iterable[int], n: int) -> list[int]:
    """Sorted image ``{x XOR n : x in s}``."""
    _check_nonneg(n)
    arr = np.fromiter(s, dtype=np.int64) if not isinstance(s, np.ndarray) else s.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise ValueError("set elements must be nonnegative")
    return np.unique(arr ^ n).tolist()


def shift_decomposition(n: int, tail_count: int) -> list[tuple[IntervalZ, int]]:
    """Rows ``(source, k)`` with ``source XOR n == delta_k`` exactly.

    Left rows tile ``[0, n)`` following the binary digits of ``n`` from the
    top; then ``({n}, 0)``; then ``tail_count`` rows to the right of ``n``
    driven by the missing digits of ``n``.
    """
    if n < 1:
        raise ValueError("shift_decomposition requires n >= 1")
    if tail_count < 0:
        raise ValueError("tail_count must be >= 0")
    _check_nonneg(n)
    rows = []
    start = 0
    for k in dyadic_exponents(n):
        rows.append((IntervalZ(start, start + (1 << k)), k + 1))
        start += 1 << k
    rows.append((IntervalZ(n, n + 1), 0))
    if tail_count:
        offset = n
        for kappa in complement_exponents(n, tail_count):
            rows.append((IntervalZ(offset + 1, offset + (1 << kappa) + 1), kappa + 1))
            offset += 1 << kappa
    return rows


def blocks_disjoint(sets: Iterable[Iterable[int]]) -> bool:
    """True if the given integer sets are pairwise disjoint."""
    seen: set[int] = set()
    total = 0
    for s in sets:
        items = list(s)
        total += len(items)
        seen.update(items)
        if len(seen) != total:
            return False
    return True
