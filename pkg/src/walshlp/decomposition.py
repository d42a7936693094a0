"""Interval decomposition behind the one-sided Littlewood-Paley inequality.

An interval ``I = [a, b)`` splits into ``{a}``, left pieces ``J_1..J_{q-1}``
grown from ``a`` by filling its empty low binary digits, and tail pieces
``Jt_{rho+1}..Jt_r`` taken from the binary expansion of ``b``.  XOR by ``a``
maps each left piece onto a single block delta_{kappa_j+1}; XOR by ``b`` maps
each tail piece onto delta_{kt_i+1}.  Multiplying the spectral pieces of f by
``w_a`` or ``w_b`` therefore turns them into martingale differences.

Indices below follow the usual 1-based convention: ``kappa[j-1]`` is kappa_j,
``ktilde[i-1]`` is kt_i.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dyadic import IntervalZ, complement_exponents, dyadic_exponents
from .martingale import squared_differences
from .walsh import (
    DyadicFunction,
    lp_norm,
    paley_analyze,
    paley_synthesize,
    walsh_values,
)

# Coefficients below this magnitude count as zero for support checks.
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class IntervalPartition:
    interval: IntervalZ
    q: int
    rho: int
    r: int
    kappa: tuple[int, ...]       # kappa_1..kappa_{q-1}, ascending
    ktilde: tuple[int, ...]      # kt_1..kt_r, descending (all exponents of b)
    J: tuple[IntervalZ, ...]     # J_1..J_{q-1}
    Jtilde: tuple[IntervalZ, ...]  # Jt_{rho+1}..Jt_r

    @property
    def singleton(self) -> IntervalZ:
        return IntervalZ(self.interval.a, self.interval.a + 1)

    @property
    def pieces(self) -> list[IntervalZ]:
        return [self.singleton, *self.J, *self.Jtilde]

    @property
    def top_exponent(self) -> int:
        """kt_rho: the highest binary digit where a and b differ."""
        return self.ktilde[self.rho - 1]

    @property
    def a_tilde(self) -> int:
        return self.interval.a + sum(1 << k for k in self.kappa)

    def left_piece(self, j: int) -> IntervalZ:
        """J_j for any j >= 1, including those reaching past b."""
        kap = complement_exponents(self.interval.a, j)
        lo = self.interval.a + sum(1 << k for k in kap[:-1]) + 1
        return IntervalZ(lo, lo + (1 << kap[-1]))

    def kappa_at(self, j: int) -> int:
        return complement_exponents(self.interval.a, j)[-1]


def partition_interval(I: IntervalZ) -> IntervalPartition:
    a, b = I.a, I.b
    ktilde = dyadic_exponents(b)
    r = len(ktilde)
    # kt_rho is the top bit where a and b differ; there b has a 1 and a a 0.
    top = (a ^ b).bit_length() - 1
    rho = ktilde.index(top) + 1

    kappa = []
    lo = a + 1
    J = []
    k = 0
    while k < top:
        if not (a >> k) & 1:
            kappa.append(k)
            J.append(IntervalZ(lo, lo + (1 << k)))
            lo += 1 << k
        k += 1
    q = len(kappa) + 1

    Jtilde = []
    start = sum(1 << e for e in ktilde[:rho])
    for e in ktilde[rho:]:
        Jtilde.append(IntervalZ(start, start + (1 << e)))
        start += 1 << e

    return IntervalPartition(I, q, rho, r, tuple(kappa), tuple(ktilde), tuple(J), tuple(Jtilde))


@dataclass
class DecomposedFunction:
    """Spectral pieces of one f_m and their modulations.

    ``g_left[0]`` is g_{m,0} = w_a f_{m,0}; ``g_left[j]`` is g_{m,j}.
    ``g_merged`` is g_{m,q} = w_a w_b sum_i gt_{m,i}.
    """

    partition: IntervalPartition
    f: DyadicFunction
    f_left: list[DyadicFunction]     # f_{m,0}, f_{m,1}, ..., f_{m,q-1}
    f_tail: list[DyadicFunction]     # ft_{m,rho+1}, ..., ft_{m,r}
    g_left: list[DyadicFunction]
    g_tail: list[DyadicFunction]
    g_merged: DyadicFunction
    g: DyadicFunction                # g_m = w_a f_m

    @property
    def left_levels(self) -> list[int]:
        """Martingale level of each g_left entry: 0, then kappa_j + 1."""
        return [0] + [k + 1 for k in self.partition.kappa]

    @property
    def tail_levels(self) -> list[int]:
        p = self.partition
        return [k + 1 for k in p.ktilde[p.rho:]]

    @property
    def merged_level(self) -> int:
        return self.partition.kappa_at(self.partition.q) + 1

    def reconstruct(self) -> DyadicFunction:
        total = np.zeros_like(self.f.values)
        for piece in self.f_left + self.f_tail:
            total = total + piece.values
        return DyadicFunction(total)


def _check_support(coeffs: np.ndarray, I: IntervalZ, K: int) -> None:
    if I.b > (1 << K):
        raise ValueError(f"interval {I} exceeds the resolved spectrum [0, 2^{K})")
    outside = np.abs(coeffs).copy()
    outside[I.a:I.b] = 0.0
    worst = float(outside.max())
    if worst > SUPPORT_TOL:
        n = int(outside.argmax())
        raise ValueError(
            f"spectrum leaks outside {I}: coefficient {n} has magnitude {worst:.3e}")


def decompose_function(f: DyadicFunction, I: IntervalZ) -> DecomposedFunction:
    K = f.resolution
    coeffs = paley_analyze(f.values)
    _check_support(coeffs, I, K)
    part = partition_interval(I)

    pieces = part.pieces
    c = np.zeros((len(pieces), coeffs.size))
    for row, J in enumerate(pieces):
        c[row, J.a:J.b] = coeffs[J.a:J.b]
    synthesized = [DyadicFunction(v) for v in paley_synthesize(c)]
    f_left = synthesized[:part.q]
    f_tail = synthesized[part.q:]
    wa = walsh_values(I.a, K)
    g_left = [p * wa for p in f_left]
    if f_tail:
        # b < 2^K whenever the tail is nonempty, so w_b is resolved.
        wb = walsh_values(I.b, K)
        g_tail = [p * wb for p in f_tail]
        g_merged = DyadicFunction(wa * wb * np.sum([g.values for g in g_tail], axis=0))
    else:
        g_tail = []
        g_merged = DyadicFunction.zeros(K)
    return DecomposedFunction(part, f, f_left, f_tail, g_left, g_tail, g_merged, f * wa)


@dataclass(frozen=True)
class ChainReport:
    """Every norm appearing in the proof chain, at one exponent p.

    A:  ||sum f_m||_p
    B:  ||(sum |g_{m,j}|^2 (j < q_m) + sum |gt_{m,i}|^2)^(1/2)||_p
    C1, C2: the two terms of the triangle-inequality split
    D1: ||(sum_{j <= q_m} |g_{m,j}|^2)^(1/2)||_p
    D2: ||(sum_m sum_k |Delta_k g_m|^2)^(1/2)||_p
    E:  ||{f_m}||_{L^p(l2)};  E_g: ||{g_m}||_{L^p(l2)}
    """

    p: float
    A: float
    B: float
    C1: float
    C2: float
    D1: float
    D2: float
    E: float
    E_g: float

    @property
    def ratio(self) -> float:
        return self.A / self.E if self.E > 0 else 0.0

    def chain_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in ("A", "B", "C1", "C2", "D1", "D2", "E")}


Instance = Sequence[tuple[IntervalZ, DyadicFunction]]


def check_instance(instance: Instance) -> int:
    """Validate an instance and return its common resolution."""
    if not instance:
        raise ValueError("instance has no intervals")
    Ks = {f.resolution for _, f in instance}
    if len(Ks) != 1:
        raise ValueError("functions in an instance must share one resolution")
    K = Ks.pop()
    ordered = sorted(instance, key=lambda t: t[0].a)
    for (I1, _), (I2, _) in zip(ordered, ordered[1:]):
        if I2.a < I1.b:
            raise ValueError(f"intervals {I1} and {I2} overlap")
    for I, _ in instance:
        if I.b > (1 << K):
            raise ValueError(f"interval {I} exceeds the resolved spectrum [0, 2^{K})")
    return K


def decompose_instance(instance: Instance) -> list[DecomposedFunction]:
    check_instance(instance)
    out = []
    for I, f in instance:
        try:
            out.append(decompose_function(f, I))
        except ValueError as exc:
            raise ValueError(f"interval {I}: {exc}") from None
    return out


def chain_profiles(parts: list[DecomposedFunction]) -> dict[str, np.ndarray]:
    """Pointwise magnitudes whose L^p norms make up the chain; independent of p."""
    K = parts[0].f.resolution
    zero = np.zeros(1 << K)
    total = zero.copy()
    left_sq = zero.copy()
    tail_sq = zero.copy()
    tail_sum_sq = zero.copy()
    merged_sq = zero.copy()
    for d in parts:
        total += d.f.values
        for g in d.g_left:
            left_sq += g.values ** 2
        s = zero.copy()
        for g in d.g_tail:
            tail_sq += g.values ** 2
            s += g.values
        tail_sum_sq += s ** 2
        merged_sq += d.g_merged.values ** 2
    gs = np.stack([d.g.values for d in parts])
    fs = np.stack([d.f.values for d in parts])
    return {
        "A": np.abs(total),
        "B": np.sqrt(left_sq + tail_sq),
        "C1": np.sqrt(left_sq),
        "C2": np.sqrt(tail_sum_sq),
        "D1": np.sqrt(left_sq + merged_sq),
        "D2": np.sqrt(squared_differences(gs)),
        "E": np.sqrt(np.sum(fs ** 2, axis=0)),
        "E_g": np.sqrt(np.sum(gs ** 2, axis=0)),
    }


def chain_from_decomposition(parts: list[DecomposedFunction], p: float,
                             profiles: dict[str, np.ndarray] | None = None) -> ChainReport:
    if not 1 < p <= 2:
        raise ValueError(f"p must lie in (1, 2], got {p}")
    if profiles is None:
        profiles = chain_profiles(parts)
    return ChainReport(p=p, **{k: lp_norm(DyadicFunction(v), p) for k, v in profiles.items()})


def theorem_chain(instance: Instance, p: float) -> ChainReport:
    return chain_from_decomposition(decompose_instance(instance), p)


def relocation_for_instance(instance: Instance):
    """Build (h, a) so that ``operator_G(h, a)`` reassembles ``sum f_m``.

    Each g-piece becomes one family member at its martingale level, shifted
    back by ``a_m`` (left pieces) or ``b_m`` (tail pieces).  The first index
    counts pieces across the whole instance.
    """
    h: dict[tuple[int, int], DyadicFunction] = {}
    shifts: dict[tuple[int, int], int] = {}
    j = 0
    for (I, _), d in zip(instance, decompose_instance(instance)):
        for g, k in zip(d.g_left, d.left_levels):
            h[j, k] = g
            shifts[j, k] = I.a
            j += 1
        for g, k in zip(d.g_tail, d.tail_levels):
            h[j, k] = g
            shifts[j, k] = I.b
            j += 1
    return h, shifts
