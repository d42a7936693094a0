"""Random instances, constant estimation over a p-grid, weak-type probes and reports.

Randomness: every trial draws from its own ``numpy.random.Generator`` over
``PCG64(SeedSequence(seed + t))`` where ``seed`` is the base seed and ``t``
the trial number; a TrialRecord carries ``seed + t``.  Rerunning one trial
only needs that integer.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import mean, median
from typing import Callable, Sequence

import numpy as np

from .decomposition import (
    chain_from_decomposition,
    chain_profiles,
    decompose_instance,
    relocation_for_instance,
)
from .dyadic import IntervalZ, delta_block
from .martingale import (
    geometric_lambda_grid,
    operator_G,
    square_function,
    weak_type_on_grid,
    weak_type_sup,
)
from .walsh import MAX_RESOLUTION, DyadicFunction, VecFunction, lp_l2_norm, lp_norm, paley_synthesize

FAMILIES = ("random-disjoint", "dyadic-blocks", "singletons", "full-range", "explicit")
LAWS = ("gaussian", "rademacher-signs", "all-ones")

# p = 2 ratios must equal 1 to this tolerance (orthogonality of disjoint spectra).
P2_TOL = 1e-9
# Exact identities of the decomposition chain, relative to max(1, |value|).
CHAIN_TOL = 1e-12


class InvariantViolation(AssertionError):
    """An identity that must hold exactly (up to rounding) failed."""


@dataclass(frozen=True)
class InstanceSpec:
    resolution: int = 12
    family: str = "random-disjoint"
    law: str = "gaussian"
    max_intervals: int = 16
    min_intervals: int = 1
    seed: int = 0
    intervals: tuple[IntervalZ, ...] = ()   # for family="explicit"

    def __post_init__(self):
        if not 1 <= self.resolution <= MAX_RESOLUTION:
            raise ValueError(f"resolution must lie in [1, {MAX_RESOLUTION}]")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown interval family {self.family!r}")
        if self.law not in LAWS:
            raise ValueError(f"unknown coefficient law {self.law!r}")
        if not 1 <= self.min_intervals <= self.max_intervals:
            raise ValueError("need 1 <= min_intervals <= max_intervals")
        if self.family == "explicit" and not self.intervals:
            raise ValueError("explicit family needs intervals")

    def with_seed(self, seed: int) -> "InstanceSpec":
        return InstanceSpec(self.resolution, self.family, self.law, self.max_intervals,
                            self.min_intervals, seed, self.intervals)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _draw_count(spec: InstanceSpec, rng: np.random.Generator, cap: int) -> int:
    lo, hi = spec.min_intervals, spec.max_intervals
    if lo > cap:
        raise ValueError(
            f"family {spec.family!r} cannot hold {lo} intervals at resolution {spec.resolution}")
    return int(rng.integers(lo, min(hi, cap) + 1))


def generate_intervals(spec: InstanceSpec, rng: np.random.Generator) -> list[IntervalZ]:
    N = 1 << spec.resolution
    fam = spec.family
    if fam == "full-range":
        return [IntervalZ(0, N)]
    if fam == "dyadic-blocks":
        count = min(spec.resolution, spec.max_intervals)
        return [delta_block(k) for k in range(1, count + 1)]
    if fam == "singletons":
        if spec.min_intervals > N:
            raise ValueError(f"cannot place {spec.min_intervals} singletons below 2^{spec.resolution}")
        M = _draw_count(spec, rng, N)
        points = np.sort(rng.choice(N, size=M, replace=False))
        return [IntervalZ(int(n), int(n) + 1) for n in points]
    if fam == "random-disjoint":
        # 2M distinct breakpoints in [0, N], paired consecutively.
        M = _draw_count(spec, rng, (N + 1) // 2)
        cuts = np.sort(rng.choice(N + 1, size=2 * M, replace=False))
        return [IntervalZ(int(lo), int(hi)) for lo, hi in zip(cuts[0::2], cuts[1::2]) if lo < hi]
    out = sorted(spec.intervals)
    for I1, I2 in zip(out, out[1:]):
        if I2.a < I1.b:
            raise ValueError(f"explicit intervals {I1} and {I2} overlap")
    if out and out[-1].b > N:
        raise ValueError(f"explicit interval {out[-1]} exceeds [0, 2^{spec.resolution})")
    return out


def _draw_coeffs(law: str, size: int, rng: np.random.Generator) -> np.ndarray:
    if law == "gaussian":
        return rng.standard_normal(size)
    if law == "rademacher-signs":
        return rng.choice(np.array([-1.0, 1.0]), size=size)
    return np.ones(size)


def generate_instance(spec: InstanceSpec) -> list[tuple[IntervalZ, DyadicFunction]]:
    """Disjoint intervals with one function per interval, spectrum inside it."""
    rng = make_rng(spec.seed)
    N = 1 << spec.resolution
    out = []
    for I in generate_intervals(spec, rng):
        c = np.zeros(N)
        c[I.a:I.b] = _draw_coeffs(spec.law, len(I), rng)
        out.append((I, DyadicFunction(paley_synthesize(c))))
    return out


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    p: float
    K: int
    M: int
    lhs: float
    rhs: float
    ratio: float
    chain: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "p": self.p, "K": self.K, "M": self.M,
                "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "chain": dict(self.chain)}


def _close(x: float, y: float, tol: float = CHAIN_TOL) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def check_chain_identities(rep, where: str = "") -> None:
    if not _close(rep.D1, rep.D2):
        raise InvariantViolation(f"chain D1 == D2 failed{where}: {rep.D1!r} vs {rep.D2!r}")
    if not _close(rep.E, rep.E_g):
        raise InvariantViolation(f"chain E-norm equality failed{where}: {rep.E!r} vs {rep.E_g!r}")


def run_trial(spec: InstanceSpec, p_grid: Sequence[float]) -> list[TrialRecord]:
    inst = generate_instance(spec)
    parts = decompose_instance(inst)
    profiles = chain_profiles(parts)
    records = []
    for p in p_grid:
        rep = chain_from_decomposition(parts, p, profiles)
        check_chain_identities(rep, f" (seed {spec.seed}, p={p})")
        records.append(TrialRecord(spec.seed, float(p), spec.resolution, len(inst),
                                   rep.A, rep.E, rep.ratio, rep.chain_dict()))
    return records


def thread_count() -> int:
    raw = os.environ.get("WALSH_LP_THREADS")
    cap = os.cpu_count() or 1
    if raw is None:
        return cap
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"WALSH_LP_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"WALSH_LP_THREADS must be a positive integer, got {raw!r}")
    return n


def _map_trials(fn: Callable[[int], object], trials: int) -> list:
    # Executor.map keeps input order, so output is canonical regardless of threads.
    workers = min(thread_count(), trials)
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(trials)))


def collect_records(spec: InstanceSpec, p_grid: Sequence[float], trials: int) -> list[TrialRecord]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for p in p_grid:
        if not 1 < p <= 2:
            raise ValueError(f"p must lie in (1, 2], got {p}")
    per_trial = _map_trials(lambda t: run_trial(spec.with_seed(spec.seed + t), p_grid), trials)
    records = [r for rs in per_trial for r in rs]
    records.sort(key=lambda r: (r.seed, r.p))
    return records


def _stats(xs: list[float]) -> dict[str, float]:
    return {"max": max(xs), "median": median(xs), "mean": mean(xs), "count": len(xs)}


def summarize(records: Sequence[TrialRecord]) -> dict:
    by_p: dict[float, list[TrialRecord]] = {}
    for r in records:
        by_p.setdefault(r.p, []).append(r)
    table = {}
    for p in sorted(by_p):
        rs = by_p[p]
        by_M: dict[int, list[float]] = {}
        for r in rs:
            by_M.setdefault(r.M, []).append(r.ratio)
        per_M = {M: _stats(by_M[M]) for M in sorted(by_M)}
        maxima = [per_M[M]["max"] for M in sorted(per_M)]
        table[p] = {
            **_stats([r.ratio for r in rs]),
            "by_M": per_M,
            # observational only; small samples make this noisy
            "max_nonincreasing_in_M": all(x >= y for x, y in zip(maxima, maxima[1:])),
        }
    overall = max((r.ratio for r in records), default=0.0)
    return {"per_p": table, "max_ratio": overall}


def estimate_constants(spec: InstanceSpec, p_grid: Sequence[float], trials: int):
    """Ratios ||sum f_m||_p / ||{f_m}||_{L^p(l2)} over random trials.

    Returns ``(summary, records)``.  Raises InvariantViolation if any p = 2
    ratio is not 1 within ``P2_TOL`` or a ratio is not finite.
    """
    records = collect_records(spec, p_grid, trials)
    for r in records:
        if not all(math.isfinite(x) for x in (r.lhs, r.rhs, r.ratio)):
            raise InvariantViolation(f"non-finite ratio at seed {r.seed}, p={r.p}")
        if r.p == 2.0 and r.rhs > 0 and abs(r.ratio - 1.0) > P2_TOL:
            raise InvariantViolation(
                f"p=2 orthogonality anchor failed at seed {r.seed}: ratio {r.ratio!r}")
    return summarize(records), records


def weak_type_value(f: DyadicFunction, lambda_grid=None) -> float:
    if lambda_grid is None:
        lambda_grid = geometric_lambda_grid(f)
    elif isinstance(lambda_grid, str) and lambda_grid == "exact":
        return weak_type_sup(f)
    return weak_type_on_grid(f, lambda_grid)


def _weak_trial(operator: str, spec: InstanceSpec, lambda_grid) -> float:
    inst = generate_instance(spec)
    if operator == "S":
        f = DyadicFunction(np.sum([g.values for _, g in inst], axis=0))
        Tf = square_function(f)
        norm1 = lp_norm(f, 1.0)
    else:
        h, shifts = relocation_for_instance(inst)
        Tf = operator_G(h, shifts)
        norm1 = lp_l2_norm(VecFunction.of([h[k] for k in sorted(h)]), 1.0)
    if norm1 == 0.0:
        return 0.0
    return weak_type_value(Tf, lambda_grid) / norm1


def weak_type_probe(operator: str, spec: InstanceSpec, trials: int, lambda_grid=None) -> dict:
    """Per trial ``sup_lam lam |{|Tf| > lam}| / ||f||_1`` for T = S or G.

    ``lambda_grid``: None for the default geometric grid around the median of
    |Tf|, an explicit sequence, or ``"exact"`` for the exact supremum.
    For G the input is the relocation family of the instance and the norm is
    its L^1(l2) norm.
    """
    if operator not in ("S", "G"):
        raise ValueError("operator must be 'S' or 'G'")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    values = _map_trials(lambda t: _weak_trial(operator, spec.with_seed(spec.seed + t), lambda_grid),
                         trials)
    return {"operator": operator, "seeds": [spec.seed + t for t in range(trials)],
            "values": values, **_stats(values)}


RECORD_FIELDS = ("seed", "p", "K", "M", "lhs", "rhs", "ratio")
CHAIN_FIELDS = ("A", "B", "C1", "C2", "D1", "D2", "E")


def emit_report(records: Sequence[TrialRecord], fmt: str, destination) -> None:
    """Write records as a JSON array or CSV, sorted by (seed, p)."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    rows = sorted(records, key=lambda r: (r.seed, r.p))
    path = Path(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if fmt == "json":
                json.dump([r.to_dict() for r in rows], fh, indent=1)
                fh.write("\n")
            else:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(list(RECORD_FIELDS) + [f"chain.{c}" for c in CHAIN_FIELDS])
                for r in rows:
                    d = r.to_dict()
                    w.writerow([repr(d[k]) if isinstance(d[k], float) else d[k] for k in RECORD_FIELDS]
                               + [repr(float(r.chain[c])) for c in CHAIN_FIELDS])
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
