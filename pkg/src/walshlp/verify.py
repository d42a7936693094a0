"""Exhaustive and randomized verification suites.

Each ``verify_*`` function returns a short summary dict on success and raises
``InvariantViolation`` naming the first failed invariant otherwise.
"""
from __future__ import annotations

import numpy as np

from .decomposition import (
    IntervalPartition,
    chain_from_decomposition,
    decompose_instance,
    partition_interval,
)
from .dyadic import IntervalZ, complement_exponents, delta_block, dyadic_exponents, shift_decomposition, xor_add, xor_translate_set
from .harness import InstanceSpec, InvariantViolation, check_chain_identities, generate_instance, make_rng
from .martingale import (
    conditional_expectation,
    martingale_differences,
    square_function,
)
from .walsh import (
    DyadicFunction,
    VecFunction,
    fwht_analyze,
    fwht_synthesize,
    lp_l2_norm,
    lp_norm,
    paley_analyze,
    paley_synthesize,
    project_spectrum,
    walsh_function,
    walsh_values,
)

EXACT_TOL = 1e-12


def _fail(name: str, detail: str):
    raise InvariantViolation(f"{name}: {detail}")


def verify_group(max_n: int = 256) -> dict:
    """Group laws of XOR addition for all a, b, c < max_n."""
    size = 1 << (max_n - 1).bit_length()
    table = np.array([[xor_add(a, b) for b in range(size)] for a in range(size)], dtype=np.int64)
    n = np.arange(max_n)
    T = table[:max_n, :max_n]
    if not np.array_equal(T, T.T):
        _fail("commutativity", "xor_add(a, b) != xor_add(b, a) for some a, b")
    if not np.array_equal(table[0, :max_n], n):
        _fail("identity", "xor_add(0, a) != a for some a")
    if np.any(np.diag(T) != 0):
        _fail("self-inverse", "xor_add(a, a) != 0 for some a")
    for c in range(max_n):
        lhs = table[T, c]
        rhs = table[n[:, None], table[n[None, :], c]]
        if not np.array_equal(lhs, rhs):
            a, b = map(int, np.argwhere(lhs != rhs)[0])
            _fail("associativity", f"fails at a={a}, b={b}, c={c}")
    return {"max_n": max_n, "triples": max_n ** 3}


def verify_lemma_intervals(max_n: int = 2048, tail_rows: int = 3) -> dict:
    """Each XOR-shift row maps its source exactly onto its delta block."""
    rows_checked = 0
    for n in range(1, max_n):
        rows = shift_decomposition(n, tail_rows)
        exps = dyadic_exponents(n)
        left = rows[:len(exps)]
        start = 0
        for src, k in left:
            if src.a != start:
                _fail("left sources tile [0, n-1]", f"n={n}, gap before {src}")
            start = src.b
        if start != n:
            _fail("left sources tile [0, n-1]", f"n={n}, cover ends at {start}")
        if sorted(k for _, k in left) != sorted(e + 1 for e in exps):
            _fail("left rows cover the digit blocks of n", f"n={n}")
        if rows[len(exps)] != (IntervalZ(n, n + 1), 0):
            _fail("{n} -> delta_0 row", f"n={n}")
        for src, k in rows:
            image = xor_translate_set(src.arange(), n)
            block = delta_block(k)
            if image != block.to_list():
                _fail("shift row image", f"n={n}: {src} XOR n != delta_{k}")
            rows_checked += 1
        tail = rows[len(exps) + 1:]
        if tail and tail[0][0].a != n + 1:
            _fail("tail rows start at n+1", f"n={n}")
        for (s1, _), (s2, _) in zip(tail, tail[1:]):
            if s2.a != s1.b:
                _fail("tail rows contiguous", f"n={n}")
    return {"max_n": max_n, "rows": rows_checked}


def check_partition(P: IntervalPartition, verified: dict | None = None) -> None:
    """All structural invariants of one interval partition.

    ``verified`` caches XOR-image checks, which depend only on (a, j) for
    left pieces and (b, i) for tail pieces.
    """
    a, b = P.interval.a, P.interval.b
    where = f"I=[{a}, {b})"
    pieces = P.pieces
    pos = a
    for piece in pieces:
        if piece.a != pos:
            _fail("pieces form a disjoint exact cover", f"{where}: piece {piece} does not start at {pos}")
        pos = piece.b
    if pos != b:
        _fail("pieces form a disjoint exact cover", f"{where}: cover ends at {pos}")

    lhs = a + sum(1 << k for k in P.kappa) + 1
    rhs = sum(1 << k for k in P.ktilde[:P.rho])
    if lhs != rhs:
        _fail("end of the left pieces", f"{where}: {lhs} != {rhs}")

    top = P.top_exponent
    if (a >> top) & 1 or not (b >> top) & 1 or (a >> (top + 1)) != (b >> (top + 1)):
        _fail("rho selection", f"{where}: digit conditions fail at exponent {top}")

    if P.rho < P.r:
        # J_q and J_(q+1) straight from the complement digits of a
        kap = complement_exponents(a, P.q + 1)
        lo = a + sum(1 << k for k in kap[:-2]) + 1
        Jq = IntervalZ(lo, lo + (1 << kap[-2]))
        Jq1 = IntervalZ(Jq.b, Jq.b + (1 << kap[-1]))
        cut = Jq.intersect(P.interval)
        if cut is None:
            _fail("q characterization", f"{where}: J_q misses I")
        if Jq1.intersect(P.interval) is not None:
            _fail("q characterization", f"{where}: J_(q+1) meets I")
        if cut != IntervalZ(rhs, b):
            _fail("q characterization", f"{where}: J_q cap I = {cut}, expected [{rhs}, {b})")

    cache = verified if verified is not None else {}
    for j, (J, kap) in enumerate(zip(P.J, P.kappa), start=1):
        key = ("L", a, j)
        if cache.get(key) != J:
            if xor_translate_set(J.arange(), a) != delta_block(kap + 1).to_list():
                _fail("left piece localization", f"{where}: J_{j}={J} XOR a != delta_{kap + 1}")
            cache[key] = J
    for i, (J, e) in enumerate(zip(P.Jtilde, P.ktilde[P.rho:]), start=P.rho + 1):
        key = ("T", b, i)
        if cache.get(key) != J:
            if xor_translate_set(J.arange(), b) != delta_block(e + 1).to_list():
                _fail("tail piece localization", f"{where}: Jt_{i}={J} XOR b != delta_{e + 1}")
            cache[key] = J


def verify_partition(max_b: int = 1024) -> dict:
    """Every interval 0 <= a < b <= max_b."""
    if max_b < 1:
        raise ValueError("max_b must be >= 1")
    cache: dict = {}
    count = 0
    tails = 0
    for b in range(1, max_b + 1):
        for a in range(b):
            P = partition_interval(IntervalZ(a, b))
            check_partition(P, cache)
            count += 1
            tails += P.rho < P.r
    return {"max_b": max_b, "intervals": count, "with_tail": tails}


def verify_transform(K: int = 12, trials: int = 100, seed: int = 0, exact_K: int = 8) -> dict:
    """Parseval, round trip, orthonormality and the character identity."""
    rng = make_rng(seed)
    worst_parseval = worst_round = 0.0
    for _ in range(trials):
        f = DyadicFunction(rng.standard_normal(1 << K))
        s = fwht_analyze(f)
        n2 = lp_norm(f, 2) ** 2
        rel = abs(float(np.sum(s.coeffs ** 2)) - n2) / n2
        worst_parseval = max(worst_parseval, rel)
        if rel > EXACT_TOL:
            _fail("Parseval", f"relative error {rel:.3e}")
        err = float(np.max(np.abs(fwht_synthesize(s).values - f.values)))
        worst_round = max(worst_round, err)
        if err > EXACT_TOL:
            _fail("analyze/synthesize round trip", f"max error {err:.3e}")

    N = 1 << exact_K
    W = np.stack([walsh_values(n, exact_K) for n in range(N)])
    gram = W @ W.T / N
    if np.max(np.abs(gram - np.eye(N))) > EXACT_TOL:
        _fail("orthonormality", f"at K={exact_K}")
    for x in range(N):
        prod = W[x][None, :] * W
        target = W[np.arange(N) ^ x]
        if not np.array_equal(prod, target):
            y = int(np.argwhere(np.any(prod != target, axis=1))[0, 0])
            _fail("character identity", f"w_{x} w_{y} != w_{xor_add(x, y)}")
    return {"K": K, "trials": trials, "seed": seed,
            "parseval_rel": worst_parseval, "round_trip": worst_round}


def verify_martingale(K: int = 12, trials: int = 20, seed: int = 0) -> dict:
    rng = make_rng(seed)
    for _ in range(trials):
        f = DyadicFunction(rng.standard_normal(1 << K))
        c = paley_analyze(f.values)
        for k in range(K + 1):
            spectral = np.zeros_like(c)
            spectral[:1 << k] = c[:1 << k]
            err = np.max(np.abs(conditional_expectation(f, k).values - paley_synthesize(spectral)))
            if err > EXACT_TOL:
                _fail("E_k spectral agreement", f"k={k}, error {err:.3e}")
        d = martingale_differences(f.values)
        if np.max(np.abs(d.sum(axis=0) - f.values)) > EXACT_TOL:
            _fail("telescoping", "sum of differences != f")
        s2 = lp_norm(square_function(f), 2)
        n2 = lp_norm(f, 2)
        if abs(s2 - n2) > EXACT_TOL * n2:
            _fail("square function L2 isometry", f"{s2!r} vs {n2!r}")
    for n in range(0, 1 << K, max(1, (1 << K) // 64)):
        if np.max(np.abs(square_function(walsh_function(n, K)).values - 1.0)) > EXACT_TOL:
            _fail("S(w_n) == 1", f"n={n}")
    merging = verify_merging(K, trials=100, seed=seed)
    return {"K": K, "trials": trials, "seed": seed, "merging_worst": merging["worst"]}


def _random_family(rng: np.random.Generator, K: int) -> VecFunction:
    size = int(rng.integers(1, 9))
    scale = rng.exponential(size=(size, 1)) * rng.exponential(size=(1, 1 << K))
    return VecFunction(rng.standard_normal((size, 1 << K)) * scale)


def verify_merging(K: int = 12, trials: int = 100, seed: int = 0,
                   p_grid=(1.0, 1.5, 2.0)) -> dict:
    """||h||_{L^p(l2)} + ||v||_{L^p(l2)} <= sqrt(2) ||h u v||_{L^p(l2)} for 1 <= p <= 2."""
    rng = make_rng(seed)
    worst = 0.0
    for t in range(trials):
        h, v = _random_family(rng, K), _random_family(rng, K)
        if t % 10 == 0:
            v = VecFunction(h.values.copy())   # equality case at p = 2
        both = h + v
        for p in p_grid:
            lhs = lp_l2_norm(h, p) + lp_l2_norm(v, p)
            rhs = np.sqrt(2.0) * lp_l2_norm(both, p)
            worst = max(worst, lhs / rhs)
            if lhs > rhs * (1 + EXACT_TOL):
                _fail("merging inequality", f"trial {t}, p={p}: {lhs!r} > {rhs!r}")
    return {"K": K, "trials": trials, "seed": seed, "worst": float(worst)}


def block_leakage(values: np.ndarray, levels) -> np.ndarray:
    """Per row, the largest Walsh coefficient outside the block delta_k of that row."""
    c = np.abs(paley_analyze(np.atleast_2d(values)))
    for row, k in enumerate(levels):
        blk = delta_block(k)
        c[row, blk.a:min(blk.b, c.shape[1])] = 0.0
    return c.max(axis=1)


def check_decomposition(d, where: str = "") -> None:
    K = d.f.resolution
    scale = max(1.0, float(np.max(np.abs(d.f.values))))
    err = float(np.max(np.abs(d.reconstruct().values - d.f.values)))
    if err > EXACT_TOL * scale:
        _fail("reconstruction", f"{where} error {err:.3e}")
    rows = [g.values for g in d.g_left + d.g_tail]
    levels = d.left_levels + d.tail_levels
    if d.g_tail:
        rows.append(d.g_merged.values)
        levels.append(d.merged_level)
    leak = block_leakage(np.stack(rows), levels)
    if leak.max() > EXACT_TOL:
        i = int(leak.argmax())
        kind = "left" if i < len(d.g_left) else "tail" if i < len(d.g_left) + len(d.g_tail) else "merged"
        _fail(f"{kind} g-piece localization", f"{where} level {levels[i]} leakage {leak[i]:.3e}")
    if d.g_tail:
        # g_{m,q} is also w_a times the restriction of f to J_q cap I
        Jq = d.partition.left_piece(d.partition.q).intersect(d.partition.interval)
        direct = project_spectrum(d.f, Jq).values * walsh_values(d.partition.interval.a, K)
        err = float(np.max(np.abs(direct - d.g_merged.values)))
        if err > EXACT_TOL * scale:
            _fail("merged tail identity", f"{where} error {err:.3e}")


def verify_chain(K: int = 12, trials: int = 200, max_intervals: int = 16, seed: int = 0,
                 p: float = 1.5) -> dict:
    spec = InstanceSpec(resolution=K, max_intervals=max_intervals, seed=seed)
    for t in range(trials):
        inst = generate_instance(spec.with_seed(seed + t))
        parts = decompose_instance(inst)
        for (I, _), d in zip(inst, parts):
            check_decomposition(d, f"seed {seed + t}, I={I}:")
        for q in (p, 2.0):
            rep = chain_from_decomposition(parts, q)
            check_chain_identities(rep, f" (seed {seed + t}, p={q})")
            if q == 2.0 and rep.E > 0 and abs(rep.ratio - 1.0) > 1e-9:
                _fail("p=2 ratio", f"seed {seed + t}: {rep.ratio!r}")
    return {"K": K, "trials": trials, "seed": seed, "max_intervals": max_intervals}
