import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from walshlp.dyadic import delta_block
from walshlp.martingale import (
    check_relocation,
    conditional_expectation,
    distribution_tail,
    geometric_lambda_grid,
    martingale_difference,
    martingale_differences,
    operator_G,
    square_function,
    square_function_vec,
    squared_differences,
    weak_type_on_grid,
    weak_type_sup,
)
from walshlp.walsh import (
    DyadicFunction,
    VecFunction,
    fwht_analyze,
    lp_norm,
    project_spectrum,
    walsh_function,
)


def loop_average(values, k):
    N = values.size
    width = N // 2 ** k
    out = np.empty(N)
    for cell in range(2 ** k):
        sl = slice(cell * width, (cell + 1) * width)
        out[sl] = sum(values[sl]) / width
    return out


def rand_f(K, seed):
    return DyadicFunction(np.random.default_rng(seed).standard_normal(2 ** K))


def test_conditional_expectation_matches_loop_average():
    f = rand_f(6, 0)
    for k in range(7):
        np.testing.assert_allclose(conditional_expectation(f, k).values, loop_average(f.values, k),
                                   atol=1e-13)


def test_conditional_expectation_examples():
    f = rand_f(5, 1)
    np.testing.assert_array_equal(conditional_expectation(f, 5).values, f.values)
    np.testing.assert_allclose(conditional_expectation(f, 0).values, np.full(32, f.values.mean()))
    assert np.max(np.abs(conditional_expectation(walsh_function(3, 4), 1).values)) == 0.0
    with pytest.raises(ValueError):
        conditional_expectation(f, 6)


@pytest.mark.parametrize("K", [1, 4, 9, 12])
def test_conditional_expectation_is_spectral_projection(K):
    f = rand_f(K, K)
    for k in range(K + 1):
        spectral = project_spectrum(f, range(2 ** k))
        assert np.max(np.abs(conditional_expectation(f, k).values - spectral.values)) <= 1e-12


def test_tower_property():
    f = rand_f(8, 2)
    for k in range(9):
        for m in range(9):
            lhs = conditional_expectation(conditional_expectation(f, m), k).values
            rhs = conditional_expectation(f, min(k, m)).values
            assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_martingale_difference_examples():
    K = 4
    w5 = walsh_function(5, K)
    np.testing.assert_allclose(martingale_difference(w5, 3).values, w5.values, atol=1e-15)
    assert np.max(np.abs(martingale_difference(w5, 2).values)) <= 1e-15
    np.testing.assert_allclose(martingale_difference(DyadicFunction.constant(1.5, K), 0).values,
                               np.full(16, 1.5))


def test_martingale_difference_is_block_projection():
    f = rand_f(10, 3)
    for k in range(11):
        blk = delta_block(k)
        assert np.max(np.abs(martingale_difference(f, k).values - project_spectrum(f, blk).values)) <= 1e-12


def test_telescoping():
    f = rand_f(12, 4)
    d = martingale_differences(f.values)
    assert np.max(np.abs(d.sum(axis=0) - f.values)) <= 1e-12


def test_squared_differences_matches_direct_sum():
    v = np.random.default_rng(5).standard_normal((4, 256))
    direct = np.sum(martingale_differences(v) ** 2, axis=(0, 1))
    assert np.max(np.abs(squared_differences(v) - direct)) <= 1e-12


def test_square_function_examples():
    K = 6
    for n in (0, 1, 17, 63):
        np.testing.assert_allclose(square_function(walsh_function(n, K)).values, np.ones(64), atol=1e-13)
    np.testing.assert_allclose(square_function(DyadicFunction.constant(-2.0, K)).values, np.full(64, 2.0))
    np.testing.assert_array_equal(square_function(DyadicFunction.zeros(K)).values, np.zeros(64))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 12), st.integers(0, 2 ** 32 - 1))
def test_square_function_l2_isometry(K, seed):
    f = rand_f(K, seed)
    assert lp_norm(square_function(f), 2) == pytest.approx(lp_norm(f, 2), rel=1e-12)


def test_square_function_vec():
    f = rand_f(7, 6)
    np.testing.assert_allclose(square_function_vec(VecFunction.of([f])).values, square_function(f).values,
                               rtol=1e-14)
    v = VecFunction.of([walsh_function(1, 5), walsh_function(2, 5)])
    np.testing.assert_allclose(square_function_vec(v).values, np.full(32, np.sqrt(2)), atol=1e-14)
    np.testing.assert_array_equal(square_function_vec(VecFunction(np.zeros((2, 8)))).values, np.zeros(8))


def test_square_function_lp_ratio_envelope():
    # No constant is claimed; the ratio is finite and p = 2 is an isometry.
    rng = np.random.default_rng(7)
    ratios = {p: [] for p in (1.1, 1.25, 1.5, 2.0)}
    for _ in range(200):
        f = DyadicFunction(rng.standard_normal(2 ** 12) * rng.exponential(size=2 ** 12))
        Sf = square_function(f)
        for p in ratios:
            ratios[p].append(lp_norm(Sf, p) / lp_norm(f, p))
    for p, rs in ratios.items():
        assert np.all(np.isfinite(rs))
        assert max(rs) < 10.0
    assert max(abs(r - 1) for r in ratios[2.0]) <= 1e-9


def test_weak_type_envelope_for_square_function():
    rng = np.random.default_rng(8)
    vals = []
    for _ in range(200):
        f = DyadicFunction(rng.standard_normal(2 ** 12))
        Sf = square_function(f)
        vals.append(weak_type_on_grid(Sf, geometric_lambda_grid(f)) / lp_norm(f, 1))
    assert np.all(np.isfinite(vals))
    assert max(vals) <= 10 * np.median(vals)


def test_distribution_tail_examples():
    w = walsh_function(5, 4)
    assert distribution_tail(w, 0.5) == 1.0
    assert distribution_tail(w, 2.0) == 0.0
    assert distribution_tail(DyadicFunction([2.0, 0.0]), 1.0) == 0.5
    with pytest.raises(ValueError):
        distribution_tail(w, 0.0)


def test_weak_type_sup_matches_dense_scan():
    f = DyadicFunction(np.random.default_rng(9).standard_normal(64))
    levels = np.sort(np.abs(f.values))
    # just below each attained value the measure jumps; scan there
    scan = max(l * distribution_tail(f, l * (1 - 1e-12)) for l in levels if l > 0)
    assert weak_type_sup(f) == pytest.approx(scan, rel=1e-10)
    assert weak_type_sup(walsh_function(3, 4)) == 1.0
    assert weak_type_sup(DyadicFunction.zeros(3)) == 0.0


def test_operator_G_examples():
    K = 5
    h = DyadicFunction(np.random.default_rng(10).standard_normal(32))
    out = operator_G({(0, 3): h}, {(0, 3): 0})
    np.testing.assert_allclose(out.values, martingale_difference(h, 3).values, atol=1e-15)
    out = operator_G({(0, 1): walsh_function(1, K)}, {(0, 1): 2})
    np.testing.assert_allclose(out.values, walsh_function(3, K).values, atol=1e-15)
    zero = operator_G({(0, 2): DyadicFunction.zeros(K)}, {(0, 2): 8})
    np.testing.assert_array_equal(zero.values, np.zeros(32))


def random_assignment(rng, K, size):
    """Random index set with pairwise disjoint relocated blocks inside [0, 2^K)."""
    taken = set()
    a = {}
    j = 0
    attempts = 0
    while len(a) < size and attempts < 1000:
        attempts += 1
        k = int(rng.integers(0, K + 1))
        shift = int(rng.integers(0, 2 ** K))
        blk = delta_block(k)
        image = {x ^ shift for x in blk}
        if max(image) >= 2 ** K or image & taken:
            continue
        taken |= image
        a[j, k] = shift
        j += 1
    return a


def test_operator_G_l2_identity_and_support():
    rng = np.random.default_rng(11)
    K = 10
    for _ in range(20):
        a = random_assignment(rng, K, 8)
        h = {key: DyadicFunction(rng.standard_normal(2 ** K)) for key in a}
        Gh = operator_G(h, a)
        expected = sum(lp_norm(martingale_difference(h[key], key[1]), 2) ** 2 for key in a)
        assert lp_norm(Gh, 2) ** 2 == pytest.approx(expected, rel=1e-12)
        support = set()
        for (j, k), shift in a.items():
            support |= {x ^ shift for x in delta_block(k)}
        c = fwht_analyze(Gh).coeffs.copy()
        c[sorted(support)] = 0.0
        assert np.max(np.abs(c)) <= 1e-12


def test_operator_G_rejects_bad_input():
    K = 4
    h = {(0, 2): walsh_function(2, K), (1, 2): walsh_function(3, K)}
    with pytest.raises(ValueError, match="overlaps"):
        operator_G(h, {(0, 2): 0, (1, 2): 1})   # {2,3} and {3,2}
    with pytest.raises(ValueError, match="index sets"):
        operator_G(h, {(0, 2): 0})
    with pytest.raises(ValueError, match="leaves"):
        operator_G({(0, 3): walsh_function(5, K)}, {(0, 3): 16})
    check_relocation({(0, 2): 0, (1, 2): 4})
