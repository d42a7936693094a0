import itertools

import pytest
from hypothesis import given, settings, strategies as st

from walshlp.dyadic import (
    IntervalZ,
    blocks_disjoint,
    complement_exponents,
    delta_block,
    delta_level,
    dyadic_exponents,
    shift_decomposition,
    xor_add,
    xor_translate_set,
)


def digit_sum(a, b):
    """Digitwise mod-2 addition by repeated halving, independent of ``^``."""
    out, place = 0, 1
    while a or b:
        a, da = divmod(a, 2)
        b, db = divmod(b, 2)
        out += ((da + db) % 2) * place
        place *= 2
    return out


def halving_exponents(n):
    exps, k = [], 0
    while n:
        n, d = divmod(n, 2)
        if d:
            exps.append(k)
        k += 1
    return exps[::-1]


naturals = st.integers(min_value=0, max_value=2 ** 40)


@pytest.mark.parametrize("a,b,expected", [(5, 3, 6), (7, 7, 0), (0, 42, 42)])
def test_xor_add_examples(a, b, expected):
    assert xor_add(a, b) == expected
    assert digit_sum(a, b) == expected


def test_xor_add_matches_digit_oracle():
    for a, b in itertools.product(range(64), repeat=2):
        assert xor_add(a, b) == digit_sum(a, b)


@given(naturals, naturals, naturals)
def test_group_laws(a, b, c):
    assert xor_add(a, b) == xor_add(b, a)
    assert xor_add(xor_add(a, b), c) == xor_add(a, xor_add(b, c))
    assert xor_add(a, 0) == a
    assert xor_add(a, a) == 0


def test_xor_add_rejects_negative():
    with pytest.raises(ValueError):
        xor_add(-1, 3)


@pytest.mark.parametrize("n,expected", [(6, [2, 1]), (0, []), (1, [0]), (13, [3, 2, 0])])
def test_dyadic_exponents(n, expected):
    assert dyadic_exponents(n) == expected


@given(naturals)
def test_dyadic_exponents_reconstruct(n):
    exps = dyadic_exponents(n)
    assert exps == halving_exponents(n)
    assert sum(2 ** k for k in exps) == n
    assert all(x > y for x, y in zip(exps, exps[1:]))


@pytest.mark.parametrize("n,count,expected", [(6, 3, [0, 3, 4]), (0, 3, [0, 1, 2]), (1, 2, [1, 2])])
def test_complement_exponents(n, count, expected):
    assert complement_exponents(n, count) == expected


@given(st.integers(0, 2 ** 20), st.integers(1, 30))
def test_complement_exponents_enumeration(n, count):
    exps = set(halving_exponents(n))
    expected = [k for k in range(80) if k not in exps][:count]
    assert complement_exponents(n, count) == expected


def test_complement_exponents_rejects_zero_count():
    with pytest.raises(ValueError):
        complement_exponents(5, 0)


@pytest.mark.parametrize("k,lo,hi", [(0, 0, 0), (1, 1, 1), (3, 4, 7)])
def test_delta_block(k, lo, hi):
    assert delta_block(k) == IntervalZ.closed(lo, hi)


def test_delta_blocks_partition_naturals():
    covered = []
    for k in range(12):
        blk = delta_block(k)
        assert len(blk) == (1 if k == 0 else 2 ** (k - 1))
        covered.extend(blk)
        assert all(delta_level(n) == k for n in blk)
    assert covered == list(range(2 ** 11))


def test_xor_translate_set_examples():
    assert xor_translate_set({0, 1, 2, 3}, 6) == [4, 5, 6, 7]
    s = [3, 9, 17]
    assert xor_translate_set(s, 0) == s
    assert xor_translate_set({6}, 6) == [0]


@given(st.sets(st.integers(0, 10 ** 6), max_size=50), st.integers(0, 10 ** 6))
def test_xor_translate_preserves_size(s, n):
    image = xor_translate_set(s, n)
    assert len(image) == len(s)
    assert image == sorted({digit_sum(x, n) for x in s})


def test_shift_decomposition_examples():
    rows = shift_decomposition(6, 1)
    assert rows == [
        (IntervalZ.closed(0, 3), 3),
        (IntervalZ.closed(4, 5), 2),
        (IntervalZ.closed(6, 6), 0),
        (IntervalZ.closed(7, 7), 1),
    ]
    assert shift_decomposition(1, 0) == [(IntervalZ.closed(0, 0), 1), (IntervalZ.closed(1, 1), 0)]
    for k in range(8):
        n = 2 ** k
        assert shift_decomposition(n, 0) == [(IntervalZ(0, n), k + 1), (IntervalZ(n, n + 1), 0)]


def test_shift_decomposition_rejects_zero():
    with pytest.raises(ValueError):
        shift_decomposition(0, 2)


@settings(deadline=None)
@given(st.integers(1, 2 ** 14), st.integers(0, 4))
def test_shift_rows_match_brute_force(n, tail):
    for src, k in shift_decomposition(n, tail):
        image = sorted({digit_sum(x, n) for x in src})
        assert image == delta_block(k).to_list()


def test_interval_validation():
    with pytest.raises(ValueError):
        IntervalZ(3, 3)
    with pytest.raises(ValueError):
        IntervalZ(-1, 2)
    I = IntervalZ(2, 5)
    assert 2 in I and 5 not in I
    assert I.last == 4
    assert I.intersect(IntervalZ(4, 9)) == IntervalZ(4, 5)
    assert I.intersect(IntervalZ(5, 9)) is None


def test_blocks_disjoint():
    assert blocks_disjoint([[1, 2], [3], [4, 5]])
    assert not blocks_disjoint([[1, 2], [2, 3]])
