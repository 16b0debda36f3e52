import json

import pytest

from zpscount.errors import IndexOutOfRange
from zpscount.recursive import CountTable, E_rec, clear_cache, count_table, tildeE, tildeE_i

from oracles import first_unit_column_histogram, histogram

PRIMES = (2, 3, 5)


@pytest.mark.parametrize("args, expected", [
    ((2, 2, 2, 2, 0), 96),
    ((2, 2, 2, 2, 2), 78),
    ((2, 2, 2, 1, 1), 9),
    ((3, 1, 2, 2, 1), 7),
    ((1, 1, 2, 1, 0), 1),
    ((2, 2, 2, 2, 9), 0),
    ((2, 2, 2, 2, -1), 0),
])
def test_E_rec_examples(args, expected):
    assert E_rec(*args) == expected


def test_tildeE_examples():
    # relatively prime 2x2 matrices mod 4 with 4 solutions
    assert tildeE(2, 2, 2, 2, 2) == 78 - E_rec(2, 2, 2, 1, 0)
    assert tildeE(2, 2, 2, 2, 0) == 96


@pytest.mark.parametrize("shape", [(2, 2, 2, 2), (2, 2, 3, 1), (3, 2, 2, 1), (2, 3, 2, 1), (1, 3, 2, 2)])
def test_tildeE_i_against_enumeration(shape):
    n, m, p, s = shape
    hist = first_unit_column_histogram(n, m, p, s)
    for i in range(m):
        for j in range(s * m + 1):
            assert tildeE_i(i, n, m, p, s, j) == hist.get((i, j), 0), (i, j)


def test_tildeE_i_pinned():
    # values confirmed by classifying all 256 matrices
    assert tildeE_i(0, 2, 2, 2, 2, 1) == 48
    assert tildeE_i(1, 2, 2, 2, 2, 1) == 24


def test_tildeE_i_vanishes_past_j():
    for p in PRIMES:
        for s in (1, 2, 3):
            for m in range(2, 5):
                for i in range(m):
                    for j in range(i):
                        assert tildeE_i(i, 3, m, p, s, j) == 0


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        tildeE_i(2, 2, 2, 2, 2, 0)
    with pytest.raises(IndexOutOfRange):
        tildeE_i(-1, 2, 2, 2, 2, 0)


@pytest.mark.parametrize("shape", [
    (1, 1, 2, 3), (2, 1, 3, 2), (1, 2, 2, 2), (2, 2, 2, 2), (2, 2, 3, 1),
    (3, 2, 2, 1), (2, 3, 2, 1), (1, 3, 3, 1), (3, 3, 2, 1), (1, 2, 5, 1),
])
def test_table_matches_enumeration(shape):
    assert count_table(*shape).nonzero() == histogram(*shape)


def test_normalization_small_grid():
    for p in PRIMES:
        for s in range(1, 4):
            for n in range(4):
                for m in range(4):
                    assert count_table(n, m, p, s).total == p ** (s * n * m)


def test_split_by_gcd_of_entries():
    # every matrix is p^k times a relatively prime one, or zero
    for p in (2, 3):
        for s in range(1, 4):
            for n in range(1, 4):
                for m in range(1, 4):
                    for j in range(s * m + 1):
                        rhs = sum(tildeE(n, m, p, s - k, j - k * m) for k in range(s))
                        rhs += int(j == s * m)
                        assert E_rec(n, m, p, s, j) == rhs


def test_wide_single_row():
    # one row of length m: kernel p^(s(m-1)+r) with r the valuation of the gcd
    for p in PRIMES:
        for s in range(1, 4):
            for m in range(1, 5):
                for r in range(s):
                    expected = p ** ((s - r) * m) - p ** ((s - r - 1) * m)
                    assert E_rec(1, m, p, s, s * (m - 1) + r) == expected


def test_degenerate_tables():
    assert count_table(0, 3, 2, 1).nonzero() == {3: 1}
    assert count_table(3, 0, 2, 1).nonzero() == {0: 1}
    assert count_table(2, 2, 2, 2).nonzero() == {0: 96, 1: 72, 2: 78, 3: 9, 4: 1}


def test_cache_clear_keeps_values():
    before = count_table(3, 3, 3, 2).counts
    clear_cache()
    assert count_table(3, 3, 3, 2).counts == before


def test_count_table_json_round_trip():
    t = count_table(3, 2, 5, 3)
    d = json.loads(t.to_json())
    assert d["total"] == str(5 ** 18)
    assert all(isinstance(v, str) for v in d["counts"].values())
    back = CountTable.from_dict(d)
    assert back.counts == t.counts and back.method == "recursive"
    assert back[99] == 0


def test_big_values_stay_exact():
    t = count_table(5, 5, 97, 4)
    assert t.total == 97 ** 100
