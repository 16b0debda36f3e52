import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zpscount.errors import BudgetExceeded, NotSquare
from zpscount.linalg import (
    PrimePower,
    ZpsMatrix,
    det_valuation,
    determinant,
    gcd_det_correct,
    kernel_count_bruteforce,
    kernel_counts_bruteforce,
    smith_profile,
    solution_count,
)

from oracles import det_leibniz, kernel_size

MODULI = [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)]

I2 = ZpsMatrix.identity(2, 2, 2)
Z2 = ZpsMatrix.zeros(2, 2, 2, 2)
D2 = ZpsMatrix.from_rows([[2, 0], [0, 2]], 2, 2)


def random_matrix(rng, n, m, p, s):
    q = p ** s
    return ZpsMatrix.from_rows([[rng.randrange(q) for _ in range(m)] for _ in range(n)], p, s)


def random_invertible(rng, n, p, s):
    while True:
        U = random_matrix(rng, n, n, p, s)
        if determinant(U) % p:
            return U


def test_smith_profile_examples():
    assert smith_profile(I2).valuations == (0, 0)
    assert smith_profile(Z2).valuations == (2, 2)
    assert smith_profile(D2).valuations == (1, 1)


def test_solution_count_examples():
    assert solution_count(I2) == 1
    assert solution_count(Z2) == 16
    assert solution_count(D2) == 4


def test_bruteforce_examples():
    assert kernel_count_bruteforce(I2, 10 ** 6) == 1
    assert kernel_count_bruteforce(D2, 10 ** 6) == 4
    wide = ZpsMatrix.zeros(1, 20, 2, 2)
    with pytest.raises(BudgetExceeded):
        kernel_count_bruteforce(wide, 10 ** 6)


def test_det_valuation_examples():
    assert det_valuation(I2) == 0
    assert det_valuation(D2) == 2
    assert det_valuation(ZpsMatrix.from_rows([[2, 1], [0, 1]], 2, 2)) == 1
    with pytest.raises(NotSquare):
        det_valuation(ZpsMatrix.zeros(2, 3, 2, 2))


def test_gcd_det_correct_examples():
    assert gcd_det_correct(I2)
    assert not gcd_det_correct(Z2)
    assert gcd_det_correct(D2)
    with pytest.raises(NotSquare):
        gcd_det_correct(ZpsMatrix.zeros(1, 2, 2, 2))


def test_degenerate_shapes():
    empty_rows = ZpsMatrix.zeros(0, 3, 2, 1)
    assert smith_profile(empty_rows).valuations == ()
    assert solution_count(empty_rows) == 8
    no_cols = ZpsMatrix.zeros(3, 0, 2, 1)
    assert solution_count(no_cols) == 1
    assert kernel_count_bruteforce(empty_rows, 100) == 8
    assert kernel_count_bruteforce(no_cols, 100) == 1


def test_oracle_agreement_random():
    rng = random.Random(20261019)
    for _ in range(1200):
        p, s = rng.choice(MODULI)
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        A = random_matrix(rng, n, m, p, s)
        assert solution_count(A) == kernel_count_bruteforce(A, 10 ** 6)
        if (p ** s) ** m <= 1000:
            assert solution_count(A) == kernel_size(A.rows(), m, p ** s)


def test_sparse_random_matrices():
    # many zero and p-divisible entries exercise the deeper pivots
    rng = random.Random(7)
    for _ in range(300):
        p, s = rng.choice(MODULI)
        q = p ** s
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        pool = [0, 0, p, p ** (s - 1), q - p, 1]
        A = ZpsMatrix.from_rows([[rng.choice(pool) for _ in range(m)] for _ in range(n)], p, s)
        assert solution_count(A) == kernel_count_bruteforce(A, 10 ** 6)


def test_equivalence_invariance():
    rng = random.Random(11)
    for _ in range(200):
        p, s = rng.choice(MODULI)
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        A = random_matrix(rng, n, m, p, s)
        U = random_invertible(rng, n, p, s)
        V = random_invertible(rng, m, p, s)
        prof = smith_profile(A)
        assert smith_profile(U @ A) == prof
        assert smith_profile(A @ V) == prof
        assert smith_profile(U @ A @ V) == prof


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(MODULI), st.integers(0, 5), st.integers(0, 5), st.data())
def test_profile_invariants(mod, n, m, data):
    p, s = mod
    q = p ** s
    entries = data.draw(st.lists(st.integers(0, q - 1), min_size=n * m, max_size=n * m))
    A = ZpsMatrix(PrimePower(p, s), n, m, tuple(entries))
    vals = smith_profile(A).valuations
    assert len(vals) == min(n, m)
    assert list(vals) == sorted(vals)
    assert all(0 <= v <= s for v in vals)
    eta = solution_count(A)
    assert 1 <= eta <= q ** m
    if n == m:
        d = det_valuation(A)
        assert sum(vals) >= d
        if sum(vals) <= s:
            assert sum(vals) == d


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(MODULI), st.integers(1, 4), st.integers(1, 4), st.data())
def test_column_divisibility_bound(mod, n, m, data):
    p, s = mod
    q = p ** s
    i = data.draw(st.integers(0, m))
    rows = [[data.draw(st.integers(0, q - 1)) * (p if k < i else 1) for k in range(m)]
            for _ in range(n)]
    A = ZpsMatrix.from_rows(rows, p, s)
    assert solution_count(A) >= p ** i


def test_determinant_against_leibniz():
    rng = random.Random(3)
    for _ in range(300):
        p, s = rng.choice(MODULI)
        n = rng.randint(1, 4)
        A = random_matrix(rng, n, n, p, s)
        assert determinant(A) == det_leibniz(A.rows()) % (p ** s)


def test_constructor_reduces_entries():
    A = ZpsMatrix.from_rows([[-1, 9], [4, 17]], 2, 2)
    assert A.entries == (3, 1, 0, 1)


def test_prime_power_validation():
    with pytest.raises(ValueError):
        PrimePower(4, 1)
    with pytest.raises(ValueError):
        PrimePower(2, 0)
    assert PrimePower(3, 4).value == 81
    assert PrimePower(3, 2).valuation(0) == 2
    assert PrimePower(3, 2).valuation(18) == 2
    assert PrimePower(3, 2).valuation(6) == 1


def test_json_round_trip():
    A = ZpsMatrix.from_rows([[2, 1, 3], [0, 1, 1]], 2, 2)
    text = A.to_json()
    assert set(json.loads(text)) == {"p", "s", "n", "m", "entries"}
    assert ZpsMatrix.from_json(text) == A


def test_json_load_reduces_and_validates():
    A = ZpsMatrix.from_json('{"p": 3, "s": 1, "n": 1, "m": 2, "entries": [-1, 7]}')
    assert A.entries == (2, 1)
    for bad in ['[1, 2]',
                '{"p": 3, "s": 1, "n": 1, "m": 2}',
                '{"p": 3, "s": 1, "n": 1, "m": 2, "entries": [1]}',
                '{"p": 6, "s": 1, "n": 1, "m": 1, "entries": [1]}',
                '{"p": 3, "s": 1, "n": 1, "m": 1, "entries": ["x"]}']:
        with pytest.raises(ValueError):
            ZpsMatrix.from_json(bad)


def test_batched_enumeration_matches_single():
    rng = random.Random(5)
    batch = np.array([[[rng.randrange(9) for _ in range(3)] for _ in range(2)] for _ in range(50)])
    sizes = kernel_counts_bruteforce(batch, 2, 3, 9)
    for A, size in zip(batch, sizes):
        assert size == kernel_size(A.tolist(), 3, 9)
