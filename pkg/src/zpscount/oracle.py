"""Exhaustive ground truth: enumerate every n x m matrix over Z/p^s.

Two independent routes produce a CountTable:

* ``bruteforce_table`` reduces each matrix to its diagonal profile.
* ``bruteforce_table_direct`` tests every candidate solution vector and
  never touches the normal-form code.

Matrix indices run over a mixed-radix counter (radix p^s, one digit per
entry, row-major). Workers take contiguous index ranges and partial
histograms are summed, so the result does not depend on the split.
"""

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .linalg import (
    _all_vectors,
    _smith_valuations,
    kernel_counts_bruteforce,
    row_solution_bits,
)
from .recursive import CountTable

DEFAULT_MAX_MATRICES = 2 ** 24
DEFAULT_MAX_VECTORS = 2 ** 16
_BATCH = 1 << 14
# largest row space for which per-row solution sets are tabulated
_ROW_TABLE_LIMIT = 20_000


@dataclass(frozen=True)
class OracleBudget:
    max_matrices: int = DEFAULT_MAX_MATRICES
    max_vectors_per_matrix: int = DEFAULT_MAX_VECTORS

    def __post_init__(self):
        if self.max_matrices < 1 or self.max_vectors_per_matrix < 1:
            raise ValueError("oracle budgets must be positive")


def default_workers():
    try:
        return max(1, int(os.environ.get("ZPS_COUNT_THREADS", "1")))
    except ValueError:
        return 1


def _digits(start, stop, k, q):
    """Rows of base-q digits (most significant first) for indices in [start, stop)."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, k), dtype=np.int64)
    for pos in range(k - 1, -1, -1):
        out[:, pos] = idx % q
        idx //= q
    return out


def _snf_chunk(n, m, p, s, start, stop):
    hist = Counter()
    k = n * m
    q = p ** s
    extra = s * max(0, m - n)
    for lo in range(start, stop, _BATCH):
        block = _digits(lo, min(stop, lo + _BATCH), k, q).tolist()
        for e in block:
            rows = [e[i * m:(i + 1) * m] for i in range(n)]
            hist[sum(_smith_valuations(rows, n, m, p, s)) + extra] += 1
    return hist


def _direct_chunk(n, m, p, s, start, stop):
    hist = Counter()
    q = p ** s
    vectors = _all_vectors(m, q)
    row_bits = None
    if 0 < vectors.shape[1] <= _ROW_TABLE_LIMIT:
        row_bits = row_solution_bits(m, q, vectors)
        step = _BATCH
    else:
        # keep the (B, n, V) product near a few million cells
        step = max(1, min(_BATCH, 4_000_000 // max(1, n * vectors.shape[1])))
    log_table = {p ** j: j for j in range(s * m + 1)}
    for lo in range(start, stop, step):
        hi = min(stop, lo + step)
        block = _digits(lo, hi, n * m, q).reshape(hi - lo, n, m)
        sizes, freq = np.unique(kernel_counts_bruteforce(block, n, m, q, vectors, row_bits),
                                return_counts=True)
        for size, f in zip(sizes.tolist(), freq.tolist()):
            hist[log_table[size]] += f
    return hist


def _run(chunk_fn, n, m, p, s, workers):
    total = (p ** s) ** (n * m)
    if total >= 2 ** 62:
        raise OverflowError("matrix space too large to index")
    workers = max(1, min(workers, total // _BATCH + 1))
    bounds = [total * w // workers for w in range(workers + 1)]
    if workers == 1:
        hist = chunk_fn(n, m, p, s, 0, total)
    else:
        hist = Counter()
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(chunk_fn, n, m, p, s, bounds[w], bounds[w + 1])
                       for w in range(workers)]
            for f in futures:
                hist.update(f.result())
    return {j: hist.get(j, 0) for j in range(s * m + 1)}


def _check_matrix_budget(n, m, p, s, budget):
    size = (p ** s) ** (n * m)
    if size > budget.max_matrices:
        raise BudgetExceeded(size, budget.max_matrices)


def bruteforce_table(n, m, p, s, budget=None, workers=None):
    budget = budget or OracleBudget()
    _check_matrix_budget(n, m, p, s, budget)
    counts = _run(_snf_chunk, n, m, p, s, workers or default_workers())
    return CountTable(n, m, p, s, counts, method="bruteforce")


def bruteforce_table_direct(n, m, p, s, budget=None, workers=None):
    budget = budget or OracleBudget()
    _check_matrix_budget(n, m, p, s, budget)
    vec = (p ** s) ** m
    if vec > budget.max_vectors_per_matrix:
        raise BudgetExceeded(vec, budget.max_vectors_per_matrix, "vectors per matrix")
    counts = _run(_direct_chunk, n, m, p, s, workers or default_workers())
    return CountTable(n, m, p, s, counts, method="bruteforce")
