"""Reference counts E(n x m, p^s, p^j) by the mutual recursion on E and its
relatively-prime parts.

Notation:
    E_rec        all n x m matrices over Z/p^s with exactly p^j solutions
    tildeE       those with at least one entry invertible mod p
    tildeE_i     those whose first column holding a unit is column i+1
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import IndexOutOfRange
from .exact_arith import gen_phi


@lru_cache(maxsize=None)
def _E(n, m, p, s, j):
    if j < 0 or j > s * m:
        return 0
    if s == 0 or m == 0:
        return int(j == 0)
    if n == 0:
        return int(j == s * m)
    if m == 1:
        return gen_phi(n, p, s - j)
    return _E(n, m, p, s - 1, j - m) + _tildeE(n, m, p, s, j)


@lru_cache(maxsize=None)
def _tildeE(n, m, p, s, j):
    if n == 0 or j < 0:
        return 0
    return sum(_tildeE_i(i, n, m, p, s, j) for i in range(min(j, m - 1) + 1))


@lru_cache(maxsize=None)
def _tildeE_i(i, n, m, p, s, j):
    if n == 0 or j < i:
        return 0
    # the (n-1) x (m-1) block left after eliminating on the pivot column
    inner = _E(n - 1, m - 1, p, s - 1, j - (m - 1)) if j >= m - 1 else 0
    inner += sum(_tildeE_i(k, n - 1, m - 1, p, s, j) for k in range(i, min(j, m - 2) + 1))
    return gen_phi(n, p, s) * p ** ((s - 1) * i + s * (m - i - 1)) * inner


def E_rec(n, m, p, s, j):
    """Number of n x m matrices over Z/p^s whose kernel has exactly p^j elements."""
    if min(n, m, s) < 0:
        raise ValueError("n, m and s must be nonnegative")
    return _E(n, m, p, s, j)


def tildeE(n, m, p, s, j):
    if s < 1 or m < 1:
        raise ValueError("tildeE needs s >= 1 and m >= 1")
    return _tildeE(n, m, p, s, j)


def tildeE_i(i, n, m, p, s, j):
    if not 0 <= i < m:
        raise IndexOutOfRange(f"column index {i} outside [0, {m - 1}]")
    if s < 1:
        raise ValueError("tildeE_i needs s >= 1")
    return _tildeE_i(i, n, m, p, s, j)


def clear_cache():
    for f in (_E, _tildeE, _tildeE_i):
        f.cache_clear()


@dataclass
class CountTable:
    n: int
    m: int
    p: int
    s: int
    counts: dict = field(default_factory=dict)
    method: str = "recursive"

    @property
    def total(self):
        return sum(self.counts.values())

    def __getitem__(self, j):
        return self.counts.get(j, 0)

    def nonzero(self):
        return {j: c for j, c in self.counts.items() if c}

    def to_dict(self):
        return {
            "n": self.n, "m": self.m, "p": self.p, "s": self.s,
            "total": str(self.total),
            "counts": {str(j): str(c) for j, c in sorted(self.counts.items())},
            "method": self.method,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        counts = {int(j): int(c) for j, c in d["counts"].items()}
        return cls(int(d["n"]), int(d["m"]), int(d["p"]), int(d["s"]), counts,
                   d.get("method", "recursive"))


def count_table(n, m, p, s):
    """Full table j -> E_rec for j = 0 .. s*m."""
    return CountTable(n, m, p, s, {j: E_rec(n, m, p, s, j) for j in range(s * m + 1)})
