"""Concrete matrices over Z/p^sZ: normal forms, kernel sizes, determinants."""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, NotSquare
from .exact_arith import is_prime


@dataclass(frozen=True)
class PrimePower:
    p: int
    s: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not isinstance(self.s, int) or self.s < 1:
            raise ValueError(f"exponent must be a positive integer, got {self.s}")

    @property
    def value(self):
        return self.p ** self.s

    def valuation(self, a):
        """p-adic valuation of a residue, capped at s (zero maps to s)."""
        a %= self.value
        if a == 0:
            return self.s
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def __str__(self):
        return f"{self.p}^{self.s}"


@dataclass(frozen=True)
class ZpsMatrix:
    """An n x m matrix over Z/p^sZ, entries stored reduced in row-major order."""

    modulus: PrimePower
    n: int
    m: int
    entries: tuple = field(default=())

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.n * self.m:
            raise ValueError(
                f"expected {self.n * self.m} entries for a {self.n}x{self.m} "
                f"matrix, got {len(self.entries)}")
        q = self.modulus.value
        object.__setattr__(self, "entries", tuple(int(e) % q for e in self.entries))

    @classmethod
    def from_rows(cls, rows, p, s):
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(PrimePower(p, s), n, m, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n, p, s):
        return cls.from_rows([[int(i == k) for k in range(n)] for i in range(n)], p, s)

    @classmethod
    def zeros(cls, n, m, p, s):
        return cls(PrimePower(p, s), n, m, (0,) * (n * m))

    def rows(self):
        return [list(self.entries[i * self.m:(i + 1) * self.m]) for i in range(self.n)]

    def __matmul__(self, other):
        if self.modulus != other.modulus or self.m != other.n:
            raise ValueError("incompatible matrices")
        q = self.modulus.value
        a, b = self.rows(), other.rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.m)) % q
                for j in range(other.m)] for i in range(self.n)]
        return ZpsMatrix(self.modulus, self.n, other.m, tuple(x for r in out for x in r))

    # serialization: five-key JSON object
    def to_dict(self):
        return {"p": self.modulus.p, "s": self.modulus.s, "n": self.n,
                "m": self.m, "entries": list(self.entries)}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ValueError("matrix file must hold a JSON object")
        missing = {"p", "s", "n", "m", "entries"} - d.keys()
        if missing:
            raise ValueError(f"matrix file is missing keys: {sorted(missing)}")
        for key in ("p", "s", "n", "m"):
            if not isinstance(d[key], int) or isinstance(d[key], bool):
                raise ValueError(f"{key!r} must be an integer")
        entries = d["entries"]
        if not isinstance(entries, list) or not all(
                isinstance(e, int) and not isinstance(e, bool) for e in entries):
            raise ValueError("'entries' must be a list of integers")
        return cls(PrimePower(d["p"], d["s"]), d["n"], d["m"], tuple(entries))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SmithProfile:
    """Sorted p-adic valuations of the diagonal normal form."""

    valuations: tuple

    def __iter__(self):
        return iter(self.valuations)

    def __len__(self):
        return len(self.valuations)


def _smith_valuations(rows, n, m, p, s):
    q = p ** s
    a = [r[:] for r in rows]
    vals = []
    for t in range(min(n, m)):
        best, bi, bj = s, -1, -1
        for i in range(t, n):
            row = a[i]
            for j in range(t, m):
                x = row[j]
                if x == 0:
                    continue
                v = 0
                while x % p == 0:
                    x //= p
                    v += 1
                if v < best:
                    best, bi, bj = v, i, j
                    if v == 0:
                        break
            if best == 0:
                break
        if bi < 0:
            vals.extend([s] * (min(n, m) - t))
            break
        a[t], a[bi] = a[bi], a[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
        pv = p ** best
        inv = pow(a[t][t] // pv, -1, q)
        pivot_row = a[t]
        for i in range(t + 1, n):
            x = a[i][t]
            if x:
                f = (x // pv) * inv % q
                row = a[i]
                for j in range(t, m):
                    row[j] = (row[j] - f * pivot_row[j]) % q
        # column clearing only touches row t, whose tail is now a multiple of the pivot
        vals.append(best)
    return tuple(vals)


def smith_profile(A):
    pp = A.modulus
    return SmithProfile(_smith_valuations(A.rows(), A.n, A.m, pp.p, pp.s))


def solution_count(A):
    """Number of x in (Z/p^s)^m with Ax = 0."""
    pp = A.modulus
    e = sum(smith_profile(A).valuations) + pp.s * max(0, A.m - A.n)
    return pp.p ** e


def _all_vectors(m, q):
    # shape (m, q**m), every column a distinct vector
    if m == 0:
        return np.zeros((0, 1), dtype=np.int64)
    grids = np.indices((q,) * m, dtype=np.int64).reshape(m, -1)
    return grids


def row_solution_bits(m, q, vectors=None):
    """For every row r in (Z/q)^m, the packed set of vectors x with r.x = 0.

    Row r sits at index sum(r[k] * q^(m-1-k)); bit v of its entry says
    whether column v of ``_all_vectors(m, q)`` is annihilated.
    """
    if vectors is None:
        vectors = _all_vectors(m, q)
    rows = vectors.T
    chunk = max(1, 2 ** 22 // rows.shape[0])
    return np.concatenate([
        np.packbits(_mod_products(rows[lo:lo + chunk], vectors, q) == 0, axis=1)
        for lo in range(0, rows.shape[0], chunk)])


def _mod_products(flat, vectors, q):
    bound = q ** 2 * max(flat.shape[1], 1)
    if bound >= 2 ** 62:
        raise OverflowError("modulus too large for vectorized enumeration")
    if bound < 2 ** 53:
        # float64 products of these sizes are exact
        return np.fmod(flat.astype(np.float64) @ vectors.astype(np.float64), q)
    return (flat @ vectors) % q


def kernel_counts_bruteforce(batch, n, m, q, vectors=None, row_bits=None):
    """Kernel sizes for a stack of n x m integer matrices by direct enumeration.

    ``batch`` has shape (B, n, m) with entries in [0, q). Every candidate
    vector is tested against every row; no reduction of the matrices is
    performed. ``row_bits`` (from ``row_solution_bits``) lets the per-row
    tests be shared across a large batch.
    """
    batch = np.asarray(batch, dtype=np.int64)
    if batch.ndim != 3 or batch.shape[1:] != (n, m):
        raise ValueError(f"expected a stack of {n}x{m} matrices, got shape {batch.shape}")
    size = batch.shape[0]
    if vectors is None:
        vectors = _all_vectors(m, q)
    if n == 0 or m == 0:
        return np.full(size, vectors.shape[1] if n == 0 else 1, dtype=np.int64)
    if row_bits is not None:
        weights = q ** np.arange(m - 1, -1, -1, dtype=np.int64)
        codes = batch @ weights                     # (B, n)
        common = np.bitwise_and.reduce(row_bits[codes], axis=1)
        return np.bitwise_count(common).sum(axis=1, dtype=np.int64)
    prod = _mod_products(batch.reshape(-1, m), vectors, q).reshape(size, n, -1)
    return np.count_nonzero(~prod.any(axis=1), axis=1)


def kernel_count_bruteforce(A, budget):
    """Count solutions of Ax = 0 by trying all (p^s)^m vectors."""
    q = A.modulus.value
    size = q ** A.m
    if size > budget:
        raise BudgetExceeded(size, budget, "vectors")
    if q ** 2 * max(A.m, 1) < 2 ** 62:
        batch = np.array(A.entries, dtype=np.int64).reshape(1, A.n, A.m)
        return int(kernel_counts_bruteforce(batch, A.n, A.m, q)[0])
    rows = A.rows()
    return sum(1 for x in itertools.product(range(q), repeat=A.m)
               if all(sum(r[k] * x[k] for k in range(A.m)) % q == 0 for r in rows))


def _det_bareiss(rows):
    n = len(rows)
    if n == 0:
        return 1
    a = [r[:] for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def determinant(A):
    """det(A) mod p^s, computed over the integers by fraction-free elimination."""
    if A.n != A.m:
        raise NotSquare(f"determinant needs a square matrix, got {A.n}x{A.m}")
    return _det_bareiss(A.rows()) % A.modulus.value


def det_valuation(A):
    """Valuation of gcd(det A, p^s), in [0, s]."""
    return A.modulus.valuation(determinant(A))


def gcd_det_correct(A):
    """True when gcd(det A, p^s) equals the number of homogeneous solutions."""
    return A.modulus.p ** det_valuation(A) == solution_count(A)
