"""Square systems: how often gcd(det A, p^s) equals the solution count.

The formula is right exactly when the kernel has at most p^s elements, so
the probability is (E_0 + ... + E_s) / p^(s n^2). Everything here is exact.
"""

import math
from fractions import Fraction
from itertools import product

from .errors import DuplicatePrime
from .exact_arith import (
    factor_product,
    qbinom,
    qbinom_at_inverse,
    triangular,
)
from .explicit import E_jeq_s, Phi


def sum_E_below_s(n, p, s):
    """Number of n x n matrices with at most p^(s-1) solutions."""
    return p ** (s * (n * n - n) - triangular(n - 1)) * factor_product(n + s - 1, s, p)


def sum_E_below_s_series(n, p, s):
    """The same count, normalized by p^(s n^2), as an alternating series in 1/p."""
    return sum(
        (-1) ** j * Fraction(p) ** (-j * s - triangular(j - 1)) * qbinom_at_inverse(n, j, p)
        for j in range(n + 1))


def E_nn_jeqs_normalized(n, p, s):
    """E(n x n, p^s, p^s) / p^(s n^2) as a series in 1/p."""
    P = Fraction(p)
    first = sum((-1) ** j * P ** (-n - (j + 1) * s - triangular(j))
                * qbinom_at_inverse(n - 1, j, p) for j in range(n))
    second = sum((-1) ** i * P ** (-triangular(i + 1)) * qbinom_at_inverse(n - 1, i, p)
                 for i in range(n))
    return (p ** n - 1) * first + P ** (-s) * qbinom_at_inverse(n, 1, p) * second


def prob_gcd_correct(n, p, s):
    total = sum_E_below_s(n, p, s) + E_jeq_s(n, n, p, s)
    return Fraction(total, p ** (s * n * n))


def asymptotic_residual(n, p, s):
    """(1 - p^(-s-3)) minus the exact probability."""
    if n < 2:
        raise ValueError("the asymptotic statement covers n >= 2 only")
    return 1 - Fraction(1, p ** (s + 3)) - prob_gcd_correct(n, p, s)


def phi_chain_square(n, p, s, j):
    """phi_1(p^(s-j)) * prod_{u=2..n} phi_u(p^s), j < s, collapsed to p^e * S(n, 1)."""
    return p ** ((s - 1) * triangular(n) - j) * factor_product(n, 1, p)


def Phi_square(n, p, s, k):
    """Phi(p^s, k) for m = n in closed form.

    The k = 0 exponent carries a +n that is needed for agreement with the
    product definition.
    """
    if k == 0:
        return Fraction(p) ** (s * triangular(n, 2) - 2 * triangular(n) + n) * factor_product(n, 1, p)
    if 1 <= k <= n - 2:
        return Fraction(p) ** (s * triangular(n, 2) - triangular(n) - triangular(n - k - 1)) \
            * factor_product(n, 1, p)
    if k == n - 1:
        return p ** ((s - 1) * triangular(n, 2)) * factor_product(n, 2, p)
    raise ValueError(f"k={k} outside [0, {n - 1}]")


def S_expansion_check(n, k, p):
    """Compare prod_{u=k..n}(p^u - 1) with its q-binomial expansion."""
    lhs = factor_product(n, k, p)
    width = n - k + 1
    rhs = sum((-1) ** j * p ** triangular(n - j, k) * qbinom(width, j, p)
              for j in range(width + 1))
    return lhs == rhs


def vandermonde_instance_check(n, s, p):
    lhs = sum(p ** (k * (s - n + k)) * qbinom(n, k, p) * qbinom(s - 1, n - 1 - k, p)
              for k in range(max(0, n - s), n))
    return lhs == qbinom(n + s - 1, s, p)


class CompositeCounts:
    """Lazy product of per-prime count tables for N = prod p_i^s_i."""

    def __init__(self, tables):
        self.tables = list(tables)
        self.n = self.tables[0].n if self.tables else 0
        self.m = self.tables[0].m if self.tables else 0

    @property
    def modulus(self):
        return math.prod(t.p ** t.s for t in self.tables)

    @property
    def total(self):
        return math.prod(t.total for t in self.tables)

    def solutions(self, js):
        return math.prod(t.p ** j for t, j in zip(self.tables, js))

    def __getitem__(self, js):
        js = tuple(js) if not isinstance(js, int) else (js,)
        if len(js) != len(self.tables):
            raise KeyError(f"expected {len(self.tables)} exponents, got {len(js)}")
        return math.prod(t[j] for t, j in zip(self.tables, js))

    def keys(self):
        return product(*(range(t.s * t.m + 1) for t in self.tables))

    def items(self):
        for js in self.keys():
            yield js, self[js]


def crt_compose(factors):
    """Combine (p, s, table) triples over distinct primes into composite counts."""
    seen = set()
    tables = []
    for p, s, table in factors:
        if p in seen:
            raise DuplicatePrime(f"prime {p} appears more than once")
        seen.add(p)
        if (table.p, table.s) != (p, s):
            raise ValueError(f"table for {table.p}^{table.s} given as {p}^{s}")
        tables.append(table)
    if len({(t.n, t.m) for t in tables}) > 1:
        raise ValueError("all tables must share the matrix shape")
    return CompositeCounts(tables)

