"""Closed-form counts for the regimes where one is known, and a dispatcher
that falls back to the recursion everywhere else."""

from fractions import Fraction

from .errors import IntegralityViolation, RangeUnsupported, ShapeUnsupported
from .exact_arith import gen_phi, qbinom, triangular
from .recursive import E_rec


def _need_tall(n, m):
    if n < m:
        raise ShapeUnsupported(f"closed form needs n >= m, got {n}x{m}")


def _phi_chain(n, m, p, s, j):
    """phi_n(p^s) ... phi_{n-m+2}(p^s) * phi_{n-m+1}(p^{s-j})."""
    out = gen_phi(n - m + 1, p, s - j)
    for u in range(n - m + 2, n + 1):
        out *= gen_phi(u, p, s)
    return out


def E_unique(n, m, p, s):
    """Matrices with only the trivial solution."""
    _need_tall(n, m)
    out = p ** (s * m * (m - 1) // 2)
    for u in range(n - m + 1, n + 1):
        out *= gen_phi(u, p, s)
    return out


def E_unique_pform(n, m, p, s):
    """E_unique rewritten as a power of p times a product of (p^u - 1)."""
    _need_tall(n, m)
    # exponent (s-1) * (sum of u over n-m+1..n); for n == m this is (s-1)n(n+1)/2
    e = (s - 1) * triangular(n, n - m + 1) + s * m * (m - 1) // 2
    out = p ** e
    for u in range(n - m + 1, n + 1):
        out *= p ** u - 1
    return out


def E_invertible(n, p, s):
    """Order of GL_n(Z/p^s) as a product over the residue field."""
    out = p ** ((s - 1) * n * n)
    for u in range(n):
        out *= p ** n - p ** u
    return out


def E_jlt_s(n, m, p, s, j):
    _need_tall(n, m)
    if not 0 <= j < s:
        raise RangeUnsupported(f"needs 0 <= j < s, got j={j}, s={s}")
    return (_phi_chain(n, m, p, s, j) * p ** (s * m * (m - 1) // 2 - j * (m - 1))
            * qbinom(m + j - 1, j, p))


def phi_factor_exponents(m, k):
    """Exponent coefficients (a, b) so that the k-th term carries p^(a*s + b)."""
    a = m * (m - 1) // 2 - (m - 1 - k)
    b = (m - k) * (m - 3 * k - 1) // 2
    return a, b


def Phi(n, m, p, s, k):
    out = gen_phi(n - (m - 1), p, m - 1 - k)
    for u in range(k, m - 1):
        out *= gen_phi(n - u, p, s - 1)
    for v in range(k):
        out *= gen_phi(n - v, p, s)
    return out


def E_jeq_s(n, m, p, s):
    """Matrices with exactly p^s solutions, n >= m."""
    _need_tall(n, m)
    if s < 1:
        raise RangeUnsupported("needs s >= 1")
    total = Fraction(0)
    for k in range(m):
        a, b = phi_factor_exponents(m, k)
        term = Phi(n, m, p, s, k) * qbinom(m, k, p) * qbinom(s - 1, m - 1 - k, p)
        if term:
            total += term * Fraction(p) ** (a * s + b)
    if total.denominator != 1 or total < 0:
        raise IntegralityViolation(f"E_jeq_s({n},{m},{p},{s}) assembled to {total}")
    return total.numerator


def E_n_by_1(n, p, s, j):
    if not 0 <= j <= s:
        return 0
    return gen_phi(n, p, s - j)


def tildeE_nx2(n, p, s, j):
    if n < 2:
        raise ShapeUnsupported("needs n >= 2")
    if j == 0:
        return gen_phi(n, p, s) * gen_phi(n - 1, p, s) * p ** s
    if 1 <= j <= s:
        return gen_phi(n, p, s) * gen_phi(n - 1, p, s - j) * (p ** s + p ** (s - 1))
    return 0


def E_nx2(n, p, s, j):
    if n < 2:
        raise ShapeUnsupported("needs n >= 2")
    if not 0 <= j < s:
        raise RangeUnsupported(f"needs 0 <= j < s, got j={j}, s={s}")
    return gen_phi(n, p, s) * gen_phi(n - 1, p, s - j) * p ** (s - j) * qbinom(j + 1, 1, p)


def E_nx2_jeqs(n, p, s):
    if n < 2:
        raise ShapeUnsupported("needs n >= 2")
    return (gen_phi(n, p, s) * gen_phi(n - 1, p, 0) * p ** (s - 1) * qbinom(2, 1, p)
            + gen_phi(n, p, s - 1) * gen_phi(n - 1, p, 1) * p * qbinom(s - 1, 1, p))


def E_1xm(m, p, s, r):
    """Single-row count at j = s(m-1) + r."""
    if not 0 <= r < s:
        raise RangeUnsupported(f"needs 0 <= r < s, got r={r}, s={s}")
    return gen_phi(1, p, s - r) * p ** ((s - r - 1) * (m - 1)) * qbinom(m, 1, p)


def E_landsberg(n, m, p, j):
    """Field case s = 1."""
    if j < 0:
        return 0
    out = qbinom(m, j, p)
    for i in range(m - j):
        out *= p ** n - p ** i
    return out


def explicit_route(n, m, p, s, j):
    """Return (count, formula name) using a closed form where one applies."""
    if j < 0 or j > s * m:
        return 0, "out_of_range"
    if n == 0 or m == 0 or s == 0:
        return E_rec(n, m, p, s, j), "recursion"
    if m == 1:
        return E_n_by_1(n, p, s, j), "n_by_1"
    if s == 1:
        return E_landsberg(n, m, p, j), "landsberg"
    if n >= m:
        if j == 0:
            return E_unique(n, m, p, s), "unique"
        if j < s:
            return E_jlt_s(n, m, p, s, j), "j_below_s"
        if j == s:
            return E_jeq_s(n, m, p, s), "j_equals_s"
    if n == 1 and s * (m - 1) <= j < s * m:
        return E_1xm(m, p, s, j - s * (m - 1)), "single_row"
    return E_rec(n, m, p, s, j), "recursion"


def E_explicit(n, m, p, s, j):
    return explicit_route(n, m, p, s, j)[0]
