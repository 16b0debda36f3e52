"""Gaussian binomials, the generalized Euler phi, and small exact helpers.

Counts are plain Python ints and probabilities are ``fractions.Fraction``;
both are exact at any size.
"""

from fractions import Fraction

from sympy import isprime


def is_prime(p):
    return isinstance(p, int) and p >= 2 and bool(isprime(p))


def qbinom(n, k, q):
    """Gaussian binomial coefficient [n choose k]_q at an integer q >= 2.

    Uses the product formula, dividing after each numerator/denominator
    factor pair. Every partial quotient is itself a Gaussian binomial, so
    each division must be exact.
    """
    if n < 0 or k < 0:
        raise ValueError("qbinom needs nonnegative n and k")
    if k > n:
        return 0
    k = min(k, n - k)
    result = 1
    for i in range(k):
        result *= q ** (n - i) - 1
        result, rem = divmod(result, q ** (i + 1) - 1)
        assert rem == 0, (n, k, q)
    return result


def qbinom_at_inverse(n, k, p):
    """[n choose k]_{1/p} as an exact rational."""
    if k > n:
        return Fraction(0)
    return Fraction(qbinom(n, k, p), p ** (k * (n - k)))


def gen_phi(n, p, t):
    """Number of n-tuples in [1, p^t]^n with at least one entry prime to p."""
    if t == 0:
        return 1
    return p ** (t * n) - p ** ((t - 1) * n)


def triangular(n, k=1):
    """k + (k+1) + ... + n; zero when n < k."""
    if n < k:
        return 0
    return (n - k + 1) * (n + k) // 2


def factor_product(n, k, p):
    """Product of (p^u - 1) for u = k..n; the empty product is 1."""
    out = 1
    for u in range(k, n + 1):
        out *= p ** u - 1
    return out


def pow_frac(p, e):
    """p**e as a Fraction, e may be negative."""
    return Fraction(p) ** e


def as_count(x):
    """Coerce an exact rational that must be a nonnegative integer."""
    x = Fraction(x)
    if x.denominator != 1 or x < 0:
        raise ArithmeticError(f"expected a nonnegative integer, got {x}")
    return x.numerator
