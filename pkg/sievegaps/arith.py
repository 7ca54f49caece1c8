"""
sievegaps Arithmetic Module

Prime tables with a least-prime-factor array, factorization of small integers,
Mobius/totient/omega, squarefree divisor enumeration, segmented sieving of
windows beyond the table, and the exact/compensated summation helpers the
other modules build on.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import mpmath
import numpy as np

from .utils import get_logger

logger = get_logger(__name__)

# Exact rationals throughout; Fraction is always in lowest terms with a positive denominator
BigRational = Fraction

MIN_LIMIT = 2
BETA_WORKING_DIGITS = 30


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """
    Primes up to `limit` plus the least prime factor of every n <= limit.

    Immutable after construction; safe to share across threads.
    """

    limit: int
    primes: np.ndarray
    smallest_factor: np.ndarray

    def __post_init__(self):
        self.primes.setflags(write=False)
        self.smallest_factor.setflags(write=False)

    def check(self, n: int) -> None:
        """Raise ValueError unless 1 <= n <= limit."""
        if n < 1:
            raise ValueError(f"expected a positive integer, got {n}")
        if n > self.limit:
            raise ValueError(f"{n} exceeds prime table limit {self.limit}")

    def is_prime(self, n: int) -> bool:
        self.check(n)
        return n >= 2 and int(self.smallest_factor[n]) == n

    def primes_upto(self, x: float) -> np.ndarray:
        """Primes p <= x (x may exceed the table only if the caller accepts truncation)."""
        return self.primes[: np.searchsorted(self.primes, math.floor(x), side="right")]

    def factor(self, n: int) -> list[tuple[int, int]]:
        """
        Prime factorization of n as ascending (p, e) pairs.

        Raises:
            ValueError: If n is not in [1, limit]
        """
        self.check(n)
        result: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.smallest_factor[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            result.append((p, e))
        return result

    def distinct_primes(self, n: int) -> list[int]:
        return [p for p, _ in self.factor(n)]


def sieve_primes(limit: int) -> PrimeTable:
    """
    Build a PrimeTable by a least-prime-factor sieve.

    Args:
        limit: Largest integer covered by the table

    Returns:
        PrimeTable with primes <= limit

    Raises:
        ValueError: If limit < 2
    """
    if limit < MIN_LIMIT:
        raise ValueError(f"limit must be >= {MIN_LIMIT}, got {limit}")

    dtype = np.int32 if limit < 2**31 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            multiples = spf[p * p :: p]
            multiples[multiples == 0] = p

    primes = np.flatnonzero(spf[2:] == 0).astype(np.int64) + 2
    spf[primes] = primes
    spf[1] = 1

    logger.debug(f"Sieved {len(primes)} primes up to {limit}")
    return PrimeTable(limit=limit, primes=primes, smallest_factor=spf)


def mobius(n: int, table: PrimeTable) -> int:
    """
    Mobius function.

    Raises:
        ValueError: If n exceeds the table limit or is not positive
    """
    result = 1
    for _, e in table.factor(n):
        if e > 1:
            return 0
        result = -result
    return result


def totient(n: int, table: PrimeTable) -> int:
    result = n
    for p, _ in table.factor(n):
        result -= result // p
    return result


def omega(n: int, table: PrimeTable) -> int:
    """Number of distinct prime factors."""
    return len(table.factor(n))


def is_squarefree(n: int, table: PrimeTable) -> bool:
    return all(e == 1 for _, e in table.factor(n))


def squarefree_kernel(n: int, table: PrimeTable) -> int:
    return math.prod(table.distinct_primes(n))


def squarefree_divisors(m: int, table: PrimeTable) -> list[int]:
    """
    All divisors of a squarefree m, ascending.

    Raises:
        ValueError: If m is not squarefree
    """
    factors = table.factor(m)
    if any(e > 1 for _, e in factors):
        raise ValueError(f"{m} is not squarefree")
    primes = [p for p, _ in factors]
    divisors = [math.prod(c) for r in range(len(primes) + 1) for c in combinations(primes, r)]
    return sorted(divisors)


def squarefree_upto(x: float, table: PrimeTable) -> list[int]:
    """Squarefree n with 1 <= n < x."""
    top = math.ceil(x) - 1
    if top < 1:
        return []
    if math.isqrt(top) > table.limit:
        raise ValueError(f"prime table limit {table.limit} is below sqrt({top})")
    mask = np.ones(top + 1, dtype=bool)
    mask[0] = False
    for p in table.primes_upto(math.isqrt(top)):
        mask[int(p) * int(p) :: int(p) * int(p)] = False
    return np.flatnonzero(mask).tolist()


def prime_mask_block(lo: int, length: int, table: PrimeTable) -> np.ndarray:
    """
    Primality of n in (lo, lo + length] by segmented sieving.

    Raises:
        ValueError: If the table does not reach sqrt(lo + length)
    """
    if lo < 0 or length < 0:
        raise ValueError(f"block must be non-negative, got lo={lo}, length={length}")
    hi = lo + length
    if hi <= table.limit:
        values = np.arange(lo + 1, hi + 1, dtype=np.int64)
        return (table.smallest_factor[lo + 1 : hi + 1] == values) & (values >= 2)

    root = math.isqrt(hi)
    if root > table.limit:
        raise ValueError(f"prime table limit {table.limit} is below sqrt({hi})")
    mask = np.ones(length, dtype=bool)
    if lo < 2:
        mask[: 2 - lo - 1] = False
    for p in table.primes_upto(root).tolist():
        start = max(p * p, ((lo + p) // p) * p)
        if start <= hi:
            mask[start - lo - 1 :: p] = False
    return mask


def omega_block(lo: int, length: int, table: PrimeTable) -> tuple[np.ndarray, np.ndarray]:
    """
    Omega (prime factors with multiplicity) and least prime factor on (lo, lo + length].

    Base primes up to sqrt(lo + length) are divided out of every multiple; a
    cofactor left above 1 is a single large prime. Least factor is 0 for n = 1.

    Raises:
        ValueError: If the table does not reach sqrt(lo + length)
    """
    hi = lo + length
    root = math.isqrt(hi)
    if root > table.limit:
        raise ValueError(f"prime table limit {table.limit} is below sqrt({hi})")

    remaining = np.arange(lo + 1, hi + 1, dtype=np.int64)
    big_omega = np.zeros(length, dtype=np.int8)
    least = np.zeros(length, dtype=np.int64)
    for p in table.primes_upto(root).tolist():
        first = ((lo + p) // p) * p
        if first > hi:
            continue
        unset = least[first - lo - 1 :: p]
        unset[unset == 0] = p
        power = p
        while power <= hi:
            start = ((lo + power) // power) * power
            if start > hi:
                break
            big_omega[start - lo - 1 :: power] += 1
            remaining[start - lo - 1 :: power] //= p
            power *= p

    large = remaining > 1
    big_omega[large] += 1
    least = np.where((least == 0) & large, remaining, least)
    return big_omega, least


def compensated_sum(values: Iterable[float]) -> float:
    """Correctly rounded floating sum (order independent)."""
    return math.fsum(values)


def exact_sum(values: Iterable[float | Fraction]) -> Fraction:
    return sum((Fraction(v) for v in values), Fraction(0))


def beta_integral_check(a: float, b: float, x: float) -> tuple[float, float]:
    """
    Compare the beta-integral closed form with adaptive quadrature.

    closed = (log x)^(a+b-1) * Gamma(a) Gamma(b) / Gamma(a+b)
    quad   = integral over [1, x] of (log(x/u))^(a-1) (log u)^(b-1) du/u

    Raises:
        ValueError: If a < 1, b < 1 or x <= 1
    """
    if a < 1 or b < 1:
        raise ValueError(f"a and b must be >= 1, got a={a}, b={b}")
    if x <= 1:
        raise ValueError(f"x must be > 1, got {x}")

    with mpmath.workdps(BETA_WORKING_DIGITS):
        a_mp, b_mp, x_mp = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(x)
        log_x = mpmath.log(x_mp)
        closed = log_x ** (a_mp + b_mp - 1) * mpmath.beta(a_mp, b_mp)
        quadrature = mpmath.quad(
            lambda u: mpmath.log(x_mp / u) ** (a_mp - 1) * mpmath.log(u) ** (b_mp - 1) / u,
            [1, mpmath.sqrt(x_mp), x_mp],
        )
    return float(closed), float(quadrature)


def omega_power_sums(h: int, x: int, table: PrimeTable) -> dict:
    """
    Squarefree sums of h^omega(d) and their elementary bounds.

    Returns:
        dict with exact `reciprocal_sum` (Fraction), `sum` (int) and the float
        bounds (log x + 1)^h and x (log x + 1)^h
    """
    if h < 1 or x < 1:
        raise ValueError(f"h and x must be >= 1, got h={h}, x={x}")
    reciprocal = Fraction(0)
    plain = 0
    for d in squarefree_upto(x + 1, table):
        weight = h ** omega(d, table)
        reciprocal += Fraction(weight, d)
        plain += weight
    bound = (math.log(x) + 1) ** h
    return {
        "reciprocal_sum": reciprocal,
        "sum": plain,
        "reciprocal_bound": bound,
        "sum_bound": x * bound,
        "holds": reciprocal <= bound and plain <= x * bound,
    }


def prime_log_sum_check(a: int, b: int, R: float, table: PrimeTable) -> tuple[float, float]:
    """
    Sum over p < R of (log p)^(a+1) (log R/p)^b / p against a! b! (log R)^(a+b+1) / (a+b+1)!.
    """
    log_r = math.log(R)
    primes = table.primes_upto(math.ceil(R) - 1)
    primes = primes[primes < R].astype(np.float64)
    logs = np.log(primes)
    lhs = math.fsum(logs ** (a + 1) * (log_r - logs) ** b / primes)
    rhs = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 1) * log_r ** (a + b + 1)
    return lhs, rhs
