"""Tests for prime tables, multiplicative functions and segmented sieving."""

import math
from fractions import Fraction

import numpy as np
import pytest

from sievegaps.arith import (
    beta_integral_check,
    compensated_sum,
    exact_sum,
    omega_power_sums,
    is_squarefree,
    mobius,
    omega,
    omega_block,
    prime_log_sum_check,
    prime_mask_block,
    sieve_primes,
    squarefree_divisors,
    squarefree_kernel,
    squarefree_upto,
    totient,
)


@pytest.fixture(scope="module")
def table():
    return sieve_primes(10**6)


def trial_division_is_prime(n):
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


class TestSievePrimes:
    """Test the least-prime-factor sieve."""

    def test_small_limit(self):
        """Test primes up to 10."""
        assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]

    def test_limit_two(self):
        """Test the smallest allowed limit."""
        assert sieve_primes(2).primes.tolist() == [2]

    def test_limit_below_two_rejected(self):
        """Test that limits below 2 raise ValueError."""
        with pytest.raises(ValueError):
            sieve_primes(1)

    def test_prime_count_million(self, table):
        """Test pi(10^6) = 78498."""
        assert len(table.primes) == 78498

    def test_matches_trial_division(self):
        """Test the sieve against trial division below 10^4."""
        small = sieve_primes(10**4)
        expected = [n for n in range(2, 10**4 + 1) if trial_division_is_prime(n)]
        assert small.primes.tolist() == expected
        assert len(expected) == 1229

    def test_factor(self, table):
        """Test factorization into ascending (p, e) pairs."""
        assert table.factor(360) == [(2, 3), (3, 2), (5, 1)]
        assert table.factor(1) == []
        assert table.factor(999983) == [(999983, 1)]

    def test_beyond_limit_rejected(self):
        """Test that queries past the table raise ValueError."""
        small = sieve_primes(100)
        with pytest.raises(ValueError):
            small.factor(101)
        with pytest.raises(ValueError):
            mobius(0, small)

    def test_table_is_read_only(self, table):
        """Test that the shared arrays cannot be modified."""
        with pytest.raises(ValueError):
            table.primes[0] = 4


class TestMultiplicativeFunctions:
    """Test mobius, totient and omega."""

    def test_mobius_values(self, table):
        """Test mobius at 1, 12 and 30."""
        assert mobius(1, table) == 1
        assert mobius(12, table) == 0
        assert mobius(30, table) == -1
        assert mobius(7, table) == -1
        assert mobius(6, table) == 1

    def test_multiplicative(self, table):
        """Test mu(mn) = mu(m) mu(n) and phi(mn) = phi(m) phi(n) for coprime mn below 10^6."""
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 1000:
            m = int(rng.integers(2, 1000))
            n = int(rng.integers(2, 10**6 // m))
            if math.gcd(m, n) != 1:
                continue
            assert mobius(m * n, table) == mobius(m, table) * mobius(n, table)
            assert totient(m * n, table) == totient(m, table) * totient(n, table)
            checked += 1

    def test_mobius_divisor_sum(self, table):
        """Test that the divisor sum of mu vanishes for n > 1."""
        for n in range(2, 200):
            assert sum(mobius(d, table) for d in range(1, n + 1) if n % d == 0) == 0

    def test_totient(self, table):
        """Test Euler's totient."""
        assert totient(1, table) == 1
        assert totient(12, table) == 4
        assert totient(97, table) == 96
        assert totient(30, table) == 8

    def test_omega(self, table):
        """Test the number of distinct prime factors."""
        assert omega(1, table) == 0
        assert omega(12, table) == 2
        assert omega(30, table) == 3

    def test_squarefree(self, table):
        """Test squarefree predicates and kernels."""
        assert is_squarefree(30, table)
        assert not is_squarefree(12, table)
        assert squarefree_kernel(360, table) == 30

    def test_squarefree_divisors(self, table):
        """Test divisor enumeration of squarefree numbers."""
        assert squarefree_divisors(30, table) == [1, 2, 3, 5, 6, 10, 15, 30]
        assert squarefree_divisors(1, table) == [1]
        with pytest.raises(ValueError):
            squarefree_divisors(12, table)

    def test_squarefree_upto(self, table):
        """Test that squarefree_upto is strict in its bound."""
        assert squarefree_upto(11, table) == [1, 2, 3, 5, 6, 7, 10]
        assert squarefree_upto(1, table) == []
        assert squarefree_upto(10.5, table) == [1, 2, 3, 5, 6, 7, 10]


class TestSegmentedSieves:
    """Test block sieves inside and beyond the table."""

    def test_prime_mask_inside_table(self, table):
        """Test primes in (10, 20]."""
        mask = prime_mask_block(10, 10, table)
        assert (np.flatnonzero(mask) + 11).tolist() == [11, 13, 17, 19]

    def test_prime_mask_from_zero(self):
        """Test that 1 is not marked prime."""
        small = sieve_primes(10)
        mask = prime_mask_block(0, 30, small)
        assert (np.flatnonzero(mask) + 1).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

    def test_prime_mask_beyond_table(self):
        """Test a segmented window against a direct sieve."""
        small = sieve_primes(200)
        lo, length = 10**4, 5000
        mask = prime_mask_block(lo, length, small)
        reference = sieve_primes(lo + length)
        expected = reference.primes[(reference.primes > lo) & (reference.primes <= lo + length)]
        assert (np.flatnonzero(mask) + lo + 1).tolist() == expected.tolist()

    def test_prime_mask_needs_sqrt(self):
        """Test that too small a table raises ValueError."""
        with pytest.raises(ValueError):
            prime_mask_block(10**6, 10, sieve_primes(100))

    def test_omega_block_small(self):
        """Test Omega and least prime factor on 1..12."""
        big_omega, least = omega_block(0, 12, sieve_primes(10))
        assert big_omega.tolist() == [0, 1, 1, 2, 1, 2, 1, 3, 2, 2, 1, 3]
        assert least.tolist() == [0, 2, 3, 2, 5, 2, 7, 2, 3, 2, 11, 2]

    def test_omega_block_beyond_table(self, table):
        """Test a window above the table against factorization."""
        small = sieve_primes(2000)
        lo = 3 * 10**5
        big_omega, least = omega_block(lo, 1000, small)
        for i in range(1000):
            factors = table.factor(lo + i + 1)
            assert big_omega[i] == sum(e for _, e in factors)
            assert least[i] == factors[0][0]


class TestSummation:
    """Test exact and compensated summation."""

    def test_compensated_matches_exact(self):
        """Test fsum against exact rationals on dyadic inputs."""
        rng = np.random.default_rng(3)
        values = (rng.integers(-2**30, 2**30, size=10**5) / 2**30).tolist()
        exact = exact_sum(values)
        assert Fraction(compensated_sum(values)) == exact

    def test_exact_sum_large_integers(self):
        """Test exactness with 256-bit numerators."""
        big = Fraction(2**255 + 1, 3)
        assert exact_sum([big, -big, Fraction(1, 7)]) == Fraction(1, 7)


class TestAnalyticChecks:
    """Test the elementary analytic identities."""

    @pytest.mark.parametrize("a,b,x", [(1, 1, math.e), (2, 1, math.e**2), (3, 2, 10.0), (2.5, 1.5, 1e4)])
    def test_beta_integral(self, a, b, x):
        """Test the beta integral against quadrature."""
        closed, quad = beta_integral_check(a, b, x)
        assert abs(closed - quad) <= 1e-8 * abs(closed)

    def test_beta_integral_closed_values(self):
        """Test two closed forms."""
        closed, _ = beta_integral_check(1, 1, math.e)
        assert closed == pytest.approx(1.0)
        closed, _ = beta_integral_check(2, 1, math.e**2)
        assert closed == pytest.approx(2.0)

    def test_beta_integral_random(self):
        """Test random exponents and ranges."""
        rng = np.random.default_rng(11)
        for _ in range(10):
            a, b = rng.uniform(1, 4, size=2)
            x = float(rng.uniform(2, 1e4))
            closed, quad = beta_integral_check(float(a), float(b), x)
            assert abs(closed - quad) <= 1e-8 * abs(closed)

    def test_beta_integral_domain(self):
        """Test rejected parameters."""
        with pytest.raises(ValueError):
            beta_integral_check(0.5, 1, 10)
        with pytest.raises(ValueError):
            beta_integral_check(1, 1, 1)

    @pytest.mark.parametrize("h", [1, 2, 3])
    @pytest.mark.parametrize("x", [10, 100, 1000])
    def test_omega_power_bounds(self, table, h, x):
        """Test the squarefree h^omega bounds."""
        result = omega_power_sums(h, x, table)
        assert result["holds"]
        assert result["reciprocal_sum"] <= result["reciprocal_bound"]

    def test_omega_power_exact_small(self, table):
        """Test the exact sum of 3^omega(d) over squarefree d <= 10."""
        result = omega_power_sums(3, 10, table)
        assert result["sum"] == 31

    def test_mertens_constant(self, table):
        """Test sum of log p / p against log R minus Mertens' constant."""
        lhs, rhs = prime_log_sum_check(0, 0, 10**5, table)
        assert abs(lhs - rhs + 1.3326) < 0.05
