"""Tests for admissible tuples, the singular series and beta(H)."""

import math

import numpy as np
import pytest

from sievegaps.arith import sieve_primes, squarefree_upto
from sievegaps.tuples import (
    BETA_FLOOR,
    KTuple,
    beta,
    hbound_profile,
    is_admissible,
    nu_d,
    nu_p,
    omega_d,
    omega_p,
    search_admissible,
    singular_series,
    singular_series_star,
)

TWIN_PRIME_SERIES = 1.3203236316937391  # 2 * twin prime constant


@pytest.fixture(scope="module")
def table():
    return sieve_primes(10**6)


class TestKTuple:
    """Test the tuple value type."""

    def test_sorted_on_construction(self):
        """Test that elements are stored sorted."""
        assert KTuple((6, 0, 2)).to_list() == [0, 2, 6]

    def test_parse(self):
        """Test parsing with whitespace."""
        H = KTuple.parse(" 0, 2,6 ")
        assert H.elements == (0, 2, 6)
        assert str(H) == "0,2,6"

    def test_duplicates_rejected(self):
        """Test that repeated elements raise ValueError."""
        with pytest.raises(ValueError):
            KTuple((0, 2, 2))

    def test_empty_rejected(self):
        """Test that the empty tuple raises ValueError."""
        with pytest.raises(ValueError):
            KTuple.parse("")

    def test_garbage_rejected(self):
        """Test that non-integers raise ValueError."""
        with pytest.raises(ValueError):
            KTuple.parse("0,two")

    def test_properties(self):
        """Test k, diameter and Delta."""
        H = KTuple.of([0, 2, 6])
        assert H.k == 3
        assert H.diameter == 6
        assert H.delta == 2 * 6 * 4

    def test_shift_and_add(self):
        """Test translation and adjoining an element."""
        H = KTuple.of([0, 2])
        assert H.shift(5).to_list() == [5, 7]
        assert H.with_element(6).to_list() == [0, 2, 6]
        with pytest.raises(ValueError):
            H.with_element(2)

    def test_hashable(self):
        """Test that equal tuples hash equal."""
        assert hash(KTuple.of([2, 0])) == hash(KTuple.of([0, 2]))


class TestResidues:
    """Test nu_p, Omega_p and their CRT extensions."""

    def test_nu_p(self):
        """Test residue counts."""
        assert nu_p(KTuple.of([0, 2, 6]), 3) == 2
        assert nu_p(KTuple.of([7, 11, 13, 17, 19, 23]), 5) == 4
        assert nu_p(KTuple.of([11, 13, 17, 19, 23, 29, 31]), 3) == 2

    def test_omega_p(self):
        """Test the roots of P(n; H) mod p."""
        assert omega_p(KTuple.of([0, 2]), 3) == [0, 1]
        assert omega_p(KTuple.of([0, 2]), 2) == [0]

    def test_omega_d_crt(self, table):
        """Test that every residue in Omega_d is a root and the count is nu_d."""
        H = KTuple.of([0, 2, 6])
        for d in (1, 3, 5, 15, 35, 105):
            residues = omega_d(H, d, table)
            assert len(residues) == nu_d(H, d, table)
            expected = [a for a in range(d) if math.prod(a + h for h in H) % d == 0]
            assert residues == expected

    def test_nu_multiplicative_random(self, table):
        """Test |Omega_d| = product of nu_p and P(a; H) = 0 mod d on random admissible tuples."""
        rng = np.random.default_rng(11)
        moduli = squarefree_upto(10**4, table)
        checked = 0
        while checked < 500:
            k = int(rng.integers(1, 6))
            H = KTuple.of(rng.choice(60, size=k, replace=False).tolist())
            if not is_admissible(H, table):
                continue
            d = int(rng.choice(moduli))
            residues = omega_d(H, d, table)
            primes = [p for p, _ in table.factor(d)]
            assert len(residues) == math.prod(nu_p(H, p) for p in primes) == nu_d(H, d, table)
            assert all(math.prod(a + h for h in H) % d == 0 for a in residues)
            checked += 1


class TestAdmissibility:
    """Test admissibility."""

    @pytest.mark.parametrize("elements", [
        (11, 13, 17, 19, 23, 29, 31),
        (7, 11, 13, 17, 19, 23),
        (5, 7, 11),
        (11, 13, 17, 19, 23, 29, 31, 37),
        (0, 2),
        (0,),
    ])
    def test_admissible(self, table, elements):
        """Test known admissible tuples."""
        assert is_admissible(KTuple(elements), table)

    @pytest.mark.parametrize("elements", [(0, 2, 4), (0, 1), (0, 2, 4, 6, 8)])
    def test_inadmissible(self, table, elements):
        """Test tuples covering every class mod some prime."""
        assert not is_admissible(KTuple(elements), table)

    def test_matches_brute_force(self, table):
        """Test against a direct residue check over all primes up to k."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            k = int(rng.integers(2, 7))
            H = KTuple.of(rng.choice(40, size=k, replace=False).tolist())
            brute = all(len({h % p for h in H}) < p for p in range(2, k + 1) if all(p % q for q in range(2, p)))
            assert is_admissible(H, table) == brute


class TestSingularSeries:
    """Test the truncated singular series."""

    def test_twin_prime_constant(self, table):
        """Test S({0, 2}) against twice the twin prime constant."""
        value = singular_series(KTuple.of([0, 2]), 10**6, table)
        assert abs(value.value - TWIN_PRIME_SERIES) < 1e-5

    def test_bracket_contains_value(self, table):
        """Test that the bracket is ordered and contains the value."""
        value = singular_series(KTuple.of([0, 2, 6]), 10**5, table)
        lo, hi = value.bracket()
        assert lo <= value.value <= hi
        assert value.tail_bound > 0

    def test_inadmissible_is_zero(self, table):
        """Test that inadmissible tuples have series exactly 0."""
        assert singular_series(KTuple.of([0, 2, 4]), 10**4, table).value == 0.0

    def test_single_element(self):
        """Test that S({h}) = 1."""
        assert singular_series(KTuple.of([5])).value == 1.0

    def test_translation_invariant(self, table):
        """Test S(H + c) = S(H)."""
        H = KTuple.of([0, 2, 6])
        assert singular_series(H.shift(17), 10**5, table).value == pytest.approx(
            singular_series(H, 10**5, table).value, rel=1e-12)

    def test_star_equals_plain(self, table):
        """Test that the starred series equals the plain one when 0 is in H."""
        rng = np.random.default_rng(9)
        checked = 0
        while checked < 20:
            k = int(rng.integers(2, 7))
            H = KTuple.of([0, *(rng.choice(np.arange(1, 51), size=k - 1, replace=False).tolist())])
            if not is_admissible(H, table):
                continue
            plain = singular_series(H, 10**6, table).value
            star = singular_series_star(H, 10**6, table)
            assert abs(star - plain) <= 1e-8 * plain
            checked += 1

    def test_star_needs_zero(self, table):
        """Test that the starred series rejects tuples without 0."""
        with pytest.raises(ValueError):
            singular_series_star(KTuple.of([1, 3]), 10**4, table)

    def test_truncation_below_k_rejected(self):
        """Test that P < k raises ValueError."""
        with pytest.raises(ValueError):
            singular_series(KTuple.of([0, 2, 6]), 2)


class TestBeta:
    """Test beta(H) and its profile."""

    def test_twin_beta(self, table):
        """Test beta({0, 2}) = log(2)/2."""
        assert beta(KTuple.of([0, 2]), table) == pytest.approx(math.log(2) / 2)

    def test_triple_beta(self, table):
        """Test beta({0, 2, 6}) = log(2) + log(3)/3."""
        assert beta(KTuple.of([0, 2, 6]), table) == pytest.approx(math.log(2) + math.log(3) / 3)

    def test_beta_floor(self, table):
        """Test beta(H) >= log(2)/2 for admissible H with k >= 2."""
        for elements in [(11, 13, 17, 19, 23, 29, 31), (7, 11, 13, 17, 19, 23), (5, 7, 11)]:
            assert beta(KTuple(elements), table) >= BETA_FLOOR

    def test_profile(self, table):
        """Test the sampled profile."""
        profile = hbound_profile(3, 30, samples=1000, seed=1, table=table)
        assert profile["beta_floor_ok"]
        assert profile["samples"] == 1000
        assert profile["beta_min"] <= profile["beta_max"]

    def test_profile_needs_k_two(self, table):
        """Test that k < 2 raises ValueError."""
        with pytest.raises(ValueError):
            hbound_profile(1, 30, samples=5, seed=0, table=table)


class TestSearch:
    """Test the admissible tuple search."""

    def test_twins(self):
        """Test the first admissible pair."""
        assert search_admissible(2, 10, first_n=1)[0].to_list() == [1, 3]

    def test_triples_diameter_six(self):
        """Test that admissible triples have diameter at least 6."""
        found = search_admissible(3, 10)
        assert found[0].diameter == 6
        assert found[0].to_list() == [1, 3, 7]

    @pytest.mark.parametrize("k,h_max,witness", [
        (7, 31, (11, 13, 17, 19, 23, 29, 31)),
        (6, 23, (7, 11, 13, 17, 19, 23)),
        (8, 37, (11, 13, 17, 19, 23, 29, 31, 37)),
    ])
    def test_contains_witness(self, k, h_max, witness):
        """Test that known tuples are found."""
        found = search_admissible(k, h_max)
        assert KTuple(witness) in found
        assert all(is_admissible(H) for H in found)

    def test_sorted_by_diameter(self):
        """Test the ordering of the output."""
        diameters = [H.diameter for H in search_admissible(4, 20)]
        assert diameters == sorted(diameters)

    def test_independent_of_workers(self):
        """Test that the thread count does not change the result."""
        assert search_admissible(4, 24, max_workers=1) == search_admissible(4, 24, max_workers=4)

    def test_bad_arguments(self):
        """Test rejected parameters."""
        with pytest.raises(ValueError):
            search_admissible(0, 10)
        with pytest.raises(ValueError):
            search_admissible(5, 3)
