"""Tests for the exact identity suite."""

import numpy as np
import pytest

from sievegaps.arith import sieve_primes
from sievegaps.identities import IdentityReport, random_weights, run_identity_suite
from sievegaps.tuples import KTuple


@pytest.fixture(scope="module")
def table():
    return sieve_primes(10**4)


class TestIdentitySuite:
    """Test that every identity holds exactly."""

    def test_default_suite(self):
        """Test the default tuples at R = 60."""
        report = run_identity_suite(seed=0)
        assert report.passed, report.mismatches
        assert len(report.checks) > 50

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_other_seeds(self, table, seed):
        """Test fresh random weights on two tuples."""
        report = run_identity_suite(seed=seed, R=30, tuples=("0,2", "0,2,6"), table=table, block_length=500)
        assert report.passed, report.mismatches

    def test_names_cover_variants(self, table):
        """Test that plain, starred and dagger identities all run."""
        report = run_identity_suite(seed=0, R=30, tuples=("0,2,6",), table=table, block_length=500)
        names = {c.name.split("[")[0] for c in report.checks}
        assert {"mobius_roundtrip", "diagonalization", "single_entry_expansion", "block_sieve",
                "y_star_closed_form", "star_diagonalization", "z_star_closed_form", "z_y_relation",
                "y_dagger_closed_form", "dagger_diagonalization", "f2_divisor_identity",
                "F_G_product"} <= names

    def test_single_element_tuple(self, table):
        """Test that k = 1 runs only the plain identities."""
        report = run_identity_suite(seed=0, R=20, tuples=(KTuple.of([0]),), table=table, block_length=200)
        assert report.passed
        assert all(not c.name.startswith(("y_star", "y_dagger")) for c in report.checks)

    def test_report_dict(self, table):
        """Test the serialised report."""
        report = run_identity_suite(seed=0, R=20, tuples=("0,2",), table=table, block_length=200)
        data = report.to_dict()
        assert data["passed"] is True
        assert data["mismatches"] == []
        assert data["checks"] == len(report.checks)

    def test_failed_check_reported(self):
        """Test that a failing check shows up in mismatches."""
        report = IdentityReport(seed=0, R=10)
        report.add("example", KTuple.of([0, 2]), False, "detail")
        assert not report.passed
        assert report.mismatches[0].H == "0,2"

    def test_bad_arguments(self, table):
        """Test tuples without 0 and tiny R."""
        with pytest.raises(ValueError):
            run_identity_suite(tuples=("1,3",), table=table)
        with pytest.raises(ValueError):
            run_identity_suite(R=1, table=table)


class TestRandomWeights:
    """Test the random weight generator."""

    def test_support(self, table):
        """Test that weights live on squarefree r < R coprime to the modulus."""
        y = random_weights(40, table, np.random.default_rng(0), modulus=2)
        assert all(r % 2 for r in y)
        assert 9 not in y and 25 not in y
        assert max(y) < 40
        assert all(v != 0 for v in y.values())
