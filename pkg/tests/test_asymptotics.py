"""Tests for the exact quadratic forms in theta."""

import math
from fractions import Fraction

import pytest
import sympy

from sievegaps.asymptotics import (
    THETA,
    EigenCertificate,
    MatrixKind,
    b1_tilde,
    b1_tilde_threshold,
    build_matrix,
    form_value,
    ldl_signature,
    m,
    m2,
    m2_components,
    positive_eigen_exists,
    positivity_threshold,
    quad_form,
    rational_poly,
    reference_mismatches,
    roots_in_interval,
    s1_star_model,
    signature,
    single_ell_display,
    single_ell_threshold,
    t_coeff,
    to_fraction,
)

FACT8 = math.factorial(8)
FACT14 = math.factorial(14)


def m_by_hand(k, l1, l2):
    """Second rendering of m(k, l1, l2) straight from the binomial formula."""
    L = l1 + l2
    coeff = sympy.binomial(L, l1) / sympy.factorial(k + L)
    return sympy.expand(coeff * (sympy.Rational(k * (L + 1) * (L + 2), (k + L + 1) * (l1 + 1) * (l2 + 1)) * THETA / 2 - 1))


def m2_by_hand(k, l1, l2):
    """Second rendering of m2(k, l1, l2)."""
    L = l1 + l2
    first = sympy.binomial(L + 2, l1 + 1) * k / sympy.factorial(k + L + 1) * THETA / 2
    bracket = sympy.binomial(L + 2, l1 + 1) - sympy.binomial(L + 3, l1 + 1) - sympy.binomial(L + 3, l2 + 1)
    second = 2 * bracket * k / sympy.factorial(k + L + 2) * THETA**2 / 4
    third = sympy.binomial(L, l1) / (2 * sympy.factorial(k + L))
    return sympy.expand(first + second - third)


class TestEntries:
    """Test m, m2 and T."""

    def test_m_six_zero(self):
        """Test 8! m(6, 0, 0) = 48 theta - 56."""
        assert m(6, 0, 0) * FACT8 == rational_poly(48 * THETA - 56)

    @pytest.mark.parametrize("k", [1, 3, 6, 10])
    def test_m_matches_formula(self, k):
        """Test m against an independent expansion."""
        for l1 in range(3):
            for l2 in range(3):
                if l1 <= k and l2 <= k:
                    assert m(k, l1, l2) == rational_poly(m_by_hand(k, l1, l2))

    @pytest.mark.parametrize("k", [3, 8])
    def test_m2_matches_formula(self, k):
        """Test m2 against an independent expansion."""
        for l1 in range(3):
            for l2 in range(3):
                assert m2(k, l1, l2) == rational_poly(m2_by_hand(k, l1, l2))

    def test_m2_components_sum(self):
        """Test m2 = m21 + m22 - m23."""
        m21, m22, m23 = m2_components(5, 1, 2)
        assert m2(5, 1, 2) == m21 + m22 - m23

    def test_symmetry(self):
        """Test m(k, l1, l2) = m(k, l2, l1)."""
        assert m(7, 1, 3) == m(7, 3, 1)
        assert m2(7, 0, 2) == m2(7, 2, 0)

    def test_t_coeff(self):
        """Test T(k, 0, 0) = -4 and symmetry."""
        assert t_coeff(5, 0, 0) == -4
        assert t_coeff(5, 1, 2) == t_coeff(5, 2, 1)
        assert t_coeff(3, 0, 0) == t_coeff(30, 0, 0)

    def test_index_checks(self):
        """Test rejected indices."""
        with pytest.raises(ValueError):
            m(2, 3, 0)
        with pytest.raises(ValueError):
            m(0, 0, 0)


class TestMatrices:
    """Test the reproduced matrices."""

    def test_prime_six_one(self):
        """Test 8! M(6, 1)."""
        Mx = build_matrix(6, 1, "prime")
        expected = [[48 * THETA - 56, 9 * THETA - 8], [9 * THETA - 8, 2 * THETA - 2]]
        for i in range(2):
            for j in range(2):
                assert Mx.entries[i][j] * FACT8 == rational_poly(expected[i][j])
        assert Mx.common_scale() == FACT8

    def test_prime_six_one_determinant(self):
        """Test det(8! M(6, 1)) and its root in (1/2, 1]."""
        Mx = build_matrix(6, 1, MatrixKind.PRIME)
        det = Mx.determinant(FACT8)
        assert det == rational_poly(15 * THETA**2 - 64 * THETA + 48)
        result = positivity_threshold(det)
        assert len(result.roots) == 1
        assert sympy.simplify(result.roots[0] - 4 * (8 - sympy.sqrt(19)) / 15) == 0
        assert result.numeric_roots[0] == pytest.approx(0.970960, abs=1e-5)
        assert sympy.Rational(3, 4) in result.positive_set
        assert sympy.Rational(99, 100) not in result.positive_set

    def test_e2_three_one(self):
        """Test 480 M2(3, 1)."""
        Mx = build_matrix(3, 1, "e2")
        expected = [
            [-24 * THETA**2 + 60 * THETA - 40, -7 * THETA**2 + 18 * THETA - 10],
            [-7 * THETA**2 + 18 * THETA - 10, -2 * THETA**2 + 6 * THETA - 4],
        ]
        for i in range(2):
            for j in range(2):
                assert Mx.entries[i][j] * 480 == rational_poly(expected[i][j])

    def test_e2_three_one_quad_form(self):
        """Test b^T M2(3, 1) b for b = (1, 4) and its threshold."""
        form = quad_form(build_matrix(3, 1, "e2"), [1, 4])
        assert form == rational_poly(-sympy.Rational(7, 30) * THETA**2 + sympy.Rational(5, 8) * THETA
                                     - sympy.Rational(23, 60))
        result = positivity_threshold(form)
        assert result.numeric_roots[0] == pytest.approx((75 - math.sqrt(473)) / 56, abs=1e-6)
        assert result.numeric_roots[0] == pytest.approx(0.950918, abs=1e-6)
        assert sympy.Rational(99, 100) in result.positive_set
        assert sympy.Rational(9, 10) not in result.positive_set
        assert not result.empty

    def test_e2_three_one_determinant(self):
        """Test the quartic determinant of 480 M2(3, 1) and its root."""
        det = build_matrix(3, 1, "e2").determinant(480)
        assert det == rational_poly(-THETA**4 - 12 * THETA**3 + 72 * THETA**2 - 120 * THETA + 60)
        roots = roots_in_interval(det)
        assert any(abs(r - 0.943635) < 1e-5 for r in roots)

    def test_e2_eight_two_reference(self):
        """Test 14! M2(8, 2) at theta = 1/2 against the recorded table."""
        Mx = build_matrix(8, 2, "e2")
        values = Mx.at("1/2")
        scaled = [[v * FACT14 for v in row] for row in values]
        assert scaled == [[-216216, 8736, 3458], [8736, -364, 14], [3458, 14, -36]]
        assert reference_mismatches(Mx, "1/2") == []

    def test_e2_eight_two_form_value(self):
        """Test 14! b^T M2(8, 2) b = 78760 at theta = 1/2 for b = (1, 16, 16)."""
        values = build_matrix(8, 2, "e2").at(Fraction(1, 2))
        assert form_value(values, [1, 16, 16]) * FACT14 == 78760

    def test_no_reference_recorded(self):
        """Test that unrecorded matrices report None."""
        assert reference_mismatches(build_matrix(6, 1, "prime"), "1/2") is None

    def test_quad_form_matches_model(self):
        """Test quad_form against the s1 model."""
        Mx = build_matrix(7, 2, "prime")
        assert quad_form(Mx, [1, 2, 3]) == s1_star_model(7, 2, [1, 2, 3])
        assert s1_star_model(7, 2, [1, 2, 3], "3/4") == to_fraction(
            quad_form(Mx, [1, 2, 3]).eval(sympy.Rational(3, 4)))

    def test_bad_sizes(self):
        """Test rejected dimensions."""
        with pytest.raises(ValueError):
            build_matrix(2, 3, "prime")
        with pytest.raises(ValueError):
            quad_form(build_matrix(6, 1, "prime"), [1, 2, 3])
        with pytest.raises(ValueError):
            build_matrix(6, 1, "bogus")


class TestThresholds:
    """Test the closed-form thresholds."""

    def test_single_ell(self):
        """Test the k = 7, l = 1 threshold 20/21."""
        assert single_ell_threshold(7, 1) == Fraction(20, 21)
        poly = m(7, 1, 1)
        assert poly.eval(sympy.Rational(20, 21)) == 0
        assert poly.eval(1) > 0
        result = positivity_threshold(poly)
        assert result.roots == (sympy.Rational(20, 21),)

    def test_single_ell_display(self):
        """Test the sign-carrying factor has the same root."""
        assert single_ell_display(7, 1).eval(sympy.Rational(20, 21)) == 0

    def test_unit_vector_reduces_to_diagonal(self):
        """Test b = e_l gives m(k, l, l)."""
        assert quad_form(build_matrix(7, 2, "prime"), [0, 1, 0]) == m(7, 1, 1)

    def test_b1_tilde_threshold_value(self):
        """Test direct substitution at k = 100, l = 10."""
        assert b1_tilde_threshold(100, 10) == Fraction(562, 2662)

    def test_b1_tilde_threshold_ell_zero(self):
        """Test (k + 2)/(2(k + 1)) at l = 0."""
        assert b1_tilde_threshold(9, 0) == Fraction(11, 20)

    def test_b1_tilde_threshold_decreasing(self):
        """Test the threshold falls with k at l = floor(sqrt k)."""
        values = [b1_tilde_threshold(k, math.isqrt(k)) for k in (100, 400, 2500)]
        assert values[0] > values[1] > values[2]
        assert values[2] < Fraction(1, 10)

    def test_b1_tilde_zero_at_threshold(self):
        """Test that b1 vanishes at log R/log N = 1/4 and the threshold."""
        k, ell = 100, 10
        assert b1_tilde(k, ell, Fraction(1, 4), b1_tilde_threshold(k, ell)) == 0

    def test_positivity_degree_limit(self):
        """Test that cubic input raises ValueError."""
        with pytest.raises(ValueError):
            positivity_threshold(rational_poly(THETA**3 - THETA))

    def test_positivity_zero_polynomial(self):
        """Test that the zero polynomial is nowhere positive."""
        assert positivity_threshold(rational_poly(0)).empty

    def test_positivity_never_positive(self):
        """Test a polynomial negative on (1/2, 1]."""
        assert positivity_threshold(rational_poly(-THETA - 1)).empty


class TestSignature:
    """Test exact LDL inertia and eigen certificates."""

    def test_diagonal(self):
        """Test a diagonal matrix with a zero."""
        assert ldl_signature([[1, 0, 0], [0, -1, 0], [0, 0, 0]]) == (1, 1, 1)

    def test_zero_diagonal_pivot(self):
        """Test the 2x2 pivot."""
        assert ldl_signature([[0, 1], [1, 0]]) == (1, 1, 0)

    def test_zero_matrix(self):
        """Test the zero matrix."""
        assert ldl_signature([[0, 0], [0, 0]]) == (0, 0, 2)

    def test_negative_definite(self):
        """Test that M(6, 1) at theta = 1/2 has no positive eigenvalue."""
        Mx = build_matrix(6, 1, "prime")
        certificate = positive_eigen_exists(Mx, Fraction(1, 2))
        assert isinstance(certificate, EigenCertificate)
        assert not certificate.exists
        assert certificate.signature == (0, 2, 0)

    def test_indefinite_certificate(self):
        """Test that M(6, 1) at theta = 1 has a checked positive direction."""
        Mx = build_matrix(6, 1, "prime")
        certificate = positive_eigen_exists(Mx, 1)
        assert certificate.exists
        assert form_value(Mx.at(1), certificate.witness) > 0
        assert signature(Mx, 1) == (1, 1, 0)

    def test_e2_eight_two_certificate(self):
        """Test the E2 matrix at theta = 1/2 with the known vector."""
        Mx = build_matrix(8, 2, "e2")
        certificate = positive_eigen_exists(Mx, "1/2", [1, 16, 16])
        assert certificate.exists
        assert certificate.witness == (1, 16, 16)
        assert certificate.value * FACT14 == 78760

    def test_certificate_without_candidate(self):
        """Test that a witness is found without a hint."""
        Mx = build_matrix(8, 2, "e2")
        certificate = positive_eigen_exists(Mx, "1/2")
        assert certificate.exists
        assert form_value(Mx.at("1/2"), certificate.witness) > 0
        assert math.gcd(*certificate.witness) == 1
