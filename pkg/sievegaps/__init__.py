"""sievegaps - Selberg-type sieve weights, admissible tuples and small gaps (Release 0.1.0).

- Prime tables, segmented sieves and exact/compensated summation
- Admissible tuples, singular series and beta(H)
- Sieve weights with plain, starred and dagger multiplicative functions
- Desk-scale checks of the sieve main terms and error terms
- Exact quadratic forms in the level of distribution
- E2 (two distinct primes) gap statistics
"""
__version__ = "0.1.0"

from .arith import PrimeTable, mobius, sieve_primes, beta_integral_check
from .tuples import KTuple, is_admissible, singular_series, singular_series_star, beta, search_admissible
from .weights import (
    SieveDomainError, SieveFunctions, WeightSystem, lambda_from_y, y_from_lambda,
    lambda_ell, lambda_log_power, sieve_lambda_R, y_star, z_star, y_dagger,
)
from .empirics import (
    SievedSum, varpi_block, varpi_conv_block, check_varpi_mean, verify_thm5,
    verify_thm6_part1, verify_thm6_part2, verify_thm7, bv_profile, e2_error_profile,
    gallagher_average,
)
from .asymptotics import (
    m, m2, t_coeff, build_matrix, quad_form, positivity_threshold, positive_eigen_exists,
)
from .e2gaps import E2Stream, enumerate_e2, gap_stats, shifted_e2_pattern
from .identities import run_identity_suite
from .manifest import RunManifest

__all__ = [
    "PrimeTable", "mobius", "sieve_primes", "beta_integral_check",
    "KTuple", "is_admissible", "singular_series", "singular_series_star", "beta", "search_admissible",
    "SieveDomainError", "SieveFunctions", "WeightSystem", "lambda_from_y", "y_from_lambda",
    "lambda_ell", "lambda_log_power", "sieve_lambda_R", "y_star", "z_star", "y_dagger",
    "SievedSum", "varpi_block", "varpi_conv_block", "check_varpi_mean", "verify_thm5",
    "verify_thm6_part1", "verify_thm6_part2", "verify_thm7", "bv_profile", "e2_error_profile",
    "gallagher_average",
    "m", "m2", "t_coeff", "build_matrix", "quad_form", "positivity_threshold", "positive_eigen_exists",
    "E2Stream", "enumerate_e2", "gap_stats", "shifted_e2_pattern",
    "run_identity_suite", "RunManifest",
]
