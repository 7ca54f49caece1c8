"""
Exact identity suite for the sieve weights.

Random rational weights y on squarefree r < R are pushed through every
transform in exact Fraction arithmetic and compared with the closed forms:
Mobius pair, diagonalization (plain, star, dagger), the y*, z* and y+ closed
forms, the z*/y* relation, the f2 divisor identity, homogeneity, the
single-entry expansion of the diagonal form and block sieving against divisor
enumeration. One float check, F(r) G(r) against the singular-series quotient,
is compared at truncation accuracy.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import PrimeTable, sieve_primes, squarefree_upto, totient
from .tuples import KTuple, nu_p, singular_series
from .utils import get_logger
from .weights import (
    ScalarMode,
    SieveFunctions,
    bilinear_form,
    dagger_G,
    diagonal_form,
    divisor_lambda_R,
    f2_divisor_sum,
    lambda_from_y,
    sieve_lambda_R,
    y_dagger_transform,
    y_from_lambda,
    y_star_transform,
    z_star_from_lambda,
    z_star_transform,
)

logger = get_logger(__name__)

DEFAULT_IDENTITY_R = 60
DEFAULT_IDENTITY_TUPLES = ("0,2", "0,2,6", "0,4,6", "0,4,6,10", "0,2,6,8,12")
DEFAULT_BLOCK_LENGTH = 10**4
FG_TRUNCATION = 10**4
FG_TOLERANCE = 1e-3


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    H: str
    passed: bool
    detail: str = ""


@dataclass
class IdentityReport:
    seed: int
    R: int
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def mismatches(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, H: KTuple, passed: bool, detail: str = "") -> None:
        self.checks.append(IdentityCheck(name, str(H), bool(passed), detail))
        if not passed:
            logger.warning(f"Identity {name} failed for H={H}: {detail}")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "R": self.R,
            "passed": self.passed,
            "checks": len(self.checks),
            "mismatches": [c.__dict__ for c in self.mismatches],
            "results": [c.__dict__ for c in self.checks],
        }


def random_weights(R: int, table: PrimeTable, rng: np.random.Generator,
                   modulus: int = 1) -> dict[int, Fraction]:
    """Random nonzero rationals on the squarefree r < R coprime to `modulus`."""
    y = {}
    for r in squarefree_upto(R, table):
        if math.gcd(r, modulus) != 1:
            continue
        numerator = int(rng.integers(1, 10)) * (1 if rng.random() < 0.5 else -1)
        y[r] = Fraction(numerator, int(rng.integers(1, 7)))
    return y


def _first_difference(left: dict, right: dict) -> str:
    for key in sorted(set(left) | set(right)):
        if left.get(key, 0) != right.get(key, 0):
            return f"at {key}: {left.get(key, 0)} != {right.get(key, 0)}"
    return ""


def _check_plain(report: IdentityReport, H: KTuple, R: int, table: PrimeTable,
                 rng: np.random.Generator, block_length: int) -> None:
    plain = SieveFunctions.plain(H, table)
    y = random_weights(R, table, rng)
    lam = lambda_from_y(y, plain, R)

    back = y_from_lambda(lam, plain)
    report.add("mobius_roundtrip", H, back == y, _first_difference(back, y))
    again = lambda_from_y(back, plain, R)
    report.add("mobius_roundtrip_lambda", H, again == lam, _first_difference(again, lam))

    left, right = bilinear_form(lam, lam, plain), diagonal_form(y, y, plain)
    report.add("diagonalization", H, left == right, f"{left} != {right}")

    c = Fraction(int(rng.integers(2, 9)), int(rng.integers(1, 5)))
    scaled = lambda_from_y({r: c * v for r, v in y.items()}, plain, R)
    report.add("homogeneity", H, scaled == {d: c * v for d, v in lam.items()})

    constant = {r: c for r in y}
    V = sum((1 / plain.f1(r) for r in y), Fraction(0))
    report.add("constant_y_form", H, diagonal_form(constant, constant, plain) == c * c * V)

    r = int(rng.choice(list(y)))
    eps = Fraction(1, int(rng.integers(2, 9)))
    bumped = dict(y)
    bumped[r] += eps
    change = diagonal_form(bumped, bumped, plain) - diagonal_form(y, y, plain)
    report.add("single_entry_expansion", H, change == (2 * eps * y[r] + eps * eps) / plain.f1(r))

    start = int(rng.integers(10**5, 10**6))
    length = max(block_length, max(lam))
    blocked = sieve_lambda_R(start, length, H, lam, table, ScalarMode.EXACT)
    direct = [divisor_lambda_R(n, H, lam) for n in range(start + 1, start + length + 1)]
    report.add("block_sieve", H, blocked == direct, f"N={start}, length={length}")


def _check_star(report: IdentityReport, H: KTuple, R: int, table: PrimeTable,
                rng: np.random.Generator) -> None:
    star = SieveFunctions.star(H, table)
    plain = star.as_plain()
    y = random_weights(R, table, rng)
    lam = lambda_from_y(y, plain, R)

    ystar = y_from_lambda(lam, star)
    closed = y_star_transform(y, star)
    report.add("y_star_closed_form", H, ystar == closed, _first_difference(ystar, closed))

    left, right = bilinear_form(lam, lam, star), diagonal_form(ystar, ystar, star)
    report.add("star_diagonalization", H, left == right, f"{left} != {right}")

    for p in table.primes_upto(R - 1).tolist():
        z = z_star_from_lambda(lam, star, p)
        z_closed = z_star_transform(y, star, p)
        report.add(f"z_star_closed_form[p={p}]", H, z == z_closed, _first_difference(z, z_closed))
        if star.is_excluded(p):
            continue
        factor = Fraction(p - 1, p - nu_p(H, p))
        related = {s // p: factor * v for s, v in ystar.items() if s % p == 0}
        report.add(f"z_y_relation[p={p}]", H, z == related, _first_difference(z, related))


def _check_dagger(report: IdentityReport, H: KTuple, R: int, table: PrimeTable,
                  rng: np.random.Generator) -> None:
    dagger = SieveFunctions.dagger(H, table)
    plain = dagger.as_plain()
    y = random_weights(R, table, rng)
    lam = lambda_from_y(y, plain, R)

    ydagger = y_from_lambda(lam, dagger)
    closed = y_dagger_transform(y, dagger)
    report.add("y_dagger_closed_form", H, ydagger == closed, _first_difference(ydagger, closed))

    left, right = bilinear_form(lam, lam, dagger), diagonal_form(ydagger, ydagger, dagger)
    report.add("dagger_diagonalization", H, left == right, f"{left} != {right}")

    for m in squarefree_upto(R, table):
        if not dagger.coprime_to_excluded(m):
            continue
        sign = -1 if len(dagger.primes_of(m)) % 2 else 1
        expected = sign * dagger.f2(m) / totient(m, table)
        if f2_divisor_sum(m, dagger) != expected:
            report.add("f2_divisor_identity", H, False, f"m={m}")
            break
    else:
        report.add("f2_divisor_identity", H, True)

    H0 = H.with_element(0)
    quotient = singular_series(H0, FG_TRUNCATION, table).value / singular_series(H, FG_TRUNCATION, table).value
    for r in (1, 5, 7):
        if not dagger.coprime_to_excluded(r):
            continue
        product = float(dagger.F(r)) * dagger_G(r, H, table, FG_TRUNCATION)
        error = abs(product / quotient - 1)
        report.add(f"F_G_product[r={r}]", H, error < FG_TOLERANCE, f"relative error {error:.2e}")


def run_identity_suite(seed: int = 0, R: int = DEFAULT_IDENTITY_R,
                       tuples: Sequence[str | KTuple] = DEFAULT_IDENTITY_TUPLES,
                       table: PrimeTable | None = None,
                       block_length: int = DEFAULT_BLOCK_LENGTH) -> IdentityReport:
    """
    Run every exact identity for each tuple (each must contain 0).

    The dagger checks use the tuple with 0 removed, so that H0 is the original tuple.

    Raises:
        ValueError: If a tuple lacks 0 or R < 2
    """
    if R < 2:
        raise ValueError(f"R must be >= 2, got {R}")
    table = table or sieve_primes(max(FG_TRUNCATION, 2 * R))
    rng = np.random.default_rng(seed)
    report = IdentityReport(seed=seed, R=R)

    for item in tuples:
        H = item if isinstance(item, KTuple) else KTuple.parse(item)
        if 0 not in H:
            raise ValueError(f"identity tuples must contain 0, got {H.to_list()}")
        _check_plain(report, H, R, table, rng, block_length)
        if H.k >= 2:
            _check_star(report, H, R, table, rng)
            _check_dagger(report, KTuple(tuple(h for h in H if h != 0)), R, table, rng)

    logger.info(f"Identity suite seed={seed}, R={R}: {len(report.checks)} checks, "
                f"{len(report.mismatches)} mismatches")
    return report
