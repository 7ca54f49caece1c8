"""
sievegaps Asymptotics Module

Exact symbolic layer for the quadratic forms that decide whether a sieve
weight choice forces two primes (or two E2 numbers) into a shifted tuple.
Entries are polynomials in the level of distribution theta with rational
coefficients (sympy Poly over QQ); matrices are evaluated at rational theta
and their sign structure is decided by exact pivoted LDL^T over Fractions.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

import sympy

from .utils import get_logger

logger = get_logger(__name__)

THETA = sympy.Symbol("theta")
HALF = sympy.Rational(1, 2)
THETA_RANGE = sympy.Interval.Lopen(HALF, 1)
ROOT_DIGITS = 30

# Printed scaled entries of known matrices: (k, L, kind, theta) -> (scale, integer entries)
REFERENCE_MATRICES = {
    (8, 2, "e2", "1/2"): (
        math.factorial(14),
        ((-216216, 8736, 3458), (8736, -364, 14), (3458, 14, -36)),
    ),
}

RationalPoly = sympy.Poly


class MatrixKind(str, Enum):
    PRIME = "prime"
    E2 = "e2"


def rational_poly(expr) -> RationalPoly:
    return sympy.Poly(expr, THETA, domain="QQ")


def to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def to_rational(value: Fraction | int | str) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _check_indices(k: int, l1: int, l2: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    for ell in (l1, l2):
        if not 0 <= ell <= k:
            raise ValueError(f"l must lie in [0, k={k}], got {ell}")


def m(k: int, l1: int, l2: int) -> RationalPoly:
    """
    m(k, l1, l2) = C(l1+l2, l1)/(k+l1+l2)! * (k(L+1)(L+2)/((k+L+1)(l1+1)(l2+1)) * theta/2 - 1),
    L = l1 + l2.
    """
    _check_indices(k, l1, l2)
    total = l1 + l2
    scale = sympy.Rational(math.comb(total, l1), math.factorial(k + total))
    slope = sympy.Rational(k * (total + 1) * (total + 2), (k + total + 1) * (l1 + 1) * (l2 + 1))
    return rational_poly(scale * (slope * THETA / 2 - 1))


def m2_components(k: int, l1: int, l2: int) -> tuple[RationalPoly, RationalPoly, RationalPoly]:
    """The three pieces (m21, m22, m23) of the E2 form entry."""
    _check_indices(k, l1, l2)
    total = l1 + l2
    inner = math.comb(total + 2, l1 + 1)
    m21 = sympy.Rational(inner * k, math.factorial(k + total + 1)) * THETA / 2
    bracket = inner - math.comb(total + 3, l1 + 1) - math.comb(total + 3, l2 + 1)
    m22 = sympy.Rational(2 * bracket * k, math.factorial(k + total + 2)) * THETA**2 / 4
    m23 = sympy.Rational(math.comb(total, l1), 2 * math.factorial(k + total))
    return rational_poly(m21), rational_poly(m22), rational_poly(m23)


def m2(k: int, l1: int, l2: int) -> RationalPoly:
    """m2 = m21 + m22 - m23."""
    m21, m22, m23 = m2_components(k, l1, l2)
    return m21 + m22 - m23


def t_components(l1: int, l2: int) -> tuple[int, int, int]:
    return (
        -math.comb(l1 + l2 + 3, l2 + 1),
        -math.comb(l1 + l2 + 3, l1 + 1),
        math.comb(l1 + l2 + 2, l1 + 1),
    )


def t_coeff(k: int, l1: int, l2: int) -> int:
    """T(k, l1, l2) = -C(L+3, l2+1) - C(L+3, l1+1) + C(L+2, l1+1); independent of k."""
    _check_indices(k, l1, l2)
    return sum(t_components(l1, l2))


@dataclass(frozen=True)
class FormMatrix:
    """Symmetric (L+1) x (L+1) matrix of polynomials in theta."""

    k: int
    L: int
    kind: MatrixKind
    entries: tuple[tuple[RationalPoly, ...], ...]

    @property
    def size(self) -> int:
        return self.L + 1

    def at(self, theta: Fraction | int | str) -> list[list[Fraction]]:
        """Entries evaluated exactly at a rational theta."""
        point = to_rational(theta)
        return [[to_fraction(entry.eval(point)) for entry in row] for row in self.entries]

    def as_matrix(self) -> sympy.Matrix:
        return sympy.Matrix([[entry.as_expr() for entry in row] for row in self.entries])

    def determinant(self, scale: int = 1) -> RationalPoly:
        """det(scale * M) as a polynomial in theta."""
        return rational_poly(sympy.expand((self.as_matrix() * scale).det(method="berkowitz")))

    def common_scale(self) -> int:
        """Least common denominator of all coefficients."""
        denominators = [
            int(sympy.Rational(c).q) for row in self.entries for entry in row for c in entry.all_coeffs()
        ]
        return math.lcm(*denominators) if denominators else 1

    def entry_strings(self, scale: int = 1) -> list[list[str]]:
        return [[str((entry * scale).as_expr()) for entry in row] for row in self.entries]


def build_matrix(k: int, L: int, kind: MatrixKind | str) -> FormMatrix:
    """
    M = [m(k, i, j)] or M2 = [m2(k, i, j)] for 0 <= i, j <= L.

    Raises:
        ValueError: If L > k or L < 0
    """
    kind = MatrixKind(kind)
    if not 0 <= L <= k:
        raise ValueError(f"L must lie in [0, k={k}], got {L}")
    generator = m if kind is MatrixKind.PRIME else m2
    entries = tuple(tuple(generator(k, i, j) for j in range(L + 1)) for i in range(L + 1))
    logger.debug(f"Built {kind.value} matrix for k={k}, L={L}")
    return FormMatrix(k=k, L=L, kind=kind, entries=entries)


def quad_form(Mx: FormMatrix, b: Sequence[int]) -> RationalPoly:
    """
    b^T M b as a polynomial in theta.

    Raises:
        ValueError: If len(b) != L + 1
    """
    if len(b) != Mx.size:
        raise ValueError(f"vector of length {len(b)} does not match matrix size {Mx.size}")
    total = rational_poly(0)
    for i, bi in enumerate(b):
        for j, bj in enumerate(b):
            if bi and bj:
                total += Mx.entries[i][j] * (int(bi) * int(bj))
    return total


def s1_star_model(k: int, L: int, b: Sequence[int], theta: Fraction | str | None = None):
    """
    Sum over l1, l2 <= L of b_l1 b_l2 m(k, l1, l2), as a polynomial or its value at theta.
    """
    if len(b) != L + 1:
        raise ValueError(f"vector of length {len(b)} does not match L={L}")
    total = rational_poly(0)
    for l1 in range(L + 1):
        for l2 in range(L + 1):
            total += m(k, l1, l2) * (int(b[l1]) * int(b[l2]))
    if theta is None:
        return total
    return to_fraction(total.eval(to_rational(theta)))


def single_ell_display(k: int, ell: int) -> RationalPoly:
    """2k(2l+1)/((k+2l+1)(l+1)) * theta/2 - 1, the sign-carrying factor of m(k, l, l)."""
    _check_indices(k, ell, ell)
    slope = sympy.Rational(2 * k * (2 * ell + 1), (k + 2 * ell + 1) * (ell + 1))
    return rational_poly(slope * THETA / 2 - 1)


def single_ell_threshold(k: int, ell: int) -> Fraction:
    """theta above which m(k, l, l) > 0: (1/2 + 1/(4l+2))(1 + (2l+1)/k)."""
    _check_indices(k, ell, ell)
    return (Fraction(1, 2) + Fraction(1, 4 * ell + 2)) * (1 + Fraction(2 * ell + 1, k))


def b1_tilde(k: int, ell: int, log_ratio: Fraction, h_ratio: Fraction) -> Fraction:
    """2(2l+1)/(l+1) * k/(k+2l+1) * log R/log N + h/log N - 1."""
    return (Fraction(2 * (2 * ell + 1), ell + 1) * Fraction(k, k + 2 * ell + 1) * Fraction(log_ratio)
            + Fraction(h_ratio) - 1)


def b1_tilde_threshold(k: int, ell: int, eps: Fraction | int = 0) -> Fraction:
    """
    h/log N threshold (k + 4l^2 + 6l + 2 + 4 eps (k + 2kl)) / (2(1+l)(1+2l+k)).

    Raises:
        ValueError: If l > k
    """
    if not 0 <= ell <= k:
        raise ValueError(f"l must lie in [0, k={k}], got {ell}")
    eps = Fraction(eps)
    numerator = k + 4 * ell * ell + 6 * ell + 2 + 4 * eps * (k + 2 * k * ell)
    return numerator / (2 * (1 + ell) * (1 + 2 * ell + k))


@dataclass(frozen=True)
class ThresholdResult:
    """Where a polynomial is positive inside (1/2, 1]."""

    polynomial: RationalPoly
    positive_set: sympy.Set
    roots: tuple
    numeric_roots: tuple[float, ...]
    empty: bool = False

    def to_dict(self) -> dict:
        return {
            "polynomial": str(self.polynomial.as_expr()),
            "positive_set": str(self.positive_set),
            "roots": [str(r) for r in self.roots],
            "numeric_roots": list(self.numeric_roots),
            "empty": self.empty,
        }


def _in_range(value: float) -> bool:
    return 0.5 < value <= 1.0


def positivity_threshold(p: RationalPoly) -> ThresholdResult:
    """
    Exact set of theta in (1/2, 1] with p(theta) > 0, for degree <= 2.

    Roots are kept as radicals and evaluated to 30 digits.

    Raises:
        ValueError: If the degree exceeds 2
    """
    if p.is_zero:
        return ThresholdResult(polynomial=p, positive_set=sympy.EmptySet, roots=(),
                               numeric_roots=(), empty=True)
    if p.degree() > 2:
        raise ValueError(f"degree must be <= 2, got {p.degree()}")
    roots = []
    for root in sympy.roots(p):
        if root.is_real and _in_range(float(sympy.N(root, ROOT_DIGITS))):
            roots.append(sympy.nsimplify(root) if root.is_Rational else root)
    roots.sort(key=lambda r: float(sympy.N(r, ROOT_DIGITS)))
    positive = sympy.solveset(p.as_expr() > 0, THETA, domain=THETA_RANGE)
    numeric = tuple(float(sympy.N(r, ROOT_DIGITS)) for r in roots)
    logger.debug(f"Positivity of {p.as_expr()}: {positive}")
    return ThresholdResult(polynomial=p, positive_set=positive, roots=tuple(roots),
                           numeric_roots=numeric, empty=positive is sympy.EmptySet)


def roots_in_interval(p: RationalPoly) -> list[float]:
    """Real roots of p in (1/2, 1], any degree, as floats."""
    if p.is_zero:
        return []
    found = []
    for root in sympy.real_roots(p):
        value = float(sympy.N(root, ROOT_DIGITS))
        if _in_range(value):
            found.append(value)
    return sorted(found)


def ldl_signature(A: list[list[Fraction]]) -> tuple[int, int, int]:
    """
    Inertia (positive, negative, zero) of a symmetric rational matrix.

    Symmetric pivoting: the largest diagonal pivot is eliminated when nonzero;
    otherwise a 2x2 block [[0, c], [c, 0]] is eliminated, which contributes one
    positive and one negative eigenvalue.
    """
    A = [list(map(Fraction, row)) for row in A]
    active = list(range(len(A)))
    positive = negative = zero = 0
    while active:
        i = max(active, key=lambda j: abs(A[j][j]))
        if A[i][i] != 0:
            pivot = A[i][i]
            if pivot > 0:
                positive += 1
            else:
                negative += 1
            active = [j for j in active if j != i]
            for u in active:
                for v in active:
                    A[u][v] -= A[u][i] * A[i][v] / pivot
            continue
        pair = next(((a, b) for a in active for b in active if a < b and A[a][b] != 0), None)
        if pair is None:
            zero += len(active)
            break
        a, b = pair
        c = A[a][b]
        positive += 1
        negative += 1
        active = [j for j in active if j not in pair]
        for u in active:
            for v in active:
                A[u][v] -= (A[u][a] * A[b][v] + A[u][b] * A[a][v]) / c
    return positive, negative, zero


def _positive_direction(A: list[list[Fraction]], active: list[int]) -> dict[int, Fraction] | None:
    for i in active:
        if A[i][i] > 0:
            return {i: Fraction(1)}
    negatives = [i for i in active if A[i][i] < 0]
    if negatives:
        i = min(negatives, key=lambda j: A[j][j])
        rest = [j for j in active if j != i]
        schur = [row[:] for row in A]
        for u in rest:
            for v in rest:
                schur[u][v] = A[u][v] - A[u][i] * A[i][v] / A[i][i]
        direction = _positive_direction(schur, rest)
        if direction is None:
            return None
        direction[i] = -sum(A[i][j] * w for j, w in direction.items()) / A[i][i]
        return direction
    for a in active:
        for b in active:
            if a < b and A[a][b] != 0:
                return {a: Fraction(1), b: Fraction(1 if A[a][b] > 0 else -1)}
    return None


def form_value(A: list[list[Fraction]], b: Sequence[Fraction | int]) -> Fraction:
    """b^T A b in exact arithmetic."""
    return sum((Fraction(b[i]) * A[i][j] * Fraction(b[j])
                for i in range(len(b)) for j in range(len(b))), Fraction(0))


@dataclass(frozen=True)
class EigenCertificate:
    exists: bool
    witness: tuple[int, ...] | None
    value: Fraction | None
    signature: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {
            "positive_eigenvalue": self.exists,
            "witness": list(self.witness) if self.witness else None,
            "bT_M_b": str(self.value) if self.value is not None else None,
            "signature": list(self.signature),
        }


def positive_eigen_exists(Mx: FormMatrix, theta0: Fraction | str | int,
                          candidate: Sequence[int] | None = None) -> EigenCertificate:
    """
    Decide exactly whether M(theta0) has a positive eigenvalue.

    A positive direction b (b^T M b > 0) is the certificate. A supplied
    candidate is used when it already works; otherwise one is built by
    eliminating negative pivots and lifting the direction found in the Schur
    complement. The result is scaled to a primitive integer vector.
    """
    A = Mx.at(theta0)
    signature = ldl_signature(A)
    if candidate is not None:
        if len(candidate) != Mx.size:
            raise ValueError(f"candidate of length {len(candidate)} does not match size {Mx.size}")
        value = form_value(A, candidate)
        if value > 0:
            return EigenCertificate(True, tuple(int(c) for c in candidate), value, signature)

    direction = _positive_direction(A, list(range(Mx.size)))
    if direction is None:
        return EigenCertificate(False, None, None, signature)

    vector = [direction.get(i, Fraction(0)) for i in range(Mx.size)]
    scale = math.lcm(*(v.denominator for v in vector))
    integers = [int(v * scale) for v in vector]
    common = math.gcd(*integers) or 1
    witness = tuple(v // common for v in integers)
    value = form_value(A, witness)
    if value <= 0 or signature[0] == 0:
        raise ArithmeticError(f"inconsistent certificate {witness} with signature {signature}")
    return EigenCertificate(True, witness, value, signature)


def reference_mismatches(Mx: FormMatrix, theta: str) -> list[tuple[int, int, int, int]] | None:
    """
    Compare scale * M(theta) with a recorded integer table.

    Returns:
        None when no reference is recorded, else (i, j, expected, computed) for every mismatch
    """
    key = (Mx.k, Mx.L, Mx.kind.value, theta)
    if key not in REFERENCE_MATRICES:
        return None
    scale, expected = REFERENCE_MATRICES[key]
    values = Mx.at(theta)
    mismatches = []
    for i, row in enumerate(expected):
        for j, target in enumerate(row):
            computed = values[i][j] * scale
            if computed != target:
                mismatches.append((i, j, target, computed))
    if mismatches:
        logger.warning(f"{len(mismatches)} entries differ from the recorded table for {key}")
    return mismatches


def signature(Mx: FormMatrix, theta0: Fraction | str | int) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of M(theta0), exactly."""
    return ldl_signature(Mx.at(theta0))
