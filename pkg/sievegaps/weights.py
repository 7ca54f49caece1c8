"""
sievegaps Weights Module

Selberg-type sieve weights for a tuple H. Three families of multiplicative
functions are supported:

- plain:  f(p) = p/nu_p,          f1(p) = (p - nu_p)/nu_p
- star:   f*(p) = (p-1)/nu*_p,    f1*(p) = (p-1-nu*_p)/nu*_p,  nu*_p = nu_p - 1 (0 in H)
- dagger: f+(p) = (p-1)/nu+_p,    f1+(p) = (p-1-nu+_p)/nu+_p,  nu+_p = nu_p(H + {0}) - 1 (0 not in H)

The starred and dagger functions are undefined at primes where the reduced
count is 0 (the primes of A(H), resp. A0); asking for them raises
SieveDomainError.

Weights are finite maps from squarefree integers to scalars. A scalar is a
Fraction in exact mode and a float otherwise; every transform below works in
either mode because the multiplicative functions are returned as Fractions.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from types import MappingProxyType
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .arith import PrimeTable, squarefree_upto, totient
from .tuples import KTuple, is_admissible, nu_p, omega_d, singular_series
from .utils import get_logger

logger = get_logger(__name__)

Scalar = float | Fraction
WeightMap = Mapping[int, Scalar]


class SieveDomainError(ValueError):
    """A partial multiplicative function was evaluated off its domain."""


class Variant(str, Enum):
    PLAIN = "plain"
    STAR = "star"
    DAGGER = "dagger"


class ScalarMode(str, Enum):
    FLOAT = "float"
    EXACT = "exact"


@dataclass(frozen=True, eq=False)
class SieveFunctions:
    """
    The multiplicative functions attached to H for one variant.

    `excluded_modulus` is A(H) for star and A0 for dagger (1 for plain);
    `B0` is the squarefree kernel of the product of the elements (dagger only).
    """

    H: KTuple
    variant: Variant
    table: PrimeTable
    excluded_modulus: int = 1
    B0: int = 1
    B0_primes: tuple[int, ...] = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    @classmethod
    def plain(cls, H: KTuple, table: PrimeTable) -> "SieveFunctions":
        if not is_admissible(H, table):
            raise ValueError(f"H = {list(H)} is not admissible")
        return cls(H=H, variant=Variant.PLAIN, table=table)

    @classmethod
    def star(cls, H: KTuple, table: PrimeTable) -> "SieveFunctions":
        """Starred functions; needs 0 in H and k >= 2 (for k = 1 every prime is excluded)."""
        if 0 not in H:
            raise ValueError(f"starred functions need 0 in H, got {list(H)}")
        if H.k < 2:
            raise ValueError("starred functions need k >= 2")
        if not is_admissible(H, table):
            raise ValueError(f"H = {list(H)} is not admissible")
        excluded = math.prod(
            p for p in table.primes_upto(H.diameter).tolist() if nu_p(H, p) == 1
        )
        return cls(H=H, variant=Variant.STAR, table=table, excluded_modulus=excluded)

    @classmethod
    def dagger(cls, H: KTuple, table: PrimeTable) -> "SieveFunctions":
        """Dagger functions for 0 not in H, built from H0 = H with 0 added."""
        if 0 in H:
            raise ValueError(f"dagger functions need 0 not in H, got {list(H)}")
        H0 = H.with_element(0)
        if not is_admissible(H, table) or not is_admissible(H0, table):
            raise ValueError(f"H = {list(H)} and H + {{0}} must both be admissible")
        reach = max(abs(h) for h in H)
        primes = table.primes_upto(reach).tolist()
        excluded = math.prod(p for p in primes if nu_p(H0, p) == 1)
        kernel_primes = tuple(p for p in primes if any(h % p == 0 for h in H))
        return cls(H=H, variant=Variant.DAGGER, table=table, excluded_modulus=excluded,
                   B0=math.prod(kernel_primes), B0_primes=kernel_primes)

    def as_plain(self) -> "SieveFunctions":
        if self.variant is Variant.PLAIN:
            return self
        return SieveFunctions(H=self.H, variant=Variant.PLAIN, table=self.table)

    # per-prime values

    def plain_nu(self, p: int) -> int:
        return nu_p(self.H, p)

    def nu(self, p: int) -> int:
        """nu_p, nu*_p or nu+_p depending on the variant."""
        key = ("nu", p)
        if key not in self._cache:
            if self.variant is Variant.PLAIN:
                value = nu_p(self.H, p)
            elif self.variant is Variant.STAR:
                value = nu_p(self.H, p) - 1
            else:
                value = nu_p(self.H, p) - (1 if any(h % p == 0 for h in self.H) else 0)
            self._cache[key] = value
        return self._cache[key]

    def is_excluded(self, p: int) -> bool:
        return self.variant is not Variant.PLAIN and self.nu(p) == 0

    def _f_prime(self, p: int) -> Fraction:
        nu = self.nu(p)
        if self.variant is Variant.PLAIN:
            return Fraction(p, nu)
        if nu == 0:
            raise SieveDomainError(f"{self.variant.value} f undefined at p={p} (divides {self.excluded_modulus})")
        return Fraction(p - 1, nu)

    def _f1_prime(self, p: int) -> Fraction:
        nu = self.nu(p)
        if self.variant is Variant.PLAIN:
            return Fraction(p - nu, nu)
        if nu == 0:
            raise SieveDomainError(f"{self.variant.value} f1 undefined at p={p} (divides {self.excluded_modulus})")
        return Fraction(p - 1 - nu, nu)

    def _f2_prime(self, p: int) -> Fraction:
        if self.B0 % p:
            return Fraction(1)
        return -Fraction(p - nu_p(self.H, p), nu_p(self.H, p))

    def _F_prime(self, p: int) -> Fraction:
        nu = nu_p(self.H, p)
        return Fraction(p * (p - 1 - self.nu(p)), (p - 1) * (p - nu))

    # multiplicative extensions to squarefree n

    def primes_of(self, n: int) -> list[int]:
        """Prime factors of a squarefree n."""
        factors = self.table.factor(n)
        if any(e > 1 for _, e in factors):
            raise ValueError(f"{n} is not squarefree")
        return [p for p, _ in factors]

    def _multiplicative(self, name: str, n: int, per_prime: Callable[[int], Fraction]) -> Fraction:
        result = Fraction(1)
        for p in self.primes_of(n):
            key = (name, p)
            if key not in self._cache:
                self._cache[key] = per_prime(p)
            result *= self._cache[key]
        return result

    def f(self, n: int) -> Fraction:
        return self._multiplicative("f", n, self._f_prime)

    def f1(self, n: int) -> Fraction:
        return self._multiplicative("f1", n, self._f1_prime)

    def f2(self, n: int) -> Fraction:
        """f2(p) = 1 for p not dividing B0, -f1(p) for p | B0 (dagger only)."""
        self._require(Variant.DAGGER, "f2")
        return self._multiplicative("f2", n, self._f2_prime)

    def F(self, n: int) -> Fraction:
        """F(p) = p (p-1-nu+_p) / ((p-1)(p-nu_p)) (dagger only)."""
        self._require(Variant.DAGGER, "F")
        return self._multiplicative("F", n, self._F_prime)

    def coprime_to_excluded(self, n: int) -> bool:
        return math.gcd(n, self.excluded_modulus) == 1

    def _require(self, variant: Variant, name: str) -> None:
        if self.variant is not variant:
            raise ValueError(f"{name} needs {variant.value} functions, got {self.variant.value}")


@dataclass(frozen=True)
class WeightSystem:
    """A y-map together with its induced lambda-map, both on squarefree integers below R."""

    R: float
    y: Mapping[int, Scalar]
    lam: Mapping[int, Scalar]
    scalar_mode: ScalarMode
    funcs: SieveFunctions

    @classmethod
    def from_y(cls, y: WeightMap, funcs: SieveFunctions, R: float,
               scalar_mode: ScalarMode = ScalarMode.FLOAT) -> "WeightSystem":
        lam = lambda_from_y(y, funcs, R)
        return cls(R=R, y=MappingProxyType(dict(y)), lam=MappingProxyType(lam),
                   scalar_mode=scalar_mode, funcs=funcs)


def _signed_divisors(primes: Sequence[int]) -> Iterator[tuple[int, int]]:
    """(d, mu(d)) for every divisor d of the product of `primes`."""
    for size in range(len(primes) + 1):
        sign = -1 if size % 2 else 1
        for combo in combinations(primes, size):
            yield math.prod(combo), sign


def _trim(values: dict[int, Scalar]) -> dict[int, Scalar]:
    return {n: v for n, v in sorted(values.items()) if v != 0}


def lambda_from_y(y: WeightMap, funcs: SieveFunctions, R: float | None = None) -> dict[int, Scalar]:
    """
    lambda_d = mu(d) f(d) * sum over r of y_{dr} / f1(dr).

    Args:
        y: Finite map on squarefree integers (below R when R is given)
        funcs: Multiplicative functions (any variant)
        R: Optional cutoff that the support must respect

    Returns:
        lambda map with zero entries dropped

    Raises:
        ValueError: If the support has a non-squarefree entry or one >= R
    """
    lam: dict[int, Scalar] = {}
    for m, value in y.items():
        if value == 0:
            continue
        if R is not None and m >= R:
            raise ValueError(f"y supported at {m} >= R={R}")
        primes = funcs.primes_of(m)
        share = value / funcs.f1(m)
        for d, sign in _signed_divisors(primes):
            lam[d] = lam.get(d, 0) + sign * funcs.f(d) * share
    return _trim(lam)


def y_from_lambda(lam: WeightMap, funcs: SieveFunctions) -> dict[int, Scalar]:
    """
    y_r = mu(r) f1(r) * sum over d of lambda_{dr} / f(dr).

    For star and dagger functions the sum runs over dr coprime to the excluded
    modulus, which is the definition of y* and y+ from a plain lambda.

    Raises:
        ValueError: If the support has a non-squarefree entry
    """
    y: dict[int, Scalar] = {}
    for m, value in lam.items():
        if value == 0:
            continue
        primes = funcs.primes_of(m)
        if not funcs.coprime_to_excluded(m):
            continue
        share = value / funcs.f(m)
        for r, sign in _signed_divisors(primes):
            y[r] = y.get(r, 0) + sign * funcs.f1(r) * share
    return _trim(y)


def y_star_transform(y: WeightMap, star: SieveFunctions) -> dict[int, Scalar]:
    """
    Closed form of y* for a generic y: (r/phi(r)) * sum over (m, r) = 1 of y_{rm}/phi(m), for (r, A) = 1.
    """
    star._require(Variant.STAR, "y_star_transform")
    out: dict[int, Scalar] = {}
    for s, value in y.items():
        if value == 0:
            continue
        primes = star.primes_of(s)
        for r, _ in _signed_divisors(primes):
            if not star.coprime_to_excluded(r):
                continue
            m = s // r
            weight = Fraction(r, totient(r, star.table)) / totient(m, star.table)
            out[r] = out.get(r, 0) + weight * value
    return _trim(out)


def y_dagger_transform(y: WeightMap, dagger: SieveFunctions) -> dict[int, Scalar]:
    """
    Closed form of y+ for a generic y:
    F(r) * sum over (m, r) = 1 of y_{rm} mu(m) f2(m) / (f1(m) phi(m)), for (r, A0) = 1.
    """
    dagger._require(Variant.DAGGER, "y_dagger_transform")
    plain = dagger.as_plain()
    out: dict[int, Scalar] = {}
    for s, value in y.items():
        if value == 0:
            continue
        primes = dagger.primes_of(s)
        for r, _ in _signed_divisors(primes):
            if not dagger.coprime_to_excluded(r):
                continue
            m = s // r
            sign = -1 if len(dagger.primes_of(m)) % 2 else 1
            weight = dagger.F(r) * sign * dagger.f2(m) / (plain.f1(m) * totient(m, dagger.table))
            out[r] = out.get(r, 0) + weight * value
    return _trim(out)


def z_star_from_lambda(lam: WeightMap, star: SieveFunctions, p: int) -> dict[int, Scalar]:
    """
    z*_{r,p} = mu(pr) f1*(r) * sum' over d of lambda_{drp} / f*(dr), for (r, A) = 1 and p not dividing r.
    """
    star._require(Variant.STAR, "z_star_from_lambda")
    out: dict[int, Scalar] = {}
    for m, value in lam.items():
        if value == 0 or m % p:
            continue
        n = m // p
        if n % p == 0 or not star.coprime_to_excluded(n):
            continue
        share = value / star.f(n)
        for r, sign in _signed_divisors(star.primes_of(n)):
            out[r] = out.get(r, 0) - sign * star.f1(r) * share
    return _trim(out)


def z_star_transform(y: WeightMap, star: SieveFunctions, p: int) -> dict[int, Scalar]:
    """
    Closed form of z* for a generic y:
    (r/phi(r)) (p/(p - nu_p)) * sum over (m, rp) = 1 of y_{rpm}/phi(m).
    """
    star._require(Variant.STAR, "z_star_transform")
    nu = star.plain_nu(p)
    out: dict[int, Scalar] = {}
    for s, value in y.items():
        if value == 0 or s % p:
            continue
        for r, _ in _signed_divisors(star.primes_of(s // p)):
            if not star.coprime_to_excluded(r):
                continue
            m = s // (r * p)
            weight = (Fraction(r, totient(r, star.table)) * Fraction(p, p - nu)
                      / totient(m, star.table))
            out[r] = out.get(r, 0) + weight * value
    return _trim(out)


def f2_divisor_sum(m: int, dagger: SieveFunctions) -> Fraction:
    """Sum' over d | m, (d, A0) = 1 of mu(d) f(d)/f+(d)."""
    plain = dagger.as_plain()
    total = Fraction(0)
    for d, sign in _signed_divisors(dagger.primes_of(m)):
        if dagger.coprime_to_excluded(d):
            total += sign * plain.f(d) / dagger.f(d)
    return total


def bilinear_form(lam1: WeightMap, lam2: WeightMap, funcs: SieveFunctions) -> Scalar:
    """
    Sum over d, e of lambda1_d lambda2_e / f([d, e]).

    With star or dagger functions, pairs whose lcm meets the excluded modulus
    contribute 0 (nu*_{[d,e]} vanishes there).
    """
    total: Scalar = 0
    for d, a in lam1.items():
        for e, b in lam2.items():
            lcm = d * e // math.gcd(d, e)
            if funcs.coprime_to_excluded(lcm):
                total += a * b / funcs.f(lcm)
    return total


def diagonal_form(y1: WeightMap, y2: WeightMap, funcs: SieveFunctions) -> Scalar:
    """Sum over r of y1_r y2_r / f1(r)."""
    total: Scalar = 0
    for r, a in y1.items():
        b = y2.get(r, 0)
        if b:
            total += a * b / funcs.f1(r)
    return total


def y_ell(r: int, ell: int, H: KTuple, R: float, S: float, table: PrimeTable) -> float:
    """y_{r,l} = mu^2(r) S (log R/r)^l / l!  for r < R."""
    if r >= R or not _is_squarefree(r, table):
        return 0.0
    return S * math.log(R / r) ** ell / math.factorial(ell)


def y_polynomial(r: int, b: Sequence[float], R: float, S: float, table: PrimeTable) -> float:
    """Combined weight sum over l of b_l (log R)^-l y_{r,l}."""
    if r >= R or not _is_squarefree(r, table):
        return 0.0
    ratio = math.log(R / r) / math.log(R)
    return S * math.fsum(coeff * ratio**ell / math.factorial(ell) for ell, coeff in enumerate(b))


def _is_squarefree(n: int, table: PrimeTable) -> bool:
    return n >= 1 and all(e == 1 for _, e in table.factor(n))


def _series(H: KTuple, S: float | None) -> float:
    return singular_series(H).value if S is None else S


@lru_cache(maxsize=64)
def lambda_ell_table(H: KTuple, R: float, ell: int, table: PrimeTable,
                       S: float | None = None) -> Mapping[int, float]:
    """Cached lambda_{d,l} for all squarefree d < R, induced from y_{r,l}."""
    funcs = SieveFunctions.plain(H, table)
    series = _series(H, S)
    y = {r: y_ell(r, ell, H, R, series, table) for r in squarefree_upto(R, table)}
    lam = lambda_from_y(y, funcs, R)
    logger.debug(f"lambda table H={H}, R={R}, l={ell}: {len(lam)} entries")
    return MappingProxyType(lam)


def polynomial_lambda_table(H: KTuple, R: float, b: tuple[float, ...], table: PrimeTable,
                            S: float | None = None) -> dict[int, float]:
    """lambda induced from the combined y (sum over l of b_l (log R)^-l y_{r,l})."""
    funcs = SieveFunctions.plain(H, table)
    series = _series(H, S)
    y = {r: y_polynomial(r, b, R, series, table) for r in squarefree_upto(R, table)}
    return lambda_from_y(y, funcs, R)


def lambda_ell(d: int, ell: int, H: KTuple, R: float, table: PrimeTable,
                 S: float | None = None) -> float:
    """
    lambda_{d,l} = mu(d) (f(d)/f1(d)) (S/l!) * sum over r < R/d, (r, d) = 1 of mu^2(r) (log R/rd)^l / f1(r).
    """
    if d >= R or not _is_squarefree(d, table):
        return 0.0
    funcs = SieveFunctions.plain(H, table)
    series = _series(H, S)
    inner = math.fsum(
        math.log(R / (r * d)) ** ell / float(funcs.f1(r))
        for r in squarefree_upto(R / d, table)
        if math.gcd(r, d) == 1
    )
    sign = -1 if len(funcs.primes_of(d)) % 2 else 1
    return sign * float(funcs.f(d) / funcs.f1(d)) * series / math.factorial(ell) * inner


def lambda_log_power(d: int, ell: int, R: float, k: int, table: PrimeTable) -> float:
    """Alternative weights mu(d) (log R/d)^(k+l) / (k+l)!."""
    if d >= R or not _is_squarefree(d, table):
        return 0.0
    sign = -1 if len(table.factor(d)) % 2 else 1
    return sign * math.log(R / d) ** (k + ell) / math.factorial(k + ell)


def lambda_bound(ell: int, H: KTuple, R: float, table: PrimeTable, S: float | None = None) -> float:
    """Upper bound (S/l!) (log R)^l * sum over s < R of mu^2(s)/f1(s) for |lambda_{d,l}|."""
    funcs = SieveFunctions.plain(H, table)
    series = _series(H, S)
    total = math.fsum(float(1 / funcs.f1(s)) for s in squarefree_upto(R, table))
    return series / math.factorial(ell) * math.log(R) ** ell * total


def mean_value_check(H: KTuple, R: float, ell: int, table: PrimeTable,
                     S: float | None = None) -> tuple[float, float]:
    """
    Sum over r < R of mu^2(r) (log R/r)^l / f1(r) against l! (log R)^(k+l) / (S (k+l)!).
    """
    funcs = SieveFunctions.plain(H, table)
    series = _series(H, S)
    lhs = math.fsum(
        math.log(R / r) ** ell / float(funcs.f1(r)) for r in squarefree_upto(R, table)
    )
    k = H.k
    rhs = math.factorial(ell) * math.log(R) ** (k + ell) / (series * math.factorial(k + ell))
    return lhs, rhs


def rho(r: int, table: PrimeTable) -> float:
    """1 + sum over p | r of log p / p."""
    return 1 + math.fsum(math.log(p) / p for p, _ in table.factor(r))


def _coprime_squarefree(limit: float, modulus: int, table: PrimeTable) -> list[int]:
    return [m for m in squarefree_upto(limit, table) if math.gcd(m, modulus) == 1]


def y_star(r: int, ell: int, H: KTuple, R: float, table: PrimeTable, S: float | None = None) -> float:
    """
    y*_{r,l} = mu^2(r) (S/l!) (r/phi(r)) * sum over m < R/r, (m, r) = 1 of mu^2(m) (log R/rm)^l / phi(m).

    Zero when r is not squarefree, r >= R or (r, A(H)) > 1.
    """
    star = SieveFunctions.star(H, table)
    if r >= R or not _is_squarefree(r, table) or not star.coprime_to_excluded(r):
        return 0.0
    series = _series(H, S)
    inner = math.fsum(
        math.log(R / (r * m)) ** ell / totient(m, table)
        for m in _coprime_squarefree(R / r, r, table)
    )
    return series / math.factorial(ell) * r / totient(r, table) * inner


def z_star(r: int, p: int, ell: int, H: KTuple, R: float, table: PrimeTable,
           S: float | None = None) -> float:
    """
    z*_{r,p,l} = (S/l!) (rp/phi(rp)) ((p-1)/(p-nu_p)) * sum over m < R/rp, (m, rp) = 1 of
    mu^2(m) (log R/rpm)^l / phi(m).

    Zero unless rp is squarefree, r < R/p and (r, A(H)) = 1.
    """
    star = SieveFunctions.star(H, table)
    rp = r * p
    if r % p == 0 or rp >= R or not _is_squarefree(rp, table) or not star.coprime_to_excluded(r):
        return 0.0
    series = _series(H, S)
    inner = math.fsum(
        math.log(R / (rp * m)) ** ell / totient(m, table)
        for m in _coprime_squarefree(R / rp, rp, table)
    )
    nu = nu_p(H, p)
    return (series / math.factorial(ell) * rp / totient(rp, table)
            * (p - 1) / (p - nu) * inner)


def y_dagger(r: int, ell: int, H: KTuple, R: float, table: PrimeTable, S: float | None = None) -> float:
    """
    y+_{r,l} for 0 not in H, l >= 1:

        (S F(r) / l!) * sum over delta | B1 of mu^2(delta)/phi(delta)
            * sum over n < R/(r delta), (n, r B1) = 1 of mu(n) (log R/(r delta n))^l / (f1(n) phi(n))

    with B1 = B0 / (B0, r).

    Raises:
        NotImplementedError: For l = 0
    """
    if ell < 1:
        raise NotImplementedError("y+ is only provided for l >= 1")
    dagger = SieveFunctions.dagger(H, table)
    if r >= R or not _is_squarefree(r, table) or not dagger.coprime_to_excluded(r):
        return 0.0
    plain = dagger.as_plain()
    series = _series(H, S)
    B1 = dagger.B0 // math.gcd(dagger.B0, r)

    outer = []
    for delta, _ in _signed_divisors([p for p in dagger.B0_primes if r % p]):
        if r * delta >= R:
            continue
        inner = math.fsum(
            (-1 if len(plain.primes_of(n)) % 2 else 1)
            * math.log(R / (r * delta * n)) ** ell
            / (float(plain.f1(n)) * totient(n, table))
            for n in _coprime_squarefree(R / (r * delta), r * B1, table)
        )
        outer.append(inner / totient(delta, table))
    return series * float(dagger.F(r)) / math.factorial(ell) * math.fsum(outer)


def dagger_G(r: int, H: KTuple, table: PrimeTable, P: int = 10**6) -> float:
    """G(r) = product over p not dividing r of F(p), truncated at P."""
    dagger = SieveFunctions.dagger(H, table)
    primes = table.primes_upto(P).tolist()
    return math.exp(math.fsum(
        math.log(float(dagger.F(p))) for p in primes if r % p
    ))


@lru_cache(maxsize=1024)
def _omega_residues(H: KTuple, d: int, table: PrimeTable) -> tuple[int, ...]:
    return tuple(omega_d(H, d, table))


def divisor_lambda_R(n: int, H: KTuple, lam: WeightMap) -> Scalar:
    """Lambda_R(n) by summing lambda_d over the d in the support that divide P(n; H)."""
    value = math.prod(n + h for h in H)
    total: Scalar = 0
    for d, weight in lam.items():
        if value % d == 0:
            total += weight
    return total


def sieve_lambda_R(N: int, length: int, H: KTuple, lam: WeightMap, table: PrimeTable,
                   scalar_mode: ScalarMode = ScalarMode.FLOAT) -> np.ndarray | list[Fraction]:
    """
    Lambda_R(n; H) for n in (N, N + length] by block accumulation.

    For every d in the support and every a in Omega_d, lambda_d is added at the
    n = a (mod d) of the block. A block shorter than the largest modulus is
    evaluated per n by divisor enumeration instead.

    Returns:
        float64 array, or a list of Fractions in exact mode
    """
    if length < 0:
        raise ValueError(f"length must be non-negative, got {length}")
    exact = scalar_mode is ScalarMode.EXACT
    largest = max(lam, default=1)
    if length < largest:
        logger.warning(f"Block of {length} is shorter than modulus {largest}; using divisor enumeration")
        values = [divisor_lambda_R(n, H, lam) for n in range(N + 1, N + length + 1)]
        if exact:
            return [Fraction(v) for v in values]
        return np.array(values, dtype=np.float64)

    start = N + 1
    if exact:
        result: list[Fraction] = [Fraction(0)] * length
        for d, weight in lam.items():
            for a in _omega_residues(H, d, table):
                for i in range((a - start) % d, length, d):
                    result[i] += weight
        return result

    array = np.zeros(length, dtype=np.float64)
    for d, weight in lam.items():
        for a in _omega_residues(H, d, table):
            array[(a - start) % d :: d] += float(weight)
    return array
