"""
sievegaps Tuples Module

Admissible k-tuples: residue counts nu_p and nu_d, the residue sets Omega_d
assembled by CRT, admissibility, the discriminant Delta(H), beta(H), the
truncated singular series with a rigorous tail bracket, its starred form,
and a pruned search for admissible subsets of [1, h_max].
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable

import numpy as np

from .arith import PrimeTable, sieve_primes
from .utils import default_workers, get_logger

logger = get_logger(__name__)

DEFAULT_TRUNCATION_PRIME = 10**6
BETA_FLOOR = math.log(2) / 2


@dataclass(frozen=True)
class KTuple:
    """A set H = {h_1 < ... < h_k} of distinct integers."""

    elements: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(h) for h in self.elements)
        if not values:
            raise ValueError("a tuple needs at least one element")
        if len(set(values)) != len(values):
            raise ValueError(f"tuple elements must be distinct, got {list(values)}")
        object.__setattr__(self, "elements", tuple(sorted(values)))

    @classmethod
    def of(cls, values: Iterable[int]) -> "KTuple":
        return cls(tuple(values))

    @classmethod
    def parse(cls, text: str) -> "KTuple":
        """Parse "0,2,6" (whitespace tolerated)."""
        parts = [part.strip() for part in text.split(",") if part.strip()]
        try:
            return cls(tuple(int(part) for part in parts))
        except ValueError as e:
            raise ValueError(f"invalid tuple {text!r}: {e}")

    @property
    def k(self) -> int:
        return len(self.elements)

    @property
    def diameter(self) -> int:
        return self.elements[-1] - self.elements[0]

    @cached_property
    def delta(self) -> int:
        """Delta(H): product of |h_i - h_j| over i < j (1 for k = 1)."""
        return math.prod(b - a for i, a in enumerate(self.elements) for b in self.elements[i + 1:])

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, h: object) -> bool:
        return h in self.elements

    def shift(self, c: int) -> "KTuple":
        return KTuple(tuple(h + c for h in self.elements))

    def with_element(self, h0: int) -> "KTuple":
        """H0 = H with h0 added."""
        if h0 in self.elements:
            raise ValueError(f"{h0} already in {list(self.elements)}")
        return KTuple(self.elements + (h0,))

    def to_list(self) -> list[int]:
        return list(self.elements)

    def __str__(self) -> str:
        return ",".join(str(h) for h in self.elements)


@dataclass(frozen=True)
class SingularSeriesValue:
    """Truncated Euler product with a relative error bracket for the primes beyond it."""

    value: float
    truncation_prime: int
    tail_bound: float

    def bracket(self) -> tuple[float, float]:
        return self.value * (1 - self.tail_bound), self.value * (1 + self.tail_bound)


@lru_cache(maxsize=4)
def _table_for(limit: int) -> PrimeTable:
    logger.info(f"Building prime table up to {limit}")
    return sieve_primes(limit)


def primes_for(limit: int, table: PrimeTable | None = None) -> np.ndarray:
    """Primes <= limit, from the given table when it is large enough."""
    if table is None or table.limit < limit:
        table = _table_for(max(limit, 2))
    return table.primes_upto(limit)


def nu_p(H: KTuple, p: int) -> int:
    """Number of distinct residues of H modulo p."""
    return len({h % p for h in H})


def omega_p(H: KTuple, p: int) -> list[int]:
    """Residues a mod p with P(a; H) = 0 mod p, i.e. {-h mod p}."""
    return sorted({(-h) % p for h in H})


def nu_d(H: KTuple, d: int, table: PrimeTable) -> int:
    return math.prod(nu_p(H, p) for p in _squarefree_primes(d, table))


def _squarefree_primes(d: int, table: PrimeTable) -> list[int]:
    factors = table.factor(d)
    if any(e > 1 for _, e in factors):
        raise ValueError(f"{d} is not squarefree")
    return [p for p, _ in factors]


def omega_d(H: KTuple, d: int, table: PrimeTable) -> list[int]:
    """
    Residues a mod d with P(a; H) = 0 mod d, for squarefree d.

    Built by CRT from the prime residue sets; d = 1 gives [0].

    Raises:
        ValueError: If d is not squarefree or exceeds the table
    """
    residues = [0]
    modulus = 1
    for p in _squarefree_primes(d, table):
        inverse = pow(modulus, -1, p)
        residues = [
            a + modulus * (((b - a) * inverse) % p)
            for a in residues
            for b in omega_p(H, p)
        ]
        modulus *= p
    return sorted(residues)


def is_admissible(H: KTuple, table: PrimeTable | None = None) -> bool:
    """True iff nu_p(H) < p for every prime p (only p <= k can fail)."""
    if table is not None and table.limit < H.k:
        raise ValueError(f"prime table limit {table.limit} is below k={H.k}")
    return all(nu_p(H, int(p)) < p for p in primes_for(H.k, table))


def _effective_truncation(H: KTuple, P: int) -> int:
    if P < H.k:
        raise ValueError(f"truncation prime must be >= k={H.k}, got {P}")
    return max(P, H.diameter, 2 * H.k)


@lru_cache(maxsize=16)
def _generic_log_prefix(k: int, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Prime list and prefix sums of log((1 - k/p)(1 - 1/p)^-k) over p > k."""
    primes = primes_for(limit)
    primes = primes[primes > k].astype(np.float64)
    terms = np.log1p(-k / primes) - k * np.log1p(-1.0 / primes)
    return primes, np.concatenate(([0.0], np.cumsum(terms)))


def singular_series(H: KTuple, P: int = DEFAULT_TRUNCATION_PRIME,
                    table: PrimeTable | None = None) -> SingularSeriesValue:
    """
    Singular series of H truncated at P with a rigorous tail bracket.

    Primes up to max(P, diameter, 2k) are multiplied in; beyond that nu_p = k
    and |log factor| <= k^2/p^2, so the tail is at most k^2/P in the logarithm.

    Args:
        H: The tuple
        P: Truncation prime (>= k)
        table: Optional prime table to reuse

    Returns:
        SingularSeriesValue; value 0 exactly when H is inadmissible
    """
    cutoff = _effective_truncation(H, P)
    k = H.k
    if k == 1:
        return SingularSeriesValue(value=1.0, truncation_prime=cutoff, tail_bound=0.0)
    if not is_admissible(H):
        return SingularSeriesValue(value=0.0, truncation_prime=cutoff, tail_bound=0.0)

    direct_limit = max(H.diameter, k)
    small = primes_for(direct_limit, table).tolist()
    log_sum = math.fsum(
        math.log1p(-nu_p(H, p) / p) - k * math.log1p(-1.0 / p) for p in small
    )

    primes, prefix = _generic_log_prefix(k, cutoff)
    lo = int(np.searchsorted(primes, direct_limit, side="right"))
    hi = int(np.searchsorted(primes, cutoff, side="right"))
    log_sum += float(prefix[hi] - prefix[lo])

    tail = math.expm1(k * k / cutoff)
    value = math.exp(log_sum)
    logger.debug(f"S({H}) = {value:.12f} (P={cutoff}, tail={tail:.2e})")
    return SingularSeriesValue(value=value, truncation_prime=cutoff, tail_bound=tail)


def singular_series_star(H: KTuple, P: int = DEFAULT_TRUNCATION_PRIME,
                         table: PrimeTable | None = None) -> float:
    """
    Starred singular series, product of (1 - nu*_p/(p-1))(1 - 1/p)^-(k-1) with nu*_p = nu_p - 1.

    Raises:
        ValueError: If 0 is not in H
    """
    if 0 not in H:
        raise ValueError(f"starred series needs 0 in H, got {list(H)}")
    cutoff = _effective_truncation(H, P)
    k = H.k
    if not is_admissible(H):
        return 0.0

    primes = primes_for(cutoff, table).astype(np.float64)
    nu_star = np.full(len(primes), float(k - 1))
    direct_limit = max(H.diameter, k)
    for i, p in enumerate(primes_for(direct_limit, table).tolist()):
        nu_star[i] = nu_p(H, p) - 1
    terms = np.log1p(-nu_star / (primes - 1)) - (k - 1) * np.log1p(-1.0 / primes)
    return math.exp(math.fsum(terms.tolist()))


def beta(H: KTuple, table: PrimeTable) -> float:
    """
    beta(H) = sum over p | Delta(H) of (k - nu_p) log p / p.

    Only p <= diameter can divide Delta(H).

    Raises:
        ValueError: If the table does not reach the diameter
    """
    if table.limit < H.diameter:
        raise ValueError(f"prime table limit {table.limit} is below diameter {H.diameter}")
    k = H.k
    terms = []
    for p in table.primes_upto(H.diameter).tolist():
        deficit = k - nu_p(H, p)
        if deficit:
            terms.append(deficit * math.log(p) / p)
    return math.fsum(terms)


def _search_from(first: int, k: int, h_max: int, primes: list[int]) -> list[tuple[int, ...]]:
    """All admissible k-subsets of [first, h_max] whose least element is `first`."""
    found: list[tuple[int, ...]] = []
    full = [(1 << p) - 1 for p in primes]

    def extend(chosen: list[int], masks: list[int]) -> None:
        if len(chosen) == k:
            found.append(tuple(chosen))
            return
        need = k - len(chosen)
        for h in range(chosen[-1] + 1, h_max - need + 2):
            new_masks = [m | (1 << (h % p)) for m, p in zip(masks, primes)]
            if any(m == f for m, f in zip(new_masks, full)):
                continue
            chosen.append(h)
            extend(chosen, new_masks)
            chosen.pop()

    masks = [1 << (first % p) for p in primes]
    if not any(m == f for m, f in zip(masks, full)):
        extend([first], masks)
    return found


def search_admissible(k: int, h_max: int, first_n: int | None = None,
                      max_workers: int | None = None) -> list[KTuple]:
    """
    Admissible k-subsets of [1, h_max], sorted by diameter then elements.

    Residue classes covered so far are tracked as a bitmask per prime p <= k,
    and a branch is cut as soon as one prime's classes are all covered. Work is
    split by least element across threads; the merged output is sorted, so it
    does not depend on the worker count.

    Args:
        k: Tuple size (>= 1)
        h_max: Upper end of the range (>= k)
        first_n: Keep only the first n tuples of the sorted list
        max_workers: Thread count (None = default)

    Raises:
        ValueError: If k < 1 or h_max < k
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if h_max < k:
        raise ValueError(f"h_max must be >= k, got h_max={h_max}, k={k}")

    primes = primes_for(k).tolist()
    starts = range(1, h_max - k + 2)
    workers = max_workers or default_workers()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        chunks = list(executor.map(lambda s: _search_from(s, k, h_max, primes), starts))

    found = [t for chunk in chunks for t in chunk]
    found.sort(key=lambda t: (t[-1] - t[0], t))
    if first_n is not None:
        found = found[:first_n]
    logger.info(f"Found {len(found)} admissible {k}-tuples in [1, {h_max}]")
    return [KTuple(t) for t in found]


def hbound_profile(k: int, h: int, samples: int, seed: int, table: PrimeTable,
                   P: int = 10**4) -> dict:
    """
    beta and singular-series spread over random admissible H in [1, h].

    The hard check is beta(H) >= log(2)/2; c1, c2 and the exponent b_k are
    fitted from the sample and reported as diagnostics.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2 for a beta profile, got {k}")
    rng = np.random.default_rng(seed)
    betas: list[float] = []
    series: list[float] = []
    attempts = 0
    while len(betas) < samples:
        attempts += 1
        if attempts > 1000 * samples:
            raise ValueError(f"could not sample admissible {k}-tuples in [1, {h}]")
        H = KTuple.of((rng.choice(h, size=k, replace=False) + 1).tolist())
        if not is_admissible(H, table):
            continue
        betas.append(beta(H, table))
        series.append(singular_series(H, P, table).value)

    loglog = math.log(math.log(10 * h))
    b_fit = max(math.log(s) for s in series) / math.log(loglog) if loglog > 1 else float("nan")
    profile = {
        "k": k,
        "h": h,
        "samples": samples,
        "beta_min": min(betas),
        "beta_max": max(betas),
        "beta_floor_ok": min(betas) >= BETA_FLOOR - 1e-12,
        "c1": 1 / min(betas),
        "c2": max(betas) / loglog,
        "b_k_fit": b_fit,
    }
    logger.info(f"beta profile k={k}, h={h}: {profile}")
    return profile
