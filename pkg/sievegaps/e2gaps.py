"""
sievegaps E2 Gaps Module

Enumeration of E2 numbers (products of two distinct primes) by segmented
least-prime-factor classification, their gap statistics, and the search for
shifts n where n + H holds at least two E2 values.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arith import PrimeTable, omega_block
from .tuples import KTuple
from .utils import default_workers, get_logger, progress

logger = get_logger(__name__)

DEFAULT_E2_BLOCK = 1 << 18
SMALL_GAP = 6
BOUNDED_GAP = 26


@dataclass(frozen=True)
class E2Stream:
    """All E2 numbers up to `limit` in increasing order, with their gap histogram."""

    limit: int
    values: np.ndarray
    gap_histogram: dict[int, int] = field(default_factory=dict)
    include_squares: bool = False

    def __len__(self) -> int:
        return len(self.values)


def _e2_mask(lo: int, length: int, table: PrimeTable, include_squares: bool) -> np.ndarray:
    big_omega, least = omega_block(lo, length, table)
    mask = big_omega == 2
    if not include_squares:
        values = np.arange(lo + 1, lo + length + 1, dtype=np.int64)
        mask &= least * least != values
    return mask


def enumerate_e2(limit: int, table: PrimeTable, include_squares: bool = False,
                 block_size: int = DEFAULT_E2_BLOCK, max_workers: int | None = None) -> E2Stream:
    """
    E2 numbers n <= limit.

    Args:
        limit: Upper end (inclusive)
        table: Prime table reaching sqrt(limit)
        include_squares: Also admit prime squares (the support of varpi*varpi)
        block_size: Segment length
        max_workers: Thread count (default from SIEVEGAPS_THREADS)

    Raises:
        ValueError: If limit < 1 or the table does not reach sqrt(limit)
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if math.isqrt(limit) > table.limit:
        raise ValueError(f"prime table limit {table.limit} is below sqrt({limit})")
    if block_size < 1:
        raise ValueError(f"block size must be >= 1, got {block_size}")

    blocks = [(lo, min(block_size, limit - lo)) for lo in range(0, limit, block_size)]

    def work(block: tuple[int, int]) -> np.ndarray:
        lo, size = block
        mask = _e2_mask(lo, size, table, include_squares)
        return np.flatnonzero(mask).astype(np.int64) + lo + 1

    workers = max_workers or default_workers()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(progress(pool.map(work, blocks), desc="e2", unit="block", total=len(blocks)))
    values = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    gaps, counts = np.unique(np.diff(values), return_counts=True)
    histogram = {int(g): int(c) for g, c in zip(gaps, counts)}
    logger.info(f"Found {len(values)} E2 numbers up to {limit}")
    return E2Stream(limit=limit, values=values, gap_histogram=histogram, include_squares=include_squares)


@dataclass(frozen=True)
class GapStats:
    min_gap: int | None
    gaps: int
    at_most_small: int
    at_most_bounded: int
    histogram: dict[int, int]

    @property
    def bounded_share(self) -> float:
        return self.at_most_bounded / self.gaps if self.gaps else 0.0

    def to_dict(self) -> dict:
        return {
            "min_gap": self.min_gap,
            "gaps": self.gaps,
            f"gaps_le_{SMALL_GAP}": self.at_most_small,
            f"gaps_le_{BOUNDED_GAP}": self.at_most_bounded,
            "bounded_share": self.bounded_share,
            "histogram": {str(g): c for g, c in sorted(self.histogram.items())},
        }


def gap_stats(stream: E2Stream) -> GapStats:
    """
    Consecutive-difference statistics of a stream.

    Raises:
        ValueError: If the stream is empty
    """
    if len(stream) == 0:
        raise ValueError(f"no E2 numbers up to {stream.limit}")
    histogram = dict(stream.gap_histogram)
    gaps = sum(histogram.values())
    stats = GapStats(
        min_gap=min(histogram) if histogram else None,
        gaps=gaps,
        at_most_small=sum(c for g, c in histogram.items() if g <= SMALL_GAP),
        at_most_bounded=sum(c for g, c in histogram.items() if g <= BOUNDED_GAP),
        histogram=histogram,
    )
    logger.info(f"E2 gaps up to {stream.limit}: min={stats.min_gap}, share <= {BOUNDED_GAP}: "
                f"{stats.bounded_share:.4f}")
    return stats


@dataclass(frozen=True)
class PatternHit:
    n: int
    pair: tuple[int, int]


def shifted_e2_pattern(H: KTuple, limit: int, table: PrimeTable,
                       include_squares: bool = False) -> list[PatternHit]:
    """
    All 1 <= n <= limit such that n + h is E2 for at least two h in H.

    Each hit records the first two such h.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    top = limit + max(max(H), 0)
    mask = _e2_mask(0, top, table, include_squares)
    base = np.arange(1, limit + 1, dtype=np.int64)

    rows = []
    for h in H:
        shifted = base + h
        valid = shifted >= 1
        row = np.zeros(limit, dtype=bool)
        row[valid] = mask[shifted[valid] - 1]
        rows.append(row)
    hits = np.vstack(rows)
    found = np.flatnonzero(hits.sum(axis=0) >= 2)

    elements = H.to_list()
    result = []
    for index in found.tolist():
        first, second = np.flatnonzero(hits[:, index])[:2].tolist()
        result.append(PatternHit(n=index + 1, pair=(elements[first], elements[second])))
    logger.info(f"{len(result)} shifts n <= {limit} with two E2 values in n + H, H={H}")
    return result


def count_e2_pairs(x: int, table: PrimeTable) -> int:
    """
    Number of pairs of primes p < q with pq <= x, by looping over p.

    Raises:
        ValueError: If the table does not reach x/2
    """
    if x < 6:
        return 0
    if x // 2 > table.limit:
        raise ValueError(f"prime table limit {table.limit} is below {x // 2}")
    primes = table.primes_upto(x // 2)
    count = 0
    for p in table.primes_upto(math.isqrt(x)).tolist():
        upper = np.searchsorted(primes, x // p, side="right")
        lower = np.searchsorted(primes, p, side="right")
        count += max(0, int(upper - lower))
    return count
