#!/usr/bin/env python3
"""
sievegaps Benchmark Suite

Times the prime sieve, block sieving of Lambda_R, E2 enumeration and the
exact matrix builds at a few sizes.
"""

import sys
import time

from sievegaps.arith import sieve_primes
from sievegaps.asymptotics import build_matrix, positive_eigen_exists
from sievegaps.e2gaps import enumerate_e2
from sievegaps.tuples import KTuple
from sievegaps.weights import ScalarMode, lambda_ell_table, sieve_lambda_R


def format_time(seconds):
    """Format time to human-readable string."""
    if seconds < 0.001:
        return f"{seconds * 1000000:.2f} us"
    elif seconds < 1.0:
        return f"{seconds * 1000:.2f} ms"
    else:
        return f"{seconds:.3f} s"


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


def bench_sieve(limits):
    print(f"{'Limit':<12} {'Primes':<12} {'Time':<12}")
    print("-" * 80)
    for limit in limits:
        table, elapsed = timed(sieve_primes, limit)
        print(f"{limit:<12} {len(table.primes):<12} {format_time(elapsed):<12}")


def bench_lambda(lengths):
    table = sieve_primes(10**4)
    H = KTuple.of([0, 2, 6, 8, 12])
    lam = lambda_ell_table(H, 1000, 1, table, 1.0)
    print(f"{'Block':<12} {'Mode':<8} {'Support':<10} {'Time':<12}")
    print("-" * 80)
    for length in lengths:
        for mode in (ScalarMode.FLOAT, ScalarMode.EXACT):
            if mode is ScalarMode.EXACT and length > 10**4:
                continue
            _, elapsed = timed(sieve_lambda_R, 10**7, length, H, lam, table, mode)
            print(f"{length:<12} {mode.value:<8} {len(lam):<10} {format_time(elapsed):<12}")


def bench_e2(limits):
    print(f"{'Limit':<12} {'E2 count':<12} {'Time':<12}")
    print("-" * 80)
    for limit in limits:
        table = sieve_primes(max(int(limit ** 0.5) + 1, 100))
        stream, elapsed = timed(enumerate_e2, limit, table)
        print(f"{limit:<12} {len(stream):<12} {format_time(elapsed):<12}")


def bench_matrices(ks):
    print(f"{'k':<6} {'L':<6} {'Kind':<8} {'Time':<12}")
    print("-" * 80)
    for k in ks:
        for kind in ("prime", "e2"):
            def work():
                Mx = build_matrix(k, 2, kind)
                Mx.determinant(Mx.common_scale())
                return positive_eigen_exists(Mx, "1/2")

            _, elapsed = timed(work)
            print(f"{k:<6} {2:<6} {kind:<8} {format_time(elapsed):<12}")


def benchmark_all():
    """Run every benchmark."""
    print("=" * 80)
    print("sievegaps Benchmark Suite".center(80))
    print("=" * 80)
    print("\nPRIME SIEVE")
    bench_sieve([10**5, 10**6, 10**7])
    print("\nLAMBDA_R BLOCK SIEVE")
    bench_lambda([10**4, 10**5, 10**6])
    print("\nE2 ENUMERATION")
    bench_e2([10**5, 10**6, 10**7])
    print("\nEXACT MATRICES")
    bench_matrices([6, 8, 12])
    print("\n" + "=" * 80)


def quick_bench():
    """Quick performance sanity check."""
    print("Quick performance check...")
    bench_sieve([10**6])
    bench_e2([10**6])


if __name__ == '__main__':
    if len(sys.argv) > 1 and sys.argv[1] == '--quick':
        quick_bench()
    else:
        benchmark_all()
