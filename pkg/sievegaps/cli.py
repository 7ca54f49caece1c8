"""
sievegaps Command-Line Interface

Tuples, singular series, sieve weights, desk-scale verification of the sieve
main terms, exact quadratic-form matrices, E2 gap scans and the exact identity
suite. Reports are JSON on stdout (or --output); --csv switches tabular
reports to CSV with a header row.

Exit codes: 0 success, 1 usage or runtime error, 2 failed check (band
violation, identity mismatch, reference mismatch).
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .utils import get_logger, parse_int, set_log_level

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"[ERROR] {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}")


def _big_int(text: str) -> int:
    try:
        return parse_int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sievegaps",
        description="sievegaps - sieve weights, admissible tuples and small gaps between primes and E2 numbers",
    )

    # Global flags
    parser.add_argument("--version", action="version", version=f"sievegaps {__version__}")
    parser.add_argument("--csv", action="store_true", help="Emit tabular reports as CSV")
    parser.add_argument("--output", metavar="PATH", help="Write the report to a file instead of stdout")
    parser.add_argument("--threads", type=int, metavar="N",
                        help="Worker threads (default: SIEVEGAPS_THREADS or min(8, cpu_count))")
    parser.add_argument("--seed", type=int, default=0, help="Seed for randomized commands (default: 0)")
    parser.add_argument("--manifest", metavar="PATH", help="Calibration manifest (JSON) to read and update")
    parser.add_argument("--calibrate", action="store_true",
                        help="Record observed ratios as bands in the manifest")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # tuples
    tuples_parser = subparsers.add_parser("tuples", help="Admissible tuples")
    tuples_sub = tuples_parser.add_subparsers(dest="action")
    check = tuples_sub.add_parser("check", help="Admissibility, diameter and residue counts")
    check.add_argument("tuple", help="Comma-separated elements, e.g. 0,2,6")
    search = tuples_sub.add_parser("search", help="Admissible k-subsets of [1, h_max] by diameter")
    search.add_argument("--k", type=int, required=True)
    search.add_argument("--h-max", type=int, required=True)
    search.add_argument("--first", type=int, help="Keep only the first N tuples")
    beta_parser = tuples_sub.add_parser("beta", help="beta(H)")
    beta_parser.add_argument("tuple")
    profile = tuples_sub.add_parser("profile", help="beta and singular-series spread over random tuples")
    profile.add_argument("--k", type=int, required=True)
    profile.add_argument("--h", type=int, required=True)
    profile.add_argument("--samples", type=int, default=50)

    # series
    series = subparsers.add_parser("series", help="Truncated singular series with tail bracket")
    series.add_argument("tuple")
    series.add_argument("--P", type=_big_int, default=10**6, help="Truncation prime (default: 1e6)")
    series.add_argument("--star", action="store_true", help="Also compute the starred series (0 in H)")

    # weights
    weights = subparsers.add_parser("weights", help="Sieve weights")
    weights_sub = weights.add_subparsers(dest="action")
    dump = weights_sub.add_parser("dump", help="Emit (d, lambda_d)")
    dump.add_argument("--tuple", required=True)
    dump.add_argument("--R", type=float, required=True)
    dump.add_argument("--ell", type=int, default=0)
    dump.add_argument("--kind", choices=["selberg", "log-power"], default="selberg")
    dump.add_argument("--exact", action="store_true",
                      help="Exact rationals (selberg weights with l=0 and unit series prefactor)")

    # verify
    verify = subparsers.add_parser("verify", help="Desk-scale checks of the sieve sums")
    verify_sub = verify.add_subparsers(dest="action")
    for name, help_text, default_exp in (
        ("thm5", "sum of Lambda_R(n; H, l1) Lambda_R(n; H, l2)", 0.2),
        ("thm6a", "prime-weighted sum, h0 in H", 0.12),
        ("thm6b", "prime-weighted sum, h0 not in H", 0.12),
        ("thm7", "varpi*varpi-weighted sum, h0 in H", 0.12),
    ):
        sub = verify_sub.add_parser(name, help=help_text)
        sub.add_argument("--tuple", required=True)
        sub.add_argument("--N", type=_big_int, default=10**6)
        sub.add_argument("--R-exp", type=float, default=default_exp, help=f"R = N^x (default: {default_exp})")
        sub.add_argument("--l1", type=int, default=0)
        sub.add_argument("--l2", type=int, default=0)
        if name != "thm5":
            sub.add_argument("--h0", type=int, required=True)
    for name in ("s1", "s2"):
        sub = verify_sub.add_parser(name, help=f"Combined sieve sum {name}")
        sub.add_argument("--tuple", required=True)
        sub.add_argument("--N", type=_big_int, default=10**6)
        sub.add_argument("--R-exp", type=float, default=0.12)
        sub.add_argument("--b", type=_float_list, default=[1.0], help="Coefficients b_0,b_1,...")
    varpi = verify_sub.add_parser("varpi", help="Mean of varpi*varpi against N(log N + C0)")
    varpi.add_argument("--N", type=_big_int, default=10**6)
    varpi.add_argument("--q", type=int, default=1)
    gallagher = verify_sub.add_parser("gallagher", help="Average singular series over k-subsets of [1, h]")
    gallagher.add_argument("--k", type=int, required=True)
    gallagher.add_argument("--h", type=int, required=True)
    gallagher.add_argument("--P", type=_big_int, default=10**4)
    for name in ("bv", "e2bv"):
        sub = verify_sub.add_parser(name, help="Error terms in progressions (x = N only)")
        sub.add_argument("--N", type=_big_int, default=10**5)
        sub.add_argument("--Q", type=int, default=20)

    # matrix
    matrix = subparsers.add_parser("matrix", help="Exact quadratic-form matrix in theta")
    matrix.add_argument("--k", type=int, required=True)
    matrix.add_argument("--L", type=int, required=True)
    matrix.add_argument("--kind", choices=["prime", "e2"], default="prime")
    matrix.add_argument("--theta", type=_fraction, help="Evaluate at a rational theta, e.g. 1/2")
    matrix.add_argument("--b", type=_int_list, help="Integer vector for the quadratic form")
    matrix.add_argument("--scale", type=int, help="Scale factor for printed entries (default: common denominator)")

    threshold = subparsers.add_parser("threshold", help="Single-l theta threshold and h/log N threshold")
    threshold.add_argument("--k", type=int, required=True)
    threshold.add_argument("--ell", type=int, required=True)
    threshold.add_argument("--eps", type=_fraction, default=Fraction(0))

    # e2
    e2 = subparsers.add_parser("e2", help="E2 numbers (products of two distinct primes)")
    e2_sub = e2.add_subparsers(dest="action")
    gaps = e2_sub.add_parser("gaps", help="Gap statistics up to a limit")
    gaps.add_argument("--limit", type=_big_int, required=True)
    gaps.add_argument("--include-squares", action="store_true")
    pattern = e2_sub.add_parser("pattern", help="n with two E2 values in n + H")
    pattern.add_argument("--tuple", required=True)
    pattern.add_argument("--limit", type=_big_int, required=True)
    pattern.add_argument("--include-squares", action="store_true")

    # identities
    identities = subparsers.add_parser("identities", help="Exact identity suite")
    identities.add_argument("--R", type=int, default=60)
    identities.add_argument("--tuples", help="Semicolon-separated tuples containing 0, e.g. '0,2;0,2,6'")

    return parser


def _emit(report, args, rows: list[list] | None = None) -> None:
    if args.csv and rows is not None:
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator="\n").writerows(rows)
        text = buffer.getvalue()
    else:
        text = json.dumps(report, indent=2, default=str) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote report to {args.output}")
    else:
        sys.stdout.write(text)


def _table_for(limit: int):
    from .arith import sieve_primes

    return sieve_primes(max(limit, 100))


def _run_tuples(args) -> int:
    from .tuples import KTuple, beta, hbound_profile, is_admissible, nu_p, search_admissible

    if args.action == "check":
        H = KTuple.parse(args.tuple)
        table = _table_for(max(H.k, H.diameter))
        report = {
            "tuple": H.to_list(),
            "k": H.k,
            "diameter": H.diameter,
            "admissible": is_admissible(H, table),
            "nu_p": {str(p): nu_p(H, p) for p in table.primes_upto(max(H.k, 2)).tolist()},
        }
        _emit(report, args, [["key", "value"], *[[k, v] for k, v in report.items()]])
    elif args.action == "search":
        found = search_admissible(args.k, args.h_max, first_n=args.first, max_workers=args.threads)
        rows = [["diameter", "tuple"], *[[H.diameter, str(H)] for H in found]]
        _emit([{"tuple": H.to_list(), "diameter": H.diameter} for H in found], args, rows)
    elif args.action == "beta":
        H = KTuple.parse(args.tuple)
        value = beta(H, _table_for(max(H.k, H.diameter)))
        _emit({"tuple": H.to_list(), "beta": value}, args, [["tuple", "beta"], [str(H), value]])
    elif args.action == "profile":
        report = hbound_profile(args.k, args.h, args.samples, args.seed, _table_for(max(args.h, 10**4)))
        _emit(report, args, [["key", "value"], *[[k, v] for k, v in report.items()]])
    else:
        raise ValueError("tuples needs an action: check, search, beta or profile")
    return EXIT_OK


def _run_series(args) -> int:
    from .tuples import KTuple, singular_series, singular_series_star

    H = KTuple.parse(args.tuple)
    value = singular_series(H, args.P)
    lo, hi = value.bracket()
    report = {
        "tuple": H.to_list(),
        "series": value.value,
        "truncation_prime": value.truncation_prime,
        "tail_bound": value.tail_bound,
        "bracket": [lo, hi],
    }
    if args.star:
        report["star_series"] = singular_series_star(H, args.P)
    _emit(report, args, [["key", "value"], *[[k, v] for k, v in report.items()]])
    return EXIT_OK


def _run_weights(args) -> int:
    from .arith import squarefree_upto
    from .tuples import KTuple
    from .weights import SieveFunctions, lambda_from_y, lambda_log_power, lambda_ell_table

    if args.action != "dump":
        raise ValueError("weights needs an action: dump")
    H = KTuple.parse(args.tuple)
    table = _table_for(max(math.ceil(args.R) + 1, H.k, H.diameter))

    if args.exact:
        if args.kind != "selberg" or args.ell != 0:
            raise ValueError("exact weights are only available for --kind selberg with --ell 0")
        funcs = SieveFunctions.plain(H, table)
        lam = lambda_from_y({r: Fraction(1) for r in squarefree_upto(args.R, table)}, funcs, args.R)
        rows = [["d", "numerator", "denominator"], *[[d, v.numerator, v.denominator] for d, v in lam.items()]]
        report = {str(d): str(v) for d, v in lam.items()}
    else:
        if args.kind == "selberg":
            lam = dict(lambda_ell_table(H, args.R, args.ell, table))
        else:
            lam = {d: lambda_log_power(d, args.ell, args.R, H.k, table)
                   for d in squarefree_upto(args.R, table)}
        rows = [["d", "lambda"], *[[d, v] for d, v in lam.items()]]
        report = {str(d): v for d, v in lam.items()}
    _emit({"tuple": H.to_list(), "R": args.R, "ell": args.ell, "lambda": report}, args, rows)
    return EXIT_OK


def _check_bands(args, command: str, params: dict, observed: dict[str, float], results: dict) -> int:
    """
    Compare observed quantities with calibrated bands and update the manifest.

    Violations are added to `results` under "band_violations", so the caller
    emits the report after this check.
    """
    from .manifest import RunManifest, content_hash

    if not args.manifest:
        if args.calibrate:
            raise ValueError("--calibrate needs --manifest")
        return EXIT_OK
    path = Path(args.manifest)
    key = content_hash({"command": command, **params})
    previous = RunManifest.load(path) if path.exists() else None
    manifest = RunManifest.create(command, params, results, previous.bands if previous else None)

    if args.calibrate:
        for quantity, value in observed.items():
            manifest.record_band(key, value, quantity)
        manifest.save(path)
        return EXIT_OK

    violations = manifest.violations(key, observed)
    results["band_violations"] = [v.to_dict() for v in violations]
    manifest.results = dict(results)
    manifest.save(path)
    return EXIT_CHECK_FAILED if violations else EXIT_OK


def _run_verify(args) -> int:
    from . import empirics
    from .tuples import KTuple

    workers = args.threads
    if args.action in ("thm5", "thm6a", "thm6b", "thm7", "s1", "s2"):
        H = KTuple.parse(args.tuple)
        R = args.N ** args.R_exp
        span = max(abs(h) for h in H) + abs(getattr(args, "h0", 0) or 0)
        table = _table_for(max(math.isqrt(2 * args.N + span) + 1, math.ceil(R) + 1, H.k, H.diameter))
        params = {"tuple": H.to_list(), "N": args.N, "R_exp": args.R_exp}
        start = time.perf_counter()
        if args.action in ("s1", "s2"):
            run = empirics.verify_s1 if args.action == "s1" else empirics.verify_s2
            combined = run(H, args.b, args.N, R, table, max_workers=workers)
            report = combined.to_dict()
            observed = {}
        else:
            params.update(l1=args.l1, l2=args.l2)
            if args.action == "thm5":
                result = empirics.verify_thm5(H, args.l1, args.l2, args.N, R, table, max_workers=workers)
            else:
                params["h0"] = args.h0
                run = {"thm6a": empirics.verify_thm6_part1, "thm6b": empirics.verify_thm6_part2,
                       "thm7": empirics.verify_thm7}[args.action]
                result = run(H, args.h0, args.l1, args.l2, args.N, R, table, max_workers=workers)
            report = result.to_dict()
            band = empirics.calibrated_band(result)
            report["calibrated_band"] = list(band) if band else None
            observed = {"ratio": result.ratio, "finite_ratio": result.finite_ratio}
        report["elapsed_s"] = time.perf_counter() - start
    elif args.action == "varpi":
        table = _table_for(math.isqrt(2 * args.N) + 1)
        lhs, predicted, relative = empirics.check_varpi_mean(args.N, table, q=args.q, max_workers=workers)
        c0, tail = empirics.c0_constant()
        params = {"N": args.N, "q": args.q}
        report = {"N": args.N, "q": args.q, "lhs": lhs, "predicted": predicted,
                  "relative_error": relative, "C0": c0, "C0_tail_bound": tail}
        observed = {"ratio": lhs / predicted}
    elif args.action == "gallagher":
        total, prediction, ratio = empirics.gallagher_average(args.k, args.h, args.P)
        params = {"k": args.k, "h": args.h, "P": args.P}
        report = {**params, "total": total, "prediction": prediction, "ratio": ratio}
        observed = {"ratio": ratio}
    elif args.action in ("bv", "e2bv"):
        table = _table_for(math.isqrt(2 * args.N) + 1)
        run = empirics.bv_profile if args.action == "bv" else empirics.e2_error_profile
        profile = run(args.N, args.Q, table, max_workers=workers)
        params = {"N": args.N, "Q": args.Q}
        report = profile.to_dict()
        observed = {}
        rows = [["q", "a", "value", "max_abs", "partial_sum"],
                *[[r.q, r.a, r.value, r.max_abs, s] for r, s in zip(profile.records, profile.partial_sums)]]
        status = _check_bands(args, f"verify {args.action}", params, observed, report)
        _emit(report, args, rows)
        return status
    else:
        raise ValueError("verify needs an action: thm5, thm6a, thm6b, thm7, s1, s2, varpi, gallagher, bv or e2bv")

    status = _check_bands(args, f"verify {args.action}", params, observed, report)
    _emit(report, args, [["key", "value"], *[[k, v] for k, v in report.items()]])
    return status


def _run_matrix(args) -> int:
    from . import asymptotics as asy

    Mx = asy.build_matrix(args.k, args.L, args.kind)
    scale = args.scale or Mx.common_scale()
    det = Mx.determinant(scale)
    report = {
        "k": args.k,
        "L": args.L,
        "kind": args.kind,
        "scale": scale,
        "entries": Mx.entry_strings(scale),
        "determinant": str(det.as_expr()),
        "determinant_roots": asy.roots_in_interval(det),
    }
    status = EXIT_OK
    if args.b is not None:
        form = asy.quad_form(Mx, args.b)
        report["quad_form"] = str(form.as_expr())
        if form.degree() <= 2:
            report["positivity"] = asy.positivity_threshold(form).to_dict()
        else:
            report["quad_form_roots"] = asy.roots_in_interval(form)
    if args.theta is not None:
        theta = str(args.theta)
        values = Mx.at(args.theta)
        report["theta"] = theta
        report["values"] = [[str(v * scale) for v in row] for row in values]
        report["eigen"] = asy.positive_eigen_exists(Mx, args.theta, args.b).to_dict()
        mismatches = asy.reference_mismatches(Mx, theta)
        if mismatches is not None:
            report["reference_mismatches"] = [[i, j, str(e), str(c)] for i, j, e, c in mismatches]
            if mismatches:
                status = EXIT_CHECK_FAILED
        if args.b is not None:
            report["quad_form_value"] = str(asy.form_value(values, args.b) * scale)
    rows = [["i", "j", "entry"], *[[i, j, e] for i, row in enumerate(report["entries"]) for j, e in enumerate(row)]]
    _emit(report, args, rows)
    return status


def _run_threshold(args) -> int:
    from .asymptotics import b1_tilde_threshold, single_ell_threshold

    single = single_ell_threshold(args.k, args.ell)
    gap = b1_tilde_threshold(args.k, args.ell, args.eps)
    report = {
        "k": args.k,
        "ell": args.ell,
        "eps": str(args.eps),
        "theta_threshold": str(single),
        "theta_threshold_float": float(single),
        "h_over_logN_threshold": str(gap),
        "h_over_logN_threshold_float": float(gap),
    }
    _emit(report, args, [["key", "value"], *[[k, v] for k, v in report.items()]])
    return EXIT_OK


def _run_e2(args) -> int:
    from .e2gaps import enumerate_e2, gap_stats, shifted_e2_pattern
    from .tuples import KTuple

    if args.action == "gaps":
        table = _table_for(math.isqrt(args.limit) + 1)
        stream = enumerate_e2(args.limit, table, include_squares=args.include_squares,
                              max_workers=args.threads)
        stats = gap_stats(stream)
        report = {"limit": args.limit, "count": len(stream), **stats.to_dict()}
        rows = [["gap", "count"], *[[g, c] for g, c in sorted(stats.histogram.items())]]
    elif args.action == "pattern":
        H = KTuple.parse(args.tuple)
        table = _table_for(math.isqrt(args.limit + max(max(H), 0)) + 1)
        hits = shifted_e2_pattern(H, args.limit, table, include_squares=args.include_squares)
        report = {"tuple": H.to_list(), "limit": args.limit, "count": len(hits),
                  "hits": [{"n": hit.n, "pair": list(hit.pair)} for hit in hits]}
        rows = [["n", "h_i", "h_j"], *[[hit.n, *hit.pair] for hit in hits]]
    else:
        raise ValueError("e2 needs an action: gaps or pattern")
    _emit(report, args, rows)
    return EXIT_OK


def _run_identities(args) -> int:
    from .identities import DEFAULT_IDENTITY_TUPLES, run_identity_suite

    tuples = args.tuples.split(";") if args.tuples else DEFAULT_IDENTITY_TUPLES
    report = run_identity_suite(seed=args.seed, R=args.R, tuples=tuples)
    rows = [["name", "tuple", "passed", "detail"], *[[c.name, c.H, c.passed, c.detail] for c in report.checks]]
    _emit(report.to_dict(), args, rows)
    if not report.passed:
        print(f"[ERROR] {len(report.mismatches)} identity mismatches", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


COMMANDS = {
    "tuples": _run_tuples,
    "series": _run_series,
    "weights": _run_weights,
    "verify": _run_verify,
    "matrix": _run_matrix,
    "threshold": _run_threshold,
    "e2": _run_e2,
    "identities": _run_identities,
}


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.verbose:
        set_log_level(logging.DEBUG)
    elif args.quiet:
        set_log_level(logging.WARNING)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    try:
        if args.threads is not None and args.threads < 1:
            raise ValueError(f"--threads must be >= 1, got {args.threads}")
        return COMMANDS[args.command](args)
    except Exception as e:
        print(f"\n[ERROR] {e}", file=sys.stderr)
        logger.exception("CLI command failed")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
