"""Command-line front end and certificate catalog persistence.

Subcommands
-----------
construct         build a many-points curve certificate for (q, g, seed)
verify-sn         closed-form S_n, optionally checked against brute force
moments           USp(2g) trace moments a_n by chamber-walk DP / quadrature
distribution      plot-ready CSV of the Katz-Sarnak CDF vs the empirical one
catalog-validate  re-validate every record of a JSON Lines catalog

Exit codes: 0 success / match, 2 invalid flags or unsupported input,
3 construction or integrality failure, 4 validation mismatch.
"""

from __future__ import annotations

import argparse
import datetime
import fcntl
import json
import os
import platform
import sys

from . import __version__
from .errors import (
    EvenQForS8,
    GTooLarge,
    ManyPointsError,
    NonIntegerResult,
    NotPrime,
    UnsupportedN,
)
from .gf import DEFAULT_CAP
from .ksdist import empirical_vs_theory, moment_usp_dp, moment_usp_integral
from .momsum import S_bruteforce, S_closed_form
from .tower import CurveCertificate, construct, prime_power

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONSTRUCTION = 3
EXIT_MISMATCH = 4

SCHEMA_VERSION = 1


def _cap() -> int:
    raw = os.environ.get("MANYPOINTS_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise SystemExit(EXIT_USAGE) from exc


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _toolchain() -> str:
    return f"manypoints {__version__} / python {platform.python_version()}"


def _catalog_record(cert: CurveCertificate) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "toolchain": _toolchain(),
        "certificate": cert.to_json_dict(),
    }


def _append_to_catalog(path: str, cert: CurveCertificate) -> int:
    """Append the certificate under an advisory whole-file lock, enforcing
    (q, g, seed) uniqueness: a byte-identical duplicate is a no-op, a
    conflicting one is a validation mismatch."""
    with open(path, "a+", encoding="utf-8") as fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        try:
            fh.seek(0)
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                stored = rec.get("certificate", {})
                key = (stored.get("q"), stored.get("g"), stored.get("seed"))
                if key == (cert.q, cert.g, cert.seed):
                    same = json.dumps(stored, sort_keys=True) == json.dumps(
                        cert.to_json_dict(), sort_keys=True
                    )
                    return EXIT_OK if same else EXIT_MISMATCH
            fh.seek(0, os.SEEK_END)
            fh.write(json.dumps(_catalog_record(cert), sort_keys=True) + "\n")
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
    return EXIT_OK


def cmd_construct(args) -> int:
    cap = _cap()
    try:
        prime_power(args.q)
    except NotPrime:
        print(f"error: {args.q} is not a prime power", file=sys.stderr)
        return EXIT_USAGE
    if args.q > cap:
        print(f"error: q = {args.q} exceeds cap {cap}", file=sys.stderr)
        return EXIT_USAGE
    if args.g < 2:
        print("error: genus must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    try:
        cert = construct(args.q, args.g, seed=args.seed, cap=cap)
    except ManyPointsError as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    try:
        cert.validate()
    except AssertionError as exc:
        print(f"error: validation mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    _emit(cert.serialize(), args.out)
    if args.catalog:
        return _append_to_catalog(args.catalog, cert)
    return EXIT_OK


def cmd_verify_sn(args) -> int:
    try:
        closed = S_closed_form(args.n, args.q, args.g)
    except (UnsupportedN, EvenQForS8, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonIntegerResult as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    report = {"closed": closed.value}
    code = EXIT_OK
    if args.brute:
        try:
            brute = S_bruteforce(args.n, args.q, args.g)
        except ManyPointsError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        report["brute"] = brute.value
        report["match"] = brute.value == closed.value
        if not report["match"]:
            code = EXIT_MISMATCH
    _emit(json.dumps(report, sort_keys=True), args.out)
    return code


def cmd_moments(args) -> int:
    if args.g < 1 or args.n_max < 0:
        print("error: need g >= 1 and n-max >= 0", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for n in range(args.n_max + 1):
        row = {"n": n, "dp": moment_usp_dp(n, args.g)}
        if args.integral:
            try:
                row["integral"] = moment_usp_integral(n, args.g)
            except GTooLarge as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
        rows.append(row)
    _emit(json.dumps({"g": args.g, "moments": rows}, sort_keys=True), args.out)
    return EXIT_OK


def cmd_distribution(args) -> int:
    try:
        report = empirical_vs_theory(args.q, args.g)
    except (ManyPointsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    lines = ["x,F,empirical"]
    for x, theory, empirical in report.grid:
        lines.append(f"{x:.6f},{theory:.6f},{empirical:.6f}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_catalog_validate(args) -> int:
    if not os.path.exists(args.catalog):
        print(f"error: no catalog at {args.catalog}", file=sys.stderr)
        return EXIT_USAGE
    seen = set()
    n_records = 0
    with open(args.catalog, encoding="utf-8") as fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_SH)
        try:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    cert = CurveCertificate.from_json_dict(rec["certificate"])
                except (ValueError, KeyError, ManyPointsError) as exc:
                    print(f"error: line {lineno}: malformed record: {exc}",
                          file=sys.stderr)
                    return EXIT_MISMATCH
                key = (cert.q, cert.g, cert.seed)
                if key in seen:
                    print(f"error: line {lineno}: duplicate key {key}",
                          file=sys.stderr)
                    return EXIT_MISMATCH
                seen.add(key)
                try:
                    cert.validate()
                except (AssertionError, ManyPointsError) as exc:
                    print(f"error: line {lineno}: {exc}", file=sys.stderr)
                    return EXIT_MISMATCH
                n_records += 1
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
    _emit(json.dumps({"records": n_records, "valid": True}), None)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manypoints",
        description="curves over finite fields with many rational points",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a curve certificate")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--catalog")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify-sn", help="closed-form S_n vs brute force")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--brute", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_sn)

    p = sub.add_parser("moments", help="USp(2g) trace moments")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--integral", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("distribution", help="CDF vs empirical CSV")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("catalog-validate", help="re-validate a catalog file")
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=cmd_catalog_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags already; normalize other codes
        return EXIT_USAGE if exc.code not in (0,) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
