"""Command-line front end.

Subcommands map one-to-one onto the library operations and emit a versioned
JSON report (schema "qforms/1"). Exit codes: 0 pass, 1 fail, 2 undecided,
3 usage or spec error. Payloads are deterministic for identical invocations
(timing lives outside the payload).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import measure, series, verifier
from .errors import (
    DomainViolation,
    InvalidSpec,
    NotApplicable,
    PrecisionCapExceeded,
    QFormsError,
    RetryCapExceeded,
    UndecidableAtCap,
    ZeroOmega,
    ZeroVector,
)
from .forms import form_height, form_to_json, u_form, v_form, vl_form, w_form
from .problem import (
    ProblemSpec,
    clearing_denominator,
    gamma_enclosure,
    measure_params,
    validate_spec,
)
from .util import DEFAULT_PRECISION_CAP, PrecisionPolicy

SCHEMA = "qforms/1"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 3


class SpecFileError(Exception):
    pass


def load_spec_file(path: str) -> tuple[ProblemSpec, int, dict]:
    """Parse a spec file into (spec, precision_bits, caps)."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecFileError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"spec file {path} is not valid JSON: {exc}") from exc
    try:
        q = raw["q"]
        spec = validate_spec(
            int(q["num"]),
            int(q["den"]),
            [Fraction(c) for c in raw["P"]],
            [(Fraction(p["alpha"]), int(p["s"])) for p in raw["points"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFileError(f"malformed spec file {path}: {exc}") from exc
    precision_bits = int(raw.get("precision_bits", 256))
    caps = dict(raw.get("caps", {}))
    caps.setdefault("precision_cap", DEFAULT_PRECISION_CAP)
    caps.setdefault("retry_cap", 8)
    env_cap = os.environ.get("QFORMS_PRECISION_CAP")
    if env_cap is not None:
        caps["precision_cap"] = int(env_cap)
    return spec, precision_bits, caps


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _parse_rational_list(text: str) -> list[Fraction]:
    return [Fraction(tok.strip()) for tok in text.split(",") if tok.strip() != ""]


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Report/output flags, valid before or after the subcommand.

    The subcommand copies use SUPPRESS defaults so they never clobber a
    value parsed at the top level.
    """
    defaults = {
        "out": argparse.SUPPRESS if suppress else None,
        "csv": argparse.SUPPRESS if suppress else None,
        "threads": argparse.SUPPRESS if suppress else (os.cpu_count() or 1),
    }
    parser.add_argument(
        "--out", default=defaults["out"],
        help="write the JSON report here (default stdout)",
    )
    parser.add_argument(
        "--csv", default=defaults["csv"],
        help="CSV sidecar for grid reports (bounds, scan)",
    )
    parser.add_argument(
        "--threads", type=int, default=defaults["threads"],
        help="parallel scan width; results are independent of this value",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qforms",
        description="Exact auxiliary linear forms and certified lower bounds "
        "for q-hypergeometric series values.",
    )
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _add_common(p, suppress=True)
        return p

    p = command("validate", "validate a spec file")
    p.add_argument("specfile")

    p = command("params", "gamma, S, eps0, M, mu, D, applicability")
    p.add_argument("specfile")

    p = command("forms", "print u_n, v_n, v_(l,n), w_(l,n) and heights")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("specfile")

    p = command("verify", "run the exact identity suite")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--l-max", type=int, default=None)
    p.add_argument("--series-n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("specfile")

    p = command("bounds", "height growth and smallness report")
    p.add_argument("--l-list", default="1,2,3,4,5")
    p.add_argument("--n-list", default=None, help="comma list; default derived")
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--n-step", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("specfile")

    p = command("nonvanish", "non-vanishing window scan")
    p.add_argument("--l0", type=int, required=True)
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--omega", help="rational vector 'w0,w1,...' (exact path)")
    p.add_argument(
        "--omega-from-f",
        help="rest coefficients 'c1,...'; omega_0 taken from the series values",
    )
    p.add_argument("specfile")

    p = command("certify", "certified lower bound for a vector A")
    p.add_argument("--A", required=True, help="integer vector 'a0,a1,...'")
    p.add_argument("--l-override", type=int, default=None)
    p.add_argument("specfile")

    p = command("scan", "exponent scan over height classes")
    p.add_argument("--hmax", type=int, required=True)
    p.add_argument("--random", type=int, default=None, metavar="K",
                   help="random strategy with K samples per shell")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("specfile")

    return parser


def _dispatch(args, spec: ProblemSpec, precision_bits: int, caps: dict):
    """Returns (payload_dict, verdict, csv_rows_or_None)."""
    policy = PrecisionPolicy(precision_bits, caps["precision_cap"])
    if args.command == "validate":
        return {"valid": True, "spec": spec.to_json()}, "pass", None

    if args.command == "params":
        params = measure_params(spec, precision_bits, caps["precision_cap"])
        gamma = gamma_enclosure(spec, precision_bits)
        return {
            "params": params.to_json(),
            "gamma": gamma.to_json(),
            "D": clearing_denominator(spec),
        }, "pass", None

    if args.command == "forms":
        u = u_form(spec, args.n)
        v = v_form(spec, args.n)
        vl = vl_form(spec, args.l, args.n)
        w = w_form(spec, args.l, args.n)
        return {
            "l": args.l,
            "n": args.n,
            "u": form_to_json(spec, u),
            "v": form_to_json(spec, v),
            "vl": form_to_json(spec, vl),
            "w": form_to_json(spec, w),
            "heights": {
                "u": str(form_height(u)),
                "v": str(form_height(v)),
                "vl": str(form_height(vl)),
                "w": str(form_height(w)),
            },
        }, "pass", None

    if args.command == "verify":
        report = verifier.check_identities(
            spec,
            n_max=args.n_max,
            l_max=args.l_max,
            series_N=args.series_n,
            rng_seed=args.seed,
        )
        return report.to_json(), "pass" if report.all_passed else "fail", None

    if args.command == "bounds":
        l_list = _parse_int_list(args.l_list)
        if args.n_list:
            n_list = _parse_int_list(args.n_list)
        else:
            n_list = sorted(
                set(range(spec.S * min(l_list), args.n_max + 1, args.n_step))
                | {args.n_max}
            )
        report = verifier.bounds_report(
            spec,
            l_list,
            n_list,
            precision_bits=max(precision_bits, 512),
            rng_seed=args.seed,
            precision_cap=caps["precision_cap"],
        )
        verdict = "undecided" if report.undecided_rows else "pass"
        return report.to_json(), verdict, report.csv_rows()

    if args.command == "nonvanish":
        if (args.omega is None) == (args.omega_from_f is None):
            raise SpecFileError("provide exactly one of --omega / --omega-from-f")
        if args.omega is not None:
            omega = _parse_rational_list(args.omega)
        else:
            rest = _parse_rational_list(args.omega_from_f)
            omega = series.omega_from_vector(spec, rest, precision_bits)
        verdict_obj = verifier.nonvanishing_scan(spec, omega, args.l0, args.n0, policy)
        verdict = "undecided" if verdict_obj.undecided else "pass"
        return verdict_obj.to_json(), verdict, None

    if args.command == "certify":
        A = _parse_int_list(args.A)
        cert = measure.certify_lower_bound(
            spec,
            A,
            l_override=args.l_override,
            policy=policy,
            retry_cap=caps["retry_cap"],
        )
        return cert.to_json(), "pass", None

    if args.command == "scan":
        strategy = "exhaustive" if args.random is None else "random"
        report = measure.exponent_scan(
            spec,
            args.hmax,
            strategy=strategy,
            sample_count=args.random or 64,
            seed=args.seed,
            precision_bits=precision_bits,
            precision_cap=caps["precision_cap"],
            threads=args.threads,
        )
        return report.to_json(), "pass", report.csv_rows()

    raise SpecFileError(f"unknown command {args.command}")


def _emit(args, report: dict) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(args, payload: dict, csv_rows: Optional[list]) -> None:
    if not args.csv or not csv_rows:
        return
    with open(args.csv, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(csv_rows[0].keys()))
        writer.writeheader()
        writer.writerows(csv_rows)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code
        return EXIT_USAGE if exc.code else EXIT_PASS

    started = time.perf_counter()
    try:
        spec, precision_bits, caps = load_spec_file(args.specfile)
    except (SpecFileError, InvalidSpec) as exc:
        report = {
            "schema": SCHEMA,
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "verdict": "spec-error",
        }
        _emit(args, report)
        return EXIT_USAGE

    csv_rows = None
    try:
        payload, verdict, csv_rows = _dispatch(args, spec, precision_bits, caps)
    except SpecFileError as exc:
        report = {
            "schema": SCHEMA,
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "verdict": "spec-error",
        }
        _emit(args, report)
        return EXIT_USAGE
    except (UndecidableAtCap, PrecisionCapExceeded) as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        verdict = "undecided"
    except (
        NotApplicable,
        RetryCapExceeded,
        ZeroOmega,
        ZeroVector,
        DomainViolation,
        QFormsError,
    ) as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        verdict = "fail"

    elapsed = time.perf_counter() - started
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "spec": spec.to_json(),
        "timing": {"seconds": round(elapsed, 6)},
        "payload": payload,
        "verdict": verdict,
    }
    _emit(args, report)
    _write_csv(args, payload, csv_rows)
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "undecided": EXIT_UNDECIDED}[verdict]


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
