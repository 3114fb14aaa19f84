"""Command-line interface: ``etroots analyze | plot | verify | family``.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .checks import VERIFY_RTOL, format_table, verify_all
from .errors import DegenerateInputError, ParameterError, SingularInputError
from .plot import write_svg
from .poly import (FAMILY_NAMES, FamilySpec, NonnegativityWarning, Polynomial, add_rotated_copy,
                   family, family_raw, read_coeffs, write_coeffs)
from .report import (DEFAULT_ALPHAS, DEFAULT_RTOL, AnalysisConfig, StageError, analyze,
                     report_roots, write_report)
from .rootfind import DEFAULT_TOL, RootSet, read_root_table, write_root_table

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2
DEFAULT_RHO = 0.9
INPUT_ERRORS = (ParameterError, DegenerateInputError, SingularInputError, ValueError,
                OSError, json.JSONDecodeError, KeyError)


def _alphas(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None
    if not vals or any(not 0.0 <= a <= 1.0 for a in vals):
        raise argparse.ArgumentTypeError("alphas must lie in [0, 1]")
    return vals


def _family_args(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--name", "--family", dest="family", choices=FAMILY_NAMES, required=required)
    p.add_argument("--n", type=int, help="degree of the family member")
    p.add_argument("--rho", type=float, default=None,
                   help=f"poisson parameter in (0, 1) (default {DEFAULT_RHO})")
    p.add_argument("--add-rotated", type=float, default=None, metavar="ANGLE",
                   help="replace p(z) by p(z) + p(e^(i ANGLE) z)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="etroots", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full analysis of one polynomial")
    a.add_argument("--coeffs", type=Path, help="coefficient file (JSON list of [re, im])")
    _family_args(a, required=False)
    a.add_argument("--alpha", type=_alphas, default=DEFAULT_ALPHAS,
                   help="comma-separated interval exponents (default 0.5,0.75,0.9)")
    a.add_argument("--factor", type=float, default=5.0, help="density factor (default 5)")
    a.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root-finder tolerance")
    a.add_argument("--rtol", type=float, default=DEFAULT_RTOL, help="quadrature tolerance")
    a.add_argument("--seed", type=int, default=0, help="echoed in the report")
    a.add_argument("--case-c", type=float, default=0.01, help="census largeness constant")
    a.add_argument("--timings", action="store_true", help="include wall-clock stage timings")
    a.add_argument("--roots-out", type=Path, help="also write the root table here")
    a.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("plot", help="SVG of roots from a report or root table")
    p.add_argument("--in", dest="inp", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--title", default=None)

    v = sub.add_parser("verify", help="run every numerical check")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=VERIFY_RTOL,
                   help="quadrature tolerance for the Jensen runs (default 1e-8)")
    v.add_argument("--strict", action="store_true",
                   help="also fail when any quadrature reports non-convergence")
    v.add_argument("--json", type=Path, help="write the table as JSON here")

    f = sub.add_parser("family", help="write a family member's coefficients")
    _family_args(f, required=True)
    f.add_argument("--raw", action="store_true", help="skip leading-coefficient normalization")
    f.add_argument("--out", type=Path, required=True)
    return ap


def _family_poly(args, normalize: bool = True) -> tuple[Polynomial, FamilySpec, list[str]]:
    if args.n is None:
        raise ParameterError("--n is required with a family")
    rho = args.rho if args.rho is not None else (DEFAULT_RHO if args.family == "poisson" else None)
    spec = FamilySpec(args.family, args.n, rho)
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonnegativityWarning)
        p = family(spec) if normalize else family_raw(spec)
    notes.extend(str(w.message) for w in caught)
    if args.add_rotated is not None:
        p = add_rotated_copy(p, args.add_rotated)
        notes.append(f"p(z) + p(exp(i*{args.add_rotated!r}) z): coefficients a_k (1 + exp(i k angle))")
    return p, spec, notes


def cmd_analyze(args) -> int:
    if (args.coeffs is None) == (args.family is None):
        raise ParameterError("give exactly one of --coeffs or --family")
    if args.coeffs is not None:
        p, spec, notes, src = read_coeffs(args.coeffs), None, [], "coefficients"
    else:
        p, spec, notes = _family_poly(args)
        src = "family"
    cfg = AnalysisConfig(alphas=args.alpha, factor=args.factor, tol=args.tol, rtol=args.rtol,
                         seed=args.seed, case_c=args.case_c, timings=args.timings)
    report = analyze(p, cfg, family=spec, notes=notes, source=src)
    write_report(report, args.out)
    if args.roots_out:
        d = report.roots
        rs = RootSet(roots=report_roots(report.to_dict()), residuals=np.array(d["residuals"]),
                     iterations=d["iterations"], certified=d["certified"], tol=d["tol"])
        write_root_table(p, rs, args.roots_out)
    print(f"{report.status}: n={report.n} X={report.trig['X']} "
          f"discrepancy={report.discrepancy:.6g} bound={report.et_bound}")
    return EXIT_OK


def cmd_plot(args) -> int:
    text = args.inp.read_text()
    title = args.title
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        roots = report_roots(data)
        if title is None:
            title = data["input"].get("family") or ""
    else:
        roots = read_root_table(args.inp)
    write_svg(roots, args.out, title or "")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify_all(seed=args.seed, rtol=args.tol, strict=args.strict)
    sys.stdout.write(format_table(results))
    if args.json:
        args.json.write_text(json.dumps(
            [{"name": r.name, "max_violation": r.max_violation, "pass": r.passed}
             for r in results], indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def cmd_family(args) -> int:
    p, _, notes = _family_poly(args, normalize=not args.raw)
    write_coeffs(p, args.out)
    for n in notes:
        print(n, file=sys.stderr)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "plot": cmd_plot, "verify": cmd_verify, "family": cmd_family}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except StageError as exc:
        print(f"error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return EXIT_INPUT
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
