"""Command-line front end.

Every subcommand writes one JSON document (or CSV with ``--format csv`` where
a table exists) to stdout or ``--out``. Exit codes: 0 success, 1 a verification
verdict failed, 2 usage error, 3 a numerical tolerance could not be met.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

from .errors import ConvergenceError
from .families import (
    AXES,
    FamilyPath,
    Gaussian,
    GeneralizedMultiquadric,
    Polyharmonic,
    symbol,
)
from .periodization import (
    fundamental_symbol,
    limit_radius,
    periodize,
    riesz_ratio,
    sample_grid,
    scaling_symbol,
)
from .synthesis import CoefficientSequence, cardinal_interpolant, gram_matrix, refinement_mask_probe, synthesize
from .verify import ReportConfig, full_report

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2, 3

COMMANDS = ("symbol", "periodize", "fundamental", "scaling", "riesz", "synthesize",
            "interpolate", "gram", "probe-refinement", "verify", "report")


class UsageError(Exception):
    pass


def _vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None


def _vectors(text: str) -> list[list[float]]:
    return [_vector(part) for part in text.split(";") if part.strip()]


def _family(args):
    fam = args.family
    if fam != "polyharmonic" and args.k is not None:
        raise UsageError("--k applies only to --family polyharmonic")
    if fam == "polyharmonic" and args.alpha is not None:
        raise UsageError("--alpha does not apply to --family polyharmonic")
    if fam != "gmq" and args.c is not None:
        raise UsageError("--c applies only to --family gmq")
    if fam == "polyharmonic":
        if args.k is None:
            raise UsageError("--family polyharmonic needs --k")
        return Polyharmonic(args.dim, args.k)
    if args.alpha is None:
        raise UsageError(f"--family {fam} needs --alpha")
    if fam == "gmq":
        return GeneralizedMultiquadric(args.dim, args.alpha, 1.0 if args.c is None else args.c)
    return Gaussian(args.dim, args.alpha)


def _tol(args, phi):
    if args.tol is not None:
        return args.tol
    return 1e-12 if phi.n == 1 else 1e-6


def _emit(args, payload, csv_text=None):
    if args.format == "csv":
        if csv_text is None:
            raise UsageError(f"{args.command} has no CSV form")
        text = csv_text
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _point_value(args, phi, func):
    if args.xi is None:
        raise UsageError(f"{args.command} needs --xi (or --grid with --bandlimit)")
    xi = _vector(args.xi)
    return {"family": phi.to_dict(), "xi": xi, "value": func(xi)}


def _number(v):
    return "inf" if v == math.inf else v


def _symbol_command(args, phi, kind, func):
    if args.grid is not None:
        if args.bandlimit is None:
            raise UsageError("--grid needs --bandlimit")
        grid = sample_grid(phi, kind, args.bandlimit, args.grid, _tol(args, phi))
        payload = {**grid.header(), "values": [_number(float(v)) for v in grid.values]}
        _emit(args, payload, grid.to_csv())
    else:
        out = _point_value(args, phi, func)
        out["value"] = _number(out["value"])
        _emit(args, out)
    return EXIT_OK


def _run(args) -> int:
    phi = _family(args)
    cmd = args.command
    tol = _tol(args, phi)

    if cmd == "symbol":
        return _symbol_command(args, phi, "raw-symbol", lambda xi: symbol(phi, xi))
    if cmd == "fundamental":
        return _symbol_command(args, phi, "fundamental", lambda xi: fundamental_symbol(phi, xi, tol))
    if cmd == "scaling":
        return _symbol_command(args, phi, "scaling", lambda xi: scaling_symbol(phi, xi, tol))
    if cmd == "riesz":
        return _symbol_command(args, phi, "riesz-ratio", lambda xi: riesz_ratio(phi, xi, tol))
    if cmd == "periodize":
        if args.xi is None:
            raise UsageError("periodize needs --xi")
        xi = _vector(args.xi)
        pv = periodize(phi, xi, args.power, tol)
        _emit(args, {"family": phi.to_dict(), "xi": xi, "power": args.power,
                     "value": _number(pv.value), "tail_bound": pv.tail_bound,
                     "truncation_radius": pv.truncation_radius, "terms_used": pv.terms_used})
        return EXIT_OK
    if cmd in ("synthesize", "interpolate"):
        M = args.samples_per_unit or (16 if phi.n == 1 else 8)
        T = args.halfwidth or (16 if phi.n == 1 else 4)
        bandlimit = args.bandlimit or (2.0**10 * math.pi if phi.n == 1 else 4.0 * math.pi * M)
        stol = args.tol if args.tol is not None else (1e-6 if phi.n == 1 else 1e-4)
        which = args.which if cmd == "synthesize" else "fundamental"
        L = synthesize(phi, which, bandlimit, M, T, stol)
        if cmd == "synthesize":
            _emit(args, {**L.metadata(), "values": [float(v) for v in L.values.ravel()]}, L.to_csv())
            return EXIT_OK
        if not args.data or not args.points:
            raise UsageError("interpolate needs --data and --points")
        coeffs = {}
        for item in args.data.split(";"):
            if not item.strip():
                continue
            try:
                key, val = item.split(":")
                coeffs[tuple(int(v) for v in key.split(","))] = float(val)
            except ValueError:
                raise UsageError(f"cannot parse coefficient {item!r}; use j1,..,jn:value") from None
        data = CoefficientSequence(coeffs, phi.n)
        pts = _vectors(args.points)
        vals = cardinal_interpolant(L, data, pts)
        _emit(args, {"family": phi.to_dict(), "synthesis_error_bound": L.synthesis_error_bound,
                     "points": pts, "values": vals})
        return EXIT_OK
    if cmd == "gram":
        shifts = _vectors(args.shifts) if args.shifts else (
            [[i] for i in range(-4, 5)] if phi.n == 1 else None)
        if shifts is None:
            raise UsageError("gram needs --shifts in dimension > 1")
        grid = args.grid or (64 if phi.n == 1 else 32)
        gtol = args.tol if args.tol is not None else (1e-9 if phi.n == 1 else 1e-5)
        G = gram_matrix(phi, [tuple(int(v) for v in s) for s in shifts], grid, gtol)
        _emit(args, G.to_dict())
        return EXIT_OK
    if cmd == "probe-refinement":
        value = refinement_mask_probe(phi, args.grid or 512, tol)
        _emit(args, {"family": phi.to_dict(), "grid": args.grid or 512, "refinement_probe": value})
        return EXIT_OK
    if cmd in ("verify", "report"):
        target = phi
        if args.path_axis or args.path_values:
            if not (args.path_axis and args.path_values):
                raise UsageError("--path-axis and --path-values go together")
            target = FamilyPath(phi, args.path_axis, tuple(_vector(args.path_values)))
        report = full_report(target, ReportConfig(timings=args.timings))
        csv_text = report.r1_table.to_csv() if report.r1_table is not None else None
        _emit(args, report.to_dict(), csv_text)
        if cmd == "verify" and not report.passes:
            return EXIT_VERDICT
        return EXIT_OK
    raise UsageError(f"unknown command {cmd!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cardinal-mra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--family", choices=("polyharmonic", "gmq", "gaussian"), required=True)
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--k", type=int)
        p.add_argument("--alpha", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--radius-cap", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name in ("symbol", "periodize", "fundamental", "scaling", "riesz"):
            p.add_argument("--xi", help="comma-separated frequency vector")
        if name in ("symbol", "fundamental", "scaling", "riesz", "gram", "probe-refinement"):
            p.add_argument("--grid", type=int)
        if name in ("symbol", "fundamental", "scaling", "riesz", "synthesize", "interpolate"):
            p.add_argument("--bandlimit", type=float)
        if name == "periodize":
            p.add_argument("--power", type=int, choices=(1, 2), default=1)
        if name in ("synthesize", "interpolate"):
            p.add_argument("--samples-per-unit", type=int)
            p.add_argument("--halfwidth", type=int)
        if name == "synthesize":
            p.add_argument("--which", choices=("fundamental", "scaling"), default="fundamental")
        if name == "interpolate":
            p.add_argument("--data", help="coefficients 'j1,..,jn:value;...'")
            p.add_argument("--points", help="evaluation points 'x1,..,xn;...'")
        if name == "gram":
            p.add_argument("--shifts", help="lattice shifts 'j1,..,jn;...'")
        if name in ("verify", "report"):
            p.add_argument("--path-axis", choices=AXES)
            p.add_argument("--path-values", help="comma-separated increasing parameters")
            p.add_argument("--timings", action="store_true", help="include stage runtimes")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cap = limit_radius(args.radius_cap) if args.radius_cap is not None else contextlib.nullcontext()
        with cap:
            return _run(args)
    except (UsageError, ValueError) as exc:  # DomainError is a ValueError
        print(f"cardinal-mra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"cardinal-mra: tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except OSError as exc:
        print(f"cardinal-mra: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
