"""``osc-time`` command-line front end.

Exit codes: 0 success, 1 numerical or I/O failure, 2 invalid arguments.
Data goes to ``--out`` or standard output, diagnostics to standard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import analysis, verification
from .exceptions import DegenerateInputError, DomainError, OscTimeError
from .integrator import Tolerances, integrate
from .io import HEADER, csv_text, format_number
from .models import Nonlinearity, base_system, linear_tau
from .oscillation import fd_sensitivity, half_oscillation_time, sensitivity_trajectory
from .svg import svg_text

SIMULATE_STRIDE = 0.01


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="osc-time", description="Oscillation time of the damped nonlinear pendulum.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, x0=True, alpha="single"):
        p.add_argument("--model", choices=("linear", "sine", "duffing", "poly"), required=True)
        p.add_argument("--a", type=_float_list, help="Duffing softening coefficient (comma list allowed for plot)")
        p.add_argument("--coeffs", type=_float_list, help="poly: coefficients of x^2, x^4, ... in f")
        if x0:
            p.add_argument("--x0", type=_float_list, required=True)
        if alpha == "single":
            p.add_argument("--alpha", type=float, default=0.0)
        elif alpha == "range":
            p.add_argument("--alpha", type=_float_list, help="explicit alpha list")
            p.add_argument("--alpha-min", type=float, default=0.0)
            p.add_argument("--alpha-max", type=float, default=0.9)
            p.add_argument("--alpha-steps", type=int, default=91)
        p.add_argument("--rtol", type=float, default=1e-10)
        p.add_argument("--atol", type=float, default=1e-12)
        p.add_argument("--t-max", type=float, default=1000.0)
        p.add_argument("--out", help="output path (default: standard output)")

    p = sub.add_parser("simulate", help="dump t,x,v on a uniform grid")
    common(p)
    p.add_argument("--t-end", type=float, default=4 * math.pi)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("tau", help="half and full oscillation time")
    common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sweep", help="tau over an (x0, alpha) grid")
    common(p, alpha="range")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")

    p = sub.add_parser("plot", help="SVG chart of tau against alpha")
    common(p, alpha="range")
    p.add_argument("--format", choices=("svg",), default="svg")

    p = sub.add_parser("min-alpha", help="damping that minimizes tau")
    common(p, alpha=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sensitivity", help="dx/dalpha, dv/dalpha against finite differences")
    common(p)
    p.add_argument("--t", type=_float_list, help="evaluation times (default: tau_half)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("verify", help="run the acceptance suite")
    return parser


def _models(args):
    kind = args.model
    if kind == "duffing":
        if not args.a:
            raise UsageError("--model duffing requires --a")
        return [Nonlinearity.duffing(a) for a in args.a]
    if args.a:
        raise UsageError("--a only applies to --model duffing")
    if kind == "poly":
        if not args.coeffs:
            raise UsageError("--model poly requires --coeffs")
        return [Nonlinearity.even_poly(args.coeffs)]
    if args.coeffs:
        raise UsageError("--coeffs only applies to --model poly")
    return [Nonlinearity.linear() if kind == "linear" else Nonlinearity.sine()]


def _single_model(args):
    models = _models(args)
    if len(models) != 1:
        raise UsageError(f"{args.command} takes a single --a value")
    return models[0]


def _tolerances(args):
    try:
        return Tolerances(rtol=args.rtol, atol=args.atol, t_max=args.t_max)
    except ValueError as exc:
        raise UsageError(str(exc))


def _check_alpha(alpha):
    if not (math.isfinite(alpha) and abs(alpha) < 1.0):
        raise UsageError(f"alpha={alpha} outside the oscillatory range |alpha| < 1")


def _check_x0(x0s):
    for x0 in x0s:
        if x0 == 0 or not math.isfinite(x0):
            raise UsageError("x0 must be finite and non-zero")


def _alpha_grid(args):
    if args.alpha:
        grid = args.alpha
    else:
        if args.alpha_steps < 2 or not args.alpha_max > args.alpha_min:
            raise UsageError("need --alpha-steps >= 2 and --alpha-max > --alpha-min")
        grid = [round(float(a), 12) for a in np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)]
    for a in grid:
        _check_alpha(a)
    return grid


def _emit(text, args, out):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def _table_csv(header, records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([format_number(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v for v in rec])
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _rows_json(rows):
    return [{name: getattr(r, name) for name in HEADER} | {"error": r.error} for r in rows]


def cmd_simulate(args, out):
    model = _single_model(args)
    tol = _tolerances(args)
    if len(args.x0) != 1:
        raise UsageError("simulate takes a single --x0")
    x0 = args.x0[0]
    if not args.t_end > 0:
        raise UsageError("--t-end must be positive")
    n = int(math.floor(args.t_end / SIMULATE_STRIDE + 1e-9))
    t = np.round(np.arange(n + 1) * SIMULATE_STRIDE, 12)
    if x0 == 0:
        states = np.zeros((t.size, 2))
    else:
        traj = integrate(base_system(model, args.alpha, x0), [1.0, 0.0], (0.0, args.t_end), tol)
        states = x0 * traj(t)
    if args.format == "json":
        text = _json({"t": t.tolist(), "x": states[:, 0].tolist(), "v": states[:, 1].tolist()})
    else:
        text = _table_csv(("t", "x", "v"), ((ti, xi, vi) for ti, (xi, vi) in zip(t, states)))
    _emit(text, args, out)
    return 0


def cmd_tau(args, out):
    model = _single_model(args)
    tol = _tolerances(args)
    _check_alpha(args.alpha)
    _check_x0(args.x0)
    rows = []
    for x0 in args.x0:
        res = half_oscillation_time(model, x0, args.alpha, tol)
        rows.append(analysis.SweepRow(x0, args.alpha, res.tau_half, res.tau, res.x_hat0, linear_tau(args.alpha)))
    text = _json(_rows_json(rows)) if args.format == "json" else csv_text(rows)
    _emit(text, args, out)
    return 0


def _run_sweeps(args):
    models = _models(args)
    tol = _tolerances(args)
    _check_x0(args.x0)
    grid = _alpha_grid(args)
    workers = analysis.default_workers()
    tables = [analysis.sweep(m, args.x0, grid, tol, workers=workers) for m in models]
    failed = [r for t in tables for r in t.rows if r.error]
    for r in failed:
        print(f"warning: x0={r.x0} alpha={r.alpha}: {r.error}", file=sys.stderr)
    return tables


def cmd_sweep(args, out):
    tables = _run_sweeps(args)
    if args.format == "svg":
        text = svg_text(tables)
    elif len(tables) != 1:
        raise UsageError("csv/json sweeps take a single --a value; use --format svg to compare")
    elif args.format == "json":
        text = _json({"model": tables[0].model.label, "rows": _rows_json(tables[0].rows)})
    else:
        text = csv_text(tables[0].rows)
    _emit(text, args, out)
    return 0


def cmd_plot(args, out):
    args.format = "svg"
    return cmd_sweep(args, out)


def cmd_min_alpha(args, out):
    model = _single_model(args)
    tol = _tolerances(args)
    _check_x0(args.x0)
    records = []
    for x0 in args.x0:
        r = analysis.find_min_alpha(model, x0, tol)
        lo, hi = r.bracket if r.bracket else (math.nan, math.nan)
        records.append({
            "x0": x0, "found": r.found,
            "alpha_star": math.nan if r.alpha_star is None else r.alpha_star,
            "tau_star": math.nan if r.tau_star is None else r.tau_star,
            "bracket_lo": lo, "bracket_hi": hi, "dip": r.dip, "tau0": r.tau0,
        })
        if not r.found:
            print(f"x0={x0}: no interior minimum ({r.reason})", file=sys.stderr)
    if args.format == "json":
        text = _json(records)
    else:
        header = ("x0", "found", "alpha_star", "tau_star", "bracket_lo", "bracket_hi", "dip", "tau0")
        text = _table_csv(header, ([str(rec[h]).lower() if h == "found" else rec[h] for h in header] for rec in records))
    _emit(text, args, out)
    return 0


def cmd_sensitivity(args, out):
    model = _single_model(args)
    tol = _tolerances(args)
    _check_alpha(args.alpha)
    if len(args.x0) != 1:
        raise UsageError("sensitivity takes a single --x0")
    x0 = args.x0[0]
    _check_x0([x0])
    times = args.t or [half_oscillation_time(model, x0, args.alpha, tol).tau_half]
    if any(t < 0 for t in times):
        raise UsageError("--t must be non-negative")
    t_end = max(times)
    traj = sensitivity_trajectory(model, x0, args.alpha, t_end, tol) if t_end > 0 else None
    header = ("t", "x", "v", "X", "V", "FD_X", "FD_V", "err_X", "err_V")
    records = []
    for t in sorted(times):
        if traj is None or t == 0:
            x, v, X, V = x0, 0.0, 0.0, 0.0
            fx = fv = 0.0
        else:
            x, v, X, V = x0 * (traj.steps[-1].y1 if t == t_end else traj(t))
            fx, fv = fd_sensitivity(model, x0, args.alpha, t, 1e-5, tol)
        records.append((t, x, v, X, V, fx, fv, abs(X - fx), abs(V - fv)))
    if args.format == "json":
        text = _json([dict(zip(header, map(float, rec))) for rec in records])
    else:
        text = _table_csv(header, records)
    _emit(text, args, out)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "tau": cmd_tau,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
    "min-alpha": cmd_min_alpha,
    "sensitivity": cmd_sensitivity,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify":
        return 0 if verification.run_all(out) else 1
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, DomainError, DegenerateInputError) as exc:
        print(f"osc-time: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:  # e.g. a degenerate table handed to the SVG renderer
        print(f"osc-time: error: {exc}", file=sys.stderr)
        return 2
    except (OscTimeError, OSError) as exc:
        print(f"osc-time: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
