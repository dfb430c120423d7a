"""Command-line entry point: ``relaycycle analyze|map|simulate|sweep <plant.json>``.

Exit codes: 0 on success, 2 for bad input (plant file, flags, ranges),
3 for numerical failures.  Errors are reported on stderr as one JSON
object ``{"error": <class>, "reason": <message>}``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from .cycle import ITER_TOL, MAX_ITER, certify
from .errors import NumericalError, UnsupportedPoleClass
from .filippov import (SimConfig, default_dt, simulate, write_events_json,
                       write_trace_csv)
from .plant import plant_from_json
from .switching import DEFAULT_TOL, exit_plus, f_plus_second

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
TOL_ENV = "RELAYCYCLE_TOL"


class InputError(ValueError):
    pass


def _fmt(v) -> str:
    return repr(float(v))


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _global_tol(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            val = float(env)
        except ValueError:
            raise InputError(f"{TOL_ENV}={env!r} is not a number") from None
        if not val > 0:
            raise InputError(f"{TOL_ENV} must be positive, got {env!r}")
        return val
    return ITER_TOL


def _load_plant(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from None
    return plant_from_json(obj)


def _parse_floats(text, name, count=None):
    try:
        vals = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise InputError(f"--{name} must be comma-separated numbers, got {text!r}") from None
    if not vals or (count is not None and len(vals) != count):
        want = f"{count} values" if count else "at least one value"
        raise InputError(f"--{name} needs {want}, got {text!r}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"--{name} values must be finite, got {text!r}")
    return vals


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_analyze(args) -> int:
    plant = _load_plant(args.plant)
    tol = _global_tol(args)
    cert = certify(plant, tol=tol, max_iter=args.max_iter, n_grid=args.n_grid)
    tolerances = {"iteration_rel_tol": tol, "max_iter": args.max_iter,
                  "exit_root_tol": DEFAULT_TOL, "contraction_grid_n": args.n_grid}
    text = json.dumps(_json_safe(cert.to_dict(tolerances)), indent=2)
    fh, close = _open_out(args.out)
    try:
        fh.write(text + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_map(args) -> int:
    plant = _load_plant(args.plant)
    if not (math.isfinite(args.xi_min) and math.isfinite(args.xi_max)):
        raise InputError("--xi-min and --xi-max must be finite")
    if not args.xi_min < args.xi_max:
        raise InputError(f"--xi-min ({args.xi_min}) must be below --xi-max ({args.xi_max})")
    if args.n < 2:
        raise InputError(f"--n must be at least 2, got {args.n}")
    n = args.n
    step = (args.xi_max - args.xi_min) / (n - 1)
    fh, close = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["xi", "tau_plus", "f_plus", "f_plus_prime", "f_plus_second_or_nan"])
        for i in range(n):
            xi = args.xi_max if i == n - 1 else args.xi_min + i * step
            ex = exit_plus(plant, xi)
            try:
                f2 = f_plus_second(plant, xi) if xi > -plant.kappa else math.nan
            except UnsupportedPoleClass:
                f2 = math.nan
            w.writerow([_fmt(xi), _fmt(ex.tau), _fmt(ex.xi_next),
                        _fmt(ex.derivative), _fmt(f2)])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_simulate(args) -> int:
    plant = _load_plant(args.plant)
    x0 = _parse_floats(args.x0, "x0", count=2)
    if args.out is None or args.out == "-":
        raise InputError("simulate needs --out PATH (events go to PATH.events.json)")
    if not args.t_max > 0:
        raise InputError(f"--t-max must be positive, got {args.t_max}")
    try:
        cfg = SimConfig(dt=args.dt, event_tol=args.event_tol, t_max=args.t_max,
                        min_switch_gap=args.min_switch_gap,
                        sliding_enabled=not args.no_sliding,
                        forced_sign=args.forced_sign)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    trace = simulate(plant, x0, cfg)
    out = Path(args.out)
    write_trace_csv(trace, out)
    write_events_json(trace, out.with_name(out.name + ".events.json"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    plant = _load_plant(args.plant)
    kappas = _parse_floats(args.kappa_list, "kappa-list")
    tol = _global_tol(args)
    fh, close = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kappa", "classification", "xi_cycle", "half_period"])
        for k in kappas:
            cert = certify(plant.with_kappa(k), tol=tol, max_iter=args.max_iter,
                           n_grid=args.n_grid)
            xc = math.nan if cert.xi_cycle is None else cert.xi_cycle
            hp = math.nan if cert.half_period is None else cert.half_period
            w.writerow([_fmt(k), cert.classification.value, _fmt(xc), _fmt(hp)])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="relaycycle",
        description="Limit cycles of a relay in feedback with a second-order plant.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, iter_flags=False):
        p.add_argument("plant", help='JSON file {"num": [b1, b0], "den": [1.0, a1, a2]}')
        p.add_argument("--out", default=None, help="output file (default stdout)")
        if iter_flags:
            p.add_argument("--tol", type=float, default=None,
                           help=f"relative iteration tolerance (default {ITER_TOL:g}, "
                                f"or ${TOL_ENV})")
            p.add_argument("--max-iter", type=int, default=MAX_ITER)
            p.add_argument("--n-grid", type=int, default=1000,
                           help="grid size for the sampled contraction bound")

    p = sub.add_parser("analyze", help="write the behaviour certificate as JSON")
    common(p, iter_flags=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("map", help="tabulate tau_plus, f_plus and derivatives")
    common(p)
    p.add_argument("--xi-min", type=float, default=-1.0)
    p.add_argument("--xi-max", type=float, default=5.0)
    p.add_argument("--n", type=int, default=61)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("simulate", help="integrate the loop; CSV trace + events JSON")
    common(p)
    p.add_argument("--x0", default="0,0", help='initial state "x1,x2"')
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--dt", type=float, default=None,
                   help="RK4 step (default 1e-3 * min(1, 1/|fastest pole|))")
    p.add_argument("--event-tol", type=float, default=1e-10)
    p.add_argument("--min-switch-gap", type=float, default=1e-6)
    p.add_argument("--no-sliding", action="store_true")
    p.add_argument("--forced-sign", type=int, choices=(1, -1), default=None,
                   help="hold the relay at this value (diagnostic)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="certificate summary for several kappa values")
    common(p, iter_flags=True)
    p.add_argument("--kappa-list", required=True, help='e.g. "1,0,-1"')
    p.set_defaults(func=cmd_sweep)
    return ap


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "reason": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        return _fail(EXIT_NUMERIC, exc)
    except (ValueError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())
