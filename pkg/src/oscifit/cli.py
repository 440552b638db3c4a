"""Command-line front end emitting CSV artifacts with JSON run manifests.

Exit codes: 0 success, 1 verify-series gate failed, 2 invalid arguments,
3 numerical failure.  Output paths are resolved against ``$OSCIFIT_OUT_DIR``
when set, otherwise the working directory.
"""

import argparse
import csv
from datetime import datetime, timezone
import json
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .coefficients import V_MAX, coefficients_for
from .errors import NumericalError
from .integrator import IntegrationConfig, integrate
from .phase import DEFAULT_DELTA_GRID, EXPECTED_SLOPE, phase_lag_curve, sensitivity_order
from .problems import kepler_problem
from .scheme import ALL_SCHEMES, Scheme
from .series import DEFAULT_ORDER, discrepancy_report, gate_passes

OUT_DIR_ENV = "OSCIFIT_OUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def fmt(x):
    """17 significant digits, round-trip exact for doubles."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def parse_grid(text):
    """'0.3', '0.1,0.2,0.4' or an inclusive range 'start:stop:step'."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError(f"bad range {text!r}; use start:stop:step")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9))
        # integer multiples of step keep grid values reproducible
        return [round(start + k * step, 12) for k in range(n + 1)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def parse_schemes(text):
    try:
        return [Scheme.parse(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def output_dir():
    return Path(os.environ.get(OUT_DIR_ENV) or ".")


def resolve_out(out, default_name):
    path = Path(out) if out else Path(default_name)
    if not path.is_absolute():
        path = output_dir() / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def _jsonable(value):
    if isinstance(value, Scheme):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def write_manifest(csv_path, subcommand, parameters, artifacts):
    manifest = {
        "subcommand": subcommand,
        "parameters": {k: _jsonable(v) for k, v in parameters.items()},
        "artifacts": [str(a) for a in artifacts],
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    path = csv_path.with_suffix(".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def trajectory_rows(traj):
    """Rows for a trajectory CSV (t, y0..y{d-1}, error) plus its summary line."""
    d = traj.states.shape[1]
    header = ["t"] + [f"y{i}" for i in range(d)]
    if traj.per_step_error is not None:
        header.append("error")
    rows = []
    for n, t in enumerate(traj.times):
        row = [t, *traj.states[n]]
        if traj.per_step_error is not None:
            row.append(traj.per_step_error[n])
        rows.append(row)
    its = traj.corrector_iterations
    summary = (
        f"# scheme={traj.scheme},h={fmt(traj.h)},mean_error={fmt(traj.mean_error)},"
        f"max_error={fmt(traj.max_error)},corrector_iters_mean="
        f"{fmt(float(np.mean(its)) if its else None)},corrector_iters_max={max(its) if its else ''}"
    )
    return header, rows, summary


def write_trajectory_csv(traj, path):
    header, rows, summary = trajectory_rows(traj)
    write_csv(path, header, rows)
    with open(path, "a", encoding="utf-8", newline="") as fh:
        fh.write(summary + "\n")


def cmd_coeffs(args):
    schemes = args.scheme or list(ALL_SCHEMES)
    grid = args.v0 if args.v0 is not None else parse_grid("0:1.5:0.05")
    rows = []
    for scheme in schemes:
        for v0 in grid:
            c = coefficients_for(scheme, v0)
            rows.append([str(scheme), v0, c.b0, c.b1, c.a])
    path = resolve_out(args.out, "coeffs.csv")
    write_csv(path, ["scheme", "v0", "b0", "b1", "a"], rows)
    write_manifest(path, "coeffs", {"schemes": schemes, "v0_grid": grid, "v_max": V_MAX}, [path])
    return EXIT_OK


def cmd_phaselag(args):
    schemes = args.scheme or list(ALL_SCHEMES)
    v0 = args.v0[0] if args.v0 else 0.5
    grid = args.u_grid if args.u_grid is not None else parse_grid("0.01:3.0:0.01")
    table = phase_lag_curve(schemes, v0, grid)
    rows = []
    for scheme, samples in table.items():
        for s in samples:
            rows.append([str(scheme), v0, s.u, s.theta, s.phase_lag, s.amplification, s.in_periodicity])
    path = resolve_out(args.out, "phaselag.csv")
    header = ["scheme", "v0", "u", "theta", "phase_lag", "amplification", "in_periodicity"]
    write_csv(path, header, rows)
    write_manifest(path, "phaselag", {"schemes": schemes, "v0": v0, "u_grid": grid}, [path])
    return EXIT_OK


def cmd_kepler(args):
    schemes = args.scheme or list(ALL_SCHEMES)
    ecc, h, t_end = args.eccentricity, args.h, args.t_end
    if not 0.0 <= ecc <= 0.9:
        raise ValueError("eccentricity must lie in [0, 0.9]")
    if not h > 0 or t_end < 0:
        raise ValueError("need h > 0 and t_end >= 0")
    mode = args.frequency_mode.replace("-", "_")
    num_steps = int(round(t_end / h))
    problem = kepler_problem(ecc)
    # fixed mode fits at the mean motion of the orbit
    omega0 = 1.0 if mode == "fixed" else None

    path = resolve_out(args.out, "kepler.csv")
    summary_path = path.with_name(path.stem + "_summary.csv")
    artifacts = [path, summary_path]
    per_scheme, summary = {}, []
    for scheme in schemes:
        if num_steps == 0:
            summary.append([str(scheme), h, 0, None, None, None, None, "zero_steps"])
            continue
        config = IntegrationConfig(
            h=h, num_steps=num_steps, scheme=scheme, frequency_mode=mode, omega0=omega0
        )
        traj = integrate(problem, config)
        per_scheme[scheme] = traj
        its = traj.corrector_iterations
        summary.append([
            str(scheme), h, num_steps, traj.mean_error, traj.max_error,
            float(np.mean(its)) if its else None, max(its) if its else None, "ok",
        ])
        if args.trajectories:
            tpath = path.with_name(f"{path.stem}_traj_{scheme}.csv")
            write_trajectory_csv(traj, tpath)
            artifacts.append(tpath)

    header = ["t"] + [f"error_{s}" for s in schemes]
    rows = []
    if per_scheme:
        times = next(iter(per_scheme.values())).times
        for n in range(1, len(times)):
            rows.append([times[n]] + [per_scheme[s].per_step_error[n] for s in schemes])
    write_csv(path, header, rows)
    write_csv(
        summary_path,
        ["scheme", "h", "num_steps", "mean_error", "max_error",
         "corrector_iters_mean", "corrector_iters_max", "status"],
        summary,
    )
    params = {
        "schemes": schemes, "eccentricity": ecc, "h": h, "t_end": t_end,
        "num_steps": num_steps, "frequency_mode": mode, "omega0": omega0,
        "corrector_tol": 1e-14, "corrector_max_iters": 50, "startup": "exact",
    }
    write_manifest(path, "kepler", params, artifacts)
    return EXIT_OK


def cmd_sensitivity(args):
    schemes = args.scheme or list(ALL_SCHEMES)
    v0s = args.v0 or [0.5]
    deltas = args.delta_grid if args.delta_grid is not None else list(DEFAULT_DELTA_GRID)
    rows = []
    for scheme in schemes:
        for v0 in v0s:
            slope, resid = sensitivity_order(scheme, v0, deltas)
            expected = EXPECTED_SLOPE.get(scheme)
            rows.append([
                str(scheme), v0, slope, resid,
                "NA" if expected is None else fmt(expected),
                "false" if expected is None else "true",
            ])
    path = resolve_out(args.out, "sensitivity.csv")
    write_csv(path, ["scheme", "v0", "slope", "fit_residual", "expected_slope", "slope_applicable"], rows)
    write_manifest(path, "sensitivity", {"schemes": schemes, "v0": v0s, "delta_grid": deltas}, [path])
    return EXIT_OK


def cmd_verify_series(args):
    order = args.order
    rows = discrepancy_report(order)
    path = resolve_out(args.out, "verify_series.csv")
    write_csv(
        path,
        ["scheme", "coefficient", "power", "derived", "printed", "match"],
        [[str(r["scheme"]), r["coefficient"], r["power"], str(r["derived"]),
          str(r["printed"]), "match" if r["match"] else "mismatch"] for r in rows],
    )
    write_manifest(path, "verify-series", {"order": order}, [path])
    ok = gate_passes(rows)
    mismatches = [r for r in rows if not r["match"]]
    for r in mismatches:
        print(
            f"mismatch {r['scheme']}.{r['coefficient']} v^{r['power']}: "
            f"derived {r['derived']} printed {r['printed']}"
        )
    print(f"{len(rows) - len(mismatches)}/{len(rows)} coefficients match; "
          f"S, SD and a(v) through v^6: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else 1


def _order(text):
    value = int(text)
    if not 6 <= value <= 14:
        raise argparse.ArgumentTypeError("order must lie in [6, 14]")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="oscifit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--scheme", type=parse_schemes, default=None,
                       help="comma-separated schemes among C,T,S,SD (default: all)")
        p.add_argument("--out", default=None, help=f"output CSV (default: {out_default})")

    p = sub.add_parser("coeffs", help="stencil weights over a v0 grid")
    common(p, "coeffs.csv")
    p.add_argument("--v0", type=parse_grid, default=None, help="v0 grid (default 0:1.5:0.05)")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("phaselag", help="phase lag against probe frequency")
    common(p, "phaselag.csv")
    p.add_argument("--v0", type=parse_grid, default=None, help="fitted frequency (default 0.5)")
    p.add_argument("--u-grid", type=parse_grid, default=None, help="probe grid (default 0.01:3.0:0.01)")
    p.set_defaults(func=cmd_phaselag)

    p = sub.add_parser("kepler", help="two-body benchmark errors")
    common(p, "kepler.csv")
    p.add_argument("--eccentricity", type=float, default=0.5)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--t-end", type=float, default=1000.0)
    p.add_argument("--frequency-mode", choices=["fixed", "per-step"], default="per-step")
    p.add_argument("--trajectories", action="store_true", help="also write one trajectory CSV per scheme")
    p.set_defaults(func=cmd_kepler)

    p = sub.add_parser("sensitivity", help="log-log slope of |l(v0 + delta)|")
    common(p, "sensitivity.csv")
    p.add_argument("--v0", type=parse_grid, default=None, help="fitted frequencies (default 0.5)")
    p.add_argument("--delta-grid", type=parse_grid, default=None, help="offsets (default logspace(1e-3, 1e-1, 9))")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("verify-series", help="compare derived and published coefficient series")
    p.add_argument("--order", type=_order, default=DEFAULT_ORDER)
    p.add_argument("--out", default=None, help="output CSV (default: verify_series.csv)")
    p.set_defaults(func=cmd_verify_series)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"oscifit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"oscifit {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
