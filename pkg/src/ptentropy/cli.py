"""Command-line front end: ``ptentropy <subcommand> [options]``.

Settings are merged as command-line flags > ``--config`` file > built-in
defaults. Exit status is 0 on success, 1 on a computational failure and 2
on a usage or validation error.
"""
import argparse
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import checks, coherent, eigenstates, entropy, io
from .errors import ConvergenceError, DomainError
from .numerics import Grid1D, default_tol

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
FORMATS = ("csv", "json", "pgm")
STATES = ("ground", "excited")


class UsageError(Exception):
    pass


# --- argument types -------------------------------------------------------------

def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def finite_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return value


def positive_float(text):
    value = finite_float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def n_range(text):
    """``a..b`` (inclusive) or a single integer."""
    try:
        lo, _, hi = text.partition("..")
        lo = int(lo)
        hi = int(hi) if hi else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return range(lo, hi + 1)


def complex_number(text):
    try:
        value = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a complex number, got {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise argparse.ArgumentTypeError("gamma must be finite")
    return value


def grid_spec(text):
    try:
        return Grid1D.parse(text)
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --- parser -----------------------------------------------------------------------

DEFAULTS = {
    "ground": {"space": "both", "n": None},
    "excited": {},
    "table1": {"n_range": range(2, 14), "jobs": 1},
    "bbm-scan": {"state": "ground", "n_min": None, "n_max": 20},
    "density": {"state": "ground", "space": "pos", "grid": None},
    "carpet": {"alpha": 1.0, "x_points": 400, "t_points": 400, "t_max": None},
    "selftest": {"inject_fault": None},
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (stdout table when omitted)")
    common.add_argument("--format", choices=FORMATS,
                        help="output format (default: from the --out extension, else csv)")
    common.add_argument("--tol", type=positive_float,
                        help="quadrature tolerance (default: $PTENTROPY_TOL or built-in)")

    parser = argparse.ArgumentParser(
        prog="ptentropy",
        description="Shannon entropies of Poschl-Teller wells and coherent-state carpets.")
    parser.add_argument("--config", help="flat key = value file of option defaults")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("ground", parents=[common], help="ground state of the hyperbolic well")
    p.add_argument("--n", type=positive_int)
    p.add_argument("--space", choices=("pos", "mom", "both"))

    p = sub.add_parser("excited", parents=[common], help="first excited state(s)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=positive_int)
    g.add_argument("--n-range", type=n_range, metavar="A..B")

    p = sub.add_parser("table1", parents=[common],
                       help="BBM table for the first excited state")
    p.add_argument("--n-range", type=n_range, metavar="A..B")
    p.add_argument("--jobs", type=positive_int, help="worker processes for the rows")

    p = sub.add_parser("bbm-scan", parents=[common], help="entropy sum against n")
    p.add_argument("--state", choices=STATES)
    p.add_argument("--n-min", type=positive_int)
    p.add_argument("--n-max", type=positive_int)

    p = sub.add_parser("density", parents=[common], help="sampled density and entropy density")
    p.add_argument("--state", choices=STATES)
    p.add_argument("--space", choices=("pos", "mom"))
    p.add_argument("--n", type=positive_int)
    p.add_argument("--grid", type=grid_spec, metavar="LO:HI:COUNT")

    p = sub.add_parser("carpet", parents=[common],
                       help="entropy-density carpet of the trigonometric coherent state")
    p.add_argument("--rho", type=finite_float)
    p.add_argument("--alpha", type=positive_float)
    p.add_argument("--gamma", type=complex_number)
    p.add_argument("--n-states", type=positive_int)
    p.add_argument("--x-points", type=positive_int)
    p.add_argument("--t-points", type=positive_int)
    p.add_argument("--t-max", type=positive_float)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in check suite")
    p.add_argument("--inject-fault", choices=("ft-sign",),
                   help="deliberately break a component to exercise the suite")

    # Every option defaults to None so that explicitly given flags can be told apart.
    for action in sub.choices.values():
        for a in action._actions:
            if a.dest != "help":
                a.default = None
    return parser, sub.choices


def _convert(action, text):
    value = action.type(text) if action.type else text
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"config: {action.dest} must be one of {sorted(action.choices)}")
    return value


def resolve(argv):
    """Parse ``argv`` and merge it with the config file and defaults."""
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    cmd = args.command
    settings = dict(vars(args))
    settings.update(DEFAULTS[cmd])
    if args.config:
        try:
            raw = io.load_config(args.config)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        actions = {a.dest: a for a in subparsers[cmd]._actions if a.dest != "help"}
        given = {k for k, v in vars(args).items() if v is not None}
        groups = [{a.dest for a in grp._group_actions}
                  for grp in subparsers[cmd]._mutually_exclusive_groups]
        for key, text in raw.items():
            if key not in actions:
                raise UsageError(f"config: unknown key {key!r} for {cmd}")
            if any(key in grp and grp & given for grp in groups):
                continue
            try:
                settings[key] = _convert(actions[key], text)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config: bad value for {key}: {exc}") from None
        if sum(1 for grp in groups for k in grp if settings.get(k) is not None) > 1:
            raise UsageError("config sets mutually exclusive options")
    for key, value in vars(args).items():
        if value is not None:
            settings[key] = value
    settings["command"] = cmd
    return argparse.Namespace(**settings)


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s) {', '.join(missing)}")


def _output_format(args):
    if args.format:
        return args.format
    if args.out:
        ext = os.path.splitext(args.out)[1].lower().lstrip(".")
        if ext in FORMATS:
            return ext
    return "csv"


# --- commands -------------------------------------------------------------------

def _report_row(n, state, tol, space="both"):
    r = entropy.hpt_entropy_report(n, state, tol=tol)
    row = {"n": n}
    if space in ("pos", "both"):
        row["s_pos"] = r.s_pos
    if space in ("mom", "both"):
        row["s_mom"] = r.s_mom
    if space == "both":
        row.update(sum=r.sum, bound=r.bbm_bound, margin=r.margin, status=r.status)
    row["err_estimate"] = r.err_estimate
    return row


def _excited_row(n, tol):
    return _report_row(n, "excited", tol)


def run_ground(args):
    _require(args, "n")
    row = _report_row(args.n, "ground", args.tol, args.space)
    if args.space != "mom":
        row["s_pos_analytic"] = eigenstates.hpt_analytic_ground_entropy(args.n)
    return {"rows": [row]}


def _check_excited_range(ns):
    if min(ns) < 2:
        raise DomainError("the first excited state needs n >= 2")


def run_excited(args):
    if args.n is None and args.n_range is None:
        raise UsageError("excited: give --n or --n-range")
    ns = [args.n] if args.n is not None else list(args.n_range)
    _check_excited_range(ns)
    return {"rows": [_excited_row(n, args.tol) for n in ns]}


def run_table1(args):
    ns = list(args.n_range)
    _check_excited_range(ns)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_excited_row, ns, [args.tol] * len(ns)))
    else:
        rows = [_excited_row(n, args.tol) for n in ns]
    columns = ("n", "s_pos", "s_mom", "sum", "bound", "margin")
    return {"rows": [{c: r[c] for c in columns} for r in rows]}


def _trend(values):
    d = np.diff(values)
    if np.all(d < 0):
        return "decreasing"
    if np.all(d > 0):
        return "increasing"
    return "non-monotone"


def run_bbm_scan(args):
    n_min = args.n_min if args.n_min is not None else (1 if args.state == "ground" else 2)
    if args.n_max < n_min:
        raise UsageError("bbm-scan: --n-max is below the first n")
    ns = list(range(n_min, args.n_max + 1))
    if args.state == "excited":
        _check_excited_range(ns)
    rows = []
    for n in ns:
        r = entropy.hpt_entropy_report(n, args.state, tol=args.tol)
        row = {"n": n, "s_pos": r.s_pos, "s_mom": r.s_mom, "sum": r.sum, "margin": r.margin}
        if args.state == "ground":
            row["s_pos_analytic"] = eigenstates.hpt_analytic_ground_entropy(n)
        rows.append(row)
    sums = [r["sum"] for r in rows]
    return {"rows": rows, "summary": {"trend": _trend(sums) if len(sums) > 1 else "n/a",
                                      "all_above_bound": all(r["margin"] > 0 for r in rows)}}


def run_density(args):
    _require(args, "n", "grid")
    dens = entropy.hpt_densities(args.n, args.state)
    func = dens.position if args.space == "pos" else dens.momentum
    pts = args.grid.points
    values = np.asarray(func(pts), dtype=np.float64)
    label = "x" if args.space == "pos" else "p"
    rows = [{label: float(u), "density": float(v), "entropy_density": float(s)}
            for u, v, s in zip(pts, values, entropy.entropy_density(values))]
    summary = {}
    try:
        summary["dip_at_peak"] = entropy.dip_criterion(entropy.DensityProfile(args.grid, values))
    except DomainError as exc:
        summary["dip_at_peak"] = None
        summary["dip_note"] = str(exc)
    return {"rows": rows, "summary": summary}


def run_carpet(args):
    _require(args, "rho", "gamma", "n_states", "out")
    well = eigenstates.TrigPTSpec(args.rho, args.alpha)
    spec = coherent.CoherentStateSpec(well, args.gamma, args.n_states)
    x_grid = coherent.default_x_grid(well, args.x_points)
    t_grid = coherent.default_t_grid(well, args.t_points, args.t_max)
    coeffs = coherent.coherent_coefficients(spec)
    carpet = coherent.entropy_carpet(spec, x_grid, t_grid)
    return {"carpet": carpet, "summary": {"tail_mass": coeffs.tail_mass,
                                          "truncation_warning": coeffs.truncation_warning}}


def run_selftest(args):
    results = checks.run_selftest(tol=args.tol, inject_fault=args.inject_fault)
    summary = {"passed": all(r.passed for r in results),
               "n_checks": len(results),
               "n_failed": sum(not r.passed for r in results),
               "checks": [r.as_dict() for r in results]}
    return {"selftest": summary}


COMMANDS = {
    "ground": run_ground,
    "excited": run_excited,
    "table1": run_table1,
    "bbm-scan": run_bbm_scan,
    "density": run_density,
    "carpet": run_carpet,
    "selftest": run_selftest,
}


# --- output ---------------------------------------------------------------------

def _parameters(args):
    skip = {"command", "out", "format", "config", "tol"}
    out = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        if isinstance(value, range):
            value = [value.start, value.stop - 1]
        elif isinstance(value, Grid1D):
            value = [value.lo, value.hi, len(value)]
        out[key] = value
    return out


def _tolerances(args):
    if args.tol is not None:
        return {"override": args.tol}
    return {k: default_tol(k) for k in ("norm", "entropy", "fourier")}


def _emit_table(result, args, fmt, stream):
    rows = result["rows"]
    if fmt == "json":
        io.dump_json({"command": args.command, "rows": rows,
                      "summary": result.get("summary", {})}, stream)
    elif fmt == "csv":
        io.write_table_csv(rows, stream)
    else:
        raise UsageError(f"{args.command} cannot write {fmt} output")


def _emit_carpet(result, args, fmt):
    carpet = result["carpet"]
    sidecar = {"x_grid": [carpet.x_grid.lo, carpet.x_grid.hi, len(carpet.x_grid)],
               "t_grid": [carpet.t_grid.lo, carpet.t_grid.hi, len(carpet.t_grid)]}
    if fmt == "pgm":
        pixels, vmin, vmax, degenerate = io.carpet_to_pixels(carpet.values)
        io.write_pgm(pixels, args.out)
    else:
        vmin, vmax = float(carpet.values.min()), float(carpet.values.max())
        degenerate = not vmax > vmin
        with open(args.out, "w", newline="") as fh:
            if fmt == "csv":
                io.write_carpet_csv(carpet, fh)
            else:
                io.dump_json({"x": carpet.x_grid.points, "t": carpet.t_grid.points,
                              "values": carpet.values}, fh)
    sidecar.update(v_min=vmin, v_max=vmax)
    if degenerate:
        sidecar["warning"] = "constant field; image written as uniform mid-grey"
    return sidecar


def _write_manifest(path, record):
    with open(path + ".manifest.json", "w") as fh:
        io.dump_json(record, fh)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = resolve(argv)
    except UsageError as exc:
        print(f"ptentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    fmt = _output_format(args)
    start = time.perf_counter()
    try:
        if fmt == "pgm" and args.command != "carpet":
            raise UsageError("pgm output is only available for carpet")
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            result = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ptentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"ptentropy: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ArithmeticError, RuntimeWarning) as exc:
        print(f"ptentropy: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    wall = time.perf_counter() - start

    extra = dict(result.get("summary", {}))
    status = EXIT_OK
    try:
        if "carpet" in result:
            extra.update(_emit_carpet(result, args, fmt))
        elif "selftest" in result:
            report = result["selftest"]
            status = EXIT_OK if report["passed"] else EXIT_FAILURE
            if args.out:
                with open(args.out, "w") as fh:
                    io.dump_json(report, fh)
            else:
                io.dump_json(report, sys.stdout)
            extra = {"passed": report["passed"], "n_failed": report["n_failed"]}
        elif args.out:
            with open(args.out, "w", newline="") as fh:
                _emit_table(result, args, fmt, fh)
        elif args.format:
            _emit_table(result, args, fmt, sys.stdout)
        else:
            print(io.format_table(result["rows"]))
            for key, value in result.get("summary", {}).items():
                print(f"# {key}: {value}")
        if args.out:
            _write_manifest(args.out, io.manifest(args.command, _parameters(args),
                                                  _tolerances(args), wall, **extra))
    except UsageError as exc:
        print(f"ptentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ptentropy: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return status


if __name__ == "__main__":
    sys.exit(main())
