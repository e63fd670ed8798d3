"""``haarwave`` command line.

Exit codes: 0 success, 1 runtime failure, 2 usage/config error,
3 negative verdict (unstable spectrum, incompatible data).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import __version__
from .analysis import error_table, spatial_convergence, temporal_convergence
from .errors import HaarwaveError, IncompatibleDataError, ProblemError
from .haar import DEFAULT_QUAD_N, MAX_LEVEL
from .problem import BUILTIN_DESCRIPTIONS, builtin_names, check_compatibility, resolve_problem
from .solver import snapshot_indices, solve, step_count
from .stability import stability_report

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_VERDICT = 3


class ConfigError(Exception):
    pass


def fmt(value: float) -> str:
    """Scientific notation, 12 mantissa decimals, unpadded exponent (``6.065306597126e-1``)."""
    mantissa, exponent = f"{float(value):.12e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haarwave",
        description="Haar wavelet collocation solver for the wave equation with an integral boundary condition.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, problem=True):
        if problem:
            p.add_argument("--problem", required=True, help="built-in name or path to a JSON problem file")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--quad-n", type=int, default=DEFAULT_QUAD_N, dest="quad_n",
                       help="Simpson subintervals for integral checks")

    subcommands = {}
    p = subcommands["solve"] = sub.add_parser("solve", help="run the scheme and write solution/summary CSV")
    common(p)
    p.add_argument("--J", type=int, required=True, help="maximum resolution level")
    p.add_argument("--dt", type=float, required=True, help="time step")
    p.add_argument("--T", type=float, required=True, help="final time")
    p.add_argument("--times", type=_float_list, help="snapshot times (default: T)")
    p.add_argument("--strict", action="store_true", help="treat incompatible data as an error")

    p = subcommands["stability"] = sub.add_parser("stability", help="spectrum of the amplification matrix")
    common(p, problem=False)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--dt", type=float, required=True)

    p = subcommands["converge"] = sub.add_parser("converge", help="observed convergence order in J or dt")
    common(p)
    p.add_argument("--mode", choices=("space", "time"), required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--J", type=int, help="level for --mode time")
    p.add_argument("--dt", type=float, help="time step for --mode space")
    p.add_argument("--J-list", type=_int_list, dest="J_list", help="levels for --mode space")
    p.add_argument("--dt-list", type=_float_list, dest="dt_list", help="time steps for --mode time")
    p.add_argument("--workers", type=int, default=1, help="parallel solves")

    p = subcommands["check"] = sub.add_parser("check", help="compatibility conditions of the initial data")
    common(p)
    p.add_argument("--tol", type=float, default=1e-10)

    subcommands["list"] = sub.add_parser("list", help="list built-in problems")
    parser.subcommands = subcommands
    return parser


def _validate(args):
    if getattr(args, "quad_n", 2) < 2 or getattr(args, "quad_n", 2) % 2:
        raise ConfigError("--quad-n must be an even integer >= 2")
    J = getattr(args, "J", None)
    if J is not None and not 0 <= J <= MAX_LEVEL:
        raise ConfigError(f"--J must be in 0..{MAX_LEVEL}")
    if args.command == "solve":
        try:
            N = step_count(args.T, args.dt)
            snapshot_indices(args.times or [args.T], args.dt, N)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    elif args.command == "stability":
        if args.dt < 0:
            raise ConfigError("--dt must be non-negative")
    elif args.command == "converge":
        if args.mode == "space":
            if args.J_list is None or args.dt is None:
                raise ConfigError("--mode space needs --J-list and --dt")
            if any(not 0 <= J <= MAX_LEVEL for J in args.J_list):
                raise ConfigError(f"--J-list entries must be in 0..{MAX_LEVEL}")
            dts = [args.dt]
        else:
            if args.dt_list is None or args.J is None:
                raise ConfigError("--mode time needs --J and --dt-list")
            dts = args.dt_list
        for dt in dts:
            try:
                step_count(args.T, dt)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None


def _load(source):
    try:
        return resolve_problem(source)
    except ProblemError as exc:
        raise ConfigError(str(exc)) from None


def cmd_solve(args) -> int:
    spec = _load(args.problem)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    times = args.times or [args.T]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        record = solve(spec, args.J, args.dt, args.T, times, strict=args.strict, quad_n=args.quad_n)
    for w in caught:
        print(f"haarwave: warning: {w.message}", file=sys.stderr)

    summary = []
    for t in times:
        snap = record.snapshot_at(t)
        if snap.exact_report is not None:
            header = ("x", "u_exact", "u_approx", "abs_error")
            rows = [
                (x, ex, ap, er)
                for x, ex, ap, er in zip(snap.x_report, snap.exact_report, snap.u_report, snap.error_report)
                if x > 0.0
            ]
        else:
            header = ("x", "u_approx")
            rows = [(x, ap) for x, ap in zip(snap.x_report, snap.u_report) if x > 0.0]
        write_csv(out / f"solution_{float(t)!r}.csv", header, rows)
        if snap.exact_report is not None:
            table = error_table(record, t)
            summary.append((t, table.max_error, table.l2_error))
            print(f"t={fmt(t)} max_error={fmt(table.max_error)} l2_error={fmt(table.l2_error)}")
        else:
            print(f"t={fmt(t)} written (no exact solution)")
    if summary:
        write_csv(out / "summary.csv", ("t", "max_error", "l2_error"), summary)
    return EXIT_OK


def cmd_stability(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = stability_report(args.J, args.dt)
    write_csv(
        out / "spectrum.csv",
        ("re", "im", "abs"),
        [(v.real, v.imag, abs(v)) for v in report.eigenvalues],
    )
    verdict = "stable" if report.stable else "unstable"
    print(f"J={args.J} dt={fmt(args.dt)} spectral_radius={fmt(report.spectral_radius)} {verdict}")
    return EXIT_OK if report.stable else EXIT_VERDICT


def cmd_converge(args) -> int:
    spec = _load(args.problem)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.mode == "space":
        table = spatial_convergence(spec, args.J_list, args.dt, args.T, workers=args.workers)
    else:
        table = temporal_convergence(spec, args.J, args.dt_list, args.T, workers=args.workers)
    rows = []
    for r in table.rows:
        param = str(int(r.param)) if args.mode == "space" else r.param
        order = "" if r.order is None else r.order
        rows.append((param, r.max_error, r.l2_error, order))
        print(f"{args.mode} param={param if isinstance(param, str) else fmt(param)} "
              f"max_error={fmt(r.max_error)} order={'' if r.order is None else f'{r.order:.3f}'}")
    write_csv(out / "convergence.csv", ("param", "max_error", "l2_error", "observed_order"), rows)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        spec = resolve_problem(args.problem)
        report = check_compatibility(spec, args.tol, args.quad_n)
    except HaarwaveError as exc:
        print(f"haarwave: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    for label, value, ok in zip(report.labels, report.residuals, report.passed):
        print(f"{label:<18} {fmt(value)}  {'pass' if ok else 'FAIL'}")
    print("compatible" if report.ok else "incompatible")
    return EXIT_OK if report.ok else EXIT_VERDICT


def cmd_list(args) -> int:
    for name in builtin_names():
        print(f"{name:<10} {BUILTIN_DESCRIPTIONS.get(name, '')}")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "stability": cmd_stability,
    "converge": cmd_converge,
    "check": cmd_check,
    "list": cmd_list,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        parser.subcommands[args.command].print_usage(sys.stderr)
        print(f"haarwave {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IncompatibleDataError as exc:
        print(f"haarwave: error: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except HaarwaveError as exc:
        print(f"haarwave: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
