"""Command-line front end: CSV tables for every budget computation and the oracle suites.

Every output starts with ``#`` comment lines echoing the tool version and
the full effective configuration, so a run can be repeated exactly.
Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from typing import Sequence

from . import __version__
from .architectures import ArchitectureSpec, Encoding, Family, ModeScaling, depth
from .lossmodel import TABLE_I, ExperimentConfig, Infeasible, compose_efficiencies
from .oracle.suite import SUITES, run_suite
from .solver import (
    DEFAULT_DETECTED_GRID,
    DEFAULT_X2_GRID,
    FIG6_COUPLING_LOSS,
    FIG6_MZI_LOSS,
    FIG6_SWITCH_LOSS,
    MZI_LOSS_SWITCH,
    SamplingMode,
    mzi_frontier,
    required_efficiency,
    source_requirement_curve,
    tolerated_loss_surface,
)

INFEASIBLE = "INFEASIBLE"
EXIT_OK, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2

# Keys never echoed: they do not change the table contents.
_UNECHOED = {"config", "out", "jobs", "handler"}


class UsageError(Exception):
    pass


def parse_grid(text: str, integer: bool = False) -> list:
    """Parse ``a``, ``a,b,c`` or an inclusive range ``start:stop:step``."""
    cast = int if integer else float
    try:
        if ":" in text:
            start, stop, step = (cast(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(count)]
            if not integer:
                values = [round(v, 12) for v in values]
        else:
            values = [cast(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    return values


def _float_grid(text: str) -> list[float]:
    return parse_grid(text)


def _int_grid(text: str) -> list[int]:
    return parse_grid(text, integer=True)


def _default_grid(values) -> str:
    return ",".join(f"{v:g}" for v in values)


class Formatter:
    def __init__(self, precision: int):
        self.precision = precision

    def __call__(self, value) -> str:
        if value is None:
            return INFEASIBLE
        if isinstance(value, float):
            return f"{value:.{self.precision}g}"
        return str(value)


def _scaling(args) -> ModeScaling:
    if args.scaling == "quadratic":
        return ModeScaling.quadratic()
    return ModeScaling.linear(args.coefficient)


def _experiment(args) -> ExperimentConfig:
    return ExperimentConfig(
        indistinguishability_x2=args.x2_default,
        single_photon_rate=args.rate,
        target_sample_rate=args.samples_per_day / 86400.0,
        error_threshold=args.error,
        permanent_order=args.order,
        detector_efficiency=args.detector_efficiency,
    )


def _header(args, extra: Sequence[str] = ()) -> list[str]:
    lines = [f"# bosonbudget {__version__}", f"# command: {args.command}"]
    for key in sorted(vars(args)):
        if key in _UNECHOED or key == "command":
            continue
        value = getattr(args, key)
        if isinstance(value, list):
            value = ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in value)
        lines.append(f"# {key} = {value}")
    lines.extend(f"# {line}" for line in extra)
    return lines


def _write_table(args, header: list[str], columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    fmt = Formatter(args.precision)
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def cmd_tolerated_loss(args) -> tuple[str, int]:
    cfg = _experiment(args)
    scaling = _scaling(args)
    points = tolerated_loss_surface(cfg, scaling, args.encoding, args.x2, args.detected, jobs=args.jobs)
    rows = [(pt.x2, pt.detected, pt.l, pt.p, pt.m, args.encoding, scaling.label(), pt.max_loss) for pt in points]
    columns = ["x2", "detected", "l", "p", "m", "encoding", "scaling", "max_loss_db"]
    return _write_table(args, _header(args), columns, rows), EXIT_OK


def _frontier_grid(args) -> list[tuple[float, str]]:
    # annotation points that coincide with a grid value label that row instead of adding one
    grid = {round(float(v), 12): "" for v in args.mzi_grid}
    for rho, note in ((FIG6_MZI_LOSS, "phase-shifter-limited"), (MZI_LOSS_SWITCH, "switch-limited")):
        grid[round(rho, 12)] = note
    return sorted(grid.items())


def cmd_mzi_frontier(args) -> tuple[str, int]:
    cfg = _experiment(args)
    scaling = _scaling(args)
    arch = ArchitectureSpec(
        Family(args.family), Encoding(args.encoding), 0.0, args.prop_loss, args.coupling_loss, args.sub_interferometer
    )
    grid = _frontier_grid(args)
    try:
        points = mzi_frontier(cfg, arch, scaling, args.mode, [g for g, _ in grid])
        residuals = [pt.residual_budget for pt in points]
        depth_note = f"optical depth = {points[0].optical_depth}, max tolerated loss = {points[0].max_loss:.{args.precision}g} dB"
    except Infeasible as exc:
        residuals = [None] * len(grid)
        depth_note = f"infeasible: {exc}"
    rows = [
        (args.family, scaling.label(), args.mode, rho, res, required_efficiency(res), note)
        for (rho, note), res in zip(grid, residuals)
    ]
    columns = ["architecture", "scaling", "sampling_mode", "mzi_loss_db", "residual_budget_db",
               "required_efficiency", "annotation"]
    return _write_table(args, _header(args, [depth_note]), columns, rows), EXIT_OK


def cmd_source_requirements(args) -> tuple[str, int]:
    cfg = _experiment(args)
    scalings = [ModeScaling.quadratic(), ModeScaling.linear(args.coefficient)]
    if args.scaling != "both":
        scalings = [_scaling(args)]
    rows = []
    for scaling in scalings:
        curve = source_requirement_curve(
            cfg, scaling, args.x2, args.detected, args.mzi_loss, args.coupling_loss, args.switch_loss, jobs=args.jobs
        )
        rows += [(pt.x2, pt.scaling, pt.detected, pt.l, pt.required_efficiency) for pt in curve]
    extra = [
        f"fixed losses: mzi = {args.mzi_loss:g} dB, coupling = {args.coupling_loss:g} dB, "
        f"demux = {args.switch_loss:g} dB x ceil(log2 p), detector efficiency = {args.detector_efficiency:g}",
        "interferometer: hybrid spatial with rectangular sub-interferometers",
    ]
    columns = ["x2", "scaling", "detected", "l", "required_source_efficiency"]
    return _write_table(args, _header(args, extra), columns, rows), EXIT_OK


def cmd_depth(args) -> tuple[str, int]:
    arch = ArchitectureSpec(Family(args.family), Encoding(args.encoding), args.mzi_loss,
                            args.prop_loss, args.coupling_loss, args.sub_interferometer)
    try:
        report = depth(arch, args.p, args.m, args.rate)
    except Infeasible as exc:
        raise UsageError(str(exc)) from None
    layout = report.layout
    fields = {"n": None, "m1": None, "m2": None, "time_bins": None, "p1": None, "p2": None}
    if layout is not None:
        for key in fields:
            fields[key] = getattr(layout, key, "")
    row = (args.family, args.encoding, args.p, args.m, report.optical_depth, report.interferometer_loss,
           report.input_rate, report.total_modes_realized, *("" if v is None else v for v in fields.values()))
    columns = ["family", "encoding", "p", "m", "depth", "interferometer_loss_db", "input_rate_hz",
               "modes_realized", *fields]
    return _write_table(args, _header(args), columns, [row]), EXIT_OK


def cmd_validate(args) -> tuple[str, int]:
    options = {"m": args.m} if args.m else {}
    if args.trials is not None:
        options["trials"] = args.trials
    results = run_suite(args.suite, seed=args.seed, **options)
    lines = _header(args) + [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"# {len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", EXIT_VALIDATION if failed else EXIT_OK


def cmd_table(args) -> tuple[str, int]:
    rows = []
    for name, row in TABLE_I.items():
        total = compose_efficiencies(row["sps"], row["coupling"], row["dmx"], row["det"])
        rows.append((name, row["sps"], row["coupling"], row["dmx"], row["det"], total))
    columns = ["row", "source", "coupling", "demux", "detector", "combined_efficiency"]
    return _write_table(args, _header(args), columns, rows), EXIT_OK


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    g.add_argument("--rate", type=float, default=1e9, help="single-photon rate in Hz")
    g.add_argument("--samples-per-day", type=float, default=100.0, help="target post-selected samples per day")
    g.add_argument("--error", type=float, default=0.01, help="target classical approximation error E")
    g.add_argument("--order", type=int, default=49, help="order k of classically computed permanents")
    g.add_argument("--detector-efficiency", type=float, default=1.0)
    g.add_argument("--x2-default", type=float, default=0.96, help="indistinguishability for fixed-x2 commands")


def _add_scaling_args(p: argparse.ArgumentParser, allow_both: bool = False) -> None:
    choices = ["quadratic", "linear"] + (["both"] if allow_both else [])
    p.add_argument("--scaling", choices=choices, default="both" if allow_both else "quadratic")
    p.add_argument("--coefficient", type=float, default=10.0, help="c in m = c (p - l) for linear scaling")


def _add_arch_args(p: argparse.ArgumentParser, default_family: str) -> None:
    p.add_argument("--family", choices=[f.value for f in Family], default=default_family)
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default="spatial")
    p.add_argument("--prop-loss", type=float, default=0.0, help="propagation loss per time bin (dB)")
    p.add_argument("--coupling-loss", type=float, default=0.0, help="coupling loss between time-bin MZIs (dB)")
    p.add_argument("--sub-interferometer", choices=["rectangular", "clements"], default="rectangular")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosonbudget", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key = value file merged under explicit flags")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--precision", type=int, default=6, help="significant digits of printed floats")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for grid sweeps")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tolerated-loss", help="tolerated loss over an (x2, detected) grid")
    _add_experiment_args(p)
    _add_scaling_args(p)
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default="spatial")
    p.add_argument("--x2", type=_float_grid, default=_default_grid(DEFAULT_X2_GRID))
    p.add_argument("--detected", type=_int_grid, default=_default_grid(DEFAULT_DETECTED_GRID))
    p.set_defaults(handler=cmd_tolerated_loss)

    p = sub.add_parser("mzi-frontier", help="residual budget versus MZI insertion loss")
    _add_experiment_args(p)
    _add_scaling_args(p)
    _add_arch_args(p, "hybrid-spatial")
    p.add_argument("--mode", choices=[m.value for m in SamplingMode], default="AB")
    p.add_argument("--mzi-grid", type=_float_grid, default="0:0.06:0.005")
    p.set_defaults(handler=cmd_mzi_frontier)

    p = sub.add_parser("source-requirements", help="required source efficiency versus x2")
    _add_experiment_args(p)
    _add_scaling_args(p, allow_both=True)
    p.add_argument("--x2", type=_float_grid, default=_default_grid(DEFAULT_X2_GRID))
    p.add_argument("--detected", type=_int_grid, default=_default_grid(DEFAULT_DETECTED_GRID))
    p.add_argument("--mzi-loss", type=float, default=FIG6_MZI_LOSS)
    p.add_argument("--coupling-loss", type=float, default=FIG6_COUPLING_LOSS)
    p.add_argument("--switch-loss", type=float, default=FIG6_SWITCH_LOSS, help="loss per demultiplexer level (dB)")
    p.set_defaults(handler=cmd_source_requirements)

    p = sub.add_parser("depth", help="optical depth, loss and input rate of one architecture")
    _add_arch_args(p, "clements")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mzi-loss", type=float, default=0.0)
    p.add_argument("--rate", type=float, default=1e9)
    p.set_defaults(handler=cmd_depth)

    p = sub.add_parser("validate", help="run oracle validation suites")
    p.add_argument("--suite", choices=["all", *SUITES], default="all")
    p.add_argument("--m", type=_int_grid, default=None, help="mode counts for the time-bin equivalence suite")
    p.add_argument("--trials", type=int, default=None, help="Haar Monte Carlo trials")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("table", help="combined component efficiencies of the reference rows")
    p.set_defaults(handler=cmd_table)
    return parser


def _read_config(path: str) -> dict[str, str]:
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[bosonbudget]\n" + text
    parser.read_string(text)
    values = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            values[key.replace("-", "_")] = value
    return values


def _apply_config(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    # String defaults pass through each argument's type converter.
    actions = [parser._actions]
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            actions += [sp._actions for sp in action.choices.values()]
            for sp in action.choices.values():
                known = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in values.items() if k in known})
    known = {a.dest for group in actions for a in group}
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    top = {a.dest for a in parser._actions}
    parser.set_defaults(**{k: v for k, v in values.items() if k in top})


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, _read_config(known.config))
        args = parser.parse_args(argv)
        if args.precision < 1 or args.jobs < 1:
            raise UsageError("--precision and --jobs must be >= 1")
        text, code = args.handler(args)
    except (UsageError, ValueError, OSError, configparser.Error) as exc:
        print(f"bosonbudget: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
