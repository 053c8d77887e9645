#!/usr/bin/env python3
"""
ELL Testing Band CLI
Computes simultaneous testing bands for Q-Q and P-P plots, solves local
levels, builds level tables, checks samples and runs simulation studies.
"""
import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.table import Table

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from bands.builder import (
    Method,
    band_check,
    band_effective_n,
    check_intervals,
    get_pp_band,
    get_qq_band,
    pp_values,
)
from bands.expected import ExpectedMode
from data.loader import DataLoader, write_values
from distributions.reference import Estimation, EstimationMethod, Family, ReferenceDistribution
from ell.dispatch import default_store, resolve_eta
from ell.one_sided import global_level_one_sided_exact
from ell.solver import LocalLevelQuery, Policy, Side
from ell.tables import TableStore, parse_grid, table_build, table_filename, write_table
from ell.two_sided import global_level_two_sided
from plotting.spec import PlotOptions, make_plot
from plotting.svg import emit_svg
from plotting.tables import emit_table, parse_band_document
from simulation.calibration import CalibrationStatistic, chisq_calibration_generate
from simulation.studies import power_comparison, power_study, type1_study
from utils.config import DEFAULT_ALPHA, DEFAULT_ESTIMATION, DEFAULT_FAMILY, DEFAULT_METHOD, SOLVER_TOL, TABLE_TOL, table_dir
from utils.errors import ConfigError, EllbandError, TableError
from utils.logging import setup_logging

console = Console(stderr=True)


def alpha_type(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {value}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def params_type(text: str) -> dict:
    """'mu=0,sigma=2' -> {'mu': 0.0, 'sigma': 2.0}"""
    params = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected name=value, got {item!r}")
        try:
            params[name.strip()] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"parameter {name.strip()!r} is not a number: {value!r}")
    return params


def grid_type(text: str) -> List[int]:
    try:
        return parse_grid(text)
    except TableError as e:
        raise argparse.ArgumentTypeError(str(e))


SIDE_CHOICES = ["one", "two", "one-sided", "two-sided"]


def add_level_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("Band")
    group.add_argument("--alpha", type=alpha_type, default=DEFAULT_ALPHA, help=f"Global level (default: {DEFAULT_ALPHA})")
    group.add_argument("--side", choices=SIDE_CHOICES, default="two", help="One- or two-sided band (default: two)")
    group.add_argument(
        "--method", choices=[m.value for m in Method], default=DEFAULT_METHOD, help=f"Band method (default: {DEFAULT_METHOD})"
    )
    group.add_argument(
        "--policy", choices=[p.value for p in Policy], default=Policy.AUTO.value, help="How eta is obtained (default: auto)"
    )
    group.add_argument("--c-alpha", type=float, help="Constant for the asymptotic formula (overrides the calibrated one)")
    group.add_argument(
        "--expected",
        choices=[m.value for m in ExpectedMode],
        default=ExpectedMode.MEDIAN.value,
        help="Expected line: order-statistic medians (default), Blom or uniform means",
    )
    group.add_argument("--table-dir", type=Path, help="Directory of eta tables (default: ELLBAND_TABLE_DIR or bundled)")


def add_distribution_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("Reference distribution")
    group.add_argument(
        "--dist", choices=[f.value for f in Family], default=DEFAULT_FAMILY, help=f"Reference family (default: {DEFAULT_FAMILY})"
    )
    exclusive = group.add_mutually_exclusive_group()
    exclusive.add_argument("--params", type=params_type, help="Known parameters, e.g. mu=0,sigma=1 or df=4")
    exclusive.add_argument(
        "--estimation",
        choices=[e.value for e in Estimation if e is not Estimation.KNOWN],
        help=f"Parameter estimation (default: {DEFAULT_ESTIMATION} for normal, mle otherwise)",
    )


def add_output_args(parser: argparse.ArgumentParser, formats: Optional[List[str]] = None):
    group = parser.add_argument_group("Output")
    group.add_argument("--output", type=Path, help="Output file (default: standard output)")
    if formats:
        group.add_argument("--format", choices=formats, default=formats[0], help=f"Output format (default: {formats[0]})")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default="WARNING", help="Log level (default: WARNING)"
    )

    parser = argparse.ArgumentParser(prog="ellband", description="Equal-local-levels testing bands for Q-Q and P-P plots")
    commands = parser.add_subparsers(dest="command", required=True)

    band = commands.add_parser("band", parents=[common], help="Compute a testing band")
    source = band.add_mutually_exclusive_group(required=True)
    source.add_argument("--n", type=positive_int, help="Number of points")
    source.add_argument("--data", type=Path, help="Observation file (one value per line, or CSV with --col)")
    band.add_argument("--col", help="CSV column (name or 0-based index)")
    band.add_argument("--neff", type=positive_int, help="Effective number of tests for the band")
    band.add_argument("--pp", action="store_true", help="P-P band (uniform reference on the probability scale)")
    add_level_args(band)
    add_distribution_args(band)
    add_output_args(band, ["json", "csv"])
    band.set_defaults(handler=cmd_band)

    plot = commands.add_parser("plot", parents=[common], help="Render a Q-Q or P-P plot with its band as SVG")
    plot.add_argument("data", type=Path, help="Observation file")
    plot.add_argument("--col", help="CSV column (name or 0-based index)")
    plot.add_argument("--overlay", type=Path, action="append", default=[], help="Extra sample drawn on the same axes")
    plot.add_argument("--difference", action="store_true", help="Plot observed minus expected")
    plot.add_argument("--log10", action="store_true", help="Plot both axes on the -log10 scale")
    plot.add_argument("--pp", action="store_true", help="P-P plot")
    plot.add_argument("--neff", type=positive_int, help="Build the band for an effective number of tests")
    plot.add_argument("--title", default="", help="Plot title")
    plot.add_argument("--width", type=positive_int, default=640, help="Width in pixels (default: 640)")
    plot.add_argument("--height", type=positive_int, default=480, help="Height in pixels (default: 480)")
    add_level_args(plot)
    add_distribution_args(plot)
    add_output_args(plot)
    plot.set_defaults(handler=cmd_plot)

    level = commands.add_parser("local-level", parents=[common], help="Solve eta for (n, alpha), or a level from bounds")
    target = level.add_mutually_exclusive_group(required=True)
    target.add_argument("--n", type=positive_int, help="Number of points")
    target.add_argument(
        "--from-bounds", type=Path, nargs="+", metavar="FILE", help="Lower bounds file, and upper bounds file for a two-sided band"
    )
    level.add_argument("--alpha", type=alpha_type, default=DEFAULT_ALPHA, help=f"Global level (default: {DEFAULT_ALPHA})")
    level.add_argument("--side", choices=SIDE_CHOICES, default="two", help="One- or two-sided (default: two)")
    level.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.AUTO.value, help="Resolution policy")
    level.add_argument("--tol", type=positive_float, default=SOLVER_TOL, help=f"Relative tolerance (default: {SOLVER_TOL})")
    level.add_argument("--c-alpha", type=float, help="Constant for the asymptotic formula")
    level.add_argument("--table-dir", type=Path, help="Directory of eta tables")
    level.set_defaults(handler=cmd_local_level)

    table = commands.add_parser("table", parents=[common], help="Build an eta table")
    table.add_argument("--alpha", type=alpha_type, default=DEFAULT_ALPHA, help=f"Global level (default: {DEFAULT_ALPHA})")
    table.add_argument("--side", choices=SIDE_CHOICES, default="two", help="One- or two-sided (default: two)")
    table.add_argument("--grid", type=grid_type, required=True, help="start:stop:step (inclusive) or n1,n2,...")
    table.add_argument("--tol", type=positive_float, default=TABLE_TOL, help=f"Relative tolerance (default: {TABLE_TOL})")
    table.add_argument("--workers", type=positive_int, help="Worker threads")
    table.add_argument("--output", type=Path, help="Table file (default: the table directory)")
    table.set_defaults(handler=cmd_table)

    check = commands.add_parser("check", parents=[common], help="Check whether a sample stays inside a band")
    check.add_argument("data", type=Path, help="Observation file")
    check.add_argument("--col", help="CSV column (name or 0-based index)")
    check.add_argument("--band", type=Path, help="Band JSON written by the band command")
    add_level_args(check)
    add_distribution_args(check)
    check.set_defaults(handler=cmd_check)

    simulate = commands.add_parser("simulate", help="Run a simulation study")
    studies = simulate.add_subparsers(dest="study", required=True)

    type1 = studies.add_parser("type1", parents=[common], help="Type 1 error of the ELL normality test")
    type1.add_argument("--n", type=positive_int, default=100, help="Sample size (default: 100)")
    type1.add_argument(
        "--estimation", choices=[e.value for e in Estimation], default=DEFAULT_ESTIMATION, help="Parameter estimation"
    )
    add_sim_args(type1, 10_000)
    type1.set_defaults(handler=cmd_simulate_type1)

    power = studies.add_parser("power", parents=[common], help="Power of ELL and KS against t alternatives")
    power.add_argument("--n", type=positive_int, default=100, help="Sample size (default: 100)")
    power.add_argument("--alt-df", type=positive_float, default=3.0, help="Degrees of freedom of the t alternative (default: 3)")
    power.add_argument("--normal", action="store_true", help="Draw normal data instead (null case)")
    power.add_argument("--method", choices=["both", "ell", "ks"], default="both", help="Band method(s) (default: both)")
    power.add_argument(
        "--estimation", choices=[e.value for e in Estimation if e is not Estimation.KNOWN], default=DEFAULT_ESTIMATION
    )
    add_sim_args(power, 1000)
    power.set_defaults(handler=cmd_simulate_power)

    calibration = studies.add_parser("calibration", parents=[common], help="P-values of chi-square tests on 2x2 tables")
    calibration.add_argument("--s", type=positive_int, default=200, help="Observations per table (default: 200)")
    calibration.add_argument("--a", type=alpha_type, default=0.15, help="Row probability (default: 0.15)")
    calibration.add_argument("--b", type=alpha_type, default=0.4, help="Column probability (default: 0.4)")
    calibration.add_argument("--tables", type=positive_int, default=1000, help="Number of tables (default: 1000)")
    calibration.add_argument(
        "--statistic", choices=[s.value for s in CalibrationStatistic], default=CalibrationStatistic.INDEPENDENCE.value
    )
    calibration.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    calibration.add_argument("--output", type=Path, help="Output file (default: standard output)")
    calibration.set_defaults(handler=cmd_simulate_calibration)

    return parser


def add_sim_args(parser: argparse.ArgumentParser, replicates: int):
    parser.add_argument("--alpha", type=alpha_type, default=DEFAULT_ALPHA, help=f"Nominal level (default: {DEFAULT_ALPHA})")
    parser.add_argument("--replicates", type=int, default=replicates, help=f"Replicates (default: {replicates})")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    parser.add_argument("--workers", type=positive_int, help="Worker threads")
    parser.add_argument("--output", type=Path, help="Report file (default: standard output)")


def write_output(text: str, path: Optional[Path]):
    if path is None:
        sys.stdout.write(text)
        return
    path.write_text(text)
    console.print(f"[green]Saved to {path}[/green]")


def reference_from_args(args):
    """(distribution, estimation) as get_qq_band takes them."""
    if args.params is not None:
        return ReferenceDistribution(args.dist, args.params), None
    variant = args.estimation or (DEFAULT_ESTIMATION if args.dist == Family.NORMAL.value else Estimation.MLE.value)
    return args.dist, EstimationMethod(Estimation(variant))


def store_from_args(args) -> TableStore:
    return TableStore(args.table_dir) if args.table_dir else default_store()


def build_band(args, observations=None):
    distribution, estimation = reference_from_args(args)
    options = dict(
        alpha=args.alpha,
        method=args.method,
        side=args.side,
        expected_mode=args.expected,
        policy=args.policy,
        store=store_from_args(args),
    )
    if getattr(args, "pp", False):
        n = args.neff or (len(observations) if observations is not None else args.n)
        band = get_pp_band(n, **options)
        return replace(band, effective_n=True) if args.neff else band
    if getattr(args, "neff", None):
        return band_effective_n(
            args.neff, distribution, observations=observations, estimation=estimation, c_alpha=args.c_alpha, **options
        )
    return get_qq_band(
        n=None if observations is not None else args.n,
        observations=observations,
        distribution=distribution,
        estimation=estimation,
        c_alpha=args.c_alpha,
        **options,
    )


def show_band_summary(band):
    table = Table(title="Testing band")
    table.add_column("Field", style="cyan")
    table.add_column("Value", style="white")
    table.add_row("n", str(band.n))
    table.add_row("alpha", f"{band.alpha:g}")
    table.add_row("method", f"{band.method.value} ({band.side.value})")
    table.add_row("eta", "-" if band.eta is None else f"{band.eta:.6g}")
    table.add_row("eta path", band.path or "-")
    table.add_row("reference", f"{band.distribution.family.value} {band.distribution.params}")
    console.print(table)


def cmd_band(args) -> int:
    loader = DataLoader()
    observations = loader.load(args.data, args.col) if args.data else None
    band = build_band(args, observations)
    if args.pp and observations is not None:
        distribution, estimation = reference_from_args(args)
        observations, _ = pp_values(observations, distribution, estimation)
    if band.effective_n:
        observations = None
    show_band_summary(band)
    write_output(emit_table(band, args.format, observations=observations), args.output)
    return 0


def cmd_plot(args) -> int:
    loader = DataLoader()
    data = loader.load(args.data, args.col)
    overlays = [loader.load(path, args.col) for path in args.overlay]
    if args.pp:
        distribution, estimation = reference_from_args(args)
        data, _ = pp_values(data, distribution, estimation)
        overlays = [pp_values(extra, distribution, estimation)[0] for extra in overlays]
    band = build_band(args, data)

    labels = [args.data.name] + [path.name for path in args.overlay]
    options = PlotOptions(
        difference=args.difference,
        log10=args.log10,
        overlay=overlays,
        labels=labels,
        title=args.title,
        width=args.width,
        height=args.height,
        x_label="expected probability" if args.pp else None,
        y_label="observed probability" if args.pp else None,
    )
    spec = make_plot(data, band, options)
    show_band_summary(band)
    write_output(emit_svg(spec), args.output)
    return 0


def cmd_local_level(args) -> int:
    if args.from_bounds:
        if len(args.from_bounds) > 2:
            raise ConfigError("--from-bounds takes a lower-bounds file and optionally an upper-bounds file")
        loader = DataLoader()
        h = loader.load_values(args.from_bounds[0])
        if len(args.from_bounds) == 2:
            level = global_level_two_sided(h, loader.load_values(args.from_bounds[1]))
        else:
            level = global_level_one_sided_exact(h)
        sys.stdout.write(f"{level!r}\n")
        return 0

    query = LocalLevelQuery(n=args.n, alpha=args.alpha, side=Side.parse(args.side), policy=Policy(args.policy))
    store = TableStore(args.table_dir) if args.table_dir else default_store()
    resolved = resolve_eta(query, store=store, tol=args.tol, c_alpha=args.c_alpha)
    console.print(f"n={args.n} alpha={args.alpha:g} {query.side.value}: eta via {resolved.path}")
    sys.stdout.write(f"{resolved.eta!r}\n")
    return 0


def cmd_table(args) -> int:
    side = Side.parse(args.side)
    table = table_build(args.alpha, side, args.grid, tol=args.tol, max_workers=args.workers)
    path = args.output or table_dir() / table_filename(side, args.alpha)
    write_table(table, path)
    console.print(f"[green]Table with {len(table.grid)} rows saved to {path}[/green]")
    return 0


def cmd_check(args) -> int:
    observations = DataLoader().load(args.data, args.col)
    if args.band:
        try:
            doc = parse_band_document(args.band.read_text())
        except (OSError, ValueError, KeyError) as e:
            raise ConfigError(f"cannot read band file {args.band}: {e}")
        verdict = check_intervals(observations, doc["lower"], doc["upper"])
    else:
        verdict = band_check(observations, build_band(args, observations))
    sys.stdout.write(verdict.describe() + "\n")
    return 0


def _estimation(value: str) -> EstimationMethod:
    if value == Estimation.KNOWN.value:
        return EstimationMethod(Estimation.KNOWN, {"mu": 0.0, "sigma": 1.0})
    return EstimationMethod(Estimation(value))


def cmd_simulate_type1(args) -> int:
    report = type1_study(
        args.n, _estimation(args.estimation), args.alpha, args.replicates, args.seed, max_workers=args.workers
    )
    write_output(report.model_dump_json(indent=2) + "\n", args.output)
    return 0


def cmd_simulate_power(args) -> int:
    alt_df = None if args.normal else args.alt_df
    common = dict(
        alt_df=alt_df,
        n=args.n,
        alpha=args.alpha,
        replicates=args.replicates,
        seed=args.seed,
        estimator=_estimation(args.estimation),
        max_workers=args.workers,
    )
    if args.method == "both":
        result = power_comparison(**common)
    else:
        result = power_study(args.method, **common)
    write_output(result.model_dump_json(indent=2) + "\n", args.output)
    return 0


def cmd_simulate_calibration(args) -> int:
    p_values = chisq_calibration_generate(args.s, args.a, args.b, args.tables, args.seed, args.statistic)
    if args.output:
        write_values(p_values, args.output)
        console.print(f"[green]{len(p_values)} p-values saved to {args.output}[/green]")
    else:
        sys.stdout.write("".join(f"{p!r}\n" for p in p_values.tolist()))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except EllbandError as e:
        console.print(f"[red]error:[/red] {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
