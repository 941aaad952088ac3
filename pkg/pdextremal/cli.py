"""Command line front end: `pdextremal <bounds|sweep|witness|solve|certify>`."""
from __future__ import annotations

import concurrent.futures
import contextlib
import csv
import dataclasses
import enum
import io
import json
import logging
import typing as t
from fractions import Fraction
from pathlib import Path

import click

from .bounds import BOUND_CSV_COLUMNS, BoundReport, bound_report, construction_params, gorbachev_constant, upper_bound
from .certify import CertifyConfig, doubly_positive_check
from .errors import DomainError, InfeasibleParametersError, NotEvenError, PDExtremalError
from .extremal import (
    LPResult, LPStatus, SigmaSupResult, SolverConfig, SolverMode, default_a_grid, gamma_lp, lp_certificate, make_atoms,
    primal_search, sigma_sup
)
from .functions import Constant, Cosine, CosPower, Gaussian, SampledTable
from .piecewise import PiecewiseLinearFn, QuadratureConfig, pl_dilated_triangle, pl_indicator
from .records import Record
from .utils import as_rational, format_decimal, format_rational, submit
from .witness import bogachev_search, build_H, lemma1_witness, verify_majorization

log = logging.getLogger(__name__)

EXIT_FAILED_CERTIFICATION = 1
EXIT_DOMAIN = 2
EXIT_UNWRITABLE = 3
EXIT_INFEASIBLE_PARAMETERS = 4
EXIT_LP_INFEASIBLE = 5
EXIT_ITERATION_LIMIT = 6

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
PRIMAL_CONTEXT_PERIOD = 16.0
PRIMAL_CONTEXT_STARTS = 4
SANDWICH_TOLERANCE = 1e-6


class CLIError(click.ClickException):
    """A ClickException carrying one of the documented exit codes."""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class RationalParamType(click.ParamType):
    """Exact rationals from "a/b", integers or decimal strings."""

    name = "rational"

    def convert(self, value, param, ctx):  # noqa: D102
        if isinstance(value, Fraction):
            return value
        try:
            return as_rational(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not an exact rational", param, ctx)


class GridParamType(click.ParamType):
    """A grid given as "lo:hi:count" (endpoints included) or as a comma separated list of rationals."""

    name = "grid"

    def convert(self, value, param, ctx):  # noqa: D102
        if isinstance(value, tuple):
            return value
        try:
            if ":" in value:
                lo, hi, count = value.split(":")
                lo, hi, count = as_rational(lo), as_rational(hi), int(count)
                if count < 1 or (count == 1 and lo != hi):
                    raise ValueError
                if count == 1:
                    return (lo,)
                return tuple(lo + (hi - lo) * Fraction(i, count - 1) for i in range(count))
            return tuple(as_rational(item) for item in value.split(",") if item.strip())
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is neither lo:hi:count nor a list of rationals", param, ctx)


RATIONAL = RationalParamType()
GRID = GridParamType()


@contextlib.contextmanager
def _domain_errors() -> t.Iterator[None]:
    """Translate library errors into the documented exit codes."""
    try:
        yield
    except InfeasibleParametersError as error:
        raise CLIError(str(error), EXIT_INFEASIBLE_PARAMETERS) from error
    except (DomainError, NotEvenError) as error:
        raise CLIError(str(error), EXIT_DOMAIN) from error
    except PDExtremalError as error:
        raise CLIError(str(error), EXIT_FAILED_CERTIFICATION) from error


def _plain(value: t.Any) -> t.Any:
    """A table cell: rationals as approximate decimals, integers exactly."""
    match value:
        case None:
            return ""
        case bool():
            return str(value).lower()
        case Fraction() if value.denominator == 1:
            return str(value.numerator)
        case Fraction():
            return f"~{format_decimal(value)}"
        case float():
            return f"{value:.10g}"
        case PiecewiseLinearFn():
            return f"<{len(value.knots)} breakpoints>"
        case Record():
            return f"<{value.kind}>"
        case enum.Enum():
            return value.value
        case tuple() if len(value) <= 6:
            return "(" + ", ".join(str(_plain(item)) for item in value) + ")"
        case tuple():
            return f"<{len(value)} values>"
        case _:
            return str(value)


def _flat_row(record: Record) -> dict[str, str]:
    """CSV cells for the scalar fields of `record`."""
    if isinstance(record, BoundReport):
        return record.csv_row()
    row = {}
    for field in dataclasses.fields(record):
        value = getattr(record, field.name)
        match value:
            case Fraction():
                row[field.name] = format_rational(value)
            case PiecewiseLinearFn() | Record() | tuple() | list():
                continue
            case _:
                row[field.name] = _plain(value)
    return row


def _render_table(records: t.Sequence[Record]) -> str:
    if len(records) == 1:
        record = records[0]
        pairs = [(field.name, _plain(getattr(record, field.name))) for field in dataclasses.fields(record)]
        width = max(len(name) for name, _ in pairs)
        lines = [f"{name.ljust(width)}  {value}" for name, value in pairs]
        for field in dataclasses.fields(record):
            nested = getattr(record, field.name)
            if isinstance(nested, Record):
                lines += ["", f"[{field.name}]", _render_table([nested])]
        return "\n".join(lines)
    rows = [{field.name: str(_plain(getattr(r, field.name))) for field in dataclasses.fields(r)} for r in records]
    columns = [name for name in rows[0] if not all(row[name].startswith("<") for row in rows)]
    widths = {name: max(len(name), *(len(row[name]) for row in rows)) for name in columns}
    lines = ["  ".join(name.ljust(widths[name]) for name in columns)]
    lines += ["  ".join(row[name].ljust(widths[name]) for name in columns) for row in rows]
    return "\n".join(lines)


def _render_csv(records: t.Sequence[Record]) -> str:
    rows = [_flat_row(record) for record in records]
    columns = list(BOUND_CSV_COLUMNS) if all(isinstance(r, BoundReport) for r in records) else list(rows[0])
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def render(records: t.Sequence[Record], output_format: str) -> str:
    """Render records as JSON (one object, or an array), CSV with a header row, or a human table."""
    match output_format:
        case "json":
            data = [record.to_dict() for record in records]
            return json.dumps(data[0] if len(data) == 1 else data, indent=2)
        case "csv":
            return _render_csv(records)
        case _:
            return _render_table(records)


def emit(records: Record | t.Sequence[Record], output_format: str, output: Path | None, notes: t.Sequence[str] = ()):
    """
    Write the rendered records to `output`, or echo them.

    Notes follow a table; with JSON or CSV they go to the log so the output stays one parseable document.
    """
    records = [records] if isinstance(records, Record) else list(records)
    text = render(records, output_format)
    if output_format == "table" and notes:
        text = "\n".join([text, "", *notes])
    else:
        for note in notes:
            log.info("%s", note)
    if output is None:
        click.echo(text)
        return
    try:
        output.write_text(text if text.endswith("\n") else text + "\n")
    except OSError as error:
        raise CLIError(f"cannot write {output}: {error.strerror or error}", EXIT_UNWRITABLE) from error
    log.info("Wrote %d record(s) to %s.", len(records), output)


def output_options(default_format: str = "table") -> t.Callable:
    """The `--format` and `--output` options shared by every command."""

    def decorator(command: t.Callable) -> t.Callable:
        command = click.option(
            "--output",
            type=click.Path(dir_okay=False, path_type=Path),
            default=None,
            help="Write to this file instead of standard output.",
        )(command)
        return click.option(
            "--format",
            "output_format",
            type=click.Choice(["json", "csv", "table"]),
            default=default_format,
            show_default=True,
            help="Output format.",
        )(command)

    return decorator


@click.group()
@click.option("-v", "--verbose", count=True, help="Log more; repeat for debug output.")
def main(verbose: int):
    """Exact bounds, witnesses and extremal programs for window ratios of doubly positive functions."""
    level = max(logging.DEBUG, logging.WARNING - 10 * verbose)
    logging.basicConfig(level=level, format=LOG_FORMAT)


@main.command()
@click.option("--ell", type=RATIONAL, required=True, help="Window half-length, e.g. 3/2 or 1.25.")
@output_options()
def bounds(ell: Fraction, output_format: str, output: Path | None):
    """Closed-form lower and upper bounds at one ell."""
    with _domain_errors():
        report = bound_report(ell)
    notes = []
    if ell == 2:
        notes.append(f"independent reference bound at 2: pi^2 ~ {gorbachev_constant():.6f}")
    emit(report, output_format, output, notes)


def _sweep_grid(start: Fraction, stop: Fraction, step: Fraction) -> list[Fraction]:
    if step <= 0:
        raise CLIError("--step must be positive", EXIT_DOMAIN)
    if start >= stop:
        raise CLIError("--from must be smaller than --to", EXIT_DOMAIN)
    if start <= 0:
        raise CLIError("--from must be positive", EXIT_DOMAIN)
    count = int((stop - start) / step) + 1
    return [start + i * step for i in range(count)]


@main.command()
@click.option("--from", "start", type=RATIONAL, required=True, help="First ell.")
@click.option("--to", "stop", type=RATIONAL, required=True, help="Last ell (included when on the grid).")
@click.option("--step", type=RATIONAL, required=True, help="Grid step.")
@click.option("--workers", type=click.IntRange(min=1), default=4, show_default=True, help="Worker threads.")
@output_options(default_format="csv")
def sweep(start: Fraction, stop: Fraction, step: Fraction, workers: int, output_format: str, output: Path | None):
    """Tabulate the closed-form bounds over a rational grid of ell, one row per ell."""
    grid = _sweep_grid(start, stop, step)
    with _domain_errors(), concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [submit(executor, bound_report, ell, suppressed_exceptions=(DomainError,)) for ell in grid]
        reports = [future.result() for future in futures]
    emit(reports, output_format, output)


@main.group()
def witness():
    """Witness functions behind the bounds."""


@witness.command("lemma1")
@click.option("--k", type=click.IntRange(min=1), required=True, help="The integer the witness concentrates around.")
@click.option("--eps", type=RATIONAL, default="1/10", show_default=True, help="Distance above k.")
@click.option("--tol", type=float, default=1e-3, show_default=True, help="Allowed mass outside the comb windows.")
@click.option("--quad-tol", type=float, default=1e-8, show_default=True, help="Relative Simpson tolerance.")
@click.option("--a-step", type=RATIONAL, default=None, help="Window offset step (default eps/10).")
@output_options()
def witness_lemma1(
    k: int,
    eps: Fraction,
    tol: float,
    quad_tol: float,
    a_step: Fraction | None,
    output_format: str,
    output: Path | None,
):
    """Concentrated cosine power: central ratio near 2k + 1, sliding ratio near 2k."""
    with _domain_errors():
        report = lemma1_witness(k, eps, tol, QuadratureConfig(relative_tolerance=quad_tol), a_step)
    emit(report, output_format, output)
    if not report.certified:
        raise CLIError("the witness failed certification", EXIT_FAILED_CERTIFICATION)


@witness.command("lemma2")
@click.option("--ell", type=RATIONAL, required=True, help="Window length; (k, p) follow from it.")
@click.option("--a", type=RATIONAL, default="0", show_default=True, help="Start of the progression.")
@output_options()
def witness_lemma2(ell: Fraction, a: Fraction, output_format: str, output: Path | None):
    """Exact majorization of the progression sum of h atoms."""
    with _domain_errors():
        k, p = construction_params(ell)
        certificate = verify_majorization(a, k, p)
    emit(certificate, output_format, output)
    if not certificate.holds:
        raise CLIError(f"majorization fails: {certificate.violation}", EXIT_FAILED_CERTIFICATION)


@witness.command("bogachev")
@click.option("--centers", type=GRID, default="0:1:11", show_default=True, help="Bump centre grid.")
@click.option("--widths", type=GRID, default="1/10:1:10", show_default=True, help="Bump width grid.")
@click.option("--halfwidth", type=RATIONAL, default="1", show_default=True, help="Window half-width.")
@click.option("--a-step", type=RATIONAL, default="1/20", show_default=True, help="Window offset step.")
@click.option("--central-weights", type=GRID, default="0", show_default=True, help="Weights of a central bump.")
@output_options()
def witness_bogachev(
    centers: tuple[Fraction, ...],
    widths: tuple[Fraction, ...],
    halfwidth: Fraction,
    a_step: Fraction,
    central_weights: tuple[Fraction, ...],
    output_format: str,
    output: Path | None,
):
    """Search for a shifted window holding more of a doubly positive f than the central one."""
    with _domain_errors():
        report = bogachev_search(centers, widths, halfwidth, a_step, central_weights)
    emit(report, output_format, output, [f"exact gap: {format_rational(report.gap)}"])


@main.group()
def solve():
    """Extremal programs: dual LP bounds and primal estimates."""


def atom_options(command: t.Callable) -> t.Callable:
    """Options describing the atom family and the solver."""
    options = [
        click.option("--shifts", type=click.IntRange(min=1), default=8, show_default=True, help="h-atom count."),
        click.option("--dilations", type=click.IntRange(min=1), default=4, show_default=True, help="Triangle count."),
        click.option(
            "--progression-shifts/--no-progression-shifts",
            default=True,
            show_default=True,
            help="Add the arithmetic-progression atoms of the explicit construction.",
        ),
        click.option(
            "--mode",
            type=click.Choice([mode.value for mode in SolverMode]),
            default=SolverMode.AUTO.value,
            show_default=True,
            help="Solver arithmetic.",
        ),
        click.option("--max-iterations", type=click.IntRange(min=1), default=50_000, show_default=True),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _status_exit(statuses: t.Iterable[LPStatus], certified: bool) -> None:
    statuses = set(statuses)
    if LPStatus.ITERATION_LIMIT in statuses:
        raise CLIError("the simplex iteration limit was reached", EXIT_ITERATION_LIMIT)
    if statuses & {LPStatus.INFEASIBLE, LPStatus.UNBOUNDED}:
        raise CLIError("the program has no optimal solution for this atom family", EXIT_LP_INFEASIBLE)
    if not certified:
        raise CLIError("the reconstructed H failed the exact check", EXIT_FAILED_CERTIFICATION)


@solve.command("gamma")
@click.option("--ell", type=RATIONAL, required=True, help="Window half-length, at least 1.")
@atom_options
@click.option("--certificate", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Certificate file.")
@click.option(
    "--primal-harmonics",
    type=click.IntRange(min=0),
    default=8,
    show_default=True,
    help="Harmonics of the primal estimate printed next to the bound; 0 skips it.",
)
@click.option("--seed", type=int, default=0, envvar="PDEXTREMAL_SEED", show_default=True, help="Primal random seed.")
@output_options()
def solve_gamma(
    ell: Fraction,
    shifts: int,
    dilations: int,
    progression_shifts: bool,
    mode: str,
    max_iterations: int,
    certificate: Path | None,
    primal_harmonics: int,
    seed: int,
    output_format: str,
    output: Path | None,
):
    """Centred dual program; A_opt bounds the central ratio."""
    with _domain_errors():
        family = make_atoms(ell, shifts, dilations, progression_shifts)
        result = gamma_lp(ell, family, SolverConfig(SolverMode(mode), max_iterations))
        closed_form = upper_bound(ell)[0]
    notes = [f"closed-form upper bound: {format_rational(closed_form)} (~{format_decimal(closed_form)})"]
    if primal_harmonics:
        period = max(PRIMAL_CONTEXT_PERIOD, 4 * float(ell))
        with _domain_errors():
            primal = primal_search(ell, primal_harmonics, period, seed=seed, starts=PRIMAL_CONTEXT_STARTS)
        notes.append(f"primal lower estimate (J={primal_harmonics}): {primal.lower_estimate:.6f}")
        if result.A_opt is not None and primal.lower_estimate > result.A_opt + SANDWICH_TOLERANCE:
            log.warning("Primal estimate %.9f exceeds the dual bound %s.", primal.lower_estimate, result.A_opt)
    _emit_lp(result, certificate, output_format, output, notes)


@solve.command("sigma")
@click.option("--ell", type=RATIONAL, required=True, help="Window length.")
@click.option("--a-grid", type=GRID, default=None, help="Offsets as lo:hi:count (default 0:2ell:17).")
@atom_options
@output_options()
def solve_sigma(
    ell: Fraction,
    a_grid: tuple[Fraction, ...] | None,
    shifts: int,
    dilations: int,
    progression_shifts: bool,
    mode: str,
    max_iterations: int,
    output_format: str,
    output: Path | None,
):
    """Window-pair dual programs over a grid of offsets, and their maximum."""
    with _domain_errors():
        grid = a_grid if a_grid is not None else default_a_grid(ell)
        family = make_atoms(ell, shifts, dilations, progression_shifts)
        result: SigmaSupResult = sigma_sup(ell, grid, family, SolverConfig(SolverMode(mode), max_iterations))
    notes = [f"max over {len(grid)} offsets: {_plain(result.bound)} at a = {_plain(result.argmax_a)}"]
    if ell / 2 >= 1:
        notes.append(f"closed-form bound at ell/2: {_plain(upper_bound(ell / 2)[0])}")
    emit(list(result.per_a) if output_format == "table" else result, output_format, output, notes)
    if result.bound is None:
        raise CLIError("no offset gave an optimal program", EXIT_LP_INFEASIBLE)
    solved = [r for r in result.per_a if r.A_opt is not None]
    _status_exit((r.status for r in result.per_a), all(r.independent_check for r in solved))


@solve.command("primal")
@click.option("--ell", type=RATIONAL, required=True, help="Window half-length.")
@click.option("--harmonics", type=click.IntRange(min=0), default=8, show_default=True, help="Highest harmonic J.")
@click.option("--period", type=float, default=16.0, show_default=True, help="Base period P > 2 max(ell, 1).")
@click.option("--iters", type=click.IntRange(min=1), default=200, show_default=True, help="Sweeps per start.")
@click.option("--starts", type=click.IntRange(min=0), default=20, show_default=True, help="Random starts.")
@click.option("--seed", type=int, default=0, envvar="PDEXTREMAL_SEED", show_default=True, help="Random seed.")
@output_options()
def solve_primal(
    ell: Fraction,
    harmonics: int,
    period: float,
    iters: int,
    starts: int,
    seed: int,
    output_format: str,
    output: Path | None,
):
    """Lower estimate of the central ratio from squared cosine polynomials."""
    with _domain_errors():
        result = primal_search(ell, harmonics, period, iters, seed, starts)
    notes = []
    if ell >= 1:
        notes.append(f"closed-form upper bound: {_plain(upper_bound(ell)[0])}")
    emit(result, output_format, output, notes)


def _emit_lp(result: LPResult, certificate: Path | None, output_format: str, output: Path | None, notes: list[str]):
    emit(result, output_format, output, notes)
    if certificate is not None and result.A_opt is not None:
        emit(lp_certificate(result), "json", certificate)
    _status_exit([result.status], result.independent_check)


FUNCTIONS = ("cospow", "cosine", "gaussian", "constant", "triangle", "indicator", "H")
DEFAULT_COSPOW_PERIOD = Fraction(41, 40)


@main.command()
@click.option("--function", "name", type=click.Choice(FUNCTIONS), default=None, help="Built-in function to test.")
@click.option("--csv", "csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Sample table.")
@click.option("--p", type=RATIONAL, default=None, help="cospow period (default 41/40) or H parameter p (default 1).")
@click.option("--n", type=click.IntRange(min=1), default=20, show_default=True, help="cospow half-power.")
@click.option("--frequency", type=float, default=1.0, show_default=True, help="cosine frequency.")
@click.option("--scale", type=RATIONAL, default="1", show_default=True, help="Gaussian scale or triangle width.")
@click.option("--lo", type=RATIONAL, default=None, help="indicator left end (default -scale).")
@click.option("--hi", type=RATIONAL, default=None, help="indicator right end (default scale).")
@click.option("--a", type=RATIONAL, default="1", show_default=True, help="H progression start.")
@click.option("--k", type=click.IntRange(min=0), default=0, show_default=True, help="H progression length.")
@click.option("--window", type=(float, float), default=(-4.0, 4.0), show_default=True, help="Sampling range.")
@click.option("--step", type=float, default=0.05, show_default=True, help="Toeplitz grid step.")
@click.option("--lags", type=click.IntRange(min=2), default=128, show_default=True, help="Toeplitz size.")
@click.option("--tol", type=float, default=1e-9, show_default=True, help="Relative eigenvalue tolerance.")
@output_options()
def certify(
    name: str | None,
    csv_path: Path | None,
    p: Fraction | None,
    n: int,
    frequency: float,
    scale: Fraction,
    lo: Fraction | None,
    hi: Fraction | None,
    a: Fraction,
    k: int,
    window: tuple[float, float],
    step: float,
    lags: int,
    tol: float,
    output_format: str,
    output: Path | None,
):
    """Check positive definiteness (sampled Toeplitz test) and nonnegativity of a function."""
    if (name is None) == (csv_path is None):
        raise CLIError("give exactly one of --function and --csv", EXIT_DOMAIN)
    with _domain_errors():
        match name:
            case "cospow":
                f = CosPower(DEFAULT_COSPOW_PERIOD if p is None else p, n)
            case "cosine":
                f = Cosine(frequency)
            case "gaussian":
                f = Gaussian(float(scale))
            case "constant":
                f = Constant(float(scale))
            case "triangle":
                f = pl_dilated_triangle(scale)
            case "indicator":
                f = pl_indicator(-scale if lo is None else lo, scale if hi is None else hi)
            case "H":
                f = build_H(a, k, 1 if p is None else p)
            case _:
                f = SampledTable.from_csv(csv_path)
        result = doubly_positive_check(f, CertifyConfig(step, lags, tol, window))
    emit(result, output_format, output)
    if not result.passed:
        raise CLIError(f"{result.function} is not doubly positive", EXIT_FAILED_CERTIFICATION)
