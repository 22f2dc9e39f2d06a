"""pdflap-cli — persistent directed flag Laplacian spectra from the shell.

Exit codes:
    0 — success
    1 — usage, validation, parse or I/O error
    2 — verification failure (spectral Betti number != exact oracle)
    3 — capacity or eigensolver error
"""

from __future__ import annotations

import logging
import os
import sys
import time
from importlib import metadata
from typing import Any, Callable, Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

from . import __version__
from .boundary import boundary_matrix, verify_chain_complex, write_triplets
from .errors import (
    EXIT_SUCCESS,
    EXIT_USAGE,
    PdflapError,
    ValidationError,
    VerificationError,
)
from .plot import emit_plot
from .schemas import INPUT_FORMATS, REDUCTION_MODES, Report, RunConfig, format_value
from .service import SpectraService
from .utils import CONFIG_DIR, emit_csv, emit_json, ensure_dir, write_output


def _is_utf8_capable() -> bool:
    """Check if stderr supports UTF-8 output."""
    try:
        encoding = getattr(sys.stderr, "encoding", None) or ""
        return "utf" in encoding.lower()
    except Exception:
        return False


# Force safe box-drawing and no colour when the terminal can't handle it
_SAFE = not _is_utf8_capable()
console = Console(
    stderr=True,
    safe_box=_SAFE,
    no_color=not sys.stderr.isatty(),
)

# Pick an ASCII-safe spinner when the terminal lacks UTF-8
_SPINNER = "line" if _SAFE else "dots"
_HELP_OPTION_NAMES = {"help_option_names": ["-h", "--help"]}


def _configure_logging(quiet: bool, verbose: bool) -> None:
    """Route the package logger through rich on stderr."""
    logger = logging.getLogger("pdflap")
    logger.handlers[:] = [
        RichHandler(console=console, show_time=False, show_path=False, markup=False)
    ]
    logger.setLevel(logging.ERROR if quiet else logging.DEBUG if verbose else logging.WARNING)
    logger.propagate = False


def _fail(label: str, error: PdflapError) -> None:
    console.print(f"[red]{label}:[/red] {escape(str(error))}")
    raise SystemExit(error.exit_code)


# ---------------------------------------------------------------------------
# Click parameter validation callbacks
# ---------------------------------------------------------------------------

def _validate_max_dim(ctx: click.Context, param: click.Parameter, value: int) -> int:
    if value < 0:
        raise click.BadParameter(
            f"Must be a non-negative integer, got {value}.",
            param_hint="'--max-dim'",
        )
    return value


def _validate_workers(ctx: click.Context, param: click.Parameter, value: int) -> int:
    if value < 1:
        raise click.BadParameter(
            f"Must be a positive integer, got {value}.",
            param_hint="'--workers'",
        )
    return value


def _input_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by every command that reads an input digraph."""
    options = [
        click.option("-i", "--input", "input_path", type=click.Path(), required=True,
                     help="Input file (flag file, distance CSV or molecule)."),
        click.option("-f", "--format", "fmt", type=click.Choice(list(INPUT_FORMATS)),
                     default="flag", show_default=True, help="Input format."),
        click.option("-k", "--max-dim", type=int, default=2, show_default=True,
                     callback=_validate_max_dim, help="Highest Laplacian dimension."),
        click.option("--cutoff", type=float, default=8.0, show_default=True,
                     help="Distance cutoff in Å (distmat, mol)."),
        click.option("--round", "rounding", type=float, default=0.001, show_default=True,
                     help="Rounding step for edge distances; 0 disables rounding."),
        click.option("--strict", is_flag=True, default=False,
                     help="Reject edges entering before their endpoints instead of clamping."),
        click.option("--bonds-at-zero", is_flag=True, default=False,
                     help="Ligand bonds enter at filtration 0 (mol)."),
        click.option("--all-ligand-pairs", is_flag=True, default=False,
                     help="Connect every ligand pair within the cutoff, not only bonds (mol)."),
        click.option("--electronegativity", type=click.Path(), default=None,
                     help="JSON table of element electronegativities (mol)."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


# ---------------------------------------------------------------------------
# CLI group
# ---------------------------------------------------------------------------

class _ExitCodeGroup(click.Group):
    """Group that reports click usage errors with exit code 1."""

    def main(self, *args: Any, **kwargs: Any) -> Any:
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            raise SystemExit(EXIT_USAGE)
        except click.Abort:
            console.print("Aborted!")
            raise SystemExit(EXIT_USAGE)
        raise SystemExit(rv if isinstance(rv, int) else EXIT_SUCCESS)


@click.group(cls=_ExitCodeGroup, context_settings=_HELP_OPTION_NAMES)
@click.version_option(__version__, prog_name="pdflap-cli")
def main() -> None:
    """pdflap-cli — persistent directed flag Laplacian spectra."""


# ---------------------------------------------------------------------------
# run command
# ---------------------------------------------------------------------------

@main.command(context_settings=_HELP_OPTION_NAMES)
@_input_options
@click.option("-p", "--pairs", type=str, default="consecutive", show_default=True,
              help="consecutive, diagonal, all, or an explicit list like '0:1,1:inf'.")
@click.option("--zero-tol", type=float, default=None,
              help="Absolute zero threshold for eigenvalues (default: 1e-8 * max(1, ||L||)).")
@click.option("--verify", is_flag=True, default=False,
              help="Cross-check every Betti number against the exact oracle.")
@click.option("--out-csv", type=click.Path(), default=None, help="Write the CSV summary here.")
@click.option("--out-json", type=click.Path(), default=None, help="Write the full JSON report here.")
@click.option("--plot", type=click.Path(), default=None, help="Write an SVG plot here.")
@click.option("--reduction", type=click.Choice(list(REDUCTION_MODES)), default="auto",
              show_default=True, help="Null-space method for persistent chain bases.")
@click.option("-w", "--workers", type=int, default=1, show_default=True,
              callback=_validate_workers, help="Worker threads for (k, a, b) items.")
@click.option("-T", "--timings", is_flag=True, default=False,
              help="Print timings (parse, build, spectra, total).")
@click.option("-q", "--quiet", is_flag=True, default=False,
              help="Suppress progress and status output.")
@click.option("-v", "--verbose", is_flag=True, default=False,
              help="Debug logging.")
def run(
    input_path: str,
    fmt: str,
    max_dim: int,
    cutoff: float,
    rounding: float,
    strict: bool,
    bonds_at_zero: bool,
    all_ligand_pairs: bool,
    electronegativity: Optional[str],
    pairs: str,
    zero_tol: Optional[float],
    verify: bool,
    out_csv: Optional[str],
    out_json: Optional[str],
    plot: Optional[str],
    reduction: str,
    workers: int,
    timings: bool,
    quiet: bool,
    verbose: bool,
) -> None:
    """Compute persistent Laplacian spectra for every k and scheduled pair.

    Without --out-csv or --out-json the CSV summary goes to stdout.

    \b
    Exit codes:
      0  success
      1  usage, parse or I/O error
      2  verification failure
      3  capacity or solver error
    """
    _configure_logging(quiet, verbose)

    # ---- Build config ----
    try:
        config = RunConfig(
            input_path=input_path,
            fmt=fmt,
            max_dim=max_dim,
            cutoff=cutoff,
            rounding=rounding,
            pairs=pairs,
            zero_tol=zero_tol,
            verify=verify,
            out_csv=out_csv,
            out_json=out_json,
            plot=plot,
            strict=strict,
            bonds_at_zero=bonds_at_zero,
            all_ligand_pairs=all_ligand_pairs,
            electronegativity=electronegativity,
            reduction=reduction,
            workers=workers,
        )
    except ValidationError as e:
        _fail("Validation error", e)

    svc = SpectraService(config)

    # ---- Compute ----
    progress_ctx = Progress(
        SpinnerColumn(spinner_name=_SPINNER),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(complete_style="green"),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        disable=quiet,
    )

    failure: Optional[VerificationError] = None
    try:
        with progress_ctx as progress:
            task_id = progress.add_task("Spectra", total=0)

            def _on_progress(label: str, current: int, total: int) -> None:
                progress.update(task_id, total=total, completed=current,
                                description=f"[cyan]{escape(label)}[/cyan]")

            report = svc.run(on_progress=_on_progress)
    except VerificationError as e:
        failure = e
        report = e.report  # type: ignore[assignment]
    except PdflapError as e:
        _fail("Error", e)

    # ---- Output ----
    try:
        _output_report(report, config, quiet)
    except PdflapError as e:
        _fail("Output error", e)

    if timings:
        _print_timings(svc.timings)

    if failure is not None:
        console.print(f"[red]Verification failed:[/red] {escape(str(failure))}")
        for line in failure.mismatches:
            console.print(f"  {escape(line)}")
        raise SystemExit(failure.exit_code)

    if not quiet:
        console.print(
            f"[dim]{len(report.records)} spectra over {len(report.provenance.get('pairs', []))} "
            f"pair(s), k = 0..{config.max_dim}[/dim]"
        )
        if verify:
            console.print("[green]All Betti numbers match the exact oracle.[/green]")
    raise SystemExit(EXIT_SUCCESS)


# ---------------------------------------------------------------------------
# Output dispatcher
# ---------------------------------------------------------------------------

def _output_report(report: Report, config: RunConfig, quiet: bool) -> None:
    """Write CSV, JSON and SVG as configured; CSV to stdout if no file is named."""
    written: list[str] = []
    if config.out_csv:
        write_output(config.out_csv, emit_csv(report))
        written.append(config.out_csv)
    if config.out_json:
        write_output(config.out_json, emit_json(report))
        written.append(config.out_json)
    if config.plot:
        write_output(config.plot, emit_plot(report))
        written.append(config.plot)
    if not config.out_csv and not config.out_json:
        sys.stdout.write(emit_csv(report))
    if not quiet:
        for path in written:
            console.print(f"[green]Results written to {escape(path)}[/green]")


def _print_timings(timings: dict[str, float]) -> None:
    """Print a compact timing summary to stderr."""
    console.print("[dim]Timings:[/dim]")
    for stage in ("parse", "build", "spectra", "verify", "total"):
        if stage in timings:
            console.print(f"[dim]  {stage}:[/dim] {timings[stage]:.3f}s")


# ---------------------------------------------------------------------------
# inspect command
# ---------------------------------------------------------------------------

@main.command(context_settings=_HELP_OPTION_NAMES)
@_input_options
@click.option("--triplets", "triplet_dir", type=click.Path(file_okay=False), default=None,
              help="Dump every boundary matrix at the last grid value as 'row col value' files.")
@click.option("-v", "--verbose", is_flag=True, default=False, help="Debug logging.")
def inspect(
    input_path: str,
    fmt: str,
    max_dim: int,
    cutoff: float,
    rounding: float,
    strict: bool,
    bonds_at_zero: bool,
    all_ligand_pairs: bool,
    electronegativity: Optional[str],
    triplet_dir: Optional[str],
    verbose: bool,
) -> None:
    """Show simplex counts and the filtration grid of an input."""
    _configure_logging(False, verbose)
    try:
        svc = SpectraService(RunConfig(
            input_path=input_path,
            fmt=fmt,
            max_dim=max_dim,
            cutoff=cutoff,
            rounding=rounding,
            strict=strict,
            bonds_at_zero=bonds_at_zero,
            all_ligand_pairs=all_ligand_pairs,
            electronegativity=electronegativity,
        ))
        t0 = time.perf_counter()
        digraph = svc.load_digraph()
        complex_ = svc.build(digraph)
        elapsed = time.perf_counter() - t0
    except PdflapError as e:
        _fail("Error", e)

    top = complex_.grid.values[-1]
    table = Table(title=f"{escape(input_path)} ({fmt})")
    table.add_column("dim", justify="right")
    table.add_column("simplices", justify="right")
    table.add_column(f"alive at {format_value(complex_.grid.values[0])}", justify="right")
    for k in range(max_dim + 1):
        table.add_row(
            str(k),
            str(len(complex_.simplices[k])),
            str(complex_.count_at(k, complex_.grid.values[0])),
        )
    console.print(table)
    console.print(f"[dim]Vertices:[/dim] {digraph.n_vertices}  [dim]Edges:[/dim] {digraph.n_edges}")
    if digraph.clamped:
        console.print(f"[yellow]Clamped edge values:[/yellow] {len(digraph.clamped)}")
    console.print(
        "[dim]Grid:[/dim] " + ", ".join(format_value(g) for g in complex_.grid)
    )
    ok = verify_chain_complex(complex_, top)
    console.print(f"[dim]d∘d = 0:[/dim] {'yes' if ok else '[red]no[/red]'}")
    console.print(f"[dim]Built in {elapsed:.3f}s[/dim]")

    if triplet_dir:
        try:
            out_dir = ensure_dir(triplet_dir)
            for k in range(1, max_dim + 1):
                path = out_dir / f"d{k}.txt"
                write_output(path, write_triplets(boundary_matrix(complex_, k, top)))
                console.print(f"[green]Boundary d_{k} written to {escape(str(path))}[/green]")
        except PdflapError as e:
            _fail("Output error", e)
    raise SystemExit(EXIT_SUCCESS)


# ---------------------------------------------------------------------------
# info command
# ---------------------------------------------------------------------------

@main.command(context_settings=_HELP_OPTION_NAMES)
def info() -> None:
    """Show library versions and effective configuration."""
    import matplotlib
    import numpy
    import scipy

    from .laplacian import MAX_MATRIX_SIZE
    from .oracle import ORACLE_MAX_COLUMNS
    from .persistent import EXACT_COLUMN_LIMIT

    console.print(f"[bold]pdflap-cli[/bold] v{__version__}")
    console.print(f"  Python: {sys.version.split()[0]}")
    console.print(f"  NumPy: {numpy.__version__}")
    console.print(f"  SciPy: {scipy.__version__}")
    console.print(f"  Matplotlib: {matplotlib.__version__}")
    try:
        flagser_version = metadata.version("pyflagsercount")
    except metadata.PackageNotFoundError:
        flagser_version = "unknown"
    console.print(f"  pyflagsercount: {flagser_version}")
    console.print(f"  Config dir: {CONFIG_DIR}")
    console.print(f"  Max matrix size: {MAX_MATRIX_SIZE}")
    console.print(f"  Exact column limit: {EXACT_COLUMN_LIMIT}")
    console.print(f"  Oracle max columns: {ORACLE_MAX_COLUMNS}")
    electro = CONFIG_DIR / "electronegativity.json"
    console.print(
        f"  Electronegativity overrides: {electro if electro.is_file() else 'none (Pauling table)'}"
    )
    if os.environ.get("PDFLAP_CONFIG"):
        console.print("  [dim](config dir from PDFLAP_CONFIG)[/dim]")
