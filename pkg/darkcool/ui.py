# ui.py
import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

console = Console(stderr=True)


def setup_logging(verbosity=0):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logger = logging.getLogger("darkcool")
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=console, show_path=False, rich_tracebacks=True))
    logger.setLevel(level)
    logger.propagate = False


def show_progress():
    """tqdm bars only make sense on an interactive terminal."""
    return console.is_terminal


def print_written(paths):
    for path in paths:
        console.print(f"[green]✓[/green] {path}")


def print_trajectory_summary(trajectory, checkpoints=()):
    table = Table(title="Ground-state population", show_header=True)
    table.add_column("pulse", justify="right")
    table.add_column("P_g0", justify="right")
    table.add_column("<n>", justify="right")
    last = len(trajectory) - 1
    shown = sorted({0, last, *[c for c in checkpoints if 0 <= c <= last]})
    for pulse in shown:
        record = trajectory.records[pulse]
        table.add_row(str(pulse), f"{record.ground_population:.4f}", f"{record.mean_quanta:.3f}")
    console.print(table)


def print_sweep_summary(result):
    table = Table(title=f"Sweep over {result.parameter}")
    table.add_column(result.parameter, justify="right")
    for checkpoint in result.checkpoints:
        table.add_column(f"P_g0 @ {checkpoint}", justify="right")
    for point in result.points:
        value = point.width if result.parameter == "width" else point.exponent
        table.add_row(f"{value:g}", *[f"{p:.4f}" for p in point.ground_populations])
    console.print(table)


def print_widths(widths, harmonic):
    table = Table(title="Eigenstate rms widths (a0)")
    table.add_column("n", justify="right")
    table.add_column("trap", justify="right")
    table.add_column("harmonic", justify="right")
    table.add_column("ratio", justify="right")
    for n, (width, reference) in enumerate(zip(widths, harmonic)):
        table.add_row(str(n), f"{width:.4f}", f"{reference:.4f}", f"{width / reference:.3f}")
    console.print(table)


def print_error(report):
    if console.is_terminal:
        console.print(f"[red]✗ {report['error']}:[/red] {report['message']}")
