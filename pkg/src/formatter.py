"""
Module for formatting results.

Plain-text formats (vectors, labeled spectral values) are what scripts
consume; the rich renderables are for people reading a terminal.
"""

from rich import box
from rich.panel import Panel
from rich.table import Table

from .errors import ConfigError
from .experiment import decay_fit
from .solver import normalized, rank_pages


def format_vector(values):
    """One "index value" line per entry, values at round-trip precision."""
    return "".join(f"{i} {float(v)!r}\n" for i, v in enumerate(values))


def format_spectral(report, steps_for_target=None, target=1e-10):
    """
    Labeled ``name value`` lines for a SpectralReport.

    Args:
        report (SpectralReport): spectral analysis of a graph
        steps_for_target (int): optional step count to print as well
        target (float): normalized error the step count was computed for
    """
    lines = [
        f"sigma_min {report.sigma_min!r}",
        f"rate {report.rate!r}",
        f"r0_norm_sq {report.r0_norm_sq!r}",
    ]
    if steps_for_target is not None:
        lines.append(f"steps_for_{target:g} {steps_for_target}")
    return "\n".join(lines) + "\n"


def ranking_table(x, top=10):
    """Rich table of the top pages by score."""
    order = rank_pages(x)[:top]
    probs = normalized(x)
    table = Table(title=f"Top {len(order)} pages", box=box.ROUNDED, header_style="bold white")
    table.add_column("Rank", justify="right", style="cyan")
    table.add_column("Page", justify="right")
    table.add_column("Scaled PageRank", justify="right", style="green")
    table.add_column("PageRank", justify="right")
    for rank, page in enumerate(order, start=1):
        table.add_row(str(rank), str(page), f"{x[page]:.6f}", f"{probs[page]:.6g}")
    return table


def trajectory_table(table, title="Averaged trajectory"):
    """
    Rich table of a TrajectoryTable with a bound check column.

    A row is flagged when the averaged residual exceeds 1.5 times its bound.
    """
    out = Table(title=title, box=box.ROUNDED, header_style="bold white")
    for name in ("t", "mean_err", "mean_res", "residual_bound", "error_bound"):
        out.add_column(name, justify="right")
    out.add_column("bound", justify="center")

    for t, err, res, res_bound, err_bound in table.rows():
        ok = res <= 1.5 * res_bound
        out.add_row(
            str(t),
            f"{err:.4e}",
            f"{res:.4e}",
            f"{res_bound:.4e}",
            f"{err_bound:.4e}",
            "[green]ok[/green]" if ok else "[bold red]over[/bold red]",
        )
    return out


def decay_panel(table, floor=1e-12):
    """Panel summarizing the log-linear fit of the averaged error."""
    try:
        fit = decay_fit(table.checkpoints, table.mean_err, floor=floor)
    except ConfigError as e:
        return Panel(f"[yellow]{e}[/yellow]", title="Decay fit", expand=False)

    color = "green" if fit.r_squared >= 0.98 else "yellow"
    body = (
        f"Fitted per-step factor: [bold]{fit.rate:.9f}[/bold]\n"
        f"Slope of log error: {fit.slope:.4e}\n"
        f"R^2: [bold {color}]{fit.r_squared:.4f}[/bold {color}] over {fit.points} points"
    )
    return Panel(body, title="Decay fit", border_style=color, expand=False)


def save_results(text, output_file):
    """
    Write text output to a file.

    Args:
        text (str): content to write
        output_file (str): destination path
    """
    with open(output_file, "w", encoding="utf-8", newline="") as f:
        f.write(text)
