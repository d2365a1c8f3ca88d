"""
Main module for mp-pagerank.

Subcommands: gen, solve, oracle, spectral, experiment, size. Primary
results go to --out or standard output; diagnostics, tables and progress go
to standard error.
"""

import argparse
import logging
import sys

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn, TimeRemainingColumn

from . import __version__
from ._accel import numba_available
from .config import default_alpha, default_log_level, default_seed, default_workers, load_env
from .errors import ConfigError, PageRankError
from .experiment import (
    default_checkpoints,
    export_csv,
    export_series,
    export_size_csv,
    run_rounds,
    run_size_rounds,
)
from .formatter import decay_panel, format_spectral, format_vector, ranking_table, save_results, trajectory_table
from .graph import generate_synthetic, load_graph, serialize_graph
from .oracle import power_iteration_pagerank, solve_dense, spectral_rate
from .sizeest import estimates, run_size
from .solver import SolverConfig, run

# Upper bound on steps when only --tol is given
TOL_ONLY_MAX_ITERS = 50_000_000

err_console = Console(stderr=True)

logger = logging.getLogger(__package__ or "src")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exit code 1."""

    def error(self, message):
        err_console.print(f"[bold red]Error:[/bold red] {escape(message)}")
        raise SystemExit(1)


def _alpha(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return value


def _unit_interval(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"threshold must lie in [0, 1], got {text}")
    return value


def _nonnegative_float(text):
    value = float(text)
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser():
    """Build the argument parser with one subparser per subcommand."""
    alpha = default_alpha()
    seed = default_seed()
    workers = default_workers()

    parser = CliParser(prog="mp-pagerank", description="Randomized Matching-Pursuit PageRank with local updates")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log debug details to standard error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    gen = sub.add_parser("gen", help="Generate a thresholded random graph")
    gen.add_argument("--n", type=_positive_int, required=True, help="Number of pages")
    gen.add_argument("--threshold", type=_unit_interval, default=0.5, help="Keep a link when its uniform draw is >= threshold")
    gen.add_argument("--seed", type=int, default=seed, help="Generator seed")
    gen.add_argument("--out", help="Graph file to write (default: standard output)")

    solve = sub.add_parser("solve", help="Run the randomized solver")
    solve.add_argument("--graph", required=True, help="Graph file")
    solve.add_argument("--alpha", type=_alpha, default=alpha, help="Damping factor")
    solve.add_argument("--iters", type=_positive_int, help="Number of steps T")
    solve.add_argument("--tol", type=_nonnegative_float, help="Stop once ||r||^2 <= tol")
    solve.add_argument("--seed", type=int, default=seed, help="Page sampler seed")
    solve.add_argument("--traj", help="CSV file for the per-step residual trajectory")
    solve.add_argument("--rank", type=_positive_int, metavar="K", help="Also show the top K pages on standard error")
    solve.add_argument("--out", help="Vector file to write (default: standard output)")

    oracle = sub.add_parser("oracle", help="Dense ground-truth scaled PageRank")
    oracle.add_argument("--graph", required=True, help="Graph file")
    oracle.add_argument("--alpha", type=_alpha, default=alpha, help="Damping factor")
    oracle.add_argument("--method", choices=["dense", "power"], default="dense", help="Solution method")
    oracle.add_argument("--tol", type=_positive_float, default=1e-12, help="1-norm tolerance (power only)")
    oracle.add_argument("--out", help="Vector file to write (default: standard output)")

    spectral = sub.add_parser("spectral", help="Smallest singular value and expected decay rate")
    spectral.add_argument("--graph", required=True, help="Graph file")
    spectral.add_argument("--alpha", type=_alpha, default=alpha, help="Damping factor")

    experiment = sub.add_parser("experiment", help="Averaged multi-round trajectories as CSV")
    experiment.add_argument("--graph", required=True, help="Graph file")
    experiment.add_argument("--alpha", type=_alpha, default=alpha, help="Damping factor")
    experiment.add_argument("--rounds", type=_positive_int, default=100, help="Independent rounds to average")
    experiment.add_argument("--iters", type=_positive_int, help="Last checkpoint (default: 20 * n)")
    experiment.add_argument("--seed", type=int, default=seed, help="Base seed")
    experiment.add_argument("--workers", type=_positive_int, default=workers, help="Threads running rounds")
    experiment.add_argument("--out", help="CSV file to write (default: standard output)")

    size = sub.add_parser("size", help="Estimate the number of pages")
    size.add_argument("--graph", required=True, help="Graph file")
    size.add_argument("--iters", type=_nonnegative_int, required=True, help="Number of steps T")
    size.add_argument("--seed", type=int, default=seed, help="Page sampler seed")
    size.add_argument("--rounds", type=_positive_int, default=1, help="Average the trajectory over this many runs")
    size.add_argument("--workers", type=_positive_int, default=workers, help="Threads running rounds")
    size.add_argument("--traj", help="CSV file for the distance trajectory")
    size.add_argument("--out", help="Estimate file to write (default: standard output)")

    return parser


def _setup_logging(verbose):
    level = logging.DEBUG if verbose else default_log_level()
    handler = RichHandler(console=err_console, show_path=False, show_time=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False
    if not numba_available:
        logger.debug("numba not installed, kernels run as plain Python")


def _emit(text, out):
    """Write primary output to a file or standard output."""
    if out:
        save_results(text, out)
        err_console.print(f"Results saved to: [green]{escape(out)}[/green]")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _progress():
    return Progress(
        SpinnerColumn(),
        TextColumn("[bold white]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        TimeRemainingColumn(),
        console=err_console,
        transient=True,
    )


def cmd_gen(args):
    g = generate_synthetic(args.n, args.threshold, args.seed)
    logger.info("generated %d pages, %d links", g.n, g.edge_count)
    _emit(serialize_graph(g), args.out)
    return 0


def cmd_solve(args):
    if args.iters is None and args.tol is None:
        raise ConfigError("solve needs --iters, --tol or both")
    g = load_graph(args.graph)
    cfg = SolverConfig(
        alpha=args.alpha,
        seed=args.seed,
        max_iters=args.iters if args.iters is not None else TOL_ONLY_MAX_ITERS,
        stop_tol=args.tol,
    )

    trajectory = []
    observer = (lambda t, res_sq: trajectory.append((t, res_sq))) if args.traj else None
    state = run(g, cfg, observer=observer)
    logger.info("stopped after %d steps, ||r||^2 = %.3e, %d residual messages", state.t, state.res_sq, state.messages)

    if args.traj:
        save_results(export_series(("t", "res_sq"), trajectory), args.traj)
        err_console.print(f"Trajectory saved to: [green]{escape(args.traj)}[/green]")
    if args.rank:
        err_console.print(ranking_table(state.x, top=args.rank))
    _emit(format_vector(state.x), args.out)
    return 0


def cmd_oracle(args):
    g = load_graph(args.graph)
    if args.method == "power":
        solution = power_iteration_pagerank(g, args.alpha, tol=args.tol)
        logger.info("power iteration converged in %d iterations", solution.iterations)
    else:
        solution = solve_dense(g, args.alpha)
    _emit(format_vector(solution.x_star), args.out)
    return 0


def cmd_spectral(args):
    g = load_graph(args.graph)
    report = spectral_rate(g, args.alpha)
    _emit(format_spectral(report, report.steps_for_error(1e-10)), None)
    return 0


def cmd_experiment(args):
    g = load_graph(args.graph)
    cfg = SolverConfig(alpha=args.alpha, seed=args.seed)
    checkpoints = default_checkpoints(g.n, last=args.iters)

    with _progress() as progress:
        task = progress.add_task(f"Running {args.rounds} rounds", total=args.rounds)
        table = run_rounds(
            g, cfg, args.rounds, checkpoints,
            workers=args.workers,
            progress=lambda _: progress.advance(task),
        )

    err_console.print(trajectory_table(table))
    err_console.print(decay_panel(table))
    _emit(export_csv(table), args.out)
    return 0


def cmd_size(args):
    g = load_graph(args.graph)

    if args.rounds > 1:
        checkpoints = default_checkpoints(g.n, count=11, last=args.iters)
        with _progress() as progress:
            task = progress.add_task(f"Running {args.rounds} size estimations", total=args.rounds)
            table = run_size_rounds(
                g, args.rounds, checkpoints, seed=args.seed,
                workers=args.workers,
                progress=lambda _: progress.advance(task),
            )
        t, dist, bound = list(table.rows())[-1]
        logger.info("mean ||s_t - 1/n||^2 at t=%d over %d rounds: %.3e (bound %.3e)", t, args.rounds, dist, bound)
        if args.traj:
            save_results(export_size_csv(table), args.traj)
            err_console.print(f"Trajectory saved to: [green]{escape(args.traj)}[/green]")

    trajectory = []
    observer = (lambda t, dist: trajectory.append((t, dist))) if args.traj and args.rounds == 1 else None
    state = run_size(g, args.iters, args.seed, observer=observer)
    if observer is not None:
        save_results(export_series(("t", "dist_sq"), trajectory), args.traj)
        err_console.print(f"Trajectory saved to: [green]{escape(args.traj)}[/green]")

    logger.info("entry sum after %d steps: %.17g", state.t, state.s.sum())
    _emit(format_vector(estimates(state)), args.out)
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "spectral": cmd_spectral,
    "experiment": cmd_experiment,
    "size": cmd_size,
}


def main(argv=None):
    """Main entry point for the application."""
    load_env()
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        _setup_logging(args.verbose)
        return COMMANDS[args.command](args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    except PageRankError as e:
        err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        return e.exit_code
    except OSError as e:
        err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        return 1


if __name__ == "__main__":
    exit(main())
