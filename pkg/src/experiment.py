"""
Module for multi-round averaged trajectory experiments.

Each round is an independent solver (or size-estimator) run with its own
seed; the metrics recorded at every checkpoint are averaged over rounds and
set next to the expected-decay bounds from the spectral analysis.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import seed_bits
from .errors import ConfigError
from .oracle import solve_dense, spectral_rate
from .sizeest import advance_size, distance_sq, init_size_state, size_spectral
from .solver import advance, init_state

logger = logging.getLogger(__name__)

CSV_HEADER = ("t", "mean_err", "mean_res", "residual_bound", "error_bound")
SIZE_CSV_HEADER = ("t", "mean_dist", "distance_bound")


@dataclass(frozen=True)
class TrajectoryTable:
    """
    Averaged solver trajectories.

    ``mean_err`` is the round mean of (1/n)||x_t - x*||^2, ``mean_res`` the
    round mean of ||r_t||^2; ``error_bound`` is already divided by n.
    """

    checkpoints: np.ndarray
    mean_err: np.ndarray
    mean_res: np.ndarray
    residual_bound: np.ndarray
    error_bound: np.ndarray

    def __post_init__(self):
        columns = (self.mean_err, self.mean_res, self.residual_bound, self.error_bound)
        if any(len(c) != len(self.checkpoints) for c in columns):
            raise ConfigError("trajectory columns have different lengths")
        _check_checkpoints(self.checkpoints)
        if np.any(self.mean_err < 0) or np.any(self.mean_res < 0):
            raise ConfigError("trajectory means must be nonnegative")

    def __len__(self):
        return len(self.checkpoints)

    def rows(self):
        for i in range(len(self)):
            yield (
                int(self.checkpoints[i]),
                float(self.mean_err[i]),
                float(self.mean_res[i]),
                float(self.residual_bound[i]),
                float(self.error_bound[i]),
            )


@dataclass(frozen=True)
class SizeTrajectoryTable:
    """Round mean of ||s_t - (1/n) * 1||^2 with the matching bound."""

    checkpoints: np.ndarray
    mean_dist: np.ndarray
    distance_bound: np.ndarray

    def __post_init__(self):
        if len(self.mean_dist) != len(self.checkpoints) or len(self.distance_bound) != len(self.checkpoints):
            raise ConfigError("trajectory columns have different lengths")
        _check_checkpoints(self.checkpoints)

    def rows(self):
        for i in range(len(self.checkpoints)):
            yield int(self.checkpoints[i]), float(self.mean_dist[i]), float(self.distance_bound[i])


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through log(value) against t."""

    slope: float
    intercept: float
    r_squared: float
    points: int

    @property
    def rate(self):
        """Fitted per-step factor exp(slope)."""
        return float(np.exp(self.slope))


def _check_checkpoints(checkpoints):
    checkpoints = np.asarray(checkpoints)
    if checkpoints.size and checkpoints[0] < 0:
        raise ConfigError("checkpoints must be nonnegative")
    if np.any(np.diff(checkpoints) <= 0):
        raise ConfigError("checkpoints must be strictly increasing")


def default_checkpoints(n, count=21, last=None):
    """
    Checkpoints m*n for m = 0..count-1, or count points spread evenly over
    [0, last] when last is given.
    """
    if last is None:
        return np.arange(count, dtype=np.int64) * n
    return np.unique(np.linspace(0, last, count).round().astype(np.int64))


def round_seed(base_seed, index):
    """
    Seed of round ``index``: the two integers are mixed by
    numpy.random.SeedSequence, so rounds are independent but reproducible.
    """
    return np.random.SeedSequence([seed_bits(base_seed), int(index)])


def _pool_map(func, rounds, workers, progress):
    results = [None] * rounds

    def job(i):
        results[i] = func(i)
        if progress is not None:
            progress(i)

    if workers <= 1:
        for i in range(rounds):
            job(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # list() re-raises the first exception of any round
            list(pool.map(job, range(rounds)))
    return results


def run_rounds(g, cfg, rounds, checkpoints=None, workers=1, progress: Optional[Callable[[int], None]] = None):
    """
    Average solver trajectories over independent rounds.

    Args:
        g (HyperlinkGraph): graph small enough for the dense oracle
        cfg (SolverConfig): alpha and base seed (max_iters is not used)
        rounds (int): number of independent runs
        checkpoints (array): iteration indices to record, strictly increasing
        workers (int): threads executing rounds
        progress (callable): called with the round index when a round ends

    Returns:
        TrajectoryTable: averaged metrics and bound columns
    """
    if rounds < 1:
        raise ConfigError(f"rounds must be >= 1, got {rounds}")
    if checkpoints is None:
        checkpoints = default_checkpoints(g.n)
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    _check_checkpoints(checkpoints)

    x_star = solve_dense(g, cfg.alpha).x_star
    report = spectral_rate(g, cfg.alpha)
    logger.info("sigma_min=%.6g rate=%.9f over %d rounds", report.sigma_min, report.rate, rounds)

    def one_round(i):
        rng = np.random.default_rng(round_seed(cfg.seed, i))
        state = init_state(g, cfg)
        err = np.empty(checkpoints.size)
        res = np.empty(checkpoints.size)
        for c, t in enumerate(checkpoints):
            advance(state, g, cfg.alpha, rng.integers(0, g.n, size=int(t) - state.t))
            diff = state.x - x_star
            err[c] = (diff @ diff) / g.n
            res[c] = state.r @ state.r
        return err, res

    results = _pool_map(one_round, rounds, workers, progress)
    err = np.stack([e for e, _ in results])
    res = np.stack([r for _, r in results])
    return TrajectoryTable(
        checkpoints=checkpoints,
        mean_err=err.mean(axis=0),
        mean_res=res.mean(axis=0),
        residual_bound=np.array([report.residual_bound(int(t)) for t in checkpoints]),
        error_bound=np.array([report.error_bound(int(t)) / g.n for t in checkpoints]),
    )


def run_size_rounds(g, rounds, checkpoints=None, seed=0, workers=1, progress=None):
    """
    Average ||s_t - (1/n) * 1||^2 over independent size-estimation runs.

    Returns:
        SizeTrajectoryTable: averaged distances and the spectral bound
    """
    if rounds < 1:
        raise ConfigError(f"rounds must be >= 1, got {rounds}")
    if checkpoints is None:
        checkpoints = default_checkpoints(g.n, count=11)
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    _check_checkpoints(checkpoints)

    report = size_spectral(g)

    def one_round(i):
        rng = np.random.default_rng(round_seed(seed, i))
        state = init_size_state(g)
        dist = np.empty(checkpoints.size)
        for c, t in enumerate(checkpoints):
            advance_size(state, g, rng.integers(0, g.n, size=int(t) - state.t))
            dist[c] = distance_sq(state.s)
        return dist

    dist = np.stack(_pool_map(one_round, rounds, workers, progress))
    return SizeTrajectoryTable(
        checkpoints=checkpoints,
        mean_dist=dist.mean(axis=0),
        distance_bound=np.array([report.distance_bound(int(t)) for t in checkpoints]),
    )


def _fmt(value):
    return format(value, ".17g")


def export_csv(table):
    """Render a TrajectoryTable as CSV with round-trip precision."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t, *values in table.rows():
        writer.writerow([t] + [_fmt(v) for v in values])
    return out.getvalue()


def parse_csv(text):
    """Inverse of export_csv."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ConfigError(f"unexpected trajectory header {reader.fieldnames!r}")
    rows = list(reader)
    return TrajectoryTable(
        checkpoints=np.array([int(r["t"]) for r in rows], dtype=np.int64),
        mean_err=np.array([float(r["mean_err"]) for r in rows]),
        mean_res=np.array([float(r["mean_res"]) for r in rows]),
        residual_bound=np.array([float(r["residual_bound"]) for r in rows]),
        error_bound=np.array([float(r["error_bound"]) for r in rows]),
    )


def export_size_csv(table):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SIZE_CSV_HEADER)
    for t, dist, bound in table.rows():
        writer.writerow([t, _fmt(dist), _fmt(bound)])
    return out.getvalue()


def decay_fit(checkpoints, values, floor=1e-12):
    """
    Fit log(values) = intercept + slope * t over the points above ``floor``.

    Args:
        checkpoints (array): iteration indices
        values (array): positive trajectory values
        floor (float): values at or below this are outside the decaying region

    Returns:
        DecayFit: slope, intercept, coefficient of determination, points used
    """
    t = np.asarray(checkpoints, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    keep = v > floor
    if keep.sum() < 3:
        raise ConfigError("need at least three points above the floor for a decay fit")
    t, y = t[keep], np.log(v[keep])
    slope, intercept = np.polyfit(t, y, 1)
    fitted = intercept + slope * t
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(slope), float(intercept), r_squared, int(keep.sum()))


def export_series(names, rows):
    """CSV for a per-step series such as (t, ||r_t||^2) pairs."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(names)
    for t, *values in rows:
        writer.writerow([t] + [_fmt(v) for v in values])
    return out.getvalue()
