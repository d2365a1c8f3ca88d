"""
Module for the randomized Matching-Pursuit PageRank iteration.

Each step picks one page k, reads the residuals of its out-links, moves
x[k] by the projection coefficient of the residual on column k of
B = I - alpha*A, and pushes the change back into the residuals of k and its
out-links. Nothing outside {k} and the out-links of k is read or written.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._accel import njit
from .config import make_rng
from .errors import ConfigError, IndexOutOfRange

logger = logging.getLogger(__name__)

# Pages are drawn and applied in blocks of this size.
CHUNK = 4096

Observer = Callable[[int, float], None]


@dataclass(frozen=True)
class SolverConfig:
    """
    Settings for one solver run.

    Args:
        alpha (float): damping factor in (0, 1)
        seed (int): seed of the page sampler
        max_iters (int): number of steps T
        stop_tol (float): optional threshold on ||r_t||^2 for early stopping
    """

    alpha: float = 0.85
    seed: int = 0
    max_iters: int = 1000
    stop_tol: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.stop_tol is not None and self.stop_tol < 0:
            raise ConfigError(f"stop_tol must be nonnegative, got {self.stop_tol}")


@dataclass
class SolverState:
    """
    Per-page estimates and residuals.

    ``res_sq`` tracks ||r||^2 incrementally and ``messages`` counts the
    out-link residual reads performed so far.
    """

    x: np.ndarray
    r: np.ndarray
    colnorm_sq: np.ndarray
    t: int = 0
    res_sq: float = 0.0
    messages: int = field(default=0)

    def copy(self):
        return SolverState(self.x.copy(), self.r.copy(), self.colnorm_sq, self.t, self.res_sq, self.messages)


def column_norm_sq(g, alpha, k):
    """||B(:, k)||^2 = 1 - 2*alpha*A[k, k] + alpha^2 / N_k."""
    return 1.0 - 2.0 * alpha * g.self_weight(k) + alpha * alpha / g.out_degree(k)


def init_state(g, cfg):
    """
    Fresh state: x = 0, r = (1 - alpha) * 1 and all column norms precomputed.
    """
    alpha = cfg.alpha
    degrees = g.out_degrees().astype(np.float64)
    self_w = np.where(g.self_loop, 1.0 / degrees, 0.0)
    colnorm_sq = 1.0 - 2.0 * alpha * self_w + alpha * alpha / degrees
    colnorm_sq.setflags(write=False)

    r = np.full(g.n, 1.0 - alpha)
    return SolverState(
        x=np.zeros(g.n),
        r=r,
        colnorm_sq=colnorm_sq,
        t=0,
        res_sq=float(r @ r),
    )


def step(state, g, alpha, k):
    """
    Apply one update for page k in place.

    Reads r[k] once and each out-link residual once, then writes them back.

    Args:
        state (SolverState): state to update
        g (HyperlinkGraph): graph the state belongs to
        alpha (float): damping factor
        k (int): selected page

    Returns:
        SolverState: the same state object, advanced by one step
    """
    nbrs = g.neighbors(k)
    deg = nbrs.size
    r = state.r

    r_k = r[k]
    r_nb = r[nbrs]
    num = r_k - alpha / deg * r_nb.sum()
    delta = num / state.colnorm_sq[k]

    state.x[k] += delta

    others = nbrs != k
    if others.any():
        r[nbrs[others]] = r_nb[others] + delta * alpha / deg
    r[k] = r_k - delta * (1.0 - alpha * g.self_weight(k))

    state.res_sq -= delta * delta * state.colnorm_sq[k]
    state.t += 1
    state.messages += deg
    return state


@njit(nogil=True)
def _mp_kernel(indptr, indices, self_loop, colnorm_sq, alpha, x, r, pages, t0, res_sq, trace, stop_tol):
    n = x.shape[0]
    record = trace.shape[0] > 0
    messages = 0
    for s in range(pages.shape[0]):
        k = pages[s]
        lo = indptr[k]
        hi = indptr[k + 1]
        deg = hi - lo

        acc = 0.0
        for p in range(lo, hi):
            acc += r[indices[p]]
        delta = (r[k] - alpha / deg * acc) / colnorm_sq[k]

        x[k] += delta
        push = delta * alpha / deg
        for p in range(lo, hi):
            j = indices[p]
            if j != k:
                r[j] += push
        if self_loop[k]:
            r[k] -= delta * (1.0 - alpha / deg)
        else:
            r[k] -= delta
        messages += deg

        res_sq -= delta * delta * colnorm_sq[k]
        if (t0 + s + 1) % n == 0:
            res_sq = 0.0
            for i in range(n):
                res_sq += r[i] * r[i]
        if record:
            trace[s] = res_sq
        if stop_tol >= 0.0 and res_sq <= stop_tol:
            res_sq = 0.0
            for i in range(n):
                res_sq += r[i] * r[i]
            if res_sq <= stop_tol:
                if record:
                    trace[s] = res_sq
                return s + 1, res_sq, messages
    return pages.shape[0], res_sq, messages


def advance(state, g, alpha, pages, trace=None, stop_tol=None):
    """
    Apply the updates for a given sequence of pages.

    Args:
        state (SolverState): state to update in place
        g (HyperlinkGraph): graph
        alpha (float): damping factor
        pages (array): page indices, applied in order
        trace (array): optional buffer receiving ||r_t||^2 after every step
        stop_tol (float): stop as soon as ||r_t||^2 <= stop_tol

    Returns:
        int: number of steps actually applied
    """
    pages = np.ascontiguousarray(pages, dtype=np.int64)
    if pages.size == 0:
        return 0
    lo, hi = int(pages.min()), int(pages.max())
    if lo < 0 or hi >= g.n:
        raise IndexOutOfRange(lo if lo < 0 else hi, g.n)
    if trace is None:
        trace = np.empty(0)

    done, res_sq, messages = _mp_kernel(
        g.indptr, g.indices, g.self_loop, state.colnorm_sq, float(alpha),
        state.x, state.r, pages, state.t, float(state.res_sq), trace,
        -1.0 if stop_tol is None else float(stop_tol),
    )
    state.t += int(done)
    state.res_sq = float(res_sq)
    state.messages += int(messages)
    return int(done)


def run(g, cfg, observer: Optional[Observer] = None):
    """
    Run the solver for cfg.max_iters uniformly sampled steps.

    Args:
        g (HyperlinkGraph): graph
        cfg (SolverConfig): run settings
        observer (callable): optional sink called as observer(t, ||r_t||^2)
            after every step

    Returns:
        SolverState: final state
    """
    state = init_state(g, cfg)
    rng = make_rng(cfg.seed)

    remaining = cfg.max_iters
    while remaining > 0:
        size = min(remaining, CHUNK)
        pages = rng.integers(0, g.n, size=size)
        trace = np.empty(size) if observer is not None else None
        t0 = state.t
        done = advance(state, g, cfg.alpha, pages, trace=trace, stop_tol=cfg.stop_tol)
        if observer is not None:
            for i in range(done):
                observer(t0 + i + 1, float(trace[i]))
        remaining -= done
        if done < size:
            logger.info("residual %.3e <= %.3e after %d steps, stopping", state.res_sq, cfg.stop_tol, state.t)
            break

    logger.debug("solver finished: t=%d ||r||^2=%.3e messages=%d", state.t, state.res_sq, state.messages)
    return state


def residual_norm_sq(state):
    """||r||^2 recomputed from the residual vector."""
    return float(state.r @ state.r)


def apply_b(g, alpha, x):
    """B x = x - alpha * A x, accumulated from out-links only."""
    degrees = g.out_degrees()
    ax = np.bincount(g.indices, weights=np.repeat(x / degrees, degrees), minlength=g.n)
    return x - alpha * ax


def conservation_defect(state, g, alpha):
    """max_i |(B x + r - (1 - alpha) * 1)_i|."""
    return float(np.max(np.abs(apply_b(g, alpha, state.x) + state.r - (1.0 - alpha))))


def rank_pages(x):
    """Page indices by decreasing score, ties broken by index."""
    x = np.asarray(x)
    return np.lexsort((np.arange(x.size), -x))


def normalized(x):
    """Scaled PageRank divided by n, i.e. entries summing to one."""
    x = np.asarray(x, dtype=np.float64)
    return x / x.size
