"""
Module for distributed network-size estimation.

The iterate s starts at e_0 and is projected, one random row of
C = (I - A)^T at a time, onto the nullspace of C. On a strongly connected
graph that nullspace is spanned by the all-ones vector, the entry sum of s
never changes, so s converges to (1/n) * 1 and every page can read the
network size off its own entry as 1 / s[i].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from ._accel import njit
from .config import make_rng
from .errors import IndexOutOfRange, NonPositiveEntry, NotStronglyConnected, TooLargeForDense
from .graph import strong_component_count
from .oracle import DENSE_LIMIT

logger = logging.getLogger(__name__)

CHUNK = 4096


class SizeRow(NamedTuple):
    """Sparse row c_k of C; indices[0] is always k itself."""

    indices: np.ndarray
    values: np.ndarray

    @property
    def norm_sq(self):
        return float(self.values @ self.values)

    def to_dict(self):
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}


@dataclass
class SizeState:
    s: np.ndarray
    t: int = 0
    dist_sq: float = 0.0

    def copy(self):
        return SizeState(self.s.copy(), self.t, self.dist_sq)


@dataclass(frozen=True)
class SizeSpectralReport:
    """
    Second-smallest eigenvalue of C_hat = sum_k c_k c_k^T / ||c_k||^2.

    ``degenerate`` is set for a single page, where C_hat has no second
    eigenvalue and sigma2 is reported as 0.
    """

    n: int
    sigma2: float
    rate: float
    s0_dist_sq: float
    degenerate: bool = False

    def distance_bound(self, t):
        """Bound on E||s_t - (1/n) * 1||^2."""
        return self.rate ** t * self.s0_dist_sq


def distance_sq(s):
    d = s - 1.0 / s.size
    return float(d @ d)


def init_size_state(g):
    s = np.zeros(g.n)
    s[0] = 1.0
    return SizeState(s=s, t=0, dist_sq=distance_sq(s))


def size_row(g, k):
    """
    Row k of C = (I - A)^T, built from the out-links of k only.

    Returns:
        SizeRow: c_k[k] = 1 - A[k, k] and c_k[j] = -1/N_k for the other out-links
    """
    nbrs = g.neighbors(k)
    others = nbrs[nbrs != k]
    deg = nbrs.size
    indices = np.concatenate(([k], others)).astype(np.int64)
    values = np.empty(indices.size)
    values[0] = 1.0 - g.self_weight(k)
    values[1:] = -1.0 / deg
    return SizeRow(indices, values)


def size_step(state, g, k):
    """
    Project s onto the hyperplane orthogonal to c_k, in place.

    A zero row (a page whose only link is to itself) leaves s unchanged.
    """
    row = size_row(g, k)
    norm_sq = row.norm_sq
    if norm_sq > 0.0:
        s_loc = state.s[row.indices]
        coef = (row.values @ s_loc) / norm_sq
        state.s[row.indices] = s_loc - coef * row.values
        state.dist_sq -= coef * coef * norm_sq
    state.t += 1
    return state


@njit(nogil=True)
def _size_kernel(indptr, indices, self_loop, s, pages, t0, dist_sq, trace):
    n = s.shape[0]
    inv_n = 1.0 / n
    record = trace.shape[0] > 0
    for step in range(pages.shape[0]):
        k = pages[step]
        lo = indptr[k]
        hi = indptr[k + 1]
        deg = hi - lo
        off = -1.0 / deg
        if self_loop[k]:
            diag = 1.0 - 1.0 / deg
            n_off = deg - 1
        else:
            diag = 1.0
            n_off = deg
        norm_sq = diag * diag + n_off * off * off

        if norm_sq > 0.0:
            dot = diag * s[k]
            for p in range(lo, hi):
                j = indices[p]
                if j != k:
                    dot += off * s[j]
            coef = dot / norm_sq
            s[k] -= coef * diag
            for p in range(lo, hi):
                j = indices[p]
                if j != k:
                    s[j] -= coef * off
            dist_sq -= coef * coef * norm_sq

        if (t0 + step + 1) % n == 0:
            dist_sq = 0.0
            for i in range(n):
                d = s[i] - inv_n
                dist_sq += d * d
        if record:
            trace[step] = dist_sq
    return dist_sq


def advance_size(state, g, pages, trace=None):
    """Apply the projections for a given page sequence; returns the step count."""
    pages = np.ascontiguousarray(pages, dtype=np.int64)
    if pages.size == 0:
        return 0
    lo, hi = int(pages.min()), int(pages.max())
    if lo < 0 or hi >= g.n:
        raise IndexOutOfRange(lo if lo < 0 else hi, g.n)
    if trace is None:
        trace = np.empty(0)
    state.dist_sq = float(_size_kernel(
        g.indptr, g.indices, g.self_loop, state.s, pages, state.t, float(state.dist_sq), trace,
    ))
    state.t += int(pages.size)
    return int(pages.size)


def _require_strongly_connected(g):
    count = strong_component_count(g)
    if count != 1:
        raise NotStronglyConnected(count)


def run_size(g, T, seed, observer: Optional[Callable[[int, float], None]] = None):
    """
    Run T uniformly sampled projection steps from s_0 = e_0.

    Args:
        g (HyperlinkGraph): strongly connected graph
        T (int): number of steps
        seed (int): sampler seed
        observer (callable): optional sink called as
            observer(t, ||s_t - (1/n) * 1||^2) after every step

    Returns:
        SizeState: final iterate
    """
    _require_strongly_connected(g)
    state = init_size_state(g)
    rng = make_rng(seed)

    remaining = T
    while remaining > 0:
        size = min(remaining, CHUNK)
        pages = rng.integers(0, g.n, size=size)
        trace = np.empty(size) if observer is not None else None
        t0 = state.t
        advance_size(state, g, pages, trace=trace)
        if observer is not None:
            for i in range(size):
                observer(t0 + i + 1, float(trace[i]))
        remaining -= size

    logger.debug("size estimation finished: t=%d dist^2=%.3e sum=%.17g", state.t, state.dist_sq, state.s.sum())
    return state


def estimate_size(state, i):
    """Network size as seen from page i, 1 / s[i]."""
    value = float(state.s[i])
    if value <= 0.0:
        raise NonPositiveEntry(i, value)
    return 1.0 / value


def estimates(state):
    """Per-page size estimates 1 / s."""
    bad = np.flatnonzero(state.s <= 0.0)
    if bad.size:
        raise NonPositiveEntry(int(bad[0]), float(state.s[bad[0]]))
    return 1.0 / state.s


def size_spectral(g):
    """
    Second-smallest eigenvalue of C_hat and the matching decay rate.

    Args:
        g (HyperlinkGraph): strongly connected graph, at most DENSE_LIMIT pages

    Returns:
        SizeSpectralReport: sigma2, rate = 1 - sigma2 / n, ||s_0 - (1/n) * 1||^2
    """
    if g.n > DENSE_LIMIT:
        raise TooLargeForDense(g.n, DENSE_LIMIT)
    _require_strongly_connected(g)

    s0_dist_sq = 1.0 - 1.0 / g.n
    if g.n == 1:
        return SizeSpectralReport(n=1, sigma2=0.0, rate=0.0, s0_dist_sq=s0_dist_sq, degenerate=True)

    c = (np.eye(g.n) - g.to_dense()).T
    norms = np.linalg.norm(c, axis=1)
    rows = c[norms > 0.0] / norms[norms > 0.0, None]
    c_hat = rows.T @ rows
    eigenvalues = np.linalg.eigvalsh(c_hat)
    sigma2 = max(float(eigenvalues[1]), 0.0)
    return SizeSpectralReport(
        n=g.n,
        sigma2=sigma2,
        rate=min(max(1.0 - sigma2 / g.n, 0.0), 1.0),
        s0_dist_sq=s0_dist_sq,
    )
