"""
Module for dense ground truth and convergence-rate analysis.

Everything here is O(n^3) and exists to check the solver, so inputs are
capped at DENSE_LIMIT pages.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svdvals

from .errors import ConfigError, InvariantViolation, NoConvergence, SingularSystem, TooLargeForDense

logger = logging.getLogger(__name__)

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class OracleSolution:
    """Scaled PageRank vector: positive entries summing to n."""

    x_star: np.ndarray
    iterations: int = 0

    @property
    def n(self):
        return self.x_star.size


@dataclass(frozen=True)
class SpectralReport:
    """
    Smallest singular value of the column-normalized dictionary and the
    expected per-step contraction it implies.
    """

    n: int
    sigma_min: float
    rate: float
    r0_norm_sq: float

    def residual_bound(self, t):
        """Bound on E||r_t||^2."""
        return self.rate ** t * self.r0_norm_sq

    def error_bound(self, t):
        """Bound on E||x_t - x*||^2."""
        return self.residual_bound(t) / (self.sigma_min * self.sigma_min)

    def steps_for_error(self, target):
        """
        Smallest T with error_bound(T) / n <= target.

        Args:
            target (float): bound on the normalized squared error

        Returns:
            int: number of steps
        """
        if self.error_bound(0) / self.n <= target:
            return 0
        if self.rate <= 0.0:
            return 1
        ratio = target * self.n / self.error_bound(0)
        steps = max(0, math.ceil(math.log(ratio) / math.log(self.rate)))
        while self.error_bound(steps) / self.n > target:
            steps += 1
        return steps


def residual_bound(report, t):
    return report.residual_bound(t)


def error_bound(report, t):
    return report.error_bound(t)


def _check_size(g):
    if g.n > DENSE_LIMIT:
        raise TooLargeForDense(g.n, DENSE_LIMIT)


def _validate(x, n):
    total = float(x.sum())
    if abs(total - n) > 1e-8 * n:
        raise InvariantViolation(f"entries sum to {total!r}, expected {n}")
    if not np.all(x > 0):
        page = int(np.argmin(x))
        raise InvariantViolation(f"entry {page} is {x[page]!r}, expected a positive value")


def dense_dictionary(g, alpha):
    """
    Dense B = I - alpha*A and its column-normalized version.

    Returns:
        tuple: (B, B_hat)
    """
    _check_size(g)
    b = np.eye(g.n) - alpha * g.to_dense()
    b_hat = b / np.linalg.norm(b, axis=0)
    return b, b_hat


def solve_dense(g, alpha):
    """
    Solve (I - alpha*A) x = (1 - alpha) * 1 with LU and partial pivoting.

    Args:
        g (HyperlinkGraph): graph, at most DENSE_LIMIT pages
        alpha (float): damping factor

    Returns:
        OracleSolution: validated scaled PageRank vector
    """
    _check_size(g)
    b = np.eye(g.n) - alpha * g.to_dense()
    try:
        x = np.linalg.solve(b, np.full(g.n, 1.0 - alpha))
    except np.linalg.LinAlgError as e:
        raise SingularSystem(str(e)) from e
    _validate(x, g.n)
    return OracleSolution(x)


def power_iteration_pagerank(g, alpha, tol=1e-12, max_iters=10_000):
    """
    Power iteration on M = alpha*A + (1 - alpha)*S.

    The iterate is kept on the probability simplex, where S v = (1/n) * 1,
    so M is never formed.

    Args:
        g (HyperlinkGraph): graph
        alpha (float): damping factor
        tol (float): stop when the 1-norm change is <= tol
        max_iters (int): iteration cap

    Returns:
        OracleSolution: n times the stationary vector
    """
    if tol <= 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    a = g.to_sparse()
    teleport = (1.0 - alpha) / g.n
    v = np.full(g.n, 1.0 / g.n)
    delta = math.inf
    for i in range(1, max_iters + 1):
        v_next = alpha * (a @ v) + teleport
        v_next /= v_next.sum()
        delta = float(np.abs(v_next - v).sum())
        v = v_next
        if delta <= tol:
            logger.debug("power iteration converged in %d iterations", i)
            return OracleSolution(g.n * v, iterations=i)
    raise NoConvergence(max_iters, delta)


def spectral_rate(g, alpha):
    """
    Smallest singular value of B_hat and the rate 1 - sigma^2 / n.

    Args:
        g (HyperlinkGraph): graph, at most DENSE_LIMIT pages
        alpha (float): damping factor

    Returns:
        SpectralReport: sigma_min, rate and ||r_0||^2 = n * (1 - alpha)^2
    """
    _, b_hat = dense_dictionary(g, alpha)
    sigma = float(svdvals(b_hat, check_finite=False).min())
    rate = min(max(1.0 - sigma * sigma / g.n, 0.0), 1.0)
    return SpectralReport(
        n=g.n,
        sigma_min=sigma,
        rate=rate,
        r0_norm_sq=g.n * (1.0 - alpha) ** 2,
    )


def column_stochastic_identity(g, powers=(0, 1, 2, 3)):
    """Values of 1^T A^k 1 for each k in powers; each equals n."""
    _check_size(g)
    a = g.to_dense()
    ones = np.ones(g.n)
    values = []
    for k in powers:
        values.append(float(ones @ np.linalg.matrix_power(a, k) @ ones))
    return values
