import numpy as np
import pytest
from helpers import small_graphs

from src.errors import ConfigError, NoConvergence, TooLargeForDense
from src.graph import from_edges, generate_synthetic
from src.oracle import (
    DENSE_LIMIT,
    column_stochastic_identity,
    dense_dictionary,
    error_bound,
    power_iteration_pagerank,
    residual_bound,
    solve_dense,
    spectral_rate,
)

ALPHA = 0.85


def test_solve_dense_small_graphs(g1, g2, g3):
    np.testing.assert_allclose(solve_dense(g1, ALPHA).x_star, [1.0], atol=1e-12)
    np.testing.assert_allclose(solve_dense(g2, ALPHA).x_star, [1.0, 1.0], atol=1e-12)
    x = solve_dense(g3, ALPHA).x_star
    np.testing.assert_allclose(x, [1.192199, 1.163369, 0.644432], atol=1e-6)
    assert x.sum() == pytest.approx(3.0, abs=1e-12)


def test_power_iteration_small_graphs(g1, g2, g3):
    solution = power_iteration_pagerank(g1, ALPHA)
    np.testing.assert_allclose(solution.x_star, [1.0])
    assert solution.iterations == 1

    np.testing.assert_allclose(power_iteration_pagerank(g2, ALPHA).x_star, [1.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(
        power_iteration_pagerank(g3, ALPHA, tol=1e-12).x_star,
        solve_dense(g3, ALPHA).x_star,
        rtol=0,
        atol=1e-9,
    )


def test_power_iteration_rejects_bad_tolerance(g2):
    with pytest.raises(ConfigError):
        power_iteration_pagerank(g2, ALPHA, tol=0.0)


def test_power_iteration_runs_out_of_iterations(g3):
    with pytest.raises(NoConvergence) as info:
        power_iteration_pagerank(g3, ALPHA, tol=1e-15, max_iters=2)
    assert info.value.exit_code == 2


@pytest.mark.parametrize("seed", range(50))
def test_oracle_validity_on_random_graphs(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(3, 101))
    g = generate_synthetic(n, float(rng.uniform(0.3, 0.9)), seed)
    x = solve_dense(g, ALPHA).x_star
    assert abs(x.sum() - n) <= 1e-8 * n
    assert np.all(x > 0)
    np.testing.assert_allclose(power_iteration_pagerank(g, ALPHA, tol=1e-12).x_star, x, rtol=0, atol=1e-9)


def test_spectral_single_page(g1):
    report = spectral_rate(g1, ALPHA)
    assert report.sigma_min == pytest.approx(1.0, abs=1e-12)
    assert report.rate == pytest.approx(0.0, abs=1e-12)
    assert residual_bound(report, 1) == pytest.approx(0.0, abs=1e-12)


def test_spectral_two_cycle(g2):
    report = spectral_rate(g2, ALPHA)
    assert report.sigma_min == pytest.approx(0.15 / np.sqrt(1.7225), rel=1e-8)
    assert report.rate == pytest.approx(0.9934688, abs=1e-7)
    assert report.r0_norm_sq == pytest.approx(0.045)
    assert residual_bound(report, 0) == report.r0_norm_sq
    assert residual_bound(report, 1) == pytest.approx(0.0447061, abs=1e-7)
    assert error_bound(report, 1) == pytest.approx(residual_bound(report, 1) / report.sigma_min**2)


def test_spectral_matches_eigenvalues_of_gram(g3):
    _, b_hat = dense_dictionary(g3, ALPHA)
    smallest = np.linalg.eigvalsh(b_hat.T @ b_hat).min()
    assert spectral_rate(g3, ALPHA).sigma_min == pytest.approx(np.sqrt(smallest), rel=1e-8)


def test_dictionary_columns_are_unit_length(g3):
    b, b_hat = dense_dictionary(g3, ALPHA)
    np.testing.assert_allclose(np.linalg.norm(b_hat, axis=0), 1.0, atol=1e-15)
    np.testing.assert_allclose(b, np.eye(3) - ALPHA * g3.to_dense())


def test_sigma_min_is_positive():
    for g in small_graphs(count=50):
        assert spectral_rate(g, ALPHA).sigma_min > 0


def test_steps_for_error(g2, web100):
    report = spectral_rate(g2, ALPHA)
    steps = report.steps_for_error(1e-10)
    assert report.error_bound(steps) / report.n <= 1e-10
    assert report.error_bound(steps - 1) / report.n > 1e-10

    assert spectral_rate(g2, ALPHA).steps_for_error(1e6) == 0

    report100 = spectral_rate(web100, ALPHA)
    assert 0.0 < report100.rate < 1.0
    assert report100.error_bound(report100.steps_for_error(1e-10)) / report100.n <= 1e-10


def test_column_stochastic_identity():
    for g in small_graphs(count=50):
        np.testing.assert_allclose(column_stochastic_identity(g), g.n, rtol=1e-12)


def test_dense_limit_is_enforced():
    big = from_edges(DENSE_LIMIT + 1, [(i, (i + 1) % (DENSE_LIMIT + 1)) for i in range(DENSE_LIMIT + 1)])
    with pytest.raises(TooLargeForDense) as info:
        solve_dense(big, ALPHA)
    assert info.value.exit_code == 2
    with pytest.raises(TooLargeForDense):
        spectral_rate(big, ALPHA)
