import numpy as np
import pytest
from helpers import RecordingArray, dense_c, small_graphs

from src.errors import IndexOutOfRange, NonPositiveEntry, NotStronglyConnected
from src.graph import generate_synthetic, is_strongly_connected
from src.sizeest import (
    SizeState,
    advance_size,
    distance_sq,
    estimate_size,
    estimates,
    init_size_state,
    run_size,
    size_row,
    size_spectral,
    size_step,
)


def test_size_rows(g1, g2, g3):
    row = size_row(g2, 0)
    assert row.to_dict() == {0: 1.0, 1: -1.0}
    assert row.norm_sq == 2.0

    row = size_row(g1, 0)
    assert row.to_dict() == {0: 0.0}
    assert row.norm_sq == 0.0

    row = size_row(g3, 1)
    assert row.indices[0] == 1
    assert row.to_dict() == {1: 1.0, 0: -0.5, 2: -0.5}
    assert row.norm_sq == 1.5


def test_size_rows_match_dense_transpose():
    for g in small_graphs(count=50):
        c = dense_c(g)
        for k in range(g.n):
            dense_row = np.zeros(g.n)
            for i, v in size_row(g, k).to_dict().items():
                dense_row[i] = v
            np.testing.assert_allclose(dense_row, c[k], atol=1e-15)


def test_size_step_two_cycle(g2):
    state = size_step(init_size_state(g2), g2, 0)
    np.testing.assert_array_equal(state.s, [0.5, 0.5])
    assert state.t == 1
    np.testing.assert_allclose(estimates(state), [2.0, 2.0])


def test_size_step_zero_row_is_skipped(g1):
    state = size_step(init_size_state(g1), g1, 0)
    np.testing.assert_array_equal(state.s, [1.0])
    assert state.t == 1
    assert estimate_size(state, 0) == 1.0


def test_size_step_three_pages(g3):
    state = size_step(init_size_state(g3), g3, 0)
    np.testing.assert_allclose(state.s, [0.5, 0.5, 0.0], atol=1e-15)
    assert state.s.sum() == pytest.approx(1.0, abs=1e-15)


def test_size_step_matches_dense_projection():
    rng = np.random.default_rng(17)
    for g in small_graphs():
        c = dense_c(g)
        s0 = rng.normal(size=g.n)
        for k in range(g.n):
            state = SizeState(s=s0.copy())
            size_step(state, g, k)
            row = c[k]
            norm_sq = row @ row
            expected = s0 if norm_sq == 0 else s0 - (row @ s0) / norm_sq * row
            np.testing.assert_allclose(state.s, expected, rtol=0, atol=1e-12)


def test_size_step_touches_only_local_entries():
    for g in small_graphs(count=60):
        for k in range(g.n):
            state = init_size_state(g)
            state.s = RecordingArray(state.s)
            size_step(state, g, k)
            local = {k} | set(g.neighbors(k).tolist())
            assert set(state.s.reads) <= local
            assert set(state.s.writes) <= local


def test_advance_size_matches_size_step():
    rng = np.random.default_rng(23)
    for g in small_graphs(count=40):
        pages = rng.integers(0, g.n, size=60)
        fast = init_size_state(g)
        slow = fast.copy()
        assert advance_size(fast, g, pages) == 60
        for k in pages:
            size_step(slow, g, int(k))
        np.testing.assert_allclose(fast.s, slow.s, rtol=0, atol=1e-12)
        assert fast.t == slow.t


def test_advance_size_rejects_pages_out_of_range(g2):
    with pytest.raises(IndexOutOfRange):
        advance_size(init_size_state(g2), g2, [-1])


def test_run_size_examples(g2):
    np.testing.assert_array_equal(run_size(g2, 0, 5).s, [1.0, 0.0])
    np.testing.assert_array_equal(run_size(g2, 1, 5).s, [0.5, 0.5])


def test_run_size_accepts_negative_seed(g3):
    a = run_size(g3, 50, -5)
    b = run_size(g3, 50, 2**64 - 5)
    np.testing.assert_array_equal(a.s, b.s)
    assert a.t == 50


def test_run_size_requires_strong_connectivity(disconnected):
    with pytest.raises(NotStronglyConnected) as info:
        run_size(disconnected, 10, 0)
    assert "strongly connected" in str(info.value)
    assert info.value.exit_code == 2


def test_estimate_size_needs_positive_entry(g2):
    with pytest.raises(NonPositiveEntry) as info:
        estimate_size(init_size_state(g2), 1)
    assert info.value.page == 1
    with pytest.raises(NonPositiveEntry):
        estimates(init_size_state(g2))
    assert estimate_size(run_size(g2, 1, 0), 0) == 2.0


def test_entry_sum_is_conserved(web100):
    state = run_size(web100, 10_000, 3)
    assert abs(state.s.sum() - 1.0) <= 1e-10


def test_projection_never_moves_away(g3):
    seen = []
    run_size(g3, 200, 9, observer=lambda t, d: seen.append((t, d)))
    assert [t for t, _ in seen] == list(range(1, 201))
    values = np.array([d for _, d in seen])
    assert np.all(np.diff(values) <= 1e-15)


def test_tracked_distance_matches_recomputed(web100):
    state = run_size(web100, 1000, 4)
    assert state.dist_sq == pytest.approx(distance_sq(state.s), rel=1e-9, abs=1e-18)


def test_size_spectral_two_cycle(g2):
    report = size_spectral(g2)
    assert report.sigma2 == pytest.approx(2.0)
    assert report.rate == pytest.approx(0.0, abs=1e-12)
    assert not report.degenerate
    assert report.distance_bound(0) == pytest.approx(0.5)


def test_size_spectral_single_page(g1):
    report = size_spectral(g1)
    assert report.degenerate
    assert report.sigma2 == 0.0


def test_size_spectral_three_pages(g3):
    assert size_spectral(g3).sigma2 > 0


def test_size_spectral_requires_strong_connectivity(disconnected):
    with pytest.raises(NotStronglyConnected):
        size_spectral(disconnected)


@pytest.mark.slow
def test_estimates_round_to_network_size(web100):
    assert is_strongly_connected(web100)
    state = run_size(web100, 20_000, 1)
    assert np.all(np.round(estimates(state)) == 100)


@pytest.mark.parametrize("seed", range(5))
def test_estimates_on_small_connected_graphs(seed):
    g = generate_synthetic(12, 0.5, seed)
    if not is_strongly_connected(g):
        pytest.skip("generated graph is not strongly connected")
    state = run_size(g, 5000, seed)
    np.testing.assert_allclose(estimates(state), 12.0, rtol=1e-6)
