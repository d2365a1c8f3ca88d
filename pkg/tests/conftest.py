import pytest

from src.graph import from_edges, generate_synthetic, parse_graph


@pytest.fixture
def g1():
    return parse_graph("1\n0 0\n")


@pytest.fixture
def g2():
    return parse_graph("2\n0 1\n1 0\n")


@pytest.fixture
def g3():
    return from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)])


@pytest.fixture
def disconnected():
    return parse_graph("3\n0 1\n1 0\n2 0\n")


@pytest.fixture(scope="session")
def web100():
    """100 pages at threshold 0.5, the reference experiment graph."""
    return generate_synthetic(100, 0.5, 42)
