import numpy as np

from src.graph import generate_synthetic


class RecordingArray(np.ndarray):
    """float array that records every index read or written through []."""

    def __new__(cls, values):
        obj = np.array(values, dtype=np.float64).view(cls)
        obj.reads = []
        obj.writes = []
        return obj

    def __array_finalize__(self, obj):
        self.reads = []
        self.writes = []

    def _positions(self, idx):
        return np.atleast_1d(np.arange(self.size)[idx]).tolist()

    def __getitem__(self, idx):
        self.reads.extend(self._positions(idx))
        return super().__getitem__(idx)

    def __setitem__(self, idx, value):
        self.writes.extend(self._positions(idx))
        super().__setitem__(idx, value)


def small_graphs(count=200, max_n=8, seed=2024):
    """Random valid graphs with 1..max_n pages and varied densities."""
    rng = np.random.default_rng(seed)
    graphs = []
    for i in range(count):
        n = int(rng.integers(1, max_n + 1))
        threshold = float(rng.uniform(0.2, 0.9))
        graphs.append(generate_synthetic(n, threshold, seed + i))
    return graphs


def dense_b(g, alpha):
    return np.eye(g.n) - alpha * g.to_dense()


def dense_c(g):
    return (np.eye(g.n) - g.to_dense()).T
