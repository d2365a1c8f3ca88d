"""
Module for the directed hyperlink graph: model, text format, synthetic
generator and connectivity checks.

Pages are numbered 0..n-1. Only out-links are stored; the hyperlink matrix
A with A[i, j] = 1/N_j for every link j -> i is implicit and column
stochastic because no page is dangling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .config import make_rng
from .errors import (
    ConfigError,
    DanglingPage,
    DuplicateEdge,
    GraphFormatError,
    IndexOutOfRange,
    MalformedLine,
)

logger = logging.getLogger(__name__)

# Largest page count a graph file may declare
MAX_PAGES = 10_000_000

# The generator draws n^2 values and keeps about half as links
MAX_SYNTHETIC_PAGES = 20_000


@dataclass(frozen=True, eq=False)
class HyperlinkGraph:
    """
    Immutable out-link adjacency of n pages.

    Args:
        n (int): number of pages
        out_links (tuple): per page, the sorted duplicate-free tuple of targets

    The flat ``indptr``/``indices`` arrays hold the same adjacency in CSR
    layout (page k links to ``indices[indptr[k]:indptr[k+1]]``) and are what
    the compiled kernels consume.
    """

    n: int
    out_links: tuple
    indptr: np.ndarray = field(init=False, repr=False)
    indices: np.ndarray = field(init=False, repr=False)
    self_loop: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"a graph needs at least one page, got n = {self.n}")
        if len(self.out_links) != self.n:
            raise ConfigError(f"expected {self.n} out-link lists, got {len(self.out_links)}")

        links = []
        for k, targets in enumerate(self.out_links):
            targets = tuple(int(v) for v in targets)
            if not targets:
                raise DanglingPage(k)
            for v in targets:
                if not 0 <= v < self.n:
                    raise IndexOutOfRange(v, self.n)
            if len(set(targets)) != len(targets):
                dup = next(v for v in targets if targets.count(v) > 1)
                raise DuplicateEdge(k, dup)
            links.append(tuple(sorted(targets)))
        object.__setattr__(self, "out_links", tuple(links))

        degrees = np.fromiter((len(t) for t in links), dtype=np.int64, count=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        indices = np.fromiter((v for t in links for v in t), dtype=np.int64, count=int(indptr[-1]))
        self_loop = np.array([k in t for k, t in enumerate(links)], dtype=np.bool_)
        for arr in (indptr, indices, self_loop):
            arr.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "self_loop", self_loop)

    def __eq__(self, other):
        if not isinstance(other, HyperlinkGraph):
            return NotImplemented
        return self.n == other.n and self.out_links == other.out_links

    def __hash__(self):
        return hash((self.n, self.out_links))

    @property
    def edge_count(self):
        return int(self.indptr[-1])

    def out_degree(self, k):
        """N_k, the number of pages k links to."""
        return int(self.indptr[k + 1] - self.indptr[k])

    def neighbors(self, k):
        return self.indices[self.indptr[k]:self.indptr[k + 1]]

    def has_self_loop(self, k):
        return bool(self.self_loop[k])

    def self_weight(self, k):
        """A[k, k]: 1/N_k when page k links to itself, 0 otherwise."""
        return 1.0 / self.out_degree(k) if self.self_loop[k] else 0.0

    def out_degrees(self):
        return np.diff(self.indptr)

    def to_sparse(self):
        """
        Build the column-stochastic hyperlink matrix A.

        Returns:
            scipy.sparse.csr_matrix: A with A[i, j] = 1/N_j for links j -> i
        """
        weights = np.repeat(1.0 / self.out_degrees(), self.out_degrees())
        # column j of A is exactly the out-link list of page j
        return sparse.csc_matrix((weights, self.indices, self.indptr), shape=(self.n, self.n)).tocsr()

    def to_dense(self):
        return self.to_sparse().toarray()

    def adjacency(self):
        """0/1 link matrix with a row per source page."""
        ones = np.ones(self.edge_count, dtype=np.int8)
        return sparse.csr_matrix((ones, self.indices, self.indptr), shape=(self.n, self.n))


def from_edges(n, edges):
    """
    Build a graph from (source, target) pairs.

    Args:
        n (int): number of pages
        edges (iterable): (u, v) pairs meaning a link u -> v

    Returns:
        HyperlinkGraph: validated graph
    """
    out_links = [[] for _ in range(n)]
    for u, v in edges:
        if not 0 <= u < n:
            raise IndexOutOfRange(u, n)
        out_links[u].append(v)
    return HyperlinkGraph(n, tuple(tuple(t) for t in out_links))


def parse_graph(text):
    """
    Parse the graph text format.

    The first non-comment line holds N; every following non-comment line is
    ``u v`` for a link from page u to page v. Lines starting with ``#`` and
    blank lines are ignored.

    Args:
        text (str or file-like): graph text

    Returns:
        HyperlinkGraph: validated graph
    """
    if hasattr(text, "read"):
        text = text.read()

    n = None
    out_links = None
    seen = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise MalformedLine(line_no, raw, "expected the page count")
            try:
                n = int(parts[0])
            except ValueError:
                raise MalformedLine(line_no, raw, "expected the page count") from None
            if n < 1:
                raise MalformedLine(line_no, raw, "page count must be positive")
            if n > MAX_PAGES:
                raise MalformedLine(line_no, raw, f"page count exceeds {MAX_PAGES}")
            out_links = [[] for _ in range(n)]
            continue

        if len(parts) != 2:
            raise MalformedLine(line_no, raw)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(line_no, raw) from None
        for page in (u, v):
            if not 0 <= page < n:
                raise IndexOutOfRange(page, n)
        if (u, v) in seen:
            raise DuplicateEdge(u, v)
        seen.add((u, v))
        out_links[u].append(v)

    if n is None:
        raise MalformedLine(0, "", "missing page count")
    return HyperlinkGraph(n, tuple(tuple(t) for t in out_links))


def serialize_graph(g):
    """Render a graph in the text format accepted by parse_graph."""
    lines = [str(g.n)]
    for u, targets in enumerate(g.out_links):
        lines.extend(f"{u} {v}" for v in targets)
    return "\n".join(lines) + "\n"


def load_graph(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_graph(f)
    except UnicodeDecodeError as e:
        raise GraphFormatError(f"{path}: not UTF-8 text ({e.reason} at byte {e.start})") from e


def save_graph(g, path):
    Path(path).write_text(serialize_graph(g), encoding="utf-8")


def generate_synthetic(n, threshold=0.5, seed=0):
    """
    Random graph built by thresholding an n x n uniform matrix.

    Entry (i, j) keeps the link j -> i when its draw is >= threshold,
    self-pairs included. A page left without out-links gets one uniformly
    random target drawn from the same stream, so every output is valid.

    Args:
        n (int): number of pages
        threshold (float): cut-off in [0, 1]
        seed (int): generator seed

    Returns:
        HyperlinkGraph: graph with no dangling pages
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if n > MAX_SYNTHETIC_PAGES:
        raise ConfigError(f"n must be <= {MAX_SYNTHETIC_PAGES} for the dense generator, got {n}")
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold must lie in [0, 1], got {threshold}")

    rng = make_rng(seed)
    # Rows are drawn in order, so the stream matches one n x n draw
    columns = [[] for _ in range(n)]
    for i in range(n):
        for j in np.flatnonzero(rng.random(n) >= threshold):
            columns[j].append(i)

    patched = 0
    out_links = []
    for targets in columns:
        if not targets:
            targets = [int(rng.integers(0, n))]
            patched += 1
        out_links.append(tuple(targets))

    if patched:
        logger.debug("patched %d empty columns with a random out-link", patched)
    return HyperlinkGraph(n, tuple(out_links))


def strong_component_count(g):
    count, _ = connected_components(g.adjacency(), directed=True, connection="strong")
    return int(count)


def is_strongly_connected(g):
    """True iff every page reaches every other page along links."""
    return strong_component_count(g) == 1
