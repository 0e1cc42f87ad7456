"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np
import pytest

from pebblex.graphs import BouquetSpec

# Filled by tests/test_acceptance.py; printed at the end of the session.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def to_networkx(graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(graph.n))
    G.add_edges_from(tuple(e) for e in graph.edges)
    return G


def floyd_warshall(graph) -> np.ndarray:
    """All-pairs distances by the textbook triple loop (independent of BFS)."""
    n = graph.n
    D = np.full((n, n), np.iinfo(np.int64).max // 4, dtype=np.int64)
    np.fill_diagonal(D, 0)
    for e in graph.edges:
        u, v = tuple(e)
        D[u, v] = D[v, u] = 1
    for k in range(n):
        D = np.minimum(D, D[:, [k]] + D[[k], :])
    return D


def small_bouquet_specs(max_n: int):
    for n in range(1, max_n + 1):
        for g in range(0, n):
            for L in range(1, n + 1):
                if g * (L - 1) + 1 <= n and (L > 1 or g <= 1):
                    yield BouquetSpec(n, g, L)


def all_trees(n: int):
    """Parent lists of every labeled rooted tree shape with parents[i] <= i."""
    if n == 1:
        yield []
        return
    yield from (list(p) for p in itertools.product(*[range(i + 1) for i in range(n - 1)]))


def compositions_upto(n: int, max_total: int):
    for counts in itertools.product(range(max_total + 1), repeat=n):
        if sum(counts) <= max_total:
            yield counts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
