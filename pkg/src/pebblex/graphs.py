"""Simple undirected graphs: paths, cliques, bouquets and edge lists.

Vertices are dense integers ``0..n-1``.  Constructors record a ``shape`` tag
so the pebbling solvers can dispatch to a fast exact method.

Bouquet labeling (stable, used by serialized distributions): arm ``a``
occupies ``a*(L-1) .. a*(L-1)+L-2`` ordered from the free end towards the
hub, the hub is ``g*(L-1)``, and the remaining clique vertices follow.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError

DISTANCE_CACHE_CAP = 4096
EDGE_MATERIALIZE_CAP = 200_000


@dataclass(frozen=True)
class BouquetSpec:
    """Parameters of the bouquet: ``g`` arms of ``L`` vertices glued to a clique."""

    n: int
    g: int
    L: int

    def __post_init__(self):
        if self.n < 1 or self.g < 0 or self.L < 1:
            raise PreconditionError(f"bad bouquet parameters {self}")
        if self.g * (self.L - 1) + 1 > self.n:
            raise PreconditionError(
                f"bouquet needs g*(L-1)+1 <= n, got {self.g}*({self.L}-1)+1 > {self.n}"
            )

    @property
    def m(self) -> int:
        """Clique size, hub included."""
        return self.n - self.g * (self.L - 1)

    @property
    def hub(self) -> int:
        return self.g * (self.L - 1)

    def arm(self, a: int) -> range:
        """Vertices of arm ``a``, free end first, hub neighbour last."""
        base = a * (self.L - 1)
        return range(base, base + self.L - 1)

    @property
    def clique(self) -> range:
        """Clique vertices other than the hub."""
        return range(self.hub + 1, self.n)


class Graph:
    """Immutable simple undirected graph on ``0..n-1``.

    Bouquets with large cliques keep their edge set implicit (``edges=None``);
    it is materialized only on request, and distances use a closed form.
    """

    __slots__ = ("_n", "_edges", "_shape", "_bouquet", "_adj", "_connected", "_dist")

    def __init__(self, n: int, edges: frozenset | None, shape: str = "general",
                 bouquet: BouquetSpec | None = None):
        if n < 1:
            raise PreconditionError("the graph with no vertices is not allowed")
        if edges is None and bouquet is None:
            raise PreconditionError("implicit edges are only available for bouquets")
        if bouquet is not None and bouquet.n != n:
            raise PreconditionError("bouquet size does not match vertex count")
        self._n = n
        self._edges = None if edges is None else frozenset(edges)
        self._shape = shape
        self._bouquet = bouquet
        self._adj = None
        self._dist = None
        # bouquets are connected by construction
        self._connected = True if edges is None else len(_bfs(self.adjacency, 0)) == n

    def __setattr__(self, name, value):
        if hasattr(self, "_connected"):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    def __repr__(self):
        return f"Graph(n={self._n}, shape={self._shape!r}, edges={self.edge_count})"

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], shape: str = "general",
                   bouquet: BouquetSpec | None = None) -> "Graph":
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) outside 0..{n - 1}")
            es.add(frozenset((u, v)))
        return cls(n, frozenset(es), shape, bouquet)

    n = property(lambda self: self._n)
    shape = property(lambda self: self._shape)
    bouquet = property(lambda self: self._bouquet)
    connected = property(lambda self: self._connected)

    @property
    def edges(self) -> frozenset:
        if self._edges is None:
            if self.edge_count > EDGE_MATERIALIZE_CAP:
                raise PreconditionError(
                    f"{self.edge_count} edges exceed the materialization cap "
                    f"{EDGE_MATERIALIZE_CAP}")
            object.__setattr__(self, "_edges",
                               frozenset(frozenset(e) for e in _bouquet_edges(self._bouquet)))
        return self._edges

    @property
    def adjacency(self) -> tuple:
        if self._adj is None:
            adj: list[set[int]] = [set() for _ in range(self._n)]
            for e in self.edges:
                u, v = tuple(e)
                adj[u].add(v)
                adj[v].add(u)
            object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))
        return self._adj

    def neighbors(self, v: int) -> tuple:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def edge_count(self) -> int:
        if self._edges is None:
            b = self._bouquet
            return b.g * (b.L - 1) + b.m * (b.m - 1) // 2
        return len(self._edges)

    @property
    def is_tree(self) -> bool:
        return self.connected and self.edge_count == self.n - 1

    def distances(self) -> np.ndarray:
        """All-pairs distance matrix, cached; only for ``n <= DISTANCE_CACHE_CAP``."""
        if self.n > DISTANCE_CACHE_CAP:
            raise PreconditionError(
                f"all-pairs distances disabled above {DISTANCE_CACHE_CAP} vertices; "
                "use distances_from"
            )
        if self._dist is None:
            d = np.array([distances_from(self, v) for v in range(self.n)], dtype=np.int64)
            d.setflags(write=False)
            object.__setattr__(self, "_dist", d)
        return self._dist

    def distance(self, u: int, v: int) -> int:
        if self.n <= DISTANCE_CACHE_CAP:
            return int(self.distances()[u, v])
        return int(distances_from(self, u)[v])


def _bfs(adjacency, source: int) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distances_from(graph: Graph, v: int) -> np.ndarray:
    """Breadth-first shortest-path distances from ``v``."""
    if not 0 <= v < graph.n:
        raise PreconditionError(f"vertex {v} not in graph")
    if graph._edges is None:
        return bouquet_distances_from(graph.bouquet, v)
    dist = _bfs(graph.adjacency, v)
    if len(dist) < graph.n:
        missing = next(u for u in range(graph.n) if u not in dist)
        raise PreconditionError(f"graph is disconnected: vertex {missing} unreachable from {v}")
    out = np.empty(graph.n, dtype=np.int64)
    for u, d in dist.items():
        out[u] = d
    return out


def bouquet_distances_from(spec: BouquetSpec, v: int) -> np.ndarray:
    """Closed-form distances from ``v`` in the bouquet ``spec``.

    Arm vertex ``a*(L-1) + k`` sits ``L-1-k`` steps from the hub; two vertices
    on different arms (or an arm and the clique) meet through the hub, and
    distinct clique vertices are adjacent.
    """
    n, hub, seg = spec.n, spec.hub, spec.L - 1
    idx = np.arange(n)
    to_hub = np.ones(n, dtype=np.int64)
    to_hub[hub] = 0
    arm_of = np.full(n, -1)
    if seg:
        on_arm = idx < hub
        arm_of[on_arm] = idx[on_arm] // seg
        to_hub[on_arm] = seg - idx[on_arm] % seg
    out = to_hub + to_hub[v]
    if arm_of[v] >= 0:
        same = arm_of == arm_of[v]
        out[same] = np.abs(to_hub[same] - to_hub[v])
    elif v != hub:
        out[hub + 1:] = 1
    out[v] = 0
    return out


def _bouquet_edges(spec: BouquetSpec):
    for a in range(spec.g):
        arm = spec.arm(a)
        yield from ((u, u + 1) for u in arm[:-1])
        if len(arm):
            yield (arm[-1], spec.hub)
    core = [spec.hub, *spec.clique]
    for i, u in enumerate(core):
        for w in core[i + 1:]:
            yield (u, w)


def make_path(n: int) -> Graph:
    """The ``n``-vertex path ``0 - 1 - ... - n-1``."""
    if n < 1:
        raise PreconditionError("a path needs at least one vertex")
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)), shape="path")


def make_clique(n: int) -> Graph:
    """Complete graph; tagged as the degenerate bouquet ``(n, 0, 1)``."""
    return make_bouquet(BouquetSpec(n, 0, 1))


def make_bouquet(spec: BouquetSpec) -> Graph:
    """The bouquet graph; clique edges stay implicit above ``EDGE_MATERIALIZE_CAP``."""
    if spec.m == 1 and spec.g == 1:
        shape = "path"
    elif spec.m == spec.n:
        shape = "clique"
    else:
        shape = "bouquet"
    if spec.m * (spec.m - 1) // 2 > EDGE_MATERIALIZE_CAP:
        return Graph(spec.n, None, shape, spec)
    return Graph.from_edges(spec.n, _bouquet_edges(spec), shape=shape, bouquet=spec)


def make_tree(parents: Sequence[int]) -> Graph:
    """Tree from a parent list; ``parents[i]`` is the parent of vertex ``i+1``."""
    return Graph.from_edges(len(parents) + 1, ((p, i + 1) for i, p in enumerate(parents)))


def parse_graph(literal: str) -> Graph:
    """Parse ``path:<n>``, ``clique:<n>``, ``bouquet:<n>:<g>:<L>`` or an edge-list file.

    Edge-list files hold one 0-based ``u v`` pair per line; ``#`` starts a
    comment.  The vertex count is one more than the largest label seen.
    """
    kind, _, rest = literal.partition(":")
    try:
        if kind == "path":
            return make_path(int(rest))
        if kind == "clique":
            return make_clique(int(rest))
        if kind == "bouquet":
            n, g, L = (int(x) for x in rest.split(":"))
            return make_bouquet(BouquetSpec(n, g, L))
    except ValueError as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise PreconditionError(f"bad graph literal {literal!r}") from exc
    path = Path(literal)
    if not path.is_file():
        raise PreconditionError(f"unknown graph literal {literal!r}")
    edges = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            u, v = line.split()
            edges.append((int(u), int(v)))
    if not edges:
        return Graph(1, frozenset())
    n = 1 + max(max(e) for e in edges)
    return Graph.from_edges(n, edges)
