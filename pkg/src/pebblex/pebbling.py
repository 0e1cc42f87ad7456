"""Exact pebblability and solvability decisions.

A pebbling move takes two pebbles off a vertex and puts one on a neighbour.
Solvers here are exact: a reachability oracle for tiny instances, plus
closed-form sweeps for trees, paths and bouquets.  The batch entry point
:func:`solvable_batch` evaluates many distributions at once for Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import path_solvable_rows
from .errors import OracleBudgetError, PreconditionError
from .graphs import BouquetSpec, Graph, distances_from

ORACLE_STATE_CAP = 10_000_000
METHODS = ("auto", "bruteforce", "path", "tree", "bouquet")


@dataclass(frozen=True)
class PebbleDistribution:
    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise PreconditionError("pebble counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, i):
        return self.counts[i]


@dataclass(frozen=True)
class SolvabilityVerdict:
    solvable: bool
    witness_unpebblable: int | None = None

    def to_dict(self) -> dict:
        return {"solvable": self.solvable, "witness": self.witness_unpebblable}


def _counts(dist, n: int | None = None) -> tuple:
    counts = dist.counts if isinstance(dist, PebbleDistribution) else tuple(int(c) for c in dist)
    if any(c < 0 for c in counts):
        raise PreconditionError("pebble counts must be nonnegative")
    if n is not None and len(counts) != n:
        raise PreconditionError(f"distribution has {len(counts)} entries for {n} vertices")
    return counts


def _verdict(unpebblable) -> SolvabilityVerdict:
    for v, bad in enumerate(unpebblable):
        if bad:
            return SolvabilityVerdict(False, v)
    return SolvabilityVerdict(True)


# -- brute force -------------------------------------------------------------

def _explore(graph: Graph, counts: tuple, target: int | None, cap: int) -> set:
    """Vertices that carry a pebble in some reachable distribution.

    Depth-first over distinct distributions; every move lowers the total so
    the state space is finite.  Stops early once ``target`` is covered.
    """
    adj = graph.adjacency
    covered = {v for v, c in enumerate(counts) if c}
    if target is not None and target in covered:
        return covered
    # with a target, moves that end closer to it are explored first
    rank = distances_from(graph, target) if target is not None else None
    seen = {counts}
    stack = [counts]
    while stack:
        state = stack.pop()
        moves = [(v, u) for v, c in enumerate(state) if c >= 2 for u in adj[v]]
        if rank is not None:
            moves.sort(key=lambda vu: -rank[vu[1]])
        for v, u in moves:
            nxt = list(state)
            nxt[v] -= 2
            nxt[u] += 1
            nxt = tuple(nxt)
            if nxt in seen:
                continue
            if len(seen) >= cap:
                raise OracleBudgetError(f"oracle budget of {cap} states exceeded")
            seen.add(nxt)
            stack.append(nxt)
            covered.add(u)
            if target is not None and u == target:
                return covered
        if target is None and len(covered) == graph.n:
            break
    return covered


def is_pebblable_bruteforce(graph: Graph, dist, target: int, cap: int = ORACLE_STATE_CAP) -> bool:
    """True iff some move sequence leaves a pebble on ``target``."""
    counts = _counts(dist, graph.n)
    return target in _explore(graph, counts, target, cap)


def pebblable_set_bruteforce(graph: Graph, dist, cap: int = ORACLE_STATE_CAP) -> frozenset:
    return frozenset(_explore(graph, _counts(dist, graph.n), None, cap))


def _bruteforce_verdict(graph: Graph, counts: tuple, cap: int = ORACLE_STATE_CAP):
    covered = _explore(graph, counts, None, cap)
    return _verdict(v not in covered for v in range(graph.n))


# -- trees ---------------------------------------------------------------------

def _rooted(graph: Graph, root: int):
    order, parent = [root], {root: -1}
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for w in graph.adjacency[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
    return order, parent


def _tree_sweep(graph: Graph, cols: list, root: int = 0) -> list:
    """Maximum pebbles placeable on every vertex of a tree.

    ``cols[v]`` is a pebble count (int) or a column of counts (ndarray).
    Greedy bottom-up value ``t(v) = Z(v) + sum floor(t(c)/2)``, then a
    rerooting pass adds what the parent side can deliver.
    """
    order, parent = _rooted(graph, root)
    down = list(cols)
    for v in reversed(order[1:]):
        down[parent[v]] = down[parent[v]] + (down[v] >> 1)
    full = list(down)
    for v in order[1:]:
        p = parent[v]
        up = full[p] - (down[v] >> 1)
        full[v] = down[v] + (up >> 1)
    return full


def _require_tree(graph: Graph):
    if not graph.is_tree:
        raise PreconditionError("graph is not a tree")


def max_deliverable_tree(tree: Graph, dist, root: int) -> int:
    """Largest number of pebbles that can be gathered on ``root`` of a tree."""
    _require_tree(tree)
    counts = _counts(dist, tree.n)
    order, parent = _rooted(tree, root)
    t = list(counts)
    for v in reversed(order[1:]):
        t[parent[v]] += t[v] >> 1
    return t[root]


def tree_is_solvable(tree: Graph, dist) -> SolvabilityVerdict:
    _require_tree(tree)
    full = _tree_sweep(tree, list(_counts(dist, tree.n)))
    return _verdict(f < 1 for f in full)


# -- paths -------------------------------------------------------------------

def path_vertex_unpebblable(dist, i: int) -> bool:
    """Unpebblability of vertex ``i`` (0-based) on a path, by the weighted-sum test.

    Vertex ``i`` is unpebblable iff it is empty and both one-sided sums
    ``sum Z(j) 2^-|i-j|`` are below 1.  Evaluated in integer fixed point:
    each side is scaled by ``2^n`` so the strict comparison is exact.
    """
    counts = _counts(dist)
    n = len(counts)
    if not 0 <= i < n:
        raise PreconditionError(f"vertex {i} not on a {n}-path")
    if counts[i]:
        return False
    one = 1 << n
    left = sum(counts[j] << (n - (i - j)) for j in range(i))
    right = sum(counts[j] << (n - (j - i)) for j in range(i + 1, n))
    return left < one and right < one


def _path_sweep(cols: list) -> list:
    """Per-vertex unpebblability flags for a path; works on ints or columns."""
    n = len(cols)
    left = [0] * n
    d = 0
    for i in range(n):
        left[i] = d
        d = (d + cols[i]) >> 1
    bad = [None] * n
    d = 0
    for i in range(n - 1, -1, -1):
        bad[i] = (cols[i] == 0) & (d == 0) & (left[i] == 0)
        d = (d + cols[i]) >> 1
    return bad


def path_is_solvable(dist) -> SolvabilityVerdict:
    """Linear-time exact solvability on the path ``0 - 1 - ... - n-1``."""
    return _verdict(_path_sweep(list(_counts(dist))))


# -- bouquets ------------------------------------------------------------------

def _bouquet_sweep(spec: BouquetSpec, cols: list) -> list:
    """Per-vertex unpebblability flags for a bouquet (ints or numpy columns).

    The hub collects its own pebbles, half of every other clique pile and
    the greedy arm deliveries; a clique vertex receives halves directly; an
    arm vertex is fed from its free end and from the hub, as on a path.
    """
    hub = spec.hub
    clique = list(spec.clique)
    cliq_half = sum((cols[u] >> 1) for u in clique) if clique else 0 * cols[hub]
    arm_t = []
    for a in range(spec.g):
        t = 0 * cols[hub]
        for v in spec.arm(a):
            t = cols[v] + (t >> 1)
        arm_t.append(t)
    from_arms = sum((t >> 1) for t in arm_t) if arm_t else 0 * cols[hub]
    hub_total = cols[hub] + cliq_half + from_arms
    bad = [None] * spec.n
    bad[hub] = hub_total < 1
    hub_side = cols[hub] + from_arms
    for u in clique:
        bad[u] = (cols[u] == 0) & (cliq_half == 0) & (hub_side <= 1)
    for a in range(spec.g):
        arm = spec.arm(a)
        if not len(arm):
            continue
        from_end = []
        e = 0 * cols[hub]
        for v in arm:
            from_end.append(e)
            e = (cols[v] + e) >> 1
        h = (hub_total - (arm_t[a] >> 1)) >> 1
        for idx in range(len(arm) - 1, -1, -1):
            v = arm[idx]
            bad[v] = (cols[v] == 0) & (from_end[idx] == 0) & (h == 0)
            h = (cols[v] + h) >> 1
    return bad


def _bouquet_batch(spec: BouquetSpec, Z: np.ndarray) -> np.ndarray:
    """Row-wise bouquet solvability; the clique is handled with whole-matrix reductions."""
    rows = Z.shape[0]
    hub = spec.hub
    clique = Z[:, hub + 1:]
    cliq_half = (clique >> 1).sum(axis=1)
    arm_t = np.zeros((spec.g, rows), dtype=np.int64)
    for a in range(spec.g):
        t = np.zeros(rows, dtype=np.int64)
        for v in spec.arm(a):
            t = Z[:, v] + (t >> 1)
        arm_t[a] = t
    from_arms = (arm_t >> 1).sum(axis=0)
    hub_side = Z[:, hub] + from_arms
    hub_total = hub_side + cliq_half
    bad = hub_total < 1
    if clique.shape[1]:
        bad |= (clique == 0).any(axis=1) & (cliq_half == 0) & (hub_side <= 1)
    for a in range(spec.g):
        arm = spec.arm(a)
        if not len(arm):
            continue
        from_end = np.empty((len(arm), rows), dtype=np.int64)
        e = np.zeros(rows, dtype=np.int64)
        for idx, v in enumerate(arm):
            from_end[idx] = e
            e = (Z[:, v] + e) >> 1
        h = (hub_total - (arm_t[a] >> 1)) >> 1
        for idx in range(len(arm) - 1, -1, -1):
            v = arm[idx]
            bad |= (Z[:, v] == 0) & (from_end[idx] == 0) & (h == 0)
            h = (Z[:, v] + h) >> 1
    return ~bad


def bouquet_is_solvable(spec: BouquetSpec, dist) -> SolvabilityVerdict:
    counts = _counts(dist, spec.n)
    return _verdict(_bouquet_sweep(spec, list(counts)))


# -- potential -----------------------------------------------------------------

def weight_potential(graph: Graph, dist, v: int) -> Fraction:
    """``sum_x Z(x) 2^-d(x,v)`` as an exact rational.

    Pebbling moves never increase it, and a pebble on ``v`` forces it to be at
    least 1, so a value below 1 certifies that ``v`` is unpebblable.
    """
    counts = _counts(dist, graph.n)
    d = distances_from(graph, v)
    return sum((Fraction(c, 1 << int(d[x])) for x, c in enumerate(counts) if c), Fraction(0))


# -- dispatch ------------------------------------------------------------------

def auto_method(graph: Graph) -> str:
    if graph.shape == "path":
        return "path"
    if graph.bouquet is not None:
        return "bouquet"
    if graph.is_tree:
        return "tree"
    return "bruteforce"


def _check_method(graph: Graph, method: str) -> str:
    if method not in METHODS:
        raise PreconditionError(f"unknown method {method!r}")
    if method == "auto":
        return auto_method(graph)
    if method == "path" and graph.shape != "path":
        raise PreconditionError("method 'path' needs a path graph")
    if method == "bouquet" and graph.bouquet is None:
        raise PreconditionError("method 'bouquet' needs a bouquet graph")
    if method == "tree" and not graph.is_tree:
        raise PreconditionError("method 'tree' needs a tree")
    return method


def is_solvable(graph: Graph, dist, method: str = "auto") -> SolvabilityVerdict:
    """Solvability verdict with the lowest unpebblable vertex as witness."""
    if not graph.connected:
        raise PreconditionError("solvability is only defined here for connected graphs")
    method = _check_method(graph, method)
    counts = _counts(dist, graph.n)
    if method == "path":
        return path_is_solvable(counts)
    if method == "bouquet":
        return bouquet_is_solvable(graph.bouquet, counts)
    if method == "tree":
        return tree_is_solvable(graph, counts)
    return _bruteforce_verdict(graph, counts)


def solvable_batch(graph: Graph, Z: np.ndarray, method: str = "auto") -> np.ndarray:
    """Solvability of every row of an integer matrix of shape ``(samples, n)``."""
    method = _check_method(graph, method)
    Z = np.asarray(Z, dtype=np.int64)
    if Z.ndim != 2 or Z.shape[1] != graph.n:
        raise PreconditionError(f"expected shape (samples, {graph.n}), got {Z.shape}")
    if method == "path":
        return path_solvable_rows(np.ascontiguousarray(Z))
    if method == "bouquet":
        return _bouquet_batch(graph.bouquet, Z)
    if method == "tree":
        full = _tree_sweep(graph, list(np.ascontiguousarray(Z.T)))
        return ~np.logical_or.reduce(np.asarray([f < 1 for f in full], dtype=bool), axis=0)
    return np.array([_bruteforce_verdict(graph, tuple(row)).solvable for row in Z.tolist()],
                    dtype=bool)
