"""Random multisets over a finite base: fixed-total uniform and product-geometric.

A multiset on a base of size ``n`` is a nonnegative integer vector.  The
uniform model is uniform over all compositions of a total ``T`` into ``n``
parts; the geometric model puts i.i.d. geometric counts with mean ``T/n`` on
each coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterator, Sequence

import numpy as np

from . import mc
from .errors import EnumerationCapError, PreconditionError

ENUMERATION_CAP = 10_000_000
KEYED_SLOT_LIMIT = 1 << 16
UPPER_SET_NU_GENERATORS = 12


@dataclass(frozen=True)
class GeometricParams:
    """Geometric law on ``{0, 1, ...}`` with ``P(k) = p (1-p)^k``."""

    p: float

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise PreconditionError(f"geometric parameter must lie in (0, 1], got {self.p}")

    @classmethod
    def from_mean(cls, alpha: float) -> "GeometricParams":
        if alpha < 0:
            raise PreconditionError("mean must be nonnegative")
        return cls(1.0 / (1.0 + alpha))

    @property
    def mean(self) -> float:
        return 1.0 / self.p - 1.0

    @property
    def rate(self) -> float:
        """``-log(1-p)``: counts are ``floor(W / rate)`` for standard exponential ``W``."""
        return math.inf if self.p == 1 else -math.log1p(-self.p)

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        return self.p * (1.0 - self.p) ** k


@dataclass
class MonotoneFamily:
    """Membership oracle for an upper set of multisets on ``base_size`` points.

    ``batch`` (optional) maps an integer matrix of shape ``(samples, base_size)``
    to a boolean vector and is used by the Monte Carlo estimators.  ``nu``
    (optional) is a closed form of the geometric measure at mean total ``x``.
    """

    base_size: int
    contains: Callable[[Sequence[int]], bool]
    batch: Callable[[np.ndarray], np.ndarray] | None = None
    excludes_empty: bool = True
    name: str = "family"
    nu: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.base_size < 1:
            raise PreconditionError("base must be nonempty")

    def __call__(self, f) -> bool:
        return bool(self.contains(tuple(int(x) for x in f)))

    def member_batch(self, Z: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(Z), dtype=bool)
        return np.fromiter((self.contains(tuple(r)) for r in Z.tolist()), dtype=bool,
                           count=len(Z))


def _tail_ratio(n: int, x: float) -> float:
    """``1 - p`` for the per-coordinate geometric law at mean total ``x``: ``P(Z >= k) = (1-p)^k``."""
    return (x / n) / (1 + x / n)


def full_family(n: int) -> MonotoneFamily:
    return MonotoneFamily(n, lambda f: True, lambda Z: np.ones(len(Z), bool),
                          excludes_empty=False, name="all", nu=lambda x: 1.0)


def empty_family(n: int) -> MonotoneFamily:
    return MonotoneFamily(n, lambda f: False, lambda Z: np.zeros(len(Z), bool), name="empty",
                          nu=lambda x: 0.0)


def at_least_family(lower: Sequence[int]) -> MonotoneFamily:
    """Principal upper set ``{f : f >= lower}``."""
    lower = tuple(int(x) for x in lower)
    arr = np.array(lower, dtype=np.int64)
    return MonotoneFamily(
        len(lower),
        lambda f: all(a >= b for a, b in zip(f, lower)),
        lambda Z: np.all(Z >= arr, axis=1),
        excludes_empty=any(lower),
        name=f"at_least{lower}",
        nu=lambda x: _tail_ratio(len(lower), x) ** sum(lower),
    )


def total_at_least_family(n: int, k: int) -> MonotoneFamily:
    def nu(x):
        # the total is negative binomial: P(N = T) = C(T+n-1, n-1) p^n (1-p)^T
        q = _tail_ratio(n, x)
        below = math.fsum(comb(T + n - 1, n - 1) * (1 - q) ** n * q ** T for T in range(k))
        return max(0.0, 1.0 - below)

    return MonotoneFamily(n, lambda f: sum(f) >= k, lambda Z: Z.sum(axis=1) >= k,
                          excludes_empty=k > 0, name=f"total>={k}", nu=nu)


def upper_set_family(n: int, generators) -> MonotoneFamily:
    """Upper set generated by the given multisets (empty generators give the empty set)."""
    gens = [tuple(int(x) for x in g) for g in generators]
    if any(len(g) != n for g in gens):
        raise PreconditionError("generator length differs from base size")
    G = np.array(gens, dtype=np.int64).reshape(len(gens), n)

    def contains(f):
        return any(all(a >= b for a, b in zip(f, g)) for g in gens)

    def batch(Z):
        if not gens:
            return np.zeros(len(Z), bool)
        return np.any(np.all(Z[:, None, :] >= G[None, :, :], axis=2), axis=1)

    def nu(x):
        # inclusion-exclusion: P(Z >= max of a generator subset) = (1-p)^(sum of the max)
        q = _tail_ratio(n, x)
        terms = []
        for r in range(1, len(gens) + 1):
            for sub in combinations(gens, r):
                terms.append((-1) ** (r + 1) * q ** sum(map(max, zip(*sub))))
        return math.fsum(terms)

    return MonotoneFamily(n, contains, batch, excludes_empty=not any(not any(g) for g in gens),
                          name=f"upper{gens}",
                          nu=nu if len(gens) <= UPPER_SET_NU_GENERATORS else None)


def solvability_family(graph, method: str = "auto") -> MonotoneFamily:
    """Solvable distributions of a connected graph: an upper set missing 0."""
    from .pebbling import is_solvable, solvable_batch

    return MonotoneFamily(
        graph.n,
        lambda f: is_solvable(graph, f, method).solvable,
        lambda Z: solvable_batch(graph, Z, method),
        excludes_empty=True,
        name=f"solvable[{graph.shape}:{graph.n}]",
    )


# -- enumeration -------------------------------------------------------------

def count_compositions(n: int, T: int) -> int:
    return comb(T + n - 1, n - 1)


def enumerate_compositions(n: int, T: int, cap: int = ENUMERATION_CAP) -> Iterator[tuple]:
    """All compositions of ``T`` into ``n`` parts, first coordinate descending."""
    if n < 1 or T < 0:
        raise PreconditionError("need n >= 1 and T >= 0")
    size = count_compositions(n, T)
    if size > cap:
        raise EnumerationCapError(f"{size} compositions exceed cap {cap}")

    def rec(k, rest):
        if k == 1:
            yield (rest,)
            return
        for first in range(rest, -1, -1):
            for tail in rec(k - 1, rest - first):
                yield (first, *tail)

    return rec(n, T)


def composition_array(n: int, T: int, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """All compositions of ``T`` into ``n`` parts as rows, in :func:`enumerate_compositions` order."""
    if n < 1 or T < 0:
        raise PreconditionError("need n >= 1 and T >= 0")
    size = count_compositions(n, T)
    if size > cap:
        raise EnumerationCapError(f"{size} compositions exceed cap {cap}")
    # rows[t] holds the compositions of t into the last k parts
    rows = [np.array([[t]], dtype=np.int64) for t in range(T + 1)]
    for k in range(2, n + 1):
        new = []
        for t in range(T + 1):
            blocks = [np.column_stack([np.full(len(rows[t - f]), f, dtype=np.int64),
                                       rows[t - f]]) for f in range(t, -1, -1)]
            new.append(np.concatenate(blocks))
        rows = new
    return rows[T]


def count_members(M: MonotoneFamily, T: int, cap: int = ENUMERATION_CAP) -> int:
    """Number of compositions of ``T`` that lie in ``M``."""
    n = M.base_size
    if M.batch is not None:
        return int(np.count_nonzero(M.member_batch(composition_array(n, T, cap))))
    return sum(1 for f in enumerate_compositions(n, T, cap) if M.contains(f))


def mu_exact(M: MonotoneFamily, T: int, cap: int = ENUMERATION_CAP) -> Fraction:
    """Fraction of compositions of ``T`` that lie in ``M``."""
    return Fraction(count_members(M, T, cap), count_compositions(M.base_size, T))


# -- sampling ------------------------------------------------------------------

def _check(n, T):
    if n < 1 or T < 0:
        raise PreconditionError("need n >= 1 and T >= 0")


def sample_uniform_total(n: int, T: int, rng: np.random.Generator) -> tuple:
    """One uniform composition of ``T`` into ``n`` parts.

    Coordinates are drawn one at a time from their exact marginal
    ``P(f1 = k) = C(T-k+n-2, n-2) / C(T+n-1, n-1)`` by inverse CDF, using the
    ratio ``P(k+1)/P(k) = (T-k) / (T-k+n-2)``.
    """
    _check(n, T)
    out = []
    rest = T
    for k in range(n, 1, -1):
        u = rng.random()
        if rest == 0:
            out.append(0)
            continue
        # P(first = 0) = (k-1)/(rest+k-1)
        prob = (k - 1) / (rest + k - 1)
        cum = prob
        first = 0
        while u >= cum and first < rest:
            prob *= (rest - first) / (rest - first + k - 2)
            first += 1
            cum += prob
        out.append(first)
        rest -= first
    out.append(rest)
    return tuple(out)


def sample_uniform_total_batch(n: int, T: int, rows: int, rng: np.random.Generator) -> np.ndarray:
    """``rows`` uniform compositions via stars and bars.

    The ``n-1`` bar positions among ``T+n-1`` slots are the slots holding the
    ``n-1`` smallest of i.i.d. uniform keys, i.e. a uniform random subset.
    Very long rows fall back to per-row sampling without replacement.
    """
    _check(n, T)
    out = np.empty((rows, n), dtype=np.int64)
    if n == 1:
        out[:, 0] = T
        return out
    slots = T + n - 1
    if slots <= KEYED_SLOT_LIMIT:
        keys = rng.random((rows, slots))
        bars = np.sort(np.argpartition(keys, n - 2, axis=1)[:, :n - 1], axis=1)
    else:
        bars = np.array([np.sort(rng.choice(slots, size=n - 1, replace=False))
                         for _ in range(rows)], dtype=np.int64).reshape(rows, n - 1)
    out[:, 0] = bars[:, 0]
    out[:, 1:-1] = np.diff(bars, axis=1) - 1
    out[:, -1] = slots - 1 - bars[:, -1]
    return out


def geometric_param(n: int, T: float) -> GeometricParams:
    """Per-coordinate law of the product-geometric model with mean total ``T``."""
    return GeometricParams(1.0 / (1.0 + T / n))


def sample_geometric_batch(n: int, T: float, rows: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. geometric counts with mean ``T/n``, as ``floor(W / rate)``.

    ``W`` standard exponential makes this the inverse-CDF draw
    ``floor(log U / log(1-p))`` with ``U = exp(-W)``.
    """
    _check(n, T)
    if T == 0:
        return np.zeros((rows, n), dtype=np.int64)
    rate = geometric_param(n, T).rate
    W = rng.standard_exponential((rows, n))
    W /= rate
    return np.floor(W, out=W).astype(np.int64)


def sample_geometric_product(n: int, T: float, rng: np.random.Generator) -> tuple:
    return tuple(sample_geometric_batch(n, T, 1, rng)[0].tolist())


def nu_estimate(M: MonotoneFamily, x: float, samples: int, seed: int = 0,
                workers: int = 1, key: tuple = (0,)) -> mc.Estimate:
    """Monte Carlo estimate of the geometric measure of ``M`` at mean total ``x``."""
    if samples < 1:
        raise PreconditionError("need at least one sample")
    n = M.base_size

    def trial(rng, rows):
        return M.member_batch(sample_geometric_batch(n, x, rows, rng))

    return mc.estimate(trial, samples, seed, ("nu", *key), mc.chunk_rows(n), workers)
