"""Uniform and geometric thresholds of monotone multiset families.

The uniform threshold is the least total ``T`` at which a uniformly random
composition of ``T`` lies in the family with probability at least 1/2.  The
geometric threshold is the mean total ``x`` at which the product-geometric
measure of the family equals 1/2.

Monte Carlo searches ask one question at a time -- "is the measure at this
point above or below 1/2?" -- and answer it with a group-sequential Wilson
test: looks at geometrically growing sample sizes, error ``alpha`` split
evenly over the looks.  A point whose interval still straddles 1/2 at the
per-query cap is recorded as unresolved rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from scipy.optimize import brentq
from scipy.stats import norm

from . import mc
from .errors import EnumerationCapError, PreconditionError
from .multiset import (
    ENUMERATION_CAP,
    MonotoneFamily,
    count_compositions,
    count_members,
    mu_exact,
    sample_geometric_batch,
    sample_uniform_total_batch,
    solvability_family,
)

ALPHA = 0.01
FIRST_LOOK = 128
BRACKET_OCTAVES = 20
MAX_QUERIES = 200
MAX_UNRESOLVED = 6
TIE_EXACT_CAP = 100_000

BELOW, ABOVE, UNRESOLVED = "below", "above", "unresolved"
_GEOMETRIC_TAG, _UNIFORM_TAG = 1, 2


@dataclass(frozen=True)
class ThresholdEstimate:
    value: float
    ci_low: float
    ci_high: float
    samples_used: int
    seed: int | None
    method: str
    budget_exhausted: bool = False

    def __post_init__(self):
        if not self.ci_low <= self.value <= self.ci_high:
            raise ValueError(f"value {self.value} outside [{self.ci_low}, {self.ci_high}]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QueryResult:
    verdict: str
    hits: int
    samples: int

    @property
    def fraction(self) -> float:
        return self.hits / self.samples


def half_test(trial, cap: int, seed: int, key: tuple, chunk: int, workers: int = 1,
              alpha: float = ALPHA, first_look: int = FIRST_LOOK) -> QueryResult:
    """Decide whether a success probability is above or below 1/2.

    Looks happen at ``first_look * 2**j`` samples (the last one at ``cap``);
    each look uses a Wilson interval at level ``alpha / looks``, so the whole
    sequence errs with probability at most ``alpha``.
    """
    if cap < 1:
        raise PreconditionError("per-query budget must be positive")
    looks = []
    n = min(first_look, cap)
    while True:
        looks.append(n)
        if n >= cap:
            break
        n = min(2 * n, cap)
    z = float(norm.ppf(1 - alpha / (2 * len(looks))))
    hits, done = 0, 0
    for n in looks:
        hits += mc.count_hits(trial, n, seed, key, chunk, start=done, workers=workers)
        done = n
        lo, hi = mc.wilson_interval(hits, n, z)
        if hi < 0.5:
            return QueryResult(BELOW, hits, n)
        if lo >= 0.5:
            return QueryResult(ABOVE, hits, n)
    return QueryResult(UNRESOLVED, hits, done)


# -- uniform thresholds ----------------------------------------------------

def _require_nonempty(M: MonotoneFamily):
    if M.name == "empty":
        raise PreconditionError("threshold undefined for the empty family")


def _contains_zero(M: MonotoneFamily) -> bool:
    return M((0,) * M.base_size)


def uniform_threshold_exact(M: MonotoneFamily, cap: int = ENUMERATION_CAP) -> int:
    """Least ``T`` with exact uniform measure at least 1/2.

    The uniform measures of an upper set never decrease with ``T``, so a
    galloping search followed by bisection finds the crossing.
    """
    _require_nonempty(M)
    if _contains_zero(M):
        return 0

    def above(T):
        return mu_exact(M, T, cap) >= Fraction(1, 2)

    lo, hi = 0, 1
    while not above(hi):
        lo, hi = hi, 2 * hi
        if count_compositions(M.base_size, hi) > cap:
            raise EnumerationCapError(
                f"measure still below 1/2 at T={lo}; enumeration cap reached "
                "(is the family empty?)")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if above(mid):
            hi = mid
        else:
            lo = mid
    return hi


def uniform_threshold_mc(M: MonotoneFamily, budget: int, seed: int = 0, workers: int = 1,
                         tie_exact_cap: int = TIE_EXACT_CAP) -> ThresholdEstimate:
    """Monte Carlo uniform threshold with an integer bracket as interval.

    Queries that stay unresolved at ``budget`` samples are settled by exact
    enumeration when the level has at most ``tie_exact_cap`` compositions
    (this is what makes exact ties at 1/2 decidable); otherwise the bracket
    widens over them and the result is flagged.
    """
    _require_nonempty(M)
    n = M.base_size
    if _contains_zero(M):
        return ThresholdEstimate(0, 0, 0, 0, seed, "mc")
    used = 0
    qi = 0

    def query(T):
        nonlocal used, qi
        qi += 1

        def trial(rng, rows):
            return M.member_batch(sample_uniform_total_batch(n, T, rows, rng))

        res = half_test(trial, budget, seed, (_UNIFORM_TAG, qi), mc.chunk_rows(T + n),
                        workers)
        used += res.samples
        if res.verdict == UNRESOLVED and count_compositions(n, T) <= tie_exact_cap:
            return ABOVE if mu_exact(M, T) >= Fraction(1, 2) else BELOW
        return res.verdict

    # lo: largest T known below; hi: smallest T known above; ties in between
    lo, hi = 0, None
    unresolved = []
    T = 1
    while hi is None:
        v = query(T)
        if v == ABOVE:
            hi = T
        elif v == BELOW:
            lo = T
            unresolved.clear()
        else:
            unresolved.append(T)
        if hi is None:
            T *= 2
        if qi > MAX_QUERIES:
            raise EnumerationCapError("uniform threshold search did not terminate")
    exhausted = False
    while hi - lo > 1:
        inner = [u for u in unresolved if lo < u < hi]
        if len(inner) >= MAX_UNRESOLVED or qi >= MAX_QUERIES:
            exhausted = True
            break
        # split the widest gap between known points
        pts = [lo, *inner, hi]
        a, b = max(zip(pts, pts[1:]), key=lambda ab: ab[1] - ab[0])
        if b - a <= 1:
            exhausted = True
            break
        mid = (a + b) // 2
        v = query(mid)
        if v == ABOVE:
            hi = mid
        elif v == BELOW:
            lo = mid
        else:
            unresolved.append(mid)
    inner = sorted(u for u in unresolved if lo < u < hi)
    if hi - lo == 1:
        return ThresholdEstimate(hi, hi, hi, used, seed, "mc")
    value = inner[0] if inner else (lo + 1 + hi) // 2
    return ThresholdEstimate(value, lo + 1, hi, used, seed, "mc", exhausted or bool(inner))


# -- geometric thresholds --------------------------------------------------

def nu_series(M: MonotoneFamily, x: float, tail: float = 1e-13,
              cap: int = ENUMERATION_CAP) -> float:
    """Exact (up to truncation) geometric measure via ``sum_T P(N = T) mu_T``.

    ``N`` is the total of the product-geometric draw; every composition of
    ``T`` has the same probability ``p^n (1-p)^T``.  Summation stops once the
    remaining mass of ``N`` is below ``tail``.  ``cap`` bounds the total
    number of compositions visited over all levels.
    """
    n = M.base_size
    if x == 0:
        return 1.0 if _contains_zero(M) else 0.0
    p = 1.0 / (1.0 + x / n)
    hits = _level_hits(M)
    total, mass, visited = 0.0, 0.0, 0
    weight = p ** n  # P(N = T)
    T = 0
    while 1.0 - mass > tail:
        size = count_compositions(n, T)
        visited += size
        if visited > cap:
            raise EnumerationCapError(
                f"geometric series needs more than {cap} compositions at x={x:g}")
        total += weight * hits(T) / size
        mass += weight
        weight *= (1 - p) * (T + n) / (T + 1)
        T += 1
        if weight == 0.0 and T > 10:
            break
    return total


def _level_hits(M: MonotoneFamily):
    """Per-level member counts, memoized on the family object."""
    cache = M.__dict__.setdefault("_level_hits", {})

    def hits(T):
        if T not in cache:
            cache[T] = count_members(M, T)
        return cache[T]

    return hits


def geometric_threshold_exact(M: MonotoneFamily, xtol: float = 1e-12,
                              cap: int = ENUMERATION_CAP) -> float:
    """Root of ``nu_series(M, x) = 1/2`` by Brent's method; small bases only.

    Uses the family's closed-form measure when it has one; otherwise the
    series, which raises :class:`EnumerationCapError` when an evaluation
    would visit more than ``cap`` compositions.
    """
    _require_nonempty(M)
    if _contains_zero(M):
        raise PreconditionError("geometric threshold needs a family without the empty multiset")
    if M.nu is not None:
        def nu(x):
            return M.nu(x)
    else:
        def nu(x):
            return nu_series(M, x, cap=cap)
    hi = float(M.base_size)
    while nu(hi) < 0.5:
        hi *= 2
        if hi > 2.0 ** 40:
            raise PreconditionError("measure never reaches 1/2")
    lo = hi / 2
    while nu(lo) > 0.5:
        lo /= 2
    return brentq(lambda x: nu(x) - 0.5, lo, hi, xtol=xtol, rtol=1e-14)


def geometric_threshold(M: MonotoneFamily, budget: int, seed: int = 0, workers: int = 1,
                        rel_tol: float = 0.01, max_queries: int = MAX_QUERIES,
                        max_unresolved: int = MAX_UNRESOLVED,
                        first_look: int = FIRST_LOOK) -> ThresholdEstimate:
    """Stochastic bisection in ``log x`` for the geometric threshold.

    The bracket starts at ``[n 2^-20, n 2^20]`` and is pushed outward if an
    end is not on the expected side.  The search stops when ``hi/lo`` is at
    most ``1 + rel_tol``; running out of queries or piling up unresolved
    points stops it early with ``budget_exhausted`` set.
    """
    _require_nonempty(M)
    if _contains_zero(M):
        raise PreconditionError("geometric threshold needs a family without the empty multiset")
    n = M.base_size
    chunk = mc.chunk_rows(n)
    used = 0
    qi = 0

    def query(x):
        nonlocal used, qi
        qi += 1

        def trial(rng, rows):
            return M.member_batch(sample_geometric_batch(n, x, rows, rng))

        res = half_test(trial, budget, seed, (_GEOMETRIC_TAG, qi), chunk, workers,
                        first_look=first_look)
        used += res.samples
        return res.verdict

    lo, hi = n * 2.0 ** -BRACKET_OCTAVES, n * 2.0 ** BRACKET_OCTAVES
    while query(lo) != BELOW:
        lo /= 2
        if qi >= max_queries:
            raise PreconditionError("could not find a point below the threshold")
    while query(hi) != ABOVE:
        lo = max(lo, hi)
        hi *= 2
        if qi >= max_queries:
            raise PreconditionError("could not find a point above the threshold")
    unresolved: list[float] = []
    exhausted = False
    while hi / lo > 1 + rel_tol:
        inner = sorted(u for u in unresolved if lo < u < hi)
        if len(inner) >= max_unresolved or qi >= max_queries:
            exhausted = True
            break
        pts = [lo, *inner, hi]
        a, b = max(zip(pts, pts[1:]), key=lambda ab: ab[1] / ab[0])
        mid = math.sqrt(a * b)
        v = query(mid)
        if v == ABOVE:
            hi = mid
        elif v == BELOW:
            lo = mid
        else:
            unresolved.append(mid)
    return ThresholdEstimate((lo + hi) / 2, lo, hi, used, seed, "mc", exhausted)


def geometric_pebbling_threshold(graph, budget: int, seed: int = 0, workers: int = 1,
                                 method: str = "auto", **kwargs) -> ThresholdEstimate:
    """Geometric threshold ``alpha * n`` of the solvable distributions of ``graph``."""
    if not graph.connected:
        raise PreconditionError("geometric pebbling threshold needs a connected graph")
    return geometric_threshold(solvability_family(graph, method), budget, seed, workers,
                               **kwargs)


# -- Chebyshev bracket ----------------------------------------------------------

@dataclass(frozen=True)
class ChebyshevBracket:
    """Two-sided bound on the uniform threshold from the geometric one."""

    geometric_threshold: float
    base_size: int
    theta: float
    spread: float
    lower: float
    upper: float


def chebyshev_bracket(geometric: float, base_size: int, theta: float) -> ChebyshevBracket:
    """Bound the uniform threshold given the geometric threshold ``geometric``.

    With ``S = sqrt(T' + T'^2/n)`` (the standard deviation of the geometric
    total) and ``sqrt(2) < theta < T'/S``:
    ``ceil(T' - theta S)(1 - 2/theta^2) <= T <= 1 + floor(T' + theta S)(1 + 2/(theta^2 - 2))``.
    """
    if geometric <= 0 or base_size < 1:
        raise PreconditionError("need a positive geometric threshold and base size")
    S = math.sqrt(geometric + geometric * geometric / base_size)
    if not math.sqrt(2) < theta < geometric / S:
        raise PreconditionError(
            f"theta must lie strictly between sqrt(2) and T'/S = {geometric / S:.6g}")
    lower = math.ceil(geometric - theta * S) * (1 - 2 / theta ** 2)
    upper = 1 + math.floor(geometric + theta * S) * (1 + 2 / (theta ** 2 - 2))
    return ChebyshevBracket(geometric, base_size, theta, S, lower, upper)


# -- ratio table ------------------------------------------------------------------

@dataclass(frozen=True)
class RatioRow:
    index: int
    base_size: int
    uniform: ThresholdEstimate
    geometric: ThresholdEstimate

    @property
    def ratio(self) -> float:
        return self.uniform.value / self.geometric.value

    @property
    def ratio_ci(self) -> tuple[float, float]:
        return (self.uniform.ci_low / self.geometric.ci_high,
                self.uniform.ci_high / self.geometric.ci_low)

    def as_tuple(self):
        return (self.index, self.base_size, self.uniform.value, self.geometric.value, self.ratio)


def _uniform_any(M, budget, seed, workers, exact_cap):
    try:
        T = uniform_threshold_exact(M, exact_cap)
        return ThresholdEstimate(T, T, T, 0, None, "exact")
    except EnumerationCapError:
        return uniform_threshold_mc(M, budget, seed, workers)


def _geometric_any(M, budget, seed, workers, exact_cap, rel_tol):
    try:
        x = geometric_threshold_exact(M, cap=50 * exact_cap)
        return ThresholdEstimate(x, x, x, 0, None, "exact")
    except EnumerationCapError:
        return geometric_threshold(M, budget, seed, workers, rel_tol=rel_tol)


def threshold_ratio_table(families: Sequence[MonotoneFamily], budget: int, seed: int = 0,
                          workers: int = 1, exact_cap: int = 20_000,
                          rel_tol: float = 0.01) -> list[RatioRow]:
    """Uniform and geometric thresholds side by side, one row per family.

    Exact methods are used while enumeration stays under ``exact_cap``
    compositions per level; larger families fall back to Monte Carlo.
    """
    rows = []
    for i, M in enumerate(families):
        if _contains_zero(M):
            raise PreconditionError(f"family {i} contains the empty multiset")
        u = _uniform_any(M, budget, seed + 2 * i, workers, exact_cap)
        g = _geometric_any(M, budget, seed + 2 * i + 1, workers, exact_cap, rel_tol)
        rows.append(RatioRow(i, M.base_size, u, g))
    return rows
