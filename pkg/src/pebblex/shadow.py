"""Lower shadows of multiset families and exact checks of the shadow bounds.

Everything here is exact: set sizes are integers and measures are
:class:`fractions.Fraction`.  The checks are brute force -- shadows are
computed directly, never through a compression theorem.

Conventions: ``mu_T(S)`` is the fraction of compositions of ``T`` (into
``n`` parts) that lie in ``S``.  The shadow bound says that if
``mu_{T+1}(S) >= x/(T+1+x)`` then ``mu_T(shadow S) >= x/(T+x)``, with
``0/0 = 0`` when ``T = x = 0``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import EnumerationCapError, PebblexError, PreconditionError
from .multiset import MonotoneFamily, count_compositions, enumerate_compositions, upper_set_family

EXHAUSTIVE_LEVEL_CAP = 20


class ShapeViolation(PebblexError):
    """A uniform-measure sequence that fits none of the admissible shapes."""


@dataclass(frozen=True)
class MultisetSet:
    """Finite set of multisets on ``n`` points, stored as count vectors."""

    n: int
    members: frozenset

    @classmethod
    def of(cls, n: int, vectors: Iterable[Sequence[int]]) -> "MultisetSet":
        members = frozenset(tuple(int(c) for c in v) for v in vectors)
        for v in members:
            if len(v) != n or min(v, default=0) < 0:
                raise PreconditionError(f"{v} is not a multiset on {n} points")
        return cls(n, members)

    @classmethod
    def level(cls, n: int, T: int) -> "MultisetSet":
        return cls(n, frozenset(enumerate_compositions(n, T)))

    @property
    def totals(self) -> set:
        return {sum(v) for v in self.members}

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return tuple(v) in self.members

    def __iter__(self):
        return iter(sorted(self.members, reverse=True))


def lower_shadow(S: MultisetSet) -> MultisetSet:
    """All ``f`` with ``f + e_b`` in ``S`` for some point ``b``."""
    out = set()
    for g in S.members:
        for b, c in enumerate(g):
            if c:
                out.add(g[:b] + (c - 1,) + g[b + 1:])
    return MultisetSet(S.n, frozenset(out))


def level_measure(S: MultisetSet, T: int) -> Fraction:
    """``mu_T(S)``: share of the compositions of ``T`` that lie in ``S``."""
    hits = sum(1 for v in S.members if sum(v) == T)
    return Fraction(hits, count_compositions(S.n, T))


# -- cascade representation ----------------------------------------------------

@dataclass(frozen=True)
class CascadeRep:
    """``s = sum_i C(t-i-1+d_i, t-i)`` with ``d_0 >= d_1 >= ... > 0``."""

    t: int
    d: tuple

    @property
    def value(self) -> int:
        return sum(comb(self.t - i - 1 + di, self.t - i) for i, di in enumerate(self.d))

    @property
    def shadow_size(self) -> int:
        """``sum_i C(t-i-2+d_i, t-i-1)``: the matching lower bound on the shadow."""
        return sum(comb(self.t - i - 2 + di, self.t - i - 1) for i, di in enumerate(self.d))


def cascade_representation(s: int, t: int, n: int | None = None) -> CascadeRep:
    """Greedy cascade: take the largest ``d`` with ``C(k-1+d, k) <= rest`` at each level ``k``.

    ``n`` (optional) checks the intended range ``s < C(t+n-1, t)``.
    """
    if s <= 0:
        raise PreconditionError("cascade needs a positive size")
    if t <= 0:
        raise PreconditionError("cascade needs a positive level")
    if n is not None and s >= comb(t + n - 1, t):
        raise PreconditionError(f"size {s} is not below C({t + n - 1}, {t})")
    rest, d = s, []
    for k in range(t, 0, -1):
        if rest == 0:
            break
        # largest dk with C(k-1+dk, k) <= rest; C(k-1+1, k) = 1 so dk >= 1
        lo, hi = 1, 2
        while comb(k - 1 + hi, k) <= rest:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if comb(k - 1 + mid, k) <= rest:
                lo = mid
            else:
                hi = mid
        d.append(lo)
        rest -= comb(k - 1 + lo, k)
    rep = CascadeRep(t, tuple(d))
    assert rest == 0 and rep.value == s
    return rep


# -- shadow bound ---------------------------------------------------------------

def extremal_x(mu: Fraction, level: int) -> Fraction | None:
    """Largest ``x`` with ``mu >= x/(level+x)``; ``None`` stands for infinity (``mu = 1``)."""
    if mu >= 1:
        return None
    return level * mu / (1 - mu)


def _ratio(x: Fraction, T: int) -> Fraction:
    return Fraction(0) if T + x == 0 else x / (T + x)


@dataclass
class ShadowReport:
    n: int
    T: int
    mode: str
    cases: int = 0
    tight: int = 0
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = [[list(map(list, S)), str(a), str(b)] for S, a, b in self.violations]
        return d

    @property
    def ok(self) -> bool:
        return not self.violations


def check_shadow_bound(S: MultisetSet, T: int) -> tuple[bool, Fraction, Fraction]:
    """Check the bound for ``S`` (a subset of level ``T+1``) at its extremal ``x``.

    Returns ``(holds, mu_T(shadow), required)``.  The full level is the
    trivial case: its shadow is the whole level ``T``.
    """
    mu = level_measure(S, T + 1)
    x = extremal_x(mu, T + 1)
    got = level_measure(lower_shadow(S), T)
    need = Fraction(1) if x is None else _ratio(x, T)
    return got >= need, got, need


def verify_shadow_bound(n: int, T: int, mode: str = "exhaustive", trials: int = 1000,
                    seed: int = 0) -> ShadowReport:
    """Run the shadow bound over subsets of level ``T+1`` on ``n`` points.

    ``exhaustive`` visits every subset (the level may have at most
    ``EXHAUSTIVE_LEVEL_CAP`` elements); ``sampled`` intersects ``trials``
    random upper sets with the level.
    """
    if n < 1 or T < 0:
        raise PreconditionError("need n >= 1 and T >= 0")
    level = sorted(enumerate_compositions(n, T + 1), reverse=True)
    report = ShadowReport(n, T, mode)

    def run(S):
        holds, got, need = check_shadow_bound(S, T)
        report.cases += 1
        report.tight += got == need
        if not holds:
            report.violations.append((tuple(sorted(S.members)), got, need))

    if mode == "exhaustive":
        if len(level) > EXHAUSTIVE_LEVEL_CAP:
            raise EnumerationCapError(
                f"level {T + 1} on {n} points has {len(level)} elements; "
                f"exhaustive mode allows {EXHAUSTIVE_LEVEL_CAP}")
        for k in range(len(level) + 1):
            for sub in combinations(level, k):
                run(MultisetSet(n, frozenset(sub)))
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            M = random_upper_set(n, rng, max_entry=T + 2)
            run(MultisetSet(n, frozenset(f for f in level if M.contains(f))))
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    return report


def verify_cascade_inequality(t: int, n: int, d: Sequence[int]) -> bool:
    """Check ``0 <= p < 1`` and ``(t-1+p) q >= p t`` for a cascade ``d``.

    ``p = sum_i C(t-i-1+d_i, t-i) / C(t-1+n, t)`` is the relative size of
    the set and ``q = sum_i C(t-i-2+d_i, t-i-1) / C(t-2+n, t-1)`` the
    relative size of the guaranteed shadow one level down.
    """
    d = tuple(int(x) for x in d)
    r = len(d)
    if t < 1 or n < 1 or t < r:
        raise PreconditionError("need positive t, n and t >= len(d)")
    if any(x <= 0 for x in d) or any(a < b for a, b in zip(d, d[1:])):
        raise PreconditionError("d must be positive and nonincreasing")
    if d and n <= d[0]:
        raise PreconditionError("need n > d_0")
    rep = CascadeRep(t, d)
    p = Fraction(rep.value, comb(t - 1 + n, t))
    q = Fraction(rep.shadow_size, comb(t - 2 + n, t - 1))
    return 0 <= p < 1 and (t - 1 + p) * q >= p * t


# -- upper sets ------------------------------------------------------------------

def random_upper_set(n: int, rng: np.random.Generator, max_gens: int = 4,
                     max_entry: int = 4) -> MonotoneFamily:
    """Upper set generated by a random antichain of small multisets (may be empty)."""
    k = int(rng.integers(0, max_gens + 1))
    gens = [tuple(int(v) for v in rng.integers(0, max_entry + 1, size=n)) for _ in range(k)]
    antichain = [g for g in set(gens)
                 if not any(h != g and all(a <= b for a, b in zip(h, g)) for h in gens)]
    fam = upper_set_family(n, sorted(antichain))
    if not antichain:
        fam.name = "empty"
    return fam


def mu_sequence(M: MonotoneFamily, horizon: int) -> list[Fraction]:
    """Exact ``mu_0(M), ..., mu_horizon(M)``."""
    n = M.base_size
    return [Fraction(sum(1 for f in enumerate_compositions(n, T) if M.contains(f)),
                     count_compositions(n, T)) for T in range(horizon + 1)]


def classify_mu_shape(mus: Sequence[Fraction]) -> str:
    """Shape of a uniform-measure sequence of an upper set.

    ``all-zero``; ``rise-then-ones`` (zeros, a strictly increasing run inside
    (0, 1), then ones -- the run may be empty); or ``rise`` (zeros then a
    strictly increasing run that stays below 1 within the horizon).
    """
    i = 0
    while i < len(mus) and mus[i] == 0:
        i += 1
    if i == len(mus):
        return "all-zero"
    prev = Fraction(0)
    while i < len(mus) and 0 < mus[i] < 1:
        if mus[i] <= prev:
            raise ShapeViolation(f"not strictly increasing at T={i}: {mus[i - 1]} -> {mus[i]}")
        prev = mus[i]
        i += 1
    if i == len(mus):
        return "rise"
    if mus[i] != 1 or any(m != 1 for m in mus[i:]):
        raise ShapeViolation(f"sequence leaves the admissible shapes at T={i}")
    return "rise-then-ones"


def mu_shape_classify(M: MonotoneFamily, horizon: int) -> str:
    return classify_mu_shape(mu_sequence(M, horizon))


@dataclass
class TransportReport:
    pairs: int = 0
    violations: list = field(default_factory=list)


def verify_transport(M: MonotoneFamily, horizon: int) -> TransportReport:
    """Check both directions of moving a measure bound between levels.

    For ``U <= T``: ``mu_T <= T/(T+x)`` implies ``mu_U <= U/(U+x)`` (``0/0 = 1``
    when ``U = x = 0``), and, for positive ``U``, ``mu_U >= U/(U+x)`` implies
    ``mu_T >= T/(T+x)``.  Each is tested at its extremal ``x``.
    """
    mus = mu_sequence(M, horizon)
    rep = TransportReport()
    for T in range(horizon + 1):
        for U in range(T + 1):
            rep.pairs += 1
            muT, muU = mus[T], mus[U]
            # downward: largest x allowed by mu_T
            if muT == 0:
                ok_down = muU == 0
            else:
                x = T * (1 - muT) / muT
                bound = Fraction(1) if U + x == 0 else Fraction(U) / (U + x)
                ok_down = muU <= bound
            # upward: smallest x allowed by mu_U
            ok_up = True
            if U > 0 and muU > 0:
                x = U * (1 - muU) / muU
                ok_up = muT >= Fraction(T) / (T + x)
            if not (ok_down and ok_up):
                rep.violations.append((U, T, muU, muT))
    return rep
