"""The hypoexponential variable ``Y = W_1 + W_2/2 + W_3/4 + ...`` and friends.

``W_i`` are i.i.d. standard exponentials.  This module evaluates

* the exact CDF of the truncation ``Y_n`` (finite partial fractions),
* the CDF of the limit through the alternating series
  ``F_c(x) = N * sum_i (-1)^(i+1) e_c(2^i x) / ((2-1)(4-1)...(2^i-1))``, where
  ``e_c(y) = e^-y - sum_{k<=c} (-y)^k/k!`` and ``N = prod_j 2^j/(2^j-1)``;
  every order ``c`` gives the same function, and the order is chosen so the
  sum is well conditioned,
* the periodic functions ``P`` and ``Q`` governing the small-``x``
  asymptotics, the theta function ``theta_4``, and the resulting asymptotic
  formulas, carried in log space,
* ``X(L, p, r) = P(Z_1 + Z_2/2 + ... + Z_L/2^(L-1) < r)`` for geometric ``Z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.signal import lfilter

from . import mc
from .errors import AccuracyError, OracleBudgetError, PreconditionError

LOG2 = math.log(2.0)
F0_MIN_X = 0.1
SERIES_REL_TOL = 1e-18
CDF_ACCURACY = 1e-9
DP_STATE_CAP = 10_000_000
# largest x with a solution c' of c' / 2^c' = x, attained at c' = 1/log 2
CPRIME_MAX_X = 2.0 ** -(1 / math.log(2) - math.log2(1 / math.log(2)))


@dataclass(frozen=True, order=True)
class LogProb:
    """A probability stored as its natural logarithm (``-inf`` for zero)."""

    log_value: float

    def __post_init__(self):
        if self.log_value > 1e-12:
            raise ValueError(f"log-probability {self.log_value} exceeds 0")

    @classmethod
    def from_value(cls, p: float) -> "LogProb":
        if p < 0:
            raise ValueError("negative probability")
        return cls(-math.inf if p == 0 else min(math.log(p), 0.0))

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @property
    def log2_value(self) -> float:
        return self.log_value / LOG2

    def __mul__(self, other: "LogProb") -> "LogProb":
        return LogProb(self.log_value + other.log_value)


# -- constants -------------------------------------------------------------------

@dataclass(frozen=True)
class YInfConstants:
    N: float
    log_N: float
    q: float
    K: float
    product_terms: int


def _log_N() -> tuple[float, int]:
    """``log prod_{j>=1} 2^j/(2^j-1)``, stopping once an increment is below 1e-16."""
    terms = []
    j = 1
    while True:
        inc = -math.log1p(-math.ldexp(1.0, -j))
        terms.append(inc)
        if inc < 1e-16:
            break
        j += 1
    return math.fsum(terms), j


@lru_cache(maxsize=None)
def constants() -> YInfConstants:
    log_N, terms = _log_N()
    q = math.exp(-2 * math.pi ** 2 / math.log(2))
    K = P_func(1.0) * theta4(0.0, q)
    return YInfConstants(math.exp(log_N), log_N, q, K, terms)


@lru_cache(maxsize=None)
def _log_prod_mersenne(i: int) -> float:
    """``log((2^1-1)(2^2-1)...(2^i-1))``."""
    if i == 0:
        return 0.0
    return _log_prod_mersenne(i - 1) + i * LOG2 + math.log1p(-math.ldexp(1.0, -i))


# -- sampling --------------------------------------------------------------------

def sample_Yinf_batch(rng: np.random.Generator, size: int, terms: int = 64) -> np.ndarray:
    """``size`` draws of ``sum_{i<terms} W_{i+1} / 2^i``."""
    if terms < 1:
        raise PreconditionError("need at least one term")
    W = rng.standard_exponential((size, terms))
    return W @ np.ldexp(1.0, -np.arange(terms))


def sample_Yinf(rng: np.random.Generator, terms: int = 64) -> float:
    return float(sample_Yinf_batch(rng, 1, terms)[0])


# -- truncated variable ---------------------------------------------------------

def cdf_Yn_exact(n: int, x: float) -> float:
    """``P(W_1 + ... + W_n/2^(n-1) <= x)`` by partial fractions.

    ``sum_i (1 - exp(-2^i x)) R_i`` with ``R_i = prod_{j != i} 2^j / (2^j - 2^i)``.
    """
    if not 1 <= n <= 30:
        raise PreconditionError("partial-fraction form supported for 1 <= n <= 30")
    if x <= 0:
        return 0.0
    terms = []
    for i in range(n):
        R = 1.0
        for j in range(n):
            if j != i:
                R *= 2.0 ** j / (2.0 ** j - 2.0 ** i)
        terms.append(-math.expm1(-math.ldexp(x, i)) * R)
    return min(1.0, max(0.0, math.fsum(terms)))


# -- e_c and the series F_c -----------------------------------------------------

def log_ec(y: float, c: int) -> tuple[int, float]:
    """Sign and log-magnitude of ``e_c(y) = e^-y - sum_{k<=c} (-y)^k / k!`` for ``y >= 0``.

    For ``y <= c`` the tail ``sum_{k>c} (-y)^k/k!`` is summed directly,
    factored as ``(-y)^(c+1)/(c+1)!`` times an alternating series with
    decreasing terms.  For ``y > c`` the partial sum is factored as
    ``(-y)^c/c!`` times an alternating series in ``k/y``; it dominates
    ``e^-y``, which enters only as a relative correction.
    """
    if y < 0:
        raise PreconditionError("e_c evaluated for y >= 0 only")
    if y == 0:
        return 0, -math.inf
    if c == 0:
        return -1, math.log(-math.expm1(-y))
    ly = math.log(y)
    if y <= c:
        terms, t, m = [1.0], 1.0, 0
        while True:
            m += 1
            t *= -y / (c + 1 + m)
            terms.append(t)
            if abs(t) < SERIES_REL_TOL:
                break
        S = math.fsum(terms)
        sign = -1 if (c + 1) % 2 else 1
        return sign, (c + 1) * ly - math.lgamma(c + 2) + math.log(S)
    terms, t = [1.0], 1.0
    for j in range(c):
        t *= -(c - j) / y
        terms.append(t)
    R = math.fsum(terms)
    log_P = c * ly - math.lgamma(c + 1) + math.log(R)
    ratio = math.exp(-y - log_P)
    if c % 2:  # partial sum negative: e_c = e^-y + |P|
        return 1, log_P + math.log1p(ratio)
    return -1, log_P + math.log1p(-ratio)


def _series_terms(x: float, c: int):
    """Signed log-terms of ``F_c(x) / N``."""
    out = []
    best = -math.inf
    i = 0
    while True:
        y = math.ldexp(x, i)
        s, l = log_ec(y, c)
        l -= _log_prod_mersenne(i)
        if s:
            out.append((-s if i % 2 == 0 else s, l))
            best = max(best, l)
        past_peak = y > 2 * (c + 1)
        if past_peak and l < best - 45:
            break
        i += 1
        if i > 1500:
            raise AccuracyError("series did not converge")
    return out, best


def log_F_c(x: float, c: int, accuracy: float = CDF_ACCURACY) -> tuple[float, float]:
    """``log F_c(x)`` and an estimate of its relative rounding error."""
    if x <= 0:
        return -math.inf, 0.0
    terms, best = _series_terms(x, c)
    scaled = [s * math.exp(l - best) for s, l in terms]
    S = math.fsum(scaled)
    mass = math.fsum(abs(v) for v in scaled)
    err = (8 + c) * 2.2e-16 * mass / abs(S) if S else math.inf
    if S <= 0 or err > accuracy:
        raise AccuracyError(
            f"F_{c}({x!r}) loses too much precision (relative error ~{err:.1e}); "
            "use a larger order")
    return constants().log_N + best + math.log(S), err


def select_order(x: float) -> int:
    """Series order used by :func:`cdf_Yinf` at ``x``.

    ``0`` for ``x >= 0.1``; below that, ``floor(c')`` where ``x = c' / 2^c'``
    with ``c' >= 1``, so that the largest terms sit near ``i = c``.
    """
    if x >= F0_MIN_X:
        return 0
    return max(1, math.floor(solve_cprime(x)))


def solve_cprime(x: float) -> float:
    """The root ``c' >= 1/log 2`` of ``c' - log2 c' = log2(1/x)``.

    The left side is smallest at ``c' = 1/log 2``, so a root exists only for
    ``x <= CPRIME_MAX_X``.
    """
    if not 0 < x <= CPRIME_MAX_X:
        raise PreconditionError(f"need 0 < x <= {CPRIME_MAX_X:.6g}")
    target = -math.log2(x)
    lo = 1 / LOG2
    hi = max(2.0, 2 * target + 2)
    f = lambda c: c - math.log2(c) - target  # noqa: E731
    if f(lo) >= 0:  # x at the edge, up to rounding
        return lo
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)


def log_cdf_Yinf(x: float, c: int | None = None) -> LogProb:
    """``log P(Y <= x)`` through ``F_c``; ``c`` defaults to :func:`select_order`."""
    if x <= 0:
        return LogProb(-math.inf)
    if c is None:
        c = select_order(x)
    if c < 0:
        raise PreconditionError("series order must be nonnegative")
    lv, _ = log_F_c(x, c)
    return LogProb(min(lv, 0.0))


def cdf_Yinf(x: float, c: int | None = None) -> float:
    return log_cdf_Yinf(x, c).value


def sf_Yinf(x: float) -> float:
    """``P(Y > x)``; for ``x >= 1`` summed as ``N sum_i (-1)^i e^(-2^i x) / prod``."""
    if x <= 0:
        return 1.0
    if x < 1:
        return 1.0 - cdf_Yinf(x)
    terms = []
    i = 0
    while True:
        t = math.exp(-math.ldexp(x, i) - _log_prod_mersenne(i))
        terms.append(t if i % 2 == 0 else -t)
        if t < 1e-300 or (terms[0] and t < terms[0] * 1e-18):
            break
        i += 1
    return constants().N * math.fsum(terms)


def tail_bound(x: float) -> float:
    """``min(1, N e^-x)``, an upper bound on ``P(Y > x)``."""
    if x <= 0:
        raise PreconditionError("tail bound needs x > 0")
    return min(1.0, math.exp(constants().log_N - x))


# -- periodic functions -----------------------------------------------------------

def P_func(z: float) -> float:
    """``sum_{j in Z} (-1)^j 2^(-j(j+1)/2) 2^j z / (2^j z + 1)`` for real ``z > 0``."""
    if not z > 0:
        raise PreconditionError("P is evaluated for z > 0 only")
    terms = [z / (z + 1)]
    scale = abs(terms[0])
    for sgn in (1, -1):
        j = sgn
        while True:
            w = math.ldexp(z, j)
            t = (-1) ** (j % 2) * math.ldexp(1.0, -j * (j + 1) // 2) * (w / (w + 1))
            terms.append(t)
            scale = max(scale, abs(t))
            if abs(t) < SERIES_REL_TOL * scale:
                break
            j += sgn
    return math.fsum(terms)


def Q_func(z: float, reduce: bool = True) -> float:
    """``2^(z(z-1)/2) P(2^z)``, which is even and has period 1.

    With ``reduce`` the argument is first taken mod 1, which keeps ``P``
    near ``[1, 2)`` where its series is well conditioned.
    """
    if reduce:
        z = z - math.floor(z)
    return math.exp(z * (z - 1) / 2 * LOG2) * P_func(2.0 ** z)


def theta4(z: float, q: float) -> float:
    """``1 + 2 sum_{i>=1} (-1)^i q^(i^2) cos(2 i z)``, truncated when ``q^(i^2) < 1e-30``."""
    if abs(q) >= 1:
        raise PreconditionError("theta_4 needs |q| < 1")
    terms = [1.0]
    i = 1
    while q != 0:
        qi = q ** (i * i)
        if abs(qi) < 1e-30:
            break
        terms.append(2 * (-1) ** i * qi * math.cos(2 * i * z))
        i += 1
    return math.fsum(terms)


# -- asymptotics ----------------------------------------------------------------

def asymp_log_cdf(cp: float) -> LogProb:
    """Leading term of ``log P(Y <= c'/2^c')`` (no ``1 + O(1/c')`` factor)."""
    if cp < 1:
        raise PreconditionError("need c' >= 1")
    K = constants()
    lv = (2 * K.log_N - 0.5 * math.log(2 * math.pi * cp) + cp
          - cp * (cp + 1) / 2 * LOG2 + math.log(Q_func(cp)))
    return LogProb(lv)


def asymp_log_cdf2(cpp: float, y: float) -> LogProb:
    """Leading term of ``log P(Y <= c'' y / 2^c'')`` for ``2^(-c''^(1/4)) <= y <= 2^(c''^(1/4))``."""
    if cpp < 6:
        raise PreconditionError("need c'' >= 6")
    edge = cpp ** 0.25
    ly2 = math.log2(y) if y > 0 else -math.inf
    if not -edge <= ly2 <= edge:
        raise PreconditionError(f"y must lie in [2^-{edge:.4g}, 2^{edge:.4g}]")
    K = constants()
    ly = math.log(y)
    lv = (2 * K.log_N - 0.5 * math.log(2 * math.pi * cpp) + cpp * (1 + ly)
          - cpp * (cpp + 1) / 2 * LOG2 + (1 - ly2) / 2 * ly + math.log(Q_func(cpp - ly2)))
    return LogProb(lv)


# -- weighted geometric sums ------------------------------------------------------

def _scaled_limit(L: int, r: float) -> int:
    """Largest integer ``S`` with ``S < r 2^(L-1)`` (sums scaled by ``2^(L-1)``)."""
    R = Fraction(r) * Fraction(2) ** (L - 1)
    return math.ceil(R) - 1


def _check_chi(L, p, r):
    if L < 0 or not 0 < p < 1 or r < 0:
        raise PreconditionError("need L >= 0, 0 < p < 1, r >= 0")


def chi_X(L: int, p: float, r: float, method: str = "auto", budget: int = 1_000_000,
          seed: int = 0, workers: int = 1) -> mc.Estimate:
    """``P(Z_1 + Z_2/2 + ... + Z_L/2^(L-1) < r)`` for i.i.d. geometric(p) ``Z``.

    The sum times ``2^(L-1)`` is the integer ``S = sum_k Z_k 2^(L-k)``.
    ``dp`` propagates the exact law of the Horner prefix ``S_k = 2 S_(k-1) + Z_k``
    truncated at the largest value that can still succeed; ``mc`` samples the
    same prefix with saturation.  ``auto`` picks ``dp`` when the state space
    is at most ``DP_STATE_CAP``.
    """
    _check_chi(L, p, r)
    if L == 0:
        v = 1.0 if r > 0 else 0.0
        return mc.Estimate(v, v, v, 0, 0)
    limit = _scaled_limit(L, r)
    if limit < 0:
        return mc.Estimate(0.0, 0.0, 0.0, 0, 0)
    if method == "auto":
        method = "dp" if limit < DP_STATE_CAP else "mc"
    if method == "dp":
        v = _chi_dp(L, p, limit)
        return mc.Estimate(v, v, v, 0, 0)
    if method == "mc":
        return _chi_mc(L, p, limit, budget, seed, workers)
    raise PreconditionError(f"unknown method {method!r}")


def _chi_dp(L: int, p: float, limit: int) -> float:
    if limit >= DP_STATE_CAP:
        raise OracleBudgetError(f"dp needs {limit + 1} states; cap is {DP_STATE_CAP}")
    dist = np.ones(1)
    for k in range(1, L + 1):
        cap = limit >> (L - k)
        u = np.zeros(cap + 1)
        m = min(len(dist), cap // 2 + 1)
        u[0:2 * m:2] = dist[:m]
        # add an independent geometric: h[s] = sum_{j<=s} u[j] p (1-p)^(s-j)
        dist = lfilter([p], [1.0, -(1.0 - p)], u)
    return float(math.fsum(dist))


def _chi_mc(L, p, limit, samples, seed, workers):
    if limit >= 1 << 60:
        raise PreconditionError("scaled limit too large for 64-bit sums")
    lam = -math.log1p(-p)
    caps = [limit >> (L - k) for k in range(1, L + 1)]

    def trial(rng, rows):
        W = rng.standard_exponential((rows, L))
        S = np.zeros(rows, dtype=np.int64)
        for k in range(L):
            cap = caps[k] + 1
            Z = np.minimum(np.floor(W[:, k] / lam), cap).astype(np.int64)
            S = np.minimum(2 * S + Z, cap)
        return S <= limit

    return mc.estimate(trial, samples, seed, ("chi", L), mc.chunk_rows(L), workers)


def chi_upper_bound(L: int, p: float, r: float) -> float:
    """``P(Y < (r+3) lam) + N exp(-2^L lam)`` with ``lam = -log(1-p)``."""
    _check_chi(L, p, r)
    lam = -math.log1p(-p)
    return cdf_Yinf((r + 3) * lam) + math.exp(constants().log_N - math.ldexp(lam, L))
