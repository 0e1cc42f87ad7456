import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pebblex import hypoexp as h
from pebblex import mc
from pebblex.errors import AccuracyError, OracleBudgetError, PreconditionError

# P(W1 + W2/2 <= 1) with partial-fraction weights R0 = 2, R1 = -1, worked by hand.
YN2_AT_1 = 2 * (1 - math.exp(-1)) - (1 - math.exp(-2))


# -- LogProb and constants --------------------------------------------------------

def test_logprob_roundtrip_and_product():
    a, b = h.LogProb.from_value(0.25), h.LogProb.from_value(0.5)
    assert a.value == pytest.approx(0.25)
    assert (a * b).value == pytest.approx(0.125)
    assert a.log2_value == pytest.approx(-2.0)
    assert h.LogProb.from_value(0.0).log_value == -math.inf
    with pytest.raises(ValueError):
        h.LogProb(0.5)
    with pytest.raises(ValueError):
        h.LogProb.from_value(-0.1)


def test_constants():
    K = h.constants()
    assert 3.46 < K.N < 3.47
    assert K.q < 1e-12 and K.q == math.exp(-2 * math.pi ** 2 / math.log(2))
    assert K.K > 0
    # direct partial product of 2^j / (2^j - 1)
    assert K.N == pytest.approx(math.prod(2 ** j / (2 ** j - 1) for j in range(1, 80)), rel=1e-14)


# -- sampling -----------------------------------------------------------------------

def test_single_term_sample_is_standard_exponential():
    x = h.sample_Yinf_batch(mc.stream(1, "t"), 200_000, terms=1)
    assert abs(x.mean() - 1.0) < 3 * 1.0 / math.sqrt(len(x))


def test_sample_mean_and_variance():
    x = h.sample_Yinf_batch(mc.stream(2, "t"), 400_000)
    n = len(x)
    # mean sum 2^-i = 2, variance sum 4^-i = 4/3
    assert abs(x.mean() - 2.0) < 3 * math.sqrt(4 / 3 / n)
    # the variance of the sample variance is (m4 - s^4)/n; bound it generously
    assert x.var() == pytest.approx(4 / 3, abs=3 * math.sqrt(np.var((x - 2) ** 2) / n))
    with pytest.raises(PreconditionError):
        h.sample_Yinf(mc.stream(0), terms=0)


# -- truncated and limiting CDFs -----------------------------------------------------

def test_cdf_Yn_examples():
    for x in (0.1, 1.0, 3.0):
        assert h.cdf_Yn_exact(1, x) == pytest.approx(-math.expm1(-x), rel=1e-14)
    assert abs(h.cdf_Yn_exact(2, 1.0) - YN2_AT_1) <= 1e-9
    assert all(h.cdf_Yn_exact(n, 0.0) == 0.0 for n in (1, 5, 30))
    assert h.cdf_Yn_exact(4, -1.0) == 0.0
    with pytest.raises(PreconditionError):
        h.cdf_Yn_exact(31, 1.0)


def test_cdf_Yn2_monte_carlo():
    rng = mc.stream(3, "yn2")
    x = h.sample_Yinf_batch(rng, 1_000_000, terms=2)
    p = float(np.mean(x <= 1.0))
    assert abs(p - YN2_AT_1) < 3 * math.sqrt(YN2_AT_1 * (1 - YN2_AT_1) / len(x))


def test_cdf_Yn_converges_to_limit():
    diffs = [abs(h.cdf_Yn_exact(n, 1.0) - h.cdf_Yinf(1.0)) for n in (2, 5, 10, 20, 30)]
    assert all(a > b for a, b in zip(diffs, diffs[1:]))
    assert diffs[-1] < 1e-6


def test_cdf_Yinf_is_independent_of_order():
    assert h.cdf_Yinf(0.0) == 0.0
    assert abs(h.cdf_Yinf(1.0, 0) - h.cdf_Yinf(1.0, 3)) <= 1e-10
    for x in (0.2, 0.5, 2.0):
        base = h.cdf_Yinf(x, 0)
        for c in (1, 2, 3, 4):
            assert h.cdf_Yinf(x, c) == pytest.approx(base, rel=1e-9)


def test_evaluation_paths_agree_on_overlap_decade():
    for x in np.geomspace(0.1, h.CPRIME_MAX_X, 12):
        c = max(1, math.floor(h.solve_cprime(float(x))))
        assert abs(h.cdf_Yinf(float(x), 0) - h.cdf_Yinf(float(x), c)) <= 1e-8


def test_ill_conditioned_order_is_reported():
    with pytest.raises(AccuracyError):
        h.cdf_Yinf(0.01, 0)


def test_cdf_Yinf_monotone_and_limits():
    xs = np.concatenate([np.geomspace(1e-4, 0.1, 20), np.linspace(0.1, 30, 60)])
    vals = [h.cdf_Yinf(float(x)) for x in xs]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)


def test_cdf_Yinf_monte_carlo():
    est = mc.estimate(lambda rng, rows: h.sample_Yinf_batch(rng, rows) <= 1.0,
                      1_000_000, seed=4, key=("yinf",), chunk=1 << 15)
    p = h.cdf_Yinf(1.0)
    assert abs(est.value - p) < 3 * math.sqrt(p * (1 - p) / est.samples)


def test_select_order_and_cprime():
    assert h.select_order(0.5) == 0
    for cp in (1.5, 4.0, 10.0, 40.0):
        assert h.solve_cprime(cp / 2 ** cp) == pytest.approx(cp, rel=1e-12)
    assert h.solve_cprime(h.CPRIME_MAX_X) == pytest.approx(1 / math.log(2), rel=1e-6)
    with pytest.raises(PreconditionError):
        h.solve_cprime(0.6)


def test_logprob_path_matches_direct_value():
    for x in (0.05, 0.3, 1.0, 4.0):
        assert h.log_cdf_Yinf(x).value == pytest.approx(h.cdf_Yinf(x), rel=1e-12)
    # deep left tail: still finite in log space although tiny
    assert h.log_cdf_Yinf(40 / 2 ** 40).log_value < -500


@pytest.mark.parametrize("c", [0, 1, 3, 7])
def test_log_ec_matches_direct_formula(c):
    for y in (0.3, 1.0, 2.5, 6.0, 12.0):
        direct = math.exp(-y) - math.fsum((-y) ** k / math.factorial(k) for k in range(c + 1))
        s, lv = h.log_ec(y, c)
        assert s * math.exp(lv) == pytest.approx(direct, rel=1e-9, abs=1e-15)
    assert h.log_ec(0.0, c)[0] == 0


# -- tails ---------------------------------------------------------------------------

def test_tail_bound_holds_on_grid():
    for x in (0.1, 0.5, 1, 2, 5, 10, 20):
        assert h.sf_Yinf(x) <= h.tail_bound(x)
        assert h.sf_Yinf(x) == pytest.approx(1 - h.cdf_Yinf(x), rel=1e-7)


def test_tail_bound_edges():
    assert h.tail_bound(h.constants().log_N) == pytest.approx(1.0)
    assert h.tail_bound(200.0) < 1e-80
    with pytest.raises(PreconditionError):
        h.tail_bound(0.0)


# -- periodic functions --------------------------------------------------------------

def test_P_functional_equation():
    for k in range(-4, 5):
        z = 0.37 * 2.0 ** k
        assert abs(h.P_func(z) - z * h.P_func(2 * z)) <= 1e-10
    for z in (0.3, 0.7, 1.3):
        assert abs(h.P_func(z) - z * h.P_func(2 * z)) <= 1e-10
    assert h.P_func(1.0) > 0
    with pytest.raises(PreconditionError):
        h.P_func(0.0)


def test_P_at_one_matches_theta_identity():
    K = h.constants()
    assert h.P_func(1.0) == pytest.approx(K.K / h.theta4(0.0, K.q), rel=1e-12)


@given(st.floats(-5, 5, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_Q_periodic_and_even(z):
    assert abs(h.Q_func(z + 1) - h.Q_func(z)) <= 1e-9
    assert abs(h.Q_func(-z) - h.Q_func(z)) <= 1e-9


def test_Q_without_reduction_matches_reduced_form():
    for z in (0.2, 1.7, -0.6):
        assert h.Q_func(z, reduce=False) == pytest.approx(h.Q_func(z), rel=1e-9)


def test_Q_times_theta_is_constant():
    K = h.constants()
    prods = [h.Q_func(z) * h.theta4(math.pi * z, K.q) for z in np.arange(64) / 64]
    assert max(prods) / min(prods) - 1 <= 1e-6
    assert np.mean(prods) == pytest.approx(K.K, rel=1e-6)


def test_theta4_examples():
    assert h.theta4(0.7, 0.0) == 1.0
    q = h.constants().q
    assert h.theta4(0.0, q) == pytest.approx(1 - 2 * q, abs=1e-20)
    for z in (0.1, 1.0, 2.5):
        assert h.theta4(z + math.pi, 0.3) == pytest.approx(h.theta4(z, 0.3), rel=1e-12)
    with pytest.raises(PreconditionError):
        h.theta4(0.0, 1.0)


# -- asymptotics ---------------------------------------------------------------------

def test_leading_asymptotic_converges():
    errs = []
    for cp in (8, 16, 32):
        x = cp / 2 ** cp
        r = math.exp(h.asymp_log_cdf(cp).log_value - h.log_cdf_Yinf(x).log_value)
        errs.append(abs(r - 1))
        assert errs[-1] <= 10 / cp
    assert errs[0] > errs[1] > errs[2]


def test_leading_asymptotic_is_decreasing():
    vals = [h.asymp_log_cdf(cp).log_value for cp in range(1, 40)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(PreconditionError):
        h.asymp_log_cdf(0.5)


def test_second_asymptotic():
    assert h.asymp_log_cdf2(12, 1.0).log_value == pytest.approx(h.asymp_log_cdf(12).log_value,
                                                                rel=1e-12)
    cpp, y = 16, 0.7
    r = math.exp(h.asymp_log_cdf2(cpp, y).log_value
                 - h.log_cdf_Yinf(cpp * y / 2 ** cpp).log_value)
    assert abs(r - 1) <= 10 / math.sqrt(cpp)
    edge = 2.0 ** (16 ** 0.25)
    h.asymp_log_cdf2(16, edge * (1 - 1e-12))
    with pytest.raises(PreconditionError):
        h.asymp_log_cdf2(16, edge * 1.01)
    with pytest.raises(PreconditionError):
        h.asymp_log_cdf2(5, 1.0)


# -- weighted geometric sums ---------------------------------------------------------

def _chi_enumerated(L, p, r, zmax=60):
    """Direct sum over (Z_1..Z_L) with each Z_k <= zmax (L <= 3)."""
    import itertools
    tot = []
    for zs in itertools.product(range(zmax), repeat=L):
        if sum(z / 2 ** k for k, z in enumerate(zs)) < r:
            tot.append(math.prod(p * (1 - p) ** z for z in zs))
    return math.fsum(tot)


def test_chi_small_cases():
    assert h.chi_X(0, 0.3, 1.0).value == 1.0
    assert h.chi_X(0, 0.3, 0.0).value == 0.0
    assert h.chi_X(1, 0.3, 1.0).value == pytest.approx(0.3)
    assert h.chi_X(2, 0.5, 1.0).value == pytest.approx(3 / 8)
    assert h.chi_X(3, 0.5, 0.0).value == 0.0


@pytest.mark.parametrize("L,p,r", [(2, 0.3, 1.7), (3, 0.6, 1.25), (3, 0.2, 2.0), (2, 0.9, 0.5)])
def test_chi_dp_matches_enumeration(L, p, r):
    assert h.chi_X(L, p, r, method="dp").value == pytest.approx(_chi_enumerated(L, p, r),
                                                                rel=1e-9)


@pytest.mark.parametrize("L,p,r", [(2, 0.5, 1.0), (5, 0.3, 1.0), (10, 0.6, 2.0)])
def test_chi_mc_contains_dp(L, p, r):
    exact = h.chi_X(L, p, r, method="dp").value
    est = h.chi_X(L, p, r, method="mc", budget=200_000, seed=5)
    assert abs(est.value - exact) < 3 * math.sqrt(exact * (1 - exact) / est.samples) + 1e-12


def test_chi_mc_is_deterministic_across_workers():
    a = h.chi_X(6, 0.3, 1.5, method="mc", budget=50_000, seed=9, workers=1)
    b = h.chi_X(6, 0.3, 1.5, method="mc", budget=50_000, seed=9, workers=2)
    assert a == b


def test_chi_errors():
    with pytest.raises(PreconditionError):
        h.chi_X(2, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        h.chi_X(-1, 0.5, 1.0)
    with pytest.raises(PreconditionError):
        h.chi_X(2, 0.5, 1.0, method="bogus")
    with pytest.raises(OracleBudgetError):
        h.chi_X(40, 0.5, 1.0, method="dp")


def test_chi_upper_bound_grid():
    for L in (2, 5, 10):
        for p in (0.1, 0.3, 0.6):
            for r in (0.5, 1, 2):
                assert h.chi_X(L, p, r).value <= h.chi_upper_bound(L, p, r)


def test_chi_upper_bound_limits():
    N = h.constants().N
    # as p -> 0 the second term tends to N
    assert h.chi_upper_bound(3, 1e-12, 1.0) == pytest.approx(N, rel=1e-6)
    # for large L the second term vanishes
    lam = -math.log1p(-0.5)
    assert h.chi_upper_bound(60, 0.5, 1.0) == pytest.approx(h.cdf_Yinf(4 * lam), rel=1e-12)
