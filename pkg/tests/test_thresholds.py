import math

import numpy as np
import pytest

from pebblex.errors import PreconditionError
from pebblex.graphs import make_clique, make_path
from pebblex.multiset import (at_least_family, empty_family, full_family, mu_exact,
                              nu_estimate, solvability_family, total_at_least_family,
                              upper_set_family)
from pebblex.thresholds import (ABOVE, BELOW, UNRESOLVED, ThresholdEstimate, chebyshev_bracket,
                                geometric_pebbling_threshold, geometric_threshold,
                                geometric_threshold_exact, half_test, nu_series,
                                threshold_ratio_table, uniform_threshold_exact,
                                uniform_threshold_mc)

SQRT2 = math.sqrt(2.0)
# Closed forms of the geometric threshold x (mean total) for small families:
#   {f(a) >= 1} on one point: nu_x = x/(1+x)                 -> x = 1
#   {total >= 1} on two points: 1 - (1 + x/2)^-2 = 1/2         -> x = 2(sqrt2 - 1)
#   {f >= (1,1)}: (x/(x+2))^2 = 1/2                            -> x = 2/(sqrt2 - 1)
#   K2 solvability: P(unsolvable) = p^2 (3 - 2p), p = 1/(1+x/2) -> x = 2
CLOSED_FORMS = [
    (lambda: total_at_least_family(1, 1), 1.0),
    (lambda: total_at_least_family(2, 1), 2 * (SQRT2 - 1)),
    (lambda: at_least_family((1, 1)), 2 / (SQRT2 - 1)),
    (lambda: solvability_family(make_clique(2)), 2.0),
]


def test_estimate_invariant():
    with pytest.raises(ValueError):
        ThresholdEstimate(3, 4, 5, 0, None, "exact")
    e = ThresholdEstimate(1.0, 0.5, 2.0, 10, 1, "mc")
    assert e.to_dict()["method"] == "mc"


def test_half_test_verdicts():
    def const(value):
        return lambda rng, rows: np.full(rows, value)

    assert half_test(const(True), 1000, 0, (0,), 64).verdict == ABOVE
    assert half_test(const(False), 1000, 0, (0,), 64).verdict == BELOW
    fair = half_test(lambda rng, rows: rng.random(rows) < 0.5, 2000, 0, (0,), 64)
    assert fair.verdict == UNRESOLVED and fair.samples == 2000


# -- uniform --------------------------------------------------------------------------

def test_uniform_exact_examples():
    assert uniform_threshold_exact(at_least_family((1, 0))) == 1
    assert uniform_threshold_exact(full_family(3)) == 0
    with pytest.raises(PreconditionError):
        uniform_threshold_exact(empty_family(2))


def test_uniform_exact_is_least_level_reaching_half():
    for M in [solvability_family(make_clique(2)), solvability_family(make_path(4)),
              at_least_family((2, 1)), upper_set_family(3, [(3, 0, 0), (0, 1, 1)])]:
        T = uniform_threshold_exact(M)
        assert mu_exact(M, T) >= 0.5
        assert T == 0 or mu_exact(M, T - 1) < 0.5
        assert all(mu_exact(M, U) < 0.5 for U in range(T))


def test_uniform_mc_examples():
    est = uniform_threshold_mc(at_least_family((1, 0)), 5000, seed=1)
    assert (est.value, est.ci_low, est.ci_high) == (1, 1, 1)
    assert uniform_threshold_mc(full_family(2), 100).value == 0


def test_uniform_mc_contains_exact_answer():
    for M in [solvability_family(make_path(8)), solvability_family(make_clique(3)),
              at_least_family((2, 3))]:
        exact = uniform_threshold_exact(M)
        est = uniform_threshold_mc(M, 20_000, seed=2)
        assert est.ci_low <= exact <= est.ci_high


# -- geometric ---------------------------------------------------------------------------

@pytest.mark.parametrize("make,expected", CLOSED_FORMS)
def test_geometric_exact_closed_forms(make, expected):
    assert geometric_threshold_exact(make()) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("make,expected", CLOSED_FORMS)
def test_geometric_mc_closed_forms(make, expected):
    est = geometric_threshold(make(), 100_000, seed=4, rel_tol=0.01)
    assert est.ci_low <= expected <= est.ci_high
    assert est.ci_high / est.ci_low <= 1.05


def test_nu_series_matches_closed_form():
    M = at_least_family((1, 1))
    for x in (0.3, 1.0, 5.0):
        assert nu_series(M, x) == pytest.approx((x / (x + 2)) ** 2, rel=1e-12)


@pytest.mark.parametrize("M", [
    at_least_family((2, 1)), total_at_least_family(3, 5),
    upper_set_family(3, [(3, 0, 0), (0, 2, 1), (1, 1, 1)]),
], ids=lambda M: M.name)
def test_analytic_measure_matches_series(M):
    for x in (0.5, 2.0, 7.0):
        assert M.nu(x) == pytest.approx(nu_series(M, x), rel=1e-10, abs=1e-13)


def test_geometric_preconditions():
    with pytest.raises(PreconditionError):
        geometric_threshold(full_family(2), 100)
    with pytest.raises(PreconditionError):
        geometric_threshold_exact(empty_family(2))
    from pebblex.graphs import Graph
    with pytest.raises(PreconditionError):
        geometric_pebbling_threshold(Graph.from_edges(2, []), 100)


def test_geometric_bracket_sanity():
    M = solvability_family(make_path(32))
    est = geometric_threshold(M, 20_000, seed=5, rel_tol=0.02)
    lo = nu_estimate(M, est.ci_low, 40_000, seed=6)
    hi = nu_estimate(M, est.ci_high, 40_000, seed=7)
    assert lo.value < 0.5 + 2 * lo.sigma
    assert hi.value > 0.5 - 2 * hi.sigma


def test_geometric_is_deterministic_across_workers():
    M = solvability_family(make_path(64))
    a = geometric_threshold(M, 5000, seed=8, workers=1)
    b = geometric_threshold(M, 5000, seed=8, workers=3)
    assert a == b


def test_path_1024_threshold_is_finite():
    est = geometric_pebbling_threshold(make_path(1024), 4000, seed=1, rel_tol=0.05)
    assert 0 < est.ci_low <= est.value <= est.ci_high < math.inf


# -- Chebyshev bracket ---------------------------------------------------------------------

def test_chebyshev_example():
    b = chebyshev_bracket(100.0, 100, 2.0)
    S = math.sqrt(200.0)
    assert b.spread == pytest.approx(S)
    assert b.lower == math.ceil(100 - 2 * S) * 0.5
    assert b.upper == 1 + math.floor(100 + 2 * S) * 2
    assert (b.lower, b.upper) == (36.0, 257)


def test_chebyshev_theta_range():
    S = math.sqrt(200.0)
    with pytest.raises(PreconditionError):
        chebyshev_bracket(100.0, 100, 100 / S)
    with pytest.raises(PreconditionError):
        chebyshev_bracket(100.0, 100, 1.4)


def test_chebyshev_contains_exact_uniform_threshold():
    # the theta range is nonempty only when T' > 2n/(n-2), so n >= 3
    fams = [at_least_family((3, 3, 0)), total_at_least_family(3, 12), at_least_family((4, 0, 0)),
            upper_set_family(3, [(8, 0, 0), (0, 4, 4)]), at_least_family((1, 1, 1, 1))]
    checked = 0
    for M in fams:
        T = uniform_threshold_exact(M)
        Tp = geometric_threshold_exact(M)
        S = math.sqrt(Tp + Tp * Tp / M.base_size)
        for theta in np.linspace(SQRT2 * 1.001, Tp / S * 0.999, 7):
            if not SQRT2 < theta < Tp / S:
                continue
            b = chebyshev_bracket(Tp, M.base_size, float(theta))
            assert b.lower <= T <= b.upper
            checked += 1
    assert checked > 0


# -- ratio table ------------------------------------------------------------------------------

def test_ratio_table_single_point_family():
    (row,) = threshold_ratio_table([total_at_least_family(1, 1)], 1000)
    assert row.uniform.value == 1 and row.geometric.value == pytest.approx(1.0)
    assert row.ratio == pytest.approx(1.0)


def test_ratio_table_constant_family_over_growing_base():
    fams = [at_least_family((3,) + (0,) * (n - 1)) for n in (1, 2, 4, 8)]
    rows = threshold_ratio_table(fams, 20_000, seed=3, rel_tol=0.01)
    for r in rows:
        lo, hi = r.ratio_ci
        assert lo <= hi and r.ratio > 0
    assert abs(rows[-1].ratio - 1) < 0.35


def test_ratio_table_rejects_family_with_empty_multiset():
    with pytest.raises(PreconditionError):
        threshold_ratio_table([full_family(2)], 100)
