import math

import numpy as np
import pytest
from scipy import stats

from stoplab import DomainError, discrete, lindley, poisson
from stoplab import montecarlo as mc


def test_streams_are_reproducible_and_distinct():
    a = mc.stream(0, "x", 3).random(5)
    assert np.array_equal(a, mc.stream(0, "x", 3).random(5))
    assert not np.array_equal(a, mc.stream(0, "x", 4).random(5))
    assert not np.array_equal(a, mc.stream(0, "y", 3).random(5))
    assert not np.array_equal(a, mc.stream(1, "x", 3).random(5))


def test_run_chunks_sizes():
    sizes = mc.run_chunks("s", 0, 2 * mc.CHUNK + 7, lambda rng, size: size)
    assert sizes == [mc.CHUNK, mc.CHUNK, 7]
    with pytest.raises(DomainError):
        mc.run_chunks("s", 0, 0, lambda rng, size: size)


def test_worker_count_does_not_change_results():
    one = mc.simulate_threshold(2.0, 1.0, 150_000, seed=5, workers=1)
    four = mc.simulate_threshold(2.0, 1.0, 150_000, seed=5, workers=4)
    assert one.value == four.value
    assert np.array_equal(one.times, four.times)
    tb = poisson.default_cutoffs()
    assert mc.simulate_cutoff(tb, 1.0, False, 150_000, 3, workers=1) == \
        mc.simulate_cutoff(tb, 1.0, False, 150_000, 3, workers=3)


def test_single_draw_determinism(table):
    assert mc.sample_threshold_stop(2, 1, 9) == mc.sample_threshold_stop(2, 1, 9)
    assert mc.sample_cutoff_stop(table, 1.0, True, 9) == mc.sample_cutoff_stop(table, 1.0, True, 9)
    with pytest.raises(DomainError):
        mc.sample_threshold_stop(1.0, 1, 0)
    with pytest.raises(DomainError):
        mc.sample_cutoff_stop(table, 0.0, False, 0)


# -- beta strategies ---------------------------------------------------------------

def test_beta_mean_value_and_time():
    res = mc.simulate_threshold(2.0, 1.0, 400_000, seed=1)
    assert abs(res.value.zscore(2.0)) < 4
    assert abs(res.stop_time.zscore(1 / 3)) < 4
    assert abs(res.stop_time_var.zscore(1 / 18)) < 4


def test_beta_value_scales_with_horizon():
    res = mc.simulate_threshold(2.0, 0.1, 200_000, seed=2)
    assert 19 < res.value.mean < 21
    assert abs(res.value.zscore(20.0)) < 4


def test_beta_value_density_chi_square():
    b = 2.0
    x = mc.simulate_threshold(b, 1.0, 200_000, seed=4).values
    edges = np.array([0, 0.5, 1, 1.5, 2, 2.5, 3, 4, 6, 10, np.inf])
    observed = np.histogram(x, edges)[0]
    cdf = np.array([poisson.stopped_value_cdf(b, e) if np.isfinite(e) else 1.0 for e in edges])
    expected = np.diff(cdf) * x.size
    assert stats.chisquare(observed, expected).pvalue > 1e-4


def test_stop_time_ks():
    t = mc.simulate_threshold(3.0, 1.0, 50_000, seed=6).times
    assert stats.kstest(t, stats.beta(1, 3).cdf).pvalue > 1e-4


# -- integer-loss cutoff rule ----------------------------------------------------

def test_cutoff_matches_u(table):
    est = mc.simulate_cutoff(table, 1.0, False, 300_000, seed=1)
    assert abs(est.zscore(poisson.u(1.0, table))) < 4


def test_penalised_matches_plateau(table):
    est = mc.simulate_cutoff(table, 2.0, True, 300_000, seed=2)
    assert abs(est.zscore(math.exp(table[1]))) < 4


def test_cutoff_rule_beats_prophet_bound_direction(table):
    # the optimal loss exceeds what a prophet could do
    est = mc.simulate_cutoff(table, 1.0, False, 100_000, seed=3)
    assert est.mean > poisson.prophet_discrete(1.0)


def test_box_scan_independent_of_table_depth():
    shallow, deep = poisson.cutoffs(3), poisson.cutoffs(400)
    for T in (0.05, 0.5, 2.0):
        a = mc.cutoff_stops(shallow, T, False, mc.stream(0, "depth"), 5000)
        b = mc.cutoff_stops(deep, T, False, mc.stream(0, "depth"), 5000)
        # tables of different depth agree to their tail tolerance, not bitwise
        assert np.array_equal(a[1], b[1])
        assert np.allclose(a[0], b[0], rtol=0, atol=1e-9)


def test_cutoff_stop_respects_box_opening(table):
    T = 0.7
    s, k = mc.cutoff_stops(table, T, False, mc.stream(1, "open"), 20_000)
    assert np.all(k >= 0) and np.all(s < T)
    opening = np.array([0.0 if kk == 0 else max(T - table[kk], 0.0) for kk in k])
    assert np.all(s >= opening)


# -- discrete problems ------------------------------------------------------------

def test_single_value_grid_is_free():
    rule = discrete.finite_cutoff_rule(5, 1)
    est = mc.simulate_moser_discrete(rule, 10_000, seed=0)
    assert est.mean == 0 and est.zscore(0.0) == 0.0


def test_discrete_two_by_two():
    rule = discrete.finite_cutoff_rule(2, 2)
    est = mc.simulate_moser_discrete(rule, 200_000, seed=0)
    assert abs(est.zscore(0.25)) < 4


@pytest.mark.parametrize("n, N", [(5, 4), (12, 30)])
def test_discrete_matches_exact_evaluation(n, N):
    rule = discrete.finite_cutoff_rule(n, N)
    exact = discrete.evaluate_cutoff_rule(rule)
    assert exact == pytest.approx(discrete.discrete_values(n, N)[n], abs=1e-12)
    assert abs(mc.simulate_moser_discrete(rule, 200_000, seed=1).zscore(exact)) < 4


def test_lindley_two():
    rule = lindley.optimal_rank_rule(lindley.lindley_values(2))
    assert abs(mc.simulate_lindley(rule, 200_000, seed=0).zscore(1.5)) < 4


def test_lindley_large_n():
    n = 1000
    rule = lindley.delta_rank_rule(n, poisson.cutoffs(n))
    est = mc.simulate_lindley(rule, 200_000, seed=3)
    assert abs(est.zscore(lindley.evaluate_rank_rule(rule))) < 4


# -- strip process ----------------------------------------------------------------

def test_strip_domain():
    with pytest.raises(DomainError):
        mc.sample_inhomogeneous_strip(0.0, 1.0, 1.0, 0)
    with pytest.raises(DomainError):
        mc.sample_inhomogeneous_strip(0.5, 0.5, 1.0, 0)


def test_strip_count_and_homogenisation():
    rng = mc.stream(0, "strip-test")
    t_lo, t_hi, y_max = 0.1, 1.0, 1.0
    counts, inside = [], np.zeros(3)
    # rectangles in homogenised coordinates, all inside the image of the strip
    rects = [(0.5, 1.0, 0.0, 1.0), (0.2, 0.5, 0.0, 2.0), (0.1, 0.2, 0.0, 5.0)]
    reps = 4000
    for _ in range(reps):
        atoms = mc.homogenised(mc.sample_inhomogeneous_strip(t_lo, t_hi, y_max, 0, rng=rng))
        counts.append(len(atoms))
        for i, (a, b, lo, hi) in enumerate(rects):
            inside[i] += sum(a <= p.t < b and lo <= p.x < hi for p in atoms)
    assert np.mean(counts) == pytest.approx(math.log(10), rel=0.03)
    areas = np.array([(b - a) * (hi - lo) for a, b, lo, hi in rects])
    expected = areas * reps
    chi2 = float(np.sum((inside - expected) ** 2 / expected))
    assert stats.chi2(len(rects)).sf(chi2) > 1e-4


# -- Moser convergence ---------------------------------------------------------------

def test_ks_rows_shrink():
    rows = mc.ks_convergence_check([10, 100, 1000], reps=50_000, seed=0)
    assert [r.n for r in rows] == [10, 100, 1000]
    assert rows[0].ks_time > rows[2].ks_time
    assert rows[0].ks_value > rows[2].ks_value
    assert abs(rows[2].mean_value - 2.0) < 0.05
