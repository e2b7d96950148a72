import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kstwobign

from epodetect import (
    Altitude,
    Label,
    ks_critical,
    ks_permutation_pvalue,
    ks_pvalue,
    ks_statistic,
    screen_parameters,
    summarize,
)
from epodetect.screening import EmpiricalCdf, correlation_filter, parameter_values

from helpers import make_cohort, make_sample

finite_list = st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40)
int_list = st.lists(st.integers(-20, 20), min_size=1, max_size=40)


def ks_brute_force(a, b):
    """Independent oracle: evaluate both ECDFs at every pooled value."""
    a, b = list(a), list(b)
    best = 0.0
    for x in set(a) | set(b):
        fa = sum(v <= x for v in a) / len(a)
        fb = sum(v <= x for v in b) / len(b)
        best = max(best, abs(fa - fb))
    return best


class TestEmpiricalCdf:
    def test_step_values_with_ties(self):
        cdf = EmpiricalCdf.from_sample([2.0, 1.0, 2.0, 3.0])
        assert cdf(0.5) == 0.0
        assert cdf(1.0) == 0.25
        assert cdf(2.0) == 0.75
        assert cdf(3.0) == 1.0
        assert list(cdf(np.array([1.5, 10.0]))) == [0.25, 1.0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            EmpiricalCdf.from_sample([])


class TestKsStatistic:
    def test_identical_samples(self):
        assert ks_statistic([1, 2, 3], [1, 2, 3]) == 0.0

    def test_disjoint_supports(self):
        assert ks_statistic([1, 2, 3], [10, 11, 12]) == 1.0

    def test_offset_grids(self):
        # Brute-force evaluation over all eight pooled breakpoints gives 0.25.
        assert ks_statistic([1, 2, 3, 4], [2, 3, 4, 5]) == 0.25

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ks_statistic([], [1.0])

    @given(a=int_list, b=int_list)
    def test_matches_brute_force_with_ties(self, a, b):
        assert ks_statistic(a, b) == ks_brute_force(a, b)

    @given(a=finite_list, b=finite_list)
    def test_symmetric_and_bounded(self, a, b):
        d = ks_statistic(a, b)
        assert d == ks_statistic(b, a)
        assert 0.0 <= d <= 1.0

    @given(a=int_list, b=int_list, shift=st.integers(-10**6, 10**6))
    def test_shared_shift_invariance(self, a, b, shift):
        # Integer values keep the shifted sums exact in floating point.
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        assert ks_statistic(a, b) == ks_statistic(a + shift, b + shift)

    @given(a=finite_list, b=finite_list)
    def test_monotone_scaling_invariance(self, a, b):
        # x -> 4x is strictly increasing and exact in binary floating point.
        a, b = np.asarray(a), np.asarray(b)
        assert ks_statistic(a, b) == ks_statistic(4.0 * a, 4.0 * b)

    @given(a=int_list, b=int_list)
    def test_monotone_cube_invariance(self, a, b):
        cube = lambda xs: [x**3 for x in xs]  # noqa: E731
        assert ks_statistic(a, b) == ks_statistic(cube(a), cube(b))


class TestKsCritical:
    def test_frozen_value(self):
        # Closed form evaluated in double precision.
        assert ks_critical(0.001, 100, 100) == pytest.approx(0.27569734238004695, abs=1e-12)

    def test_equal_size_swap(self):
        assert ks_critical(0.001, 100, 100) == ks_critical(0.001, 100, 100)

    @given(n_a=st.integers(1, 2000), n_b=st.integers(1, 2000))
    def test_symmetric_in_sizes(self, n_a, n_b):
        assert ks_critical(0.01, n_a, n_b) == pytest.approx(ks_critical(0.01, n_b, n_a), rel=1e-12)

    def test_monotone_in_second_size(self):
        assert ks_critical(0.001, 100, 609) < ks_critical(0.001, 100, 100)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, 2.0])
    def test_alpha_domain(self, alpha):
        with pytest.raises(ValueError):
            ks_critical(alpha, 10, 10)


class TestKsPvalue:
    def test_zero_statistic(self):
        assert ks_pvalue(0.0, 50, 50) == 1.0

    def test_maximal_separation(self):
        assert ks_pvalue(1.0, 100, 100) < 1e-8

    def test_monotone_decreasing_in_d(self):
        grid = [ks_pvalue(d, 80, 120) for d in np.linspace(0.0, 1.0, 41)]
        assert all(hi >= lo for hi, lo in zip(grid, grid[1:]))

    @given(d=st.floats(0.0, 1.0), n_a=st.integers(1, 500), n_b=st.integers(1, 500))
    def test_clamped_and_matches_series_oracle(self, d, n_a, n_b):
        p = ks_pvalue(d, n_a, n_b)
        assert 0.0 <= p <= 1.0
        lam = d * np.sqrt(n_a * n_b / (n_a + n_b))
        if lam > 0.3:  # oracle itself is unstable at tiny lambda
            assert p == pytest.approx(float(kstwobign.sf(lam)), abs=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            ks_pvalue(1.5, 10, 10)

    def test_permutation_agrees_on_moderate_case(self):
        rng = np.random.default_rng(11)
        a, b = rng.normal(0, 1, 30), rng.normal(0, 1, 30)
        asym = ks_pvalue(ks_statistic(a, b), 30, 30)
        perm = ks_permutation_pvalue(a, b, n_perm=4000, seed=1)
        assert abs(asym - perm) < 0.05

    def test_permutation_identical_samples(self):
        assert ks_permutation_pvalue([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], n_perm=200, seed=0) == 1.0


def quartile_oracle(values, q):
    """Linear interpolation at position (n-1)*q over the order statistics."""
    ordered = sorted(values)
    pos = (len(ordered) - 1) * q
    lo = int(np.floor(pos))
    frac = pos - lo
    if lo + 1 == len(ordered):
        return ordered[lo]
    return ordered[lo] + (ordered[lo + 1] - ordered[lo]) * frac


class TestSummarize:
    def test_five_points(self):
        stats = summarize([1, 2, 3, 4, 5])
        assert (stats.iq1, stats.median, stats.iq3) == (2.0, 3.0, 4.0)
        assert (stats.min, stats.max, stats.mean) == (1.0, 5.0, 3.0)

    def test_singleton(self):
        stats = summarize([7.0])
        assert stats == type(stats)(7.0, 0.0, 7.0, 7.0, 7.0, 7.0, 7.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize([])

    @given(values=st.lists(st.floats(-1e4, 1e4), min_size=2, max_size=50))
    def test_matches_interpolation_oracle(self, values):
        stats = summarize(values)
        assert stats.iq1 == pytest.approx(quartile_oracle(values, 0.25), abs=1e-9)
        assert stats.median == pytest.approx(quartile_oracle(values, 0.5), abs=1e-9)
        assert stats.iq3 == pytest.approx(quartile_oracle(values, 0.75), abs=1e-9)
        assert stats.std == pytest.approx(float(np.std(values, ddof=1)), rel=1e-9, abs=1e-12)
        assert stats.min <= stats.iq1 <= stats.median <= stats.iq3 <= stats.max

    @given(values=finite_list)
    def test_reversal_invariance(self, values):
        assert summarize(values) == summarize(values[::-1])

    def test_calibrated_control_ret_pct_mean(self, sea_cohort):
        values = parameter_values(sea_cohort, "RET%", Label.CONTROL)
        assert abs(float(np.mean(values)) - 0.9) <= 0.1


class TestScreenParameters:
    def test_same_distribution_selects_nothing(self, label_blind_cohort):
        screen = screen_parameters(label_blind_cohort, Altitude.SEA_LEVEL, 0.001)
        assert screen.selected == ()

    def test_calibrated_sea_level_pattern(self, sea_cohort):
        screen = screen_parameters(sea_cohort, Altitude.SEA_LEVEL, 0.001)
        rejects = {name for name, r in screen.results.items() if r.reject}
        assert {"RET#", "RET%", "IRF", "LFR", "MFR", "HFR", "OFF-HR"} <= rejects
        assert not rejects & {"WBC", "RET-HB", "MCH"}
        assert screen.selected[0] == "RET#"

    def test_high_altitude_hct_rejects(self, alt_cohort):
        screen = screen_parameters(alt_cohort, Altitude.HIGH_ALTITUDE, 0.001)
        assert screen.results["HCT"].reject

    def test_selected_sorted_by_p(self, sea_cohort):
        screen = screen_parameters(sea_cohort, Altitude.SEA_LEVEL, 0.001)
        pvalues = [screen.results[name].p_value for name in screen.selected]
        assert pvalues == sorted(pvalues)

    def test_reject_flag_consistent(self, sea_cohort):
        screen = screen_parameters(sea_cohort, Altitude.SEA_LEVEL, 0.001)
        for result in screen.results.values():
            assert result.reject == (result.d_statistic > result.critical_value)

    def test_single_label_rejected(self):
        cohort = make_cohort(make_sample(week=1), make_sample(week=2))
        with pytest.raises(ValueError, match="both labels"):
            screen_parameters(cohort, Altitude.SEA_LEVEL, 0.001)

    def test_unimputed_cohort_rejected(self):
        cohort = make_cohort(
            make_sample(week=1, wbc=None), make_sample(week=2, label=Label.RHEPO)
        )
        with pytest.raises(ValueError, match="impute"):
            screen_parameters(cohort, Altitude.SEA_LEVEL, 0.001)

    def test_sample_order_invariance(self, sea_cohort):
        screen = screen_parameters(sea_cohort, Altitude.SEA_LEVEL, 0.001)
        rng = np.random.default_rng(0)
        shuffled = type(sea_cohort)(
            tuple(sea_cohort.samples[i] for i in rng.permutation(len(sea_cohort))),
            provenance=sea_cohort.provenance,
        )
        other = screen_parameters(shuffled, Altitude.SEA_LEVEL, 0.001)
        assert other.selected == screen.selected
        assert other.results == screen.results


class TestCorrelationFilter:
    def test_perfectly_correlated_pair_drops_one(self, sea_cohort):
        sub = sea_cohort.at_altitude(Altitude.SEA_LEVEL)
        lfr = parameter_values(sub, "LFR")
        irf = parameter_values(sub, "IRF")
        r = np.corrcoef(lfr, irf)[0, 1]
        assert abs(r) > 0.99  # LFR = 100 - MFR - HFR and IRF = MFR + HFR
        kept = correlation_filter(sub, ("IRF", "LFR"), threshold=0.9)
        assert kept == ("IRF",)

    def test_uncorrelated_columns_unchanged(self, label_blind_cohort):
        kept = correlation_filter(label_blind_cohort, ("WBC", "MCV", "HB"), threshold=0.9)
        assert kept == ("WBC", "MCV", "HB")

    def test_priority_order_decides_survivor(self, sea_cohort):
        assert correlation_filter(sea_cohort, ("LFR", "IRF"), threshold=0.9) == ("LFR",)

    def test_constant_column_never_correlates(self, sea_cohort):
        # RET# draws are degenerate constants per label, still both kept.
        kept = correlation_filter(sea_cohort, ("WBC", "RET#"), threshold=0.9)
        assert kept == ("WBC", "RET#")

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            correlation_filter(make_cohort(make_sample()), ("WBC",), 0.9)
