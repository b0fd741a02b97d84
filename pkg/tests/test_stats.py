import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refcast import stats
from refcast.errors import InsufficientDataError

from _oracles import KS_CASES, T_CASES, oracle_quantile

overrun_lists = st.lists(st.floats(-0.99, 20.0, allow_nan=False), min_size=1, max_size=120)


class TestBuildDistribution:
    def test_sorts_and_counts(self):
        dist = stats.build_distribution([0.3, 0.1, 0.2])
        assert list(dist.values) == [0.1, 0.2, 0.3]
        assert dist.n == 3

    def test_singleton(self):
        dist = stats.build_distribution([0.15])
        assert dist.n == 1
        assert dist.min == dist.max == 0.15

    def test_duplicates_retained(self):
        dist = stats.build_distribution([0.2, 0.2, 0.2])
        assert dist.n == 3

    def test_empty_is_an_error(self):
        with pytest.raises(InsufficientDataError, match="empty reference class"):
            stats.build_distribution([])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            stats.build_distribution([0.1, float("nan")])

    def test_roads_fixture_anchors(self, roads):
        dist = stats.build_distribution(roads.overruns())
        assert stats.ecdf(dist, 0.10) == pytest.approx(0.40, abs=0.01)
        assert stats.ecdf(dist, 0.32) == pytest.approx(0.80, abs=0.01)


class TestEcdf:
    def test_counting(self):
        dist = stats.build_distribution([0.1, 0.2, 0.3])
        assert stats.ecdf(dist, 0.2) == pytest.approx(2 / 3)

    def test_below_min_is_zero(self):
        dist = stats.build_distribution([0.1, 0.2, 0.3])
        assert stats.ecdf(dist, 0.05) == 0.0

    def test_step_invariants(self):
        dist = stats.build_distribution([0.4, 0.1, 0.9, 0.1])
        assert stats.ecdf(dist, dist.min) == pytest.approx(2 / 4)  # two-fold tie at the min
        assert stats.ecdf(dist, dist.max) == 1.0
        assert stats.ecdf(dist, dist.max + 1.0) == 1.0

    def test_min_jump_is_one_over_n(self):
        dist = stats.build_distribution([0.3, 0.5, 0.7])
        assert stats.ecdf(dist, dist.min) == pytest.approx(1 / 3)

    @given(values=overrun_lists, x=st.floats(-2.0, 25.0))
    def test_matches_counting_definition(self, values, x):
        dist = stats.build_distribution(values)
        expected = sum(1 for v in values if v <= x) / len(values)
        assert stats.ecdf(dist, x) == pytest.approx(expected, abs=1e-15)


class TestQuantile:
    def test_five_point_median(self):
        dist = stats.build_distribution([0.0, 0.1, 0.2, 0.3, 0.4])
        assert stats.quantile(dist, 0.5) == 0.2

    def test_boundaries(self):
        dist = stats.build_distribution([0.4, -0.1, 0.9])
        assert stats.quantile(dist, 0.0) == -0.1
        assert stats.quantile(dist, 1.0) == 0.9

    def test_domain_error(self):
        dist = stats.build_distribution([0.1])
        with pytest.raises(ValueError):
            stats.quantile(dist, -0.01)
        with pytest.raises(ValueError):
            stats.quantile(dist, 1.01)

    def test_roads_fixture_p80(self, roads):
        dist = stats.build_distribution(roads.overruns())
        assert stats.quantile(dist, 0.80) == pytest.approx(0.32, abs=0.01)

    def test_vectorized_matches_scalar(self):
        dist = stats.build_distribution([0.1, 0.5, 0.2, 0.9])
        grid = [0.0, 0.25, 0.5, 0.75, 1.0]
        got = stats.quantiles(dist, grid)
        assert [stats.quantile(dist, p) for p in grid] == list(got)

    @given(values=overrun_lists, p1=st.floats(0.0, 1.0), p2=st.floats(0.0, 1.0))
    @settings(max_examples=300)
    def test_monotone_in_p(self, values, p1, p2):
        dist = stats.build_distribution(values)
        lo, hi = min(p1, p2), max(p1, p2)
        assert stats.quantile(dist, lo) <= stats.quantile(dist, hi)

    @given(values=overrun_lists, p=st.floats(0.0, 1.0))
    @settings(max_examples=300)
    def test_matches_brute_oracle_bitwise(self, values, p):
        dist = stats.build_distribution(values)
        assert stats.quantile(dist, p) == oracle_quantile(values, p)

    @given(values=st.lists(st.floats(-0.9, 5.0), min_size=2, max_size=60))
    def test_grid_points_recover_order_statistics(self, values):
        # exact in real arithmetic; float rounding of k/(n-1) leaves at
        # most an ulp-scale interpolation residue
        dist = stats.build_distribution(values)
        n = dist.n
        xs = sorted(values)
        for k in range(n):
            got = stats.quantile(dist, k / (n - 1))
            assert got == pytest.approx(xs[k], rel=1e-9, abs=1e-12)

class TestSummary:
    def test_two_point_sample(self):
        s = stats.summary([0.1, 0.3])
        assert s.mean == pytest.approx(0.2)
        assert s.sd == pytest.approx(0.1414, abs=5e-5)

    def test_constant_sample(self):
        s = stats.summary([0.07, 0.07, 0.07])
        assert s.mean == pytest.approx(0.07)
        assert s.sd == 0.0

    def test_single_value_has_no_sd(self):
        s = stats.summary([0.25])
        assert s.n == 1 and s.sd is None

    def test_roads_fixture_mean(self, roads):
        assert stats.summary(roads.overruns()).mean == pytest.approx(0.204, abs=0.02)

    @given(values=overrun_lists)
    def test_order_invariants(self, values):
        s = stats.summary(values)
        assert s.min <= s.median <= s.max
        if s.sd is not None:
            assert s.sd >= 0.0


class TestTTest:
    def test_symmetric_sample_gives_p_one(self):
        report = stats.t_test_mean_zero([-0.1, 0.0, 0.1])
        assert report.statistic == 0.0
        assert report.p_value == 1.0

    @pytest.mark.parametrize("sample,t_expected,p_expected", T_CASES)
    def test_matches_high_precision_oracle(self, sample, t_expected, p_expected):
        report = stats.t_test_mean_zero(sample)
        assert report.statistic == pytest.approx(t_expected, abs=1e-9)
        assert report.p_value == pytest.approx(p_expected, abs=1e-9)

    def test_undersized_sample_rejected(self):
        with pytest.raises(InsufficientDataError):
            stats.t_test_mean_zero([0.1, 0.2])

    def test_zero_variance_rejected(self):
        with pytest.raises(InsufficientDataError):
            stats.t_test_mean_zero([0.3, 0.3, 0.3])

    @given(
        values=st.lists(st.floats(-0.9, 5.0).map(lambda v: round(v, 4)), min_size=3, max_size=40),
        scale=st.floats(0.001, 1000.0),
    )
    @settings(max_examples=200)
    def test_scale_invariance(self, values, scale):
        if min(values) == max(values) or float(np.std(values, ddof=1)) == 0.0:
            return
        base = stats.t_test_mean_zero(values)
        scaled = stats.t_test_mean_zero([scale * v for v in values])
        assert scaled.statistic == pytest.approx(base.statistic, rel=1e-9, abs=1e-12)


class TestJarqueBera:
    def test_seeded_normal_rarely_rejected(self):
        rng = np.random.default_rng(20040801)
        accepted = sum(
            stats.jarque_bera_normality(rng.standard_normal(500)).p_value > 0.05 for _ in range(100)
        )
        assert accepted >= 90

    def test_skewed_sample_rejected(self):
        rng = np.random.default_rng(7)
        report = stats.jarque_bera_normality(rng.exponential(1.0, 400))
        assert report.p_value < 0.01

    def test_constant_sample_is_degenerate(self):
        with pytest.raises(InsufficientDataError):
            stats.jarque_bera_normality([0.2] * 20)

    def test_undersized_sample_rejected(self):
        with pytest.raises(InsufficientDataError, match="insufficient sample"):
            stats.jarque_bera_normality([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])


class TestKsTwoSample:
    def test_identical_samples(self):
        a = [0.1, 0.5, 0.3, 0.2, 0.9]
        report = stats.ks_two_sample(a, a)
        assert report.statistic == 0.0
        assert report.p_value == 1.0

    def test_disjoint_supports(self):
        a = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        b = [x + 10 for x in a]
        assert stats.ks_two_sample(a, b).statistic == 1.0

    def test_interleaved_example(self):
        report = stats.ks_two_sample([0.1, 0.2, 0.3, 0.4, 0.5], [0.15, 0.25, 0.35, 0.45, 0.55])
        assert report.statistic == pytest.approx(0.2, abs=1e-12)

    @pytest.mark.parametrize("a,b,d_expected,p_expected", KS_CASES)
    def test_matches_high_precision_oracle(self, a, b, d_expected, p_expected):
        report = stats.ks_two_sample(a, b)
        assert report.statistic == pytest.approx(d_expected, abs=1e-9)
        assert report.p_value == pytest.approx(p_expected, abs=1e-9)

    def test_undersized_sample_rejected(self):
        with pytest.raises(InsufficientDataError):
            stats.ks_two_sample([0.1, 0.2, 0.3, 0.4], [0.1, 0.2, 0.3, 0.4, 0.5])

    @given(
        a=st.lists(st.floats(-1.0, 2.0), min_size=5, max_size=50),
        b=st.lists(st.floats(-1.0, 2.0), min_size=5, max_size=50),
    )
    @settings(max_examples=150)
    def test_symmetric(self, a, b):
        ab = stats.ks_two_sample(a, b)
        ba = stats.ks_two_sample(b, a)
        assert ab.statistic == ba.statistic
        assert ab.p_value == ba.p_value


class TestReportInvariants:
    def test_p_value_range_enforced(self):
        with pytest.raises(ValueError):
            stats.TestReport(test_name=stats.T_MEAN_ZERO, statistic=1.0, p_value=1.5, n=10)
