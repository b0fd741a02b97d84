import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refcast import stats, uplift
from refcast.errors import UnknownCategoryError

overrun_lists = st.lists(st.floats(-0.99, 20.0, allow_nan=False), min_size=1, max_size=120)


@pytest.fixture(scope="module")
def roads_dist(roads):
    return stats.build_distribution(roads.overruns())


@pytest.fixture(scope="module")
def rail_dist(rail):
    return stats.build_distribution(rail.overruns())


class TestRequiredUplift:
    def test_roads_anchors(self, roads_dist):
        assert uplift.required_uplift(roads_dist, 0.5) == pytest.approx(0.15, abs=0.01)
        assert uplift.required_uplift(roads_dist, 0.2) == pytest.approx(0.32, abs=0.01)

    def test_rail_anchors(self, rail_dist):
        assert uplift.required_uplift(rail_dist, 0.5) == pytest.approx(0.40, abs=0.01)
        assert uplift.required_uplift(rail_dist, 0.2) == pytest.approx(0.57, abs=0.01)

    def test_is_inverse_cdf_complement(self):
        dist = stats.build_distribution([0.0, 0.1, 0.2, 0.3, 0.4])
        assert uplift.required_uplift(dist, 0.5) == stats.quantile(dist, 0.5)
        assert uplift.required_uplift(dist, 0.2) == stats.quantile(dist, 0.8)

    @pytest.mark.parametrize("risk", [0.0, 1.0, -0.2, 1.5])
    def test_risk_domain(self, risk):
        dist = stats.build_distribution([0.1, 0.2])
        with pytest.raises(ValueError, match="strictly between 0 and 1"):
            uplift.required_uplift(dist, risk)

    def test_negative_for_underrun_heavy_class(self):
        dist = stats.build_distribution([-0.3, -0.2, -0.1, -0.05, 0.4])
        assert uplift.required_uplift(dist, 0.8) < 0.0

    @given(values=overrun_lists, r1=st.floats(0.01, 0.99), r2=st.floats(0.01, 0.99))
    @settings(max_examples=300)
    def test_nonincreasing_in_risk(self, values, r1, r2):
        dist = stats.build_distribution(values)
        lo, hi = min(r1, r2), max(r1, r2)
        assert uplift.required_uplift(dist, lo) >= uplift.required_uplift(dist, hi)


class TestUpliftCurve:
    def test_points_match_scalar_calls(self, rail_dist):
        grid = [0.5, 0.4, 0.3, 0.2, 0.1]
        curve = uplift.uplift_curve(rail_dist, grid)
        assert curve.source_n == rail_dist.n
        assert curve.points == tuple((r, uplift.required_uplift(rail_dist, r)) for r in grid)

    def test_rail_grid_anchors(self, rail_dist):
        curve = uplift.uplift_curve(rail_dist, [0.5, 0.2])
        assert curve.points[0][1] == pytest.approx(0.40, abs=0.01)
        assert curve.points[1][1] == pytest.approx(0.57, abs=0.01)

    def test_ascending_grid_accepted(self, roads_dist):
        curve = uplift.uplift_curve(roads_dist, [0.1, 0.5, 0.9])
        uplifts = [u for _, u in curve.points]
        assert uplifts == sorted(uplifts, reverse=True)

    def test_empty_grid_rejected(self, roads_dist):
        with pytest.raises(ValueError, match="non-empty"):
            uplift.uplift_curve(roads_dist, [])

    def test_non_monotone_grid_rejected(self, roads_dist):
        with pytest.raises(ValueError, match="strictly monotone"):
            uplift.uplift_curve(roads_dist, [0.5, 0.2, 0.3])

    def test_out_of_range_grid_rejected(self, roads_dist):
        with pytest.raises(ValueError, match="strictly between 0 and 1"):
            uplift.uplift_curve(roads_dist, [0.5, 0.0])

    def test_curve_invariant_enforced(self):
        with pytest.raises(ValueError, match="nonincreasing"):
            uplift.UpliftCurve(points=((0.5, 0.2), (0.2, 0.1)), source_n=9)

    def test_csv_rendering(self):
        curve = uplift.UpliftCurve(points=((0.5, 0.4), (0.2, 0.57)), source_n=46)
        assert uplift.curve_to_csv(curve) == (
            "acceptable_risk,uplift\n0.500000,0.400000\n0.200000,0.570000\n"
        )


class TestApplyUplift:
    def test_simple(self):
        assert uplift.apply_uplift(100.0, 0.15) == pytest.approx(115.0)

    def test_full_precision_identity(self):
        assert uplift.apply_uplift(255e6, 0.57) == 255e6 * (1.0 + 0.57)

    @pytest.mark.parametrize("base", [0.0, -5.0])
    def test_nonpositive_base_rejected(self, base):
        with pytest.raises(ValueError, match="positive"):
            uplift.apply_uplift(base, 0.1)


class TestBuiltinTable:
    def test_seven_categories_in_published_order(self):
        assert [e.category for e in uplift.builtin_table()] == [
            "roads",
            "rail",
            "fixed_links",
            "building_projects",
            "it_projects",
            "standard_civil",
            "non_standard_civil",
        ]

    def test_published_uplifts(self):
        by_key = {e.category: e for e in uplift.builtin_table()}
        assert (by_key["roads"].p50_uplift, by_key["roads"].p80_uplift) == (0.15, 0.32)
        assert (by_key["rail"].p50_uplift, by_key["rail"].p80_uplift) == (0.40, 0.57)
        assert (by_key["fixed_links"].p50_uplift, by_key["fixed_links"].p80_uplift) == (0.23, 0.55)
        assert (by_key["building_projects"].range_low, by_key["building_projects"].range_high) == (0.04, 0.51)
        assert (by_key["it_projects"].range_low, by_key["it_projects"].range_high) == (0.10, 2.00)
        assert (by_key["standard_civil"].range_low, by_key["standard_civil"].range_high) == (0.03, 0.44)
        assert (by_key["non_standard_civil"].range_low, by_key["non_standard_civil"].range_high) == (0.06, 0.66)

    def test_kind_partition(self):
        kinds = {e.category: e.kind for e in uplift.builtin_table()}
        backed = {k for k, v in kinds.items() if v == uplift.DISTRIBUTION_BACKED}
        assert backed == {"roads", "rail", "fixed_links"}
        assert all(v == uplift.RANGE_ONLY for k, v in kinds.items() if k not in backed)

    def test_range_rows_flag_missing_distribution(self):
        for entry in uplift.builtin_table():
            if entry.kind == uplift.RANGE_ONLY:
                assert uplift.NO_DISTRIBUTION_MSG in entry.source_note

    def test_lookup_known(self):
        assert uplift.lookup_table_entry("rail").display_name == "Rail"

    def test_lookup_unknown(self):
        with pytest.raises(UnknownCategoryError, match="water_projects"):
            uplift.lookup_table_entry("water_projects")

    def test_entry_validation(self):
        with pytest.raises(ValueError, match="p50 uplift exceeds p80"):
            uplift.UpliftTableEntry("x", "X", uplift.DISTRIBUTION_BACKED, p50_uplift=0.5, p80_uplift=0.3)
        with pytest.raises(ValueError, match="needs p50 and p80"):
            uplift.UpliftTableEntry("x", "X", uplift.DISTRIBUTION_BACKED, p50_uplift=0.5)
        with pytest.raises(ValueError, match="needs range_low and range_high"):
            uplift.UpliftTableEntry("x", "X", uplift.RANGE_ONLY, range_low=0.1)
        with pytest.raises(ValueError, match="range_low exceeds range_high"):
            uplift.UpliftTableEntry("x", "X", uplift.RANGE_ONLY, range_low=0.5, range_high=0.1)
        with pytest.raises(ValueError, match="unknown table entry kind"):
            uplift.UpliftTableEntry("x", "X", "guesswork", p50_uplift=0.1, p80_uplift=0.2)


class TestTableUplift:
    def test_published_points(self):
        entry = uplift.lookup_table_entry("fixed_links")
        assert uplift.table_uplift(entry, 0.5) == 0.23
        assert uplift.table_uplift(entry, 0.2) == 0.55

    def test_other_risks_rejected(self):
        entry = uplift.lookup_table_entry("roads")
        with pytest.raises(ValueError, match="only for acceptable risks 0.5 and 0.2"):
            uplift.table_uplift(entry, 0.3)


class TestAppraise:
    def test_table_backed_worked_example(self):
        result = uplift.appraise(uplift.lookup_table_entry("rail"), 255e6, acceptable_risk=0.2)
        assert result.uplift_applied == 0.57
        assert result.final_budget == 255e6 * (1.0 + 0.57)
        assert result.final_budget == pytest.approx(400.35e6, abs=1e-4)
        assert result.warnings == ()

    def test_distribution_backed(self, roads_dist):
        result = uplift.appraise(roads_dist, 100e6, acceptable_risk=0.2)
        expected_uplift = uplift.required_uplift(roads_dist, 0.2)
        assert result.uplift_applied == expected_uplift
        assert result.final_budget == 100e6 * (1.0 + expected_uplift)
        assert result.warnings == ()  # n=172 is comfortably above the small-class bar

    def test_range_only_interval(self):
        result = uplift.appraise(uplift.lookup_table_entry("it_projects"), 1e6)
        assert result.uplift_range == (0.10, 2.00)
        assert result.budget_range == (pytest.approx(1.1e6), pytest.approx(3.0e6))
        assert result.final_budget is None and result.uplift_applied is None

    def test_range_only_rejects_risk(self):
        entry = uplift.lookup_table_entry("it_projects")
        with pytest.raises(ValueError) as exc:
            uplift.appraise(entry, 1e6, acceptable_risk=0.2)
        assert uplift.NO_DISTRIBUTION_MSG in str(exc.value)
        assert "it_projects" in str(exc.value)

    def test_range_only_rejects_adjustment(self):
        entry = uplift.lookup_table_entry("building_projects")
        with pytest.raises(ValueError, match="range-only"):
            uplift.appraise(entry, 1e6, downward_adjustment=0.05, adjustment_evidence="audited mitigation plan")

    def test_missing_risk_for_distribution(self, roads_dist):
        with pytest.raises(ValueError, match="acceptable_risk is required"):
            uplift.appraise(roads_dist, 1e6)

    def test_adjustment_needs_evidence(self, roads_dist):
        with pytest.raises(ValueError, match="non-empty supporting evidence"):
            uplift.appraise(roads_dist, 1e6, acceptable_risk=0.2, downward_adjustment=0.05)
        with pytest.raises(ValueError, match="non-empty supporting evidence"):
            uplift.appraise(
                roads_dist, 1e6, acceptable_risk=0.2, downward_adjustment=0.05, adjustment_evidence="   "
            )

    def test_evidence_without_adjustment_rejected(self, roads_dist):
        with pytest.raises(ValueError, match="without a downward adjustment"):
            uplift.appraise(roads_dist, 1e6, acceptable_risk=0.2, adjustment_evidence="audited plan")

    def test_negative_adjustment_rejected(self, roads_dist):
        with pytest.raises(ValueError, match="non-negative"):
            uplift.appraise(
                roads_dist, 1e6, acceptable_risk=0.2, downward_adjustment=-0.1, adjustment_evidence="plan"
            )

    def test_adjustment_applied_and_noted(self, roads_dist):
        base_uplift = uplift.required_uplift(roads_dist, 0.2)
        result = uplift.appraise(
            roads_dist,
            1e6,
            acceptable_risk=0.2,
            downward_adjustment=0.05,
            adjustment_evidence="independent review of ground-condition surveys",
        )
        assert result.uplift_applied == pytest.approx(base_uplift - 0.05)
        assert "0.0500" in result.adjustment_note
        assert "ground-condition surveys" in result.adjustment_note

    def test_adjustment_floors_at_zero(self, roads_dist):
        result = uplift.appraise(
            roads_dist, 1e6, acceptable_risk=0.2, downward_adjustment=5.0, adjustment_evidence="plan"
        )
        assert result.uplift_applied == 0.0
        assert result.final_budget == 1e6
        assert uplift.WARN_NEGATIVE_UPLIFT not in result.warnings

    def test_small_class_warning(self):
        dist = stats.build_distribution([0.05, 0.1, 0.15, 0.2, 0.3])
        result = uplift.appraise(dist, 1e6, acceptable_risk=0.2)
        assert any("small reference class (n=5" in w for w in result.warnings)

    def test_negative_uplift_warning(self):
        dist = stats.build_distribution([-0.3, -0.2, -0.15, -0.1, 0.5])
        result = uplift.appraise(dist, 1e6, acceptable_risk=0.8)
        assert result.uplift_applied < 0.0
        assert result.final_budget < 1e6
        assert uplift.WARN_NEGATIVE_UPLIFT in result.warnings

    def test_pre_business_case_warning(self, roads_dist):
        result = uplift.appraise(roads_dist, 1e6, acceptable_risk=0.2, pre_business_case=True)
        assert uplift.WARN_PRE_BUSINESS_CASE in result.warnings

    def test_nonpositive_base_rejected(self, roads_dist):
        with pytest.raises(ValueError, match="positive"):
            uplift.appraise(roads_dist, 0.0, acceptable_risk=0.2)

    @pytest.mark.parametrize("risk", [0.0, 1.0])
    def test_risk_domain(self, roads_dist, risk):
        with pytest.raises(ValueError, match="strictly between 0 and 1"):
            uplift.appraise(roads_dist, 1e6, acceptable_risk=risk)
