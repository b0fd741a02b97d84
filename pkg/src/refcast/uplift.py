"""Required uplifts, uplift curves and debiased budget appraisals.

The uplift at acceptable risk r is the (1 - r) quantile of the overrun
distribution: a budget raised by that fraction is exceeded with probability
r. Negative uplifts (classes with frequent underruns, queried at high
acceptable risk) are returned as-is and flagged with a warning instead of
being clamped: clamping would silently distort portfolio-level (P50) use.

Alongside distribution-backed appraisals, a built-in capital-expenditure
uplift table ships for the standard UK transport procurement categories,
taken from the 2004 UK Department for Transport optimism bias guidance. The
building/IT/civil-engineering rows of that table publish only an uplift
range (sourced from the 2002 Mott MacDonald procurement review) and carry no
probability distribution, so percentile queries against them are invalid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UnknownCategoryError
from .stats import OverrunDistribution, quantile

DISTRIBUTION_BACKED = "distribution_backed"
RANGE_ONLY = "range_only"

NO_DISTRIBUTION_MSG = "no probability distribution available"

# Appraisals against classes smaller than this warn about sample size.
SMALL_CLASS_WARN_N = 20

WARN_NEGATIVE_UPLIFT = "uplift is negative (reference class underruns more often than not); returned unclamped"
WARN_PRE_BUSINESS_CASE = (
    "project has not reached the full business case stage; risks and required uplifts are likely higher"
)


@dataclass(frozen=True)
class UpliftCurve:
    """Acceptable-risk -> required-uplift mapping for one distribution."""

    points: tuple[tuple[float, float], ...]
    source_n: int

    def __post_init__(self) -> None:
        by_desc_risk = sorted(self.points, key=lambda pt: -pt[0])
        uplifts = [u for _, u in by_desc_risk]
        if any(b < a for a, b in zip(uplifts, uplifts[1:])):
            raise ValueError("uplift must be nonincreasing in acceptable risk")


@dataclass(frozen=True)
class UpliftTableEntry:
    """One category row of the built-in capital expenditure uplift table."""

    category: str
    display_name: str
    kind: str
    p50_uplift: float | None = None
    p80_uplift: float | None = None
    range_low: float | None = None
    range_high: float | None = None
    source_note: str = ""

    def __post_init__(self) -> None:
        if self.kind == DISTRIBUTION_BACKED:
            if self.p50_uplift is None or self.p80_uplift is None:
                raise ValueError(f"{self.category}: distribution-backed entry needs p50 and p80 uplifts")
            if self.p50_uplift > self.p80_uplift:
                raise ValueError(f"{self.category}: p50 uplift exceeds p80 uplift")
        elif self.kind == RANGE_ONLY:
            if self.range_low is None or self.range_high is None:
                raise ValueError(f"{self.category}: range-only entry needs range_low and range_high")
            if self.range_low > self.range_high:
                raise ValueError(f"{self.category}: range_low exceeds range_high")
        else:
            raise ValueError(f"unknown table entry kind: {self.kind!r}")


@dataclass(frozen=True)
class AppraisalResult:
    """Outcome of one budget appraisal.

    Point appraisals fill ``uplift_applied``/``final_budget`` (the final
    budget is exactly base * (1 + uplift), full precision; rounding happens
    only at display time). Range-only appraisals fill ``uplift_range`` and
    ``budget_range`` instead.
    """

    base_budget: float
    acceptable_risk: float | None
    uplift_applied: float | None
    final_budget: float | None
    uplift_range: tuple[float, float] | None = None
    budget_range: tuple[float, float] | None = None
    adjustment_note: str | None = None
    warnings: tuple[str, ...] = ()


def required_uplift(dist: OverrunDistribution, acceptable_risk: float) -> float:
    """Uplift needed so the overrun probability equals ``acceptable_risk``.

    Equals quantile(dist, 1 - acceptable_risk); may be negative, see module
    notes.
    """
    if not 0.0 < acceptable_risk < 1.0:
        raise ValueError(f"acceptable risk must lie strictly between 0 and 1: {acceptable_risk}")
    return quantile(dist, 1.0 - acceptable_risk)


def uplift_curve(dist: OverrunDistribution, risk_grid: Sequence[float]) -> UpliftCurve:
    """Evaluate :func:`required_uplift` over a strictly monotone risk grid."""
    grid = list(risk_grid)
    if not grid:
        raise ValueError("risk grid must be non-empty")
    if any(not 0.0 < r < 1.0 for r in grid):
        raise ValueError("risk grid values must lie strictly between 0 and 1")
    diffs = [b - a for a, b in zip(grid, grid[1:])]
    if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
        raise ValueError("risk grid must be strictly monotone")
    points = tuple((r, required_uplift(dist, r)) for r in grid)
    return UpliftCurve(points=points, source_n=dist.n)


def curve_to_csv(curve: UpliftCurve) -> str:
    """Render a curve as CSV (`acceptable_risk,uplift`, 6 decimal places)."""
    lines = ["acceptable_risk,uplift"]
    lines.extend(f"{risk:.6f},{up:.6f}" for risk, up in curve.points)
    return "\n".join(lines) + "\n"


def apply_uplift(base_budget: float, uplift: float) -> float:
    """base * (1 + uplift), full precision."""
    if not base_budget > 0:
        raise ValueError(f"base budget must be positive: {base_budget}")
    return base_budget * (1.0 + uplift)


def builtin_table() -> list[UpliftTableEntry]:
    """The seven standard capital-expenditure uplift rows (see module notes)."""
    dft = "UK Department for Transport optimism bias guidance (2004)"
    mm = f"{NO_DISTRIBUTION_MSG}; range from the Mott MacDonald review of large public procurement (2002)"
    return [
        UpliftTableEntry("roads", "Roads", DISTRIBUTION_BACKED, p50_uplift=0.15, p80_uplift=0.32, source_note=dft),
        UpliftTableEntry("rail", "Rail", DISTRIBUTION_BACKED, p50_uplift=0.40, p80_uplift=0.57, source_note=dft),
        UpliftTableEntry(
            "fixed_links", "Fixed links", DISTRIBUTION_BACKED, p50_uplift=0.23, p80_uplift=0.55, source_note=dft
        ),
        UpliftTableEntry(
            "building_projects", "Building projects", RANGE_ONLY, range_low=0.04, range_high=0.51, source_note=mm
        ),
        UpliftTableEntry("it_projects", "IT projects", RANGE_ONLY, range_low=0.10, range_high=2.00, source_note=mm),
        UpliftTableEntry(
            "standard_civil",
            "Standard civil engineering",
            RANGE_ONLY,
            range_low=0.03,
            range_high=0.44,
            source_note=mm,
        ),
        UpliftTableEntry(
            "non_standard_civil",
            "Non-standard civil engineering",
            RANGE_ONLY,
            range_low=0.06,
            range_high=0.66,
            source_note=mm,
        ),
    ]


def lookup_table_entry(category: str) -> UpliftTableEntry:
    for entry in builtin_table():
        if entry.category == category:
            return entry
    known = ", ".join(e.category for e in builtin_table())
    raise UnknownCategoryError(f"unknown uplift table category {category!r} (known: {known})")


def table_uplift(entry: UpliftTableEntry, acceptable_risk: float) -> float:
    if abs(acceptable_risk - 0.5) < 1e-12:
        return float(entry.p50_uplift)  # type: ignore[arg-type]
    if abs(acceptable_risk - 0.2) < 1e-12:
        return float(entry.p80_uplift)  # type: ignore[arg-type]
    raise ValueError(
        f"table entry {entry.category!r} publishes uplifts only for acceptable risks 0.5 and 0.2"
    )


def appraise(
    entry_or_dist: OverrunDistribution | UpliftTableEntry,
    base_budget: float,
    acceptable_risk: float | None = None,
    downward_adjustment: float | None = None,
    adjustment_evidence: str | None = None,
    pre_business_case: bool = False,
) -> AppraisalResult:
    """Compute the debiased budget for one project.

    Distribution-backed appraisals take the uplift from the class quantile
    at 1 - acceptable_risk; table-backed ones from the published P50/P80
    columns. Range-only table entries have no distribution, so they demand
    ``acceptable_risk=None`` and return a budget interval.

    A downward adjustment is honoured only with non-empty supporting
    evidence (strong evidence of improved risk mitigation); the adjusted
    uplift is floored at zero.
    """
    if not base_budget > 0:
        raise ValueError(f"base budget must be positive: {base_budget}")
    if downward_adjustment is not None:
        if downward_adjustment < 0:
            raise ValueError("downward adjustment must be non-negative")
        if not (adjustment_evidence or "").strip():
            raise ValueError(
                "downward adjustment requires non-empty supporting evidence of improved risk mitigation"
            )
    elif adjustment_evidence:
        raise ValueError("adjustment evidence supplied without a downward adjustment")

    warnings: list[str] = []
    if pre_business_case:
        warnings.append(WARN_PRE_BUSINESS_CASE)

    if isinstance(entry_or_dist, UpliftTableEntry) and entry_or_dist.kind == RANGE_ONLY:
        entry = entry_or_dist
        if acceptable_risk is not None:
            raise ValueError(f"{NO_DISTRIBUTION_MSG} for category {entry.category!r}")
        if downward_adjustment is not None:
            raise ValueError("downward adjustment requires a point uplift, not a range-only entry")
        low, high = float(entry.range_low), float(entry.range_high)  # type: ignore[arg-type]
        return AppraisalResult(
            base_budget=base_budget,
            acceptable_risk=None,
            uplift_applied=None,
            final_budget=None,
            uplift_range=(low, high),
            budget_range=(apply_uplift(base_budget, low), apply_uplift(base_budget, high)),
            warnings=tuple(warnings),
        )

    if acceptable_risk is None:
        raise ValueError("acceptable_risk is required for distribution-backed appraisals")
    if not 0.0 < acceptable_risk < 1.0:
        raise ValueError(f"acceptable risk must lie strictly between 0 and 1: {acceptable_risk}")

    if isinstance(entry_or_dist, UpliftTableEntry):
        uplift = table_uplift(entry_or_dist, acceptable_risk)
    else:
        dist = entry_or_dist
        uplift = required_uplift(dist, acceptable_risk)
        if dist.n < SMALL_CLASS_WARN_N:
            warnings.append(f"small reference class (n={dist.n} completed records)")

    adjustment_note = None
    if downward_adjustment is not None:
        adjusted = uplift - downward_adjustment
        if adjusted < 0.0:
            adjusted = 0.0
        adjustment_note = f"uplift reduced by {downward_adjustment:.4f}; evidence: {adjustment_evidence.strip()}"  # type: ignore[union-attr]
        uplift = adjusted

    if uplift < 0.0:
        warnings.append(WARN_NEGATIVE_UPLIFT)

    return AppraisalResult(
        base_budget=base_budget,
        acceptable_risk=acceptable_risk,
        uplift_applied=uplift,
        final_budget=apply_uplift(base_budget, uplift),
        adjustment_note=adjustment_note,
        warnings=tuple(warnings),
    )
