"""Project-outcome data model, CSV ingestion and the core overrun measure.

A completed project's cost (or demand) overrun is ``actual / forecast - 1``,
with the forecast taken at the time of the decision to build. Overruns are
kept as plain fractions everywhere inside the package; percent appears only
at presentation boundaries. Abandoned projects carry no actual outcome: they
are retained so attrition can be reported, but they never enter distribution
math.

All types are immutable after construction and safe to share across threads;
parsing is a pure function of its input text.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

from .errors import CsvFormatError, InsufficientDataError, NoActualOutcomeError

CSV_HEADER = [
    "id",
    "category",
    "metric",
    "forecast_value",
    "actual_value",
    "status",
    "currency_or_unit",
    "price_basis_year",
    "decision_year",
    "completion_year",
]


class Metric(str, Enum):
    CAPITAL_COST = "capital_cost"
    DEMAND = "demand"


class Status(str, Enum):
    COMPLETED = "completed"
    ABANDONED = "abandoned"


@dataclass(frozen=True)
class ProjectRecord:
    """One completed or abandoned project outcome.

    ``actual_value`` is present exactly when ``status`` is completed;
    ``completion_year``, when given, cannot precede ``decision_year``
    (the forecast base year).
    """

    id: str
    category: str
    metric: Metric
    forecast_value: float
    actual_value: float | None
    status: Status
    currency_or_unit: str
    price_basis_year: int
    decision_year: int
    completion_year: int | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.forecast_value > 0:
            raise ValueError(f"record {self.id!r}: forecast_value must be > 0")
        if self.status is Status.COMPLETED:
            if self.actual_value is None:
                raise ValueError(f"record {self.id!r}: completed record needs an actual_value")
            if not self.actual_value > 0:
                raise ValueError(f"record {self.id!r}: actual_value must be > 0")
        else:
            if self.actual_value is not None:
                raise ValueError(f"record {self.id!r}: abandoned record cannot carry an actual_value")
        if self.completion_year is not None and self.completion_year < self.decision_year:
            raise ValueError(f"record {self.id!r}: completion_year precedes decision_year")


@dataclass(frozen=True)
class ReferenceClass:
    """Named collection of comparable project records sharing one category and metric."""

    name: str
    category: str
    metric: Metric
    records: tuple[ProjectRecord, ...]
    source_note: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("reference class name must be non-empty")
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.category != self.category:
                raise ValueError(
                    f"record {rec.id!r} has category {rec.category!r}, class is {self.category!r}"
                )
            if rec.metric is not self.metric:
                raise ValueError(f"record {rec.id!r} has metric {rec.metric.value!r}, class is {self.metric.value!r}")
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id!r} in class {self.name!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def completed_records(self) -> tuple[ProjectRecord, ...]:
        return tuple(r for r in self.records if r.status is Status.COMPLETED)

    def overruns(self) -> list[float]:
        """Overrun fractions of the completed records, in record order."""
        out = [overrun(r) for r in self.completed_records]
        if not out:
            raise InsufficientDataError(
                f"class {self.name!r} has no completed records; cannot build a distribution"
            )
        return out

    def quality_warnings(self) -> list[str]:
        """Consistency warnings (never errors): mixed price basis or units.

        Records are assumed to be in constant prices; the engine cannot
        deflate, so a mixed price basis is flagged rather than silently
        trusted.
        """
        warnings = []
        bases = {r.price_basis_year for r in self.records}
        if len(bases) > 1:
            warnings.append(
                f"mixed price_basis_year in class {self.name!r} ({sorted(bases)}); "
                "values are compared without deflation"
            )
        units = {r.currency_or_unit for r in self.records}
        if len(units) > 1:
            warnings.append(f"mixed currency_or_unit in class {self.name!r} ({sorted(units)})")
        return warnings


@dataclass(frozen=True)
class RowDiagnostic:
    """Why a CSV row was rejected. ``row`` is 1-based and counts the header as row 1."""

    row: int
    reason: str
    field: str | None = None


def overrun(record: ProjectRecord) -> float:
    """Overrun fraction ``actual / forecast - 1`` for a completed record.

    0 means a perfect forecast; negative values are underruns and are legal.
    """
    if record.status is not Status.COMPLETED or record.actual_value is None:
        raise NoActualOutcomeError(f"record {record.id!r} has no actual outcome (status={record.status.value})")
    return record.actual_value / record.forecast_value - 1.0


def inaccuracy_percent(record: ProjectRecord) -> float:
    """Forecast inaccuracy in percent: ``100 * overrun(record)``."""
    return 100.0 * overrun(record)


def attrition_rate(ref_class: ReferenceClass) -> float:
    """Fraction of the class's projects abandoned before completion."""
    if not ref_class.records:
        raise InsufficientDataError(f"class {ref_class.name!r} is empty")
    abandoned = sum(1 for r in ref_class.records if r.status is Status.ABANDONED)
    return abandoned / len(ref_class.records)


def _parse_positive_float(raw: str, name: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} is not a number: {raw!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"{name} is not finite: {raw!r}")
    if not value > 0:
        raise ValueError(f"non-positive {name}: {raw!r}")
    return value


def _parse_year(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} is not an integer year: {raw!r}") from None


def _record_from_row(row: dict[str, str]) -> ProjectRecord:
    try:
        metric = Metric(row["metric"])
    except ValueError:
        raise ValueError(f"unknown metric: {row['metric']!r}") from None
    try:
        status = Status(row["status"])
    except ValueError:
        raise ValueError(f"unknown status: {row['status']!r}") from None

    forecast = _parse_positive_float(row["forecast_value"], "forecast_value")
    raw_actual = row["actual_value"].strip()
    if status is Status.COMPLETED:
        if not raw_actual:
            raise ValueError("completed record is missing actual_value")
        actual = _parse_positive_float(raw_actual, "actual_value")
    else:
        if raw_actual:
            raise ValueError("abandoned record must leave actual_value empty")
        actual = None

    raw_completion = row["completion_year"].strip()
    completion = _parse_year(raw_completion, "completion_year") if raw_completion else None

    return ProjectRecord(
        id=row["id"].strip(),
        category=row["category"].strip(),
        metric=metric,
        forecast_value=forecast,
        actual_value=actual,
        status=status,
        currency_or_unit=row["currency_or_unit"].strip(),
        price_basis_year=_parse_year(row["price_basis_year"], "price_basis_year"),
        decision_year=_parse_year(row["decision_year"], "decision_year"),
        completion_year=completion,
    )


def parse_records(raw_text: str) -> tuple[list[ProjectRecord], list[RowDiagnostic]]:
    """Parse CSV text into records plus row-level diagnostics.

    The header is mandatory and must match :data:`CSV_HEADER` exactly.
    Well-formed rows become records in input order; malformed rows (bad
    numbers, bad enums, broken invariants, duplicate ids) are skipped and
    reported with their 1-based row number. A bad header is a whole-file
    :class:`CsvFormatError`, not a diagnostic.
    """
    text = raw_text.lstrip("﻿")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError("empty input: missing header row") from None
    if header != CSV_HEADER:
        raise CsvFormatError(
            f"unexpected header {header!r}; expected {','.join(CSV_HEADER)}"
        )

    records: list[ProjectRecord] = []
    diagnostics: list[RowDiagnostic] = []
    seen_ids: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(CSV_HEADER):
            diagnostics.append(
                RowDiagnostic(lineno, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
            )
            continue
        mapping = dict(zip(CSV_HEADER, row))
        try:
            record = _record_from_row(mapping)
        except ValueError as exc:
            diagnostics.append(RowDiagnostic(lineno, str(exc)))
            continue
        if record.id in seen_ids:
            diagnostics.append(RowDiagnostic(lineno, f"duplicate record id {record.id!r}"))
            continue
        seen_ids.add(record.id)
        records.append(record)
    return records, diagnostics


def serialize_records(records: list[ProjectRecord] | tuple[ProjectRecord, ...]) -> str:
    """Render records as CSV text that round-trips through :func:`parse_records`.

    Floats are written with ``repr`` (shortest round-trip form), LF line
    endings, no quoting beyond what csv requires.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.id,
                r.category,
                r.metric.value,
                repr(r.forecast_value),
                "" if r.actual_value is None else repr(r.actual_value),
                r.status.value,
                r.currency_or_unit,
                str(r.price_basis_year),
                str(r.decision_year),
                "" if r.completion_year is None else str(r.completion_year),
            ]
        )
    return buf.getvalue()
