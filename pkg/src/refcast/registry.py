"""Persistent reference-class store, category taxonomy, pooling and backtests.

The store is one directory holding ``manifest.json`` plus one CSV per class
(dataset schema), chosen for human-auditable, diff-friendly curation. Writes
are single-writer: content goes to a temp file first, then an atomic rename,
then the manifest is atomically replaced, so an interrupted save leaves the
manifest referencing only old, intact files. Every file carries a sha256 in
the manifest and is re-verified on load.

Pooling checks back the construction of reference classes: two candidate
classes may be merged only when a two-sample Kolmogorov-Smirnov test cannot
tell their overrun samples apart. Backtests validate the risk semantics of
an existing class by leave-one-out coverage: classes in this domain are
small (tens to a couple hundred records), and leave-one-out maximizes the
number of trials.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field

import numpy as np

from . import dataset
from ._kernels import loo_coverage_count
from .errors import InsufficientDataError, StoreCorruptError, StoreError, UnknownCategoryError
from .numerics import clopper_pearson_interval
from .stats import TestReport, ks_two_sample

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1

DEFAULT_POOL_ALPHA = 0.05

POOLABLE = "poolable"
DISTINCT = "distinct"

REFERENCE_ONLY_NOTE = "Included for reference purposes only"


@dataclass(frozen=True)
class Category:
    """One taxonomy entry: a key, a display name and its member project types."""

    key: str
    display_name: str
    project_types: tuple[str, ...]
    seeded: bool = False

    def __post_init__(self) -> None:
        if not re.fullmatch(r"[a-z][a-z0-9_]*", self.key):
            raise ValueError(f"category key must be a lowercase identifier: {self.key!r}")
        if not self.display_name:
            raise ValueError(f"category {self.key!r} needs a display name")


def _seed_categories() -> tuple[Category, ...]:
    return (
        Category(
            "roads",
            "Roads",
            (
                "Motorway",
                "Trunk roads",
                "Local roads",
                "Bicycle facilities",
                "Pedestrian facilities",
                "Park and ride",
                "Bus lane schemes",
                "Guided buses on wheels",
            ),
            seeded=True,
        ),
        Category(
            "rail",
            "Rail",
            ("Metro", "Light rail", "Guided buses on tracks", "Conventional rail", "High speed rail"),
            seeded=True,
        ),
        Category("fixed_links", "Fixed links", ("Bridges", "Tunnels"), seeded=True),
        Category("building_projects", "Building projects", ("Stations", "Terminal buildings"), seeded=True),
        Category("it_projects", "IT projects", ("IT system development",), seeded=True),
        Category("standard_civil", "Standard civil engineering", (REFERENCE_ONLY_NOTE,), seeded=True),
        Category("non_standard_civil", "Non-standard civil engineering", (REFERENCE_ONLY_NOTE,), seeded=True),
    )


@dataclass
class CategoryTaxonomy:
    """Seeded, user-extensible project category taxonomy.

    The seven standard transport procurement categories are seeded and
    immutable; user categories can be added under fresh keys.
    """

    _categories: dict[str, Category] = field(default_factory=dict)

    @classmethod
    def default(cls) -> "CategoryTaxonomy":
        tax = cls()
        for cat in _seed_categories():
            tax._categories[cat.key] = cat
        return tax

    def keys(self) -> tuple[str, ...]:
        return tuple(self._categories)

    def __contains__(self, key: str) -> bool:
        return key in self._categories

    def get(self, key: str) -> Category:
        try:
            return self._categories[key]
        except KeyError:
            known = ", ".join(self.keys())
            raise UnknownCategoryError(f"unknown category {key!r} (known: {known})") from None

    def add(self, key: str, display_name: str, project_types: tuple[str, ...] = ()) -> Category:
        if key in self._categories:
            raise ValueError(f"category {key!r} already exists and cannot be replaced")
        cat = Category(key=key, display_name=display_name, project_types=tuple(project_types))
        self._categories[key] = cat
        return cat


@dataclass(frozen=True)
class ClassEntry:
    """One manifest row describing a stored class."""

    name: str
    category: str
    metric: str
    count: int
    file: str
    sha256: str
    source_note: str = ""


@dataclass(frozen=True)
class BacktestReport:
    """Leave-one-out coverage of the uplifted budget at one percentile."""

    percentile: float
    trials: int
    covered: int
    coverage: float
    binomial_95_interval: tuple[float, float]

    def __post_init__(self) -> None:
        if self.covered > self.trials:
            raise ValueError("covered cannot exceed trials")
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage must lie in [0, 1]: {self.coverage}")


@dataclass(frozen=True)
class PoolDecision:
    """Outcome of a pooling check between two candidate classes."""

    decision: str
    alpha: float
    report: TestReport

    def __post_init__(self) -> None:
        if self.decision not in (POOLABLE, DISTINCT):
            raise ValueError(f"unknown decision: {self.decision!r}")


def _slug(name: str) -> str:
    s = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return s or "class"


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _manifest_path(store_path: str) -> str:
    return os.path.join(store_path, MANIFEST_NAME)


def init_store(store_path: str) -> None:
    """Create the store directory and an empty manifest if absent."""
    os.makedirs(store_path, exist_ok=True)
    path = _manifest_path(store_path)
    if not os.path.exists(path):
        _write_manifest(store_path, [])


def _write_manifest(store_path: str, entries: list[ClassEntry]) -> None:
    doc = {
        "version": MANIFEST_VERSION,
        "classes": [
            {
                "name": e.name,
                "category": e.category,
                "metric": e.metric,
                "count": e.count,
                "file": e.file,
                "sha256": e.sha256,
                "source_note": e.source_note,
            }
            for e in sorted(entries, key=lambda e: e.name)
        ],
    }
    tmp = _manifest_path(store_path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, _manifest_path(store_path))


def _read_manifest(store_path: str) -> list[ClassEntry]:
    path = _manifest_path(store_path)
    if not os.path.isdir(store_path) or not os.path.exists(path):
        raise StoreError(f"store not initialized: no {MANIFEST_NAME} in {store_path!r}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreCorruptError(f"corrupt store: unreadable manifest {path!r}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != MANIFEST_VERSION or "classes" not in doc:
        raise StoreCorruptError(f"corrupt store: malformed manifest {path!r}")
    entries = []
    try:
        for raw in doc["classes"]:
            entries.append(
                ClassEntry(
                    name=raw["name"],
                    category=raw["category"],
                    metric=raw["metric"],
                    count=int(raw["count"]),
                    file=raw["file"],
                    sha256=raw["sha256"],
                    source_note=raw.get("source_note", ""),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise StoreCorruptError(f"corrupt store: malformed manifest entry in {path!r}: {exc}") from exc
    return entries


def _gc_orphans(store_path: str, entries: list[ClassEntry]) -> None:
    live = {e.file for e in entries}
    for fname in os.listdir(store_path):
        if fname.endswith(".csv") and fname not in live:
            try:
                os.remove(os.path.join(store_path, fname))
            except OSError:
                pass  # best effort; an orphan never shadows manifest state


def save_class(ref_class: dataset.ReferenceClass, store_path: str, overwrite: bool = False) -> str:
    """Write one class to the store; returns the stored CSV path.

    The CSV lands under a content-suffixed name (``<slug>.<sha12>.csv``),
    so a half-written replacement can never be confused with the old
    version; the manifest flips to the new file in one atomic rename and
    the superseded file is garbage-collected afterwards.
    """
    init_store(store_path)
    entries = _read_manifest(store_path)
    existing = {e.name: e for e in entries}
    if ref_class.name in existing and not overwrite:
        raise StoreError(
            f"class {ref_class.name!r} already exists in {store_path!r} (pass overwrite to replace)"
        )

    text = dataset.serialize_records(ref_class.records)
    digest = _sha256_text(text)
    fname = f"{_slug(ref_class.name)}.{digest[:12]}.csv"
    final_path = os.path.join(store_path, fname)
    tmp_path = final_path + ".tmp"
    try:
        with open(tmp_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_path, final_path)
    except OSError as exc:
        raise StoreError(f"failed to write class file {final_path!r}: {exc}") from exc

    entry = ClassEntry(
        name=ref_class.name,
        category=ref_class.category,
        metric=ref_class.metric.value,
        count=len(ref_class.records),
        file=fname,
        sha256=digest,
        source_note=ref_class.source_note,
    )
    new_entries = [e for e in entries if e.name != ref_class.name] + [entry]
    _write_manifest(store_path, new_entries)
    _gc_orphans(store_path, new_entries)
    return final_path


def load_class(name: str, store_path: str) -> dataset.ReferenceClass:
    """Checksum-verified load of one stored class."""
    entries = _read_manifest(store_path)
    by_name = {e.name: e for e in entries}
    if name not in by_name:
        known = ", ".join(sorted(by_name)) or "<none>"
        raise StoreError(f"unknown class {name!r} in {store_path!r} (stored: {known})")
    entry = by_name[name]
    path = os.path.join(store_path, entry.file)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise StoreCorruptError(f"corrupt store: missing class file {path!r}: {exc}") from exc
    digest = _sha256_text(text)
    if digest != entry.sha256:
        raise StoreCorruptError(
            f"corrupt store: checksum mismatch for {path!r} (manifest {entry.sha256[:12]}, file {digest[:12]})"
        )
    records, diagnostics = dataset.parse_records(text)
    if diagnostics:
        first = diagnostics[0]
        raise StoreCorruptError(f"corrupt store: invalid row {first.row} in {path!r}: {first.reason}")
    if len(records) != entry.count:
        raise StoreCorruptError(
            f"corrupt store: {path!r} has {len(records)} records, manifest says {entry.count}"
        )
    try:
        return dataset.ReferenceClass(
            name=entry.name,
            category=entry.category,
            metric=dataset.Metric(entry.metric),
            records=tuple(records),
            source_note=entry.source_note,
        )
    except ValueError as exc:
        raise StoreCorruptError(f"corrupt store: {path!r} is inconsistent with its manifest entry: {exc}") from exc


def list_classes(store_path: str) -> list[ClassEntry]:
    """Manifest entries, sorted by class name."""
    return sorted(_read_manifest(store_path), key=lambda e: e.name)


def pool_check(
    a: dataset.ReferenceClass, b: dataset.ReferenceClass, alpha: float = DEFAULT_POOL_ALPHA
) -> PoolDecision:
    """Decide whether two classes' overrun samples may be pooled.

    Poolable iff the two-sample Kolmogorov-Smirnov p-value is >= alpha;
    symmetric in its arguments.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly between 0 and 1: {alpha}")
    if a.metric is not b.metric:
        raise ValueError(
            f"metric mismatch: {a.name!r} is {a.metric.value}, {b.name!r} is {b.metric.value}"
        )
    for cls in (a, b):
        n = len(cls.completed_records)
        if n < 5:
            raise InsufficientDataError(
                f"class {cls.name!r} has {n} completed records; pooling checks need at least 5"
            )
    report = ks_two_sample(a.overruns(), b.overruns())
    decision = POOLABLE if report.p_value >= alpha else DISTINCT
    return PoolDecision(decision=decision, alpha=alpha, report=report)


def backtest(ref_class: dataset.ReferenceClass, percentile: float) -> BacktestReport:
    """Leave-one-out coverage check of the class's uplift semantics.

    For each completed record, the uplift at ``percentile`` is taken from
    the distribution of all other records and the record counts as covered
    when its actual cost stays within its uplifted forecast. Since budgets
    scale linearly, that is exactly ``overrun <= quantile(others,
    percentile)``. Coverage near ``percentile`` (within binomial noise)
    means the class calibrates well.
    """
    if not 0.0 < percentile < 1.0:
        raise ValueError(f"percentile must lie strictly between 0 and 1: {percentile}")
    overruns = ref_class.overruns()
    trials = len(overruns)
    if trials < 10:
        raise InsufficientDataError(
            f"class {ref_class.name!r} has {trials} completed records; backtests need at least 10"
        )
    xs = np.sort(np.asarray(overruns, dtype=np.float64))
    covered = int(loo_coverage_count(xs, percentile))
    return BacktestReport(
        percentile=percentile,
        trials=trials,
        covered=covered,
        coverage=covered / trials,
        binomial_95_interval=clopper_pearson_interval(covered, trials),
    )
