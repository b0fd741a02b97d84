"""Reference class forecasting for project cost and demand overruns.

The package debiases project budgets with the outside view: instead of
trusting a project's own estimate, it places the project in a reference
class of comparable completed projects, reads the empirical distribution of
their overruns (``actual / forecast - 1``), and uplifts the budget to the
quantile matching the decision maker's acceptable risk.

Layers, bottom up: :mod:`refcast.dataset` (records, CSV ingestion),
:mod:`refcast.stats` (distributions, quantiles, hypothesis tests),
:mod:`refcast.uplift` (uplift curves, the built-in category table,
appraisals), :mod:`refcast.registry` (persistent store, pooling checks,
backtests), :mod:`refcast.cli` (command-line surface). Hot numeric kernels
live in :mod:`refcast._kernels`, compiled when available with a pure-Python
fallback selected at import.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .dataset import (
    CSV_HEADER,
    Metric,
    ProjectRecord,
    ReferenceClass,
    RowDiagnostic,
    Status,
    attrition_rate,
    inaccuracy_percent,
    overrun,
    parse_records,
    serialize_records,
)
from .errors import (
    CsvFormatError,
    InsufficientDataError,
    NoActualOutcomeError,
    RefcastError,
    StoreCorruptError,
    StoreError,
    UnknownCategoryError,
)
from .registry import (
    BacktestReport,
    Category,
    CategoryTaxonomy,
    ClassEntry,
    PoolDecision,
    backtest,
    init_store,
    list_classes,
    load_class,
    pool_check,
    save_class,
)
from .stats import (
    OverrunDistribution,
    SummaryStats,
    TestReport,
    build_distribution,
    ecdf,
    jarque_bera_normality,
    ks_two_sample,
    quantile,
    quantiles,
    summary,
    t_test_mean_zero,
)
from .uplift import (
    AppraisalResult,
    UpliftCurve,
    UpliftTableEntry,
    appraise,
    apply_uplift,
    builtin_table,
    curve_to_csv,
    lookup_table_entry,
    required_uplift,
    uplift_curve,
)

__version__ = "1.0.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # dataset
    "CSV_HEADER",
    "Metric",
    "ProjectRecord",
    "ReferenceClass",
    "RowDiagnostic",
    "Status",
    "attrition_rate",
    "inaccuracy_percent",
    "overrun",
    "parse_records",
    "serialize_records",
    # errors
    "CsvFormatError",
    "InsufficientDataError",
    "NoActualOutcomeError",
    "RefcastError",
    "StoreCorruptError",
    "StoreError",
    "UnknownCategoryError",
    # stats
    "OverrunDistribution",
    "SummaryStats",
    "TestReport",
    "build_distribution",
    "ecdf",
    "jarque_bera_normality",
    "ks_two_sample",
    "quantile",
    "quantiles",
    "summary",
    "t_test_mean_zero",
    # uplift
    "AppraisalResult",
    "UpliftCurve",
    "UpliftTableEntry",
    "appraise",
    "apply_uplift",
    "builtin_table",
    "curve_to_csv",
    "lookup_table_entry",
    "required_uplift",
    "uplift_curve",
    # registry
    "BacktestReport",
    "Category",
    "CategoryTaxonomy",
    "ClassEntry",
    "PoolDecision",
    "backtest",
    "init_store",
    "list_classes",
    "load_class",
    "pool_check",
    "save_class",
]
