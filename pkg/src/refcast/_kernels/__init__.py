"""Kernel backend selection.

Imports the compiled extension when present, otherwise falls back to the
pure-Python implementation. ``REFCAST_PURE_PYTHON=1`` forces the fallback
(useful for the parity tests and the benchmark). Both backends are
bit-for-bit equivalent; only speed differs.
"""

from __future__ import annotations

import os

from . import _pyfallback

BACKEND = "python"

if os.environ.get("REFCAST_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _core = None  # noqa: F841  (extension not built; fallback stays active)

if BACKEND == "compiled":
    quantile_sorted = _core.quantile_sorted
    quantile_sorted_many = _core.quantile_sorted_many
    ecdf_sorted = _core.ecdf_sorted
    ks_statistic = _core.ks_statistic
    loo_coverage_count = _core.loo_coverage_count
else:
    quantile_sorted = _pyfallback.quantile_sorted
    quantile_sorted_many = _pyfallback.quantile_sorted_many
    ecdf_sorted = _pyfallback.ecdf_sorted
    ks_statistic = _pyfallback.ks_statistic
    loo_coverage_count = _pyfallback.loo_coverage_count

__all__ = [
    "BACKEND",
    "quantile_sorted",
    "quantile_sorted_many",
    "ecdf_sorted",
    "ks_statistic",
    "loo_coverage_count",
]
