"""Pure-Python kernels, used when the compiled extension is unavailable.

Arithmetic here must stay expression-for-expression identical to
``_core.pyx``: both run IEEE-754 double operations in the same order, so the
two backends return bit-identical results (the parity suite asserts this).
Inputs are ascending-sorted sequences of finite floats; validation happens in
the calling layer.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Sequence


def quantile_sorted(xs: Sequence[float], p: float) -> float:
    """Interpolated quantile of sorted data.

    With sorted x_1..x_n and h = (n-1)p + 1, returns
    x_k + (h-k)(x_{k+1} - x_k) for k = floor(h), treating x_{n+1} as x_n.
    """
    n = len(xs)
    if n == 1:
        return float(xs[0])
    h = float(n - 1) * p + 1.0
    k = int(math.floor(h))
    if k >= n:
        return float(xs[n - 1])
    lo = float(xs[k - 1])
    hi = float(xs[k])
    return lo + (h - float(k)) * (hi - lo)


def quantile_sorted_many(xs: Sequence[float], ps: Sequence[float]) -> list[float]:
    return [quantile_sorted(xs, p) for p in ps]


def ecdf_sorted(xs: Sequence[float], x: float) -> float:
    """Right-continuous empirical CDF: (# values <= x) / n."""
    return bisect_right(xs, x) / len(xs)


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov statistic D = sup |F_a - F_b|.

    Both inputs sorted ascending. Tie runs are consumed in full before the
    gap is measured, so ties within and across samples are handled exactly.
    """
    na = len(a)
    nb = len(b)
    i = 0
    j = 0
    d = 0.0
    while i < na and j < nb:
        v = a[i] if a[i] <= b[j] else b[j]
        while i < na and a[i] == v:
            i += 1
        while j < nb and b[j] == v:
            j += 1
        gap = abs(i / na - j / nb)
        if gap > d:
            d = gap
    return d


def loo_coverage_count(xs: Sequence[float], p: float) -> int:
    """Leave-one-out coverage count at quantile level ``p``.

    For each j, evaluates the quantile of the sorted data with element j
    removed and counts the cases where xs[j] does not exceed it. Element
    lookup skips over the excluded index, so the whole pass is O(n) after
    sorting.
    """
    n = len(xs)
    if n < 2:
        raise ValueError("leave-one-out requires at least 2 values")
    m = n - 1
    covered = 0
    for j in range(n):
        if m == 1:
            q = float(xs[1]) if j == 0 else float(xs[0])
        else:
            h = float(m - 1) * p + 1.0
            k = int(math.floor(h))
            if k >= m:
                idx = m - 1
                q = float(xs[idx + 1]) if idx >= j else float(xs[idx])
            else:
                ilo = k - 1
                ihi = k
                lo = float(xs[ilo + 1]) if ilo >= j else float(xs[ilo])
                hi = float(xs[ihi + 1]) if ihi >= j else float(xs[ihi])
                q = lo + (h - float(k)) * (hi - lo)
        if float(xs[j]) <= q:
            covered += 1
    return covered
