"""Empirical overrun distributions, quantiles, summaries and hypothesis tests.

The distribution type is a plain sorted sample: its CDF is the right-
continuous empirical step function, and its quantile is the fixed linear
interpolation between order statistics (with sorted x_1..x_n and
h = (n-1)p + 1, k = floor(h): x_k + (h-k)(x_{k+1} - x_k), x_{n+1} taken as
x_n). The interpolation scheme is pinned so uplift curves are smooth and
bit-reproducible. Ties are kept; a k-fold tie makes the ECDF jump by k/n.

The significance test behind the headline "inaccuracy differs from zero"
claim is the one-sample two-sided t test; the Kolmogorov-Smirnov two-sample
test backs pooling decisions between candidate reference classes. Minimum
sample sizes (3 for t, 8 for Jarque-Bera, 5 for KS) are policy, not
statistics folklore: below them the p-values are meaningless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels, numerics
from .errors import InsufficientDataError

T_MEAN_ZERO = "t_mean_zero"
JARQUE_BERA = "jarque_bera_normality"
KS_TWO_SAMPLE = "ks_two_sample"


@dataclass(frozen=True)
class OverrunDistribution:
    """Sorted empirical distribution of overrun fractions."""

    values: np.ndarray
    n: int

    def __post_init__(self) -> None:
        if self.n != len(self.values) or self.n < 1:
            raise ValueError("distribution requires n == len(values) >= 1")

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float | None
    min: float
    max: float
    median: float


@dataclass(frozen=True)
class TestReport:
    test_name: str
    statistic: float
    p_value: float
    n: int
    n2: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value outside [0, 1]: {self.p_value}")


def _as_sorted_array(overruns: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(overruns) if not isinstance(overruns, (np.ndarray, list, tuple)) else overruns,
                     dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("overruns must be one-dimensional")
    if arr.size == 0:
        raise InsufficientDataError("empty reference class")
    if not np.all(np.isfinite(arr)):
        raise ValueError("overruns must be finite")
    arr = np.sort(arr)
    arr.flags.writeable = False
    return arr


def build_distribution(overruns: Iterable[float]) -> OverrunDistribution:
    """Sort overrun fractions into an empirical distribution; duplicates kept."""
    arr = _as_sorted_array(overruns)
    return OverrunDistribution(values=arr, n=int(arr.size))


def ecdf(dist: OverrunDistribution, x: float) -> float:
    """Share of sample values <= x (right-continuous step function)."""
    return _kernels.ecdf_sorted(dist.values, float(x))


def quantile(dist: OverrunDistribution, p: float) -> float:
    """Interpolated quantile at probability ``p`` (monotone nondecreasing in p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"quantile probability outside [0, 1]: {p}")
    return _kernels.quantile_sorted(dist.values, float(p))


def quantiles(dist: OverrunDistribution, ps: Sequence[float]) -> np.ndarray:
    """Vectorized :func:`quantile` over a probability grid."""
    ps_arr = np.asarray(ps, dtype=np.float64)
    if ps_arr.size and (ps_arr.min() < 0.0 or ps_arr.max() > 1.0):
        raise ValueError("quantile probabilities outside [0, 1]")
    return np.asarray(_kernels.quantile_sorted_many(dist.values, ps_arr))


def summary(overruns: Iterable[float]) -> SummaryStats:
    """Mean, sample sd (n-1 denominator; absent for n=1) and order statistics."""
    arr = _as_sorted_array(overruns)
    n = int(arr.size)
    sd = float(np.std(arr, ddof=1)) if n >= 2 else None
    return SummaryStats(
        n=n,
        mean=float(np.mean(arr)),
        sd=sd,
        min=float(arr[0]),
        max=float(arr[-1]),
        median=_kernels.quantile_sorted(arr, 0.5),
    )


def t_test_mean_zero(overruns: Iterable[float]) -> TestReport:
    """One-sample two-sided t test of mean overrun = 0.

    t = mean / (sd / sqrt(n)); p from the Student-t distribution with n-1
    degrees of freedom.
    """
    arr = _as_sorted_array(overruns)
    n = int(arr.size)
    if n < 3:
        raise InsufficientDataError(f"t test needs n >= 3, got {n}")
    sd = float(np.std(arr, ddof=1))
    if sd == 0.0 or arr[0] == arr[-1]:  # min == max is exact; sd may carry float noise
        raise InsufficientDataError("t test undefined for zero-variance sample")
    t = float(np.mean(arr)) / (sd / math.sqrt(n))
    p = numerics.student_t_sf_two_sided(t, n - 1)
    return TestReport(test_name=T_MEAN_ZERO, statistic=t, p_value=p, n=n)


def jarque_bera_normality(overruns: Iterable[float]) -> TestReport:
    """Jarque-Bera normality test: JB = n/6 (S^2 + K^2/4), chi-square(2) tail.

    S is sample skewness and K excess kurtosis, both with 1/n moments.
    """
    arr = _as_sorted_array(overruns)
    n = int(arr.size)
    if n < 8:
        raise InsufficientDataError(f"insufficient sample for normality test: n={n} < 8")
    centered = arr - np.mean(arr)
    m2 = float(np.mean(centered**2))
    if m2 == 0.0 or arr[0] == arr[-1]:  # min == max is exact; m2 may carry float noise
        raise InsufficientDataError("normality test undefined for zero-variance sample")
    skew = float(np.mean(centered**3)) / m2**1.5
    ex_kurt = float(np.mean(centered**4)) / m2**2 - 3.0
    jb = n / 6.0 * (skew**2 + ex_kurt**2 / 4.0)
    return TestReport(test_name=JARQUE_BERA, statistic=jb, p_value=numerics.chi2_sf(jb, 2), n=n)


def ks_two_sample(a: Iterable[float], b: Iterable[float]) -> TestReport:
    """Two-sample Kolmogorov-Smirnov test.

    D = sup |F_a - F_b|; p from the asymptotic Kolmogorov distribution at
    lambda = sqrt(n_eff) * D with n_eff = n_a n_b / (n_a + n_b).
    """
    arr_a = _as_sorted_array(a)
    arr_b = _as_sorted_array(b)
    na, nb = int(arr_a.size), int(arr_b.size)
    if na < 5 or nb < 5:
        raise InsufficientDataError(f"KS test needs both samples >= 5, got {na} and {nb}")
    d = _kernels.ks_statistic(arr_a, arr_b)
    n_eff = na * nb / (na + nb)
    p = numerics.kolmogorov_sf(math.sqrt(n_eff) * d)
    return TestReport(test_name=KS_TWO_SAMPLE, statistic=d, p_value=p, n=na, n2=nb)
