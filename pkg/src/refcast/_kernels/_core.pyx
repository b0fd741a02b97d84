# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: quantile interpolation, ECDF, KS statistic, LOO coverage.

Arithmetic mirrors ``_pyfallback`` expression for expression; the extension
is built with -ffp-contract=off so results stay bit-identical to the Python
backend. Inputs are ascending-sorted C-contiguous float64 buffers.
"""

from libc.math cimport floor, fabs

import numpy as np


cdef inline double _quantile(const double[::1] xs, double p) nogil:
    cdef Py_ssize_t n = xs.shape[0]
    cdef double h, lo, hi
    cdef Py_ssize_t k
    if n == 1:
        return xs[0]
    h = (<double>(n - 1)) * p + 1.0
    k = <Py_ssize_t>floor(h)
    if k >= n:
        return xs[n - 1]
    lo = xs[k - 1]
    hi = xs[k]
    return lo + (h - (<double>k)) * (hi - lo)


def quantile_sorted(const double[::1] xs, double p):
    """Interpolated quantile of sorted data; see the Python backend for the formula."""
    return _quantile(xs, p)


def quantile_sorted_many(const double[::1] xs, const double[::1] ps):
    cdef Py_ssize_t i, m = ps.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] view = out
    with nogil:
        for i in range(m):
            view[i] = _quantile(xs, ps[i])
    return out


def ecdf_sorted(const double[::1] xs, double x):
    """Right-continuous empirical CDF: (# values <= x) / n."""
    cdef Py_ssize_t lo = 0, hi = xs.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo / (<double>xs.shape[0])


def ks_statistic(const double[::1] a, const double[::1] b):
    """Two-sample KS statistic D = sup |F_a - F_b| over sorted inputs."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    cdef Py_ssize_t i = 0, j = 0
    cdef double d = 0.0, v, gap
    with nogil:
        while i < na and j < nb:
            v = a[i] if a[i] <= b[j] else b[j]
            while i < na and a[i] == v:
                i += 1
            while j < nb and b[j] == v:
                j += 1
            gap = fabs((<double>i) / (<double>na) - (<double>j) / (<double>nb))
            if gap > d:
                d = gap
    return d


def loo_coverage_count(const double[::1] xs, double p):
    """Count of j where xs[j] <= quantile(xs with j removed, p)."""
    cdef Py_ssize_t n = xs.shape[0]
    if n < 2:
        raise ValueError("leave-one-out requires at least 2 values")
    cdef Py_ssize_t m = n - 1, j, k, ilo, ihi, idx
    cdef long covered = 0
    cdef double h, lo, hi, q
    with nogil:
        for j in range(n):
            if m == 1:
                q = xs[1] if j == 0 else xs[0]
            else:
                h = (<double>(m - 1)) * p + 1.0
                k = <Py_ssize_t>floor(h)
                if k >= m:
                    idx = m - 1
                    q = xs[idx + 1] if idx >= j else xs[idx]
                else:
                    ilo = k - 1
                    ihi = k
                    lo = xs[ilo + 1] if ilo >= j else xs[ilo]
                    hi = xs[ihi + 1] if ihi >= j else xs[ihi]
                    q = lo + (h - (<double>k)) * (hi - lo)
            if xs[j] <= q:
                covered += 1
    return covered
