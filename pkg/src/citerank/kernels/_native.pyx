# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: PageRank power iteration and sliding window moments.

Mirrors `citerank.kernels._pure`; selected automatically at import when the
extension built. The iteration orders are fixed, so results are
deterministic run to run.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def pagerank_power(const cnp.int64_t[::1] in_indptr,
                   const cnp.int32_t[::1] in_indices,
                   const cnp.int64_t[::1] in_counts,
                   const cnp.int64_t[::1] out_degrees,
                   double alpha, double epsilon, long max_iterations):
    """Power iteration over an in-adjacency CSR restricted per node.

    Node ``i`` reads its first ``in_counts[i]`` in-neighbors starting at
    ``in_indptr[i]`` (the snapshot-visible prefix of its citer list).
    Returns ``(p, iterations, residual, converged)``.
    """
    cdef Py_ssize_t n = in_counts.shape[0]
    if n == 0:
        raise ValueError("empty view")
    p_arr = np.full(n, 1.0 / n)
    q_arr = np.empty(n)
    w_arr = np.empty(n)
    cdef double[::1] p = p_arr
    cdef double[::1] q = q_arr
    cdef double[::1] w = w_arr
    cdef double dm, base, acc, res, v, teleport
    cdef Py_ssize_t i, j, k, start, stop
    cdef long it

    teleport = (1.0 - alpha) / n
    res = 0.0
    for it in range(1, max_iterations + 1):
        with nogil:
            dm = 0.0
            for j in range(n):
                if out_degrees[j] > 0:
                    w[j] = p[j] / out_degrees[j]
                else:
                    dm += p[j]
                    w[j] = 0.0
            base = alpha * dm / n + teleport
            res = 0.0
            for i in range(n):
                acc = 0.0
                start = in_indptr[i]
                stop = start + in_counts[i]
                for k in range(start, stop):
                    acc += w[in_indices[k]]
                v = alpha * acc + base
                q[i] = v
                res += fabs(v - p[i])
        p, q = q, p
        if res < epsilon:
            return np.asarray(p).copy(), it, res, True
    return np.asarray(p).copy(), max_iterations, res, False


def sliding_moments(const double[::1] values, long window):
    """Mean and population std per clamped centered window of length
    ``min(window, n)``. Prefix sums use Neumaier compensation; windows that
    sit inside a run of one repeated value get std exactly 0 (the prefix
    trick alone cannot promise that)."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = window if window < n else n
    s1_arr = np.zeros(n + 1)
    s2_arr = np.zeros(n + 1)
    runs_arr = np.zeros(n, dtype=np.int64)
    mu_arr = np.empty(n)
    sd_arr = np.empty(n)
    cdef double[::1] s1 = s1_arr
    cdef double[::1] s2 = s2_arr
    cdef cnp.int64_t[::1] runs = runs_arr
    cdef double[::1] mu = mu_arr
    cdef double[::1] sd = sd_arr
    cdef double run1 = 0.0, c1 = 0.0, run2 = 0.0, c2 = 0.0
    cdef double x, xx, t, mean, var, su, qu
    cdef Py_ssize_t i, lo, hi, half

    if n == 0:
        return mu_arr, sd_arr

    with nogil:
        for i in range(n):
            x = values[i]
            t = run1 + x
            if fabs(run1) >= fabs(x):
                c1 += (run1 - t) + x
            else:
                c1 += (x - t) + run1
            run1 = t
            s1[i + 1] = run1 + c1
            xx = x * x
            t = run2 + xx
            if fabs(run2) >= fabs(xx):
                c2 += (run2 - t) + xx
            else:
                c2 += (xx - t) + run2
            run2 = t
            s2[i + 1] = run2 + c2
            if i > 0:
                runs[i] = runs[i - 1] + (values[i] != values[i - 1])

        half = m // 2
        for i in range(n):
            lo = i - half
            if lo < 0:
                lo = 0
            elif lo > n - m:
                lo = n - m
            hi = lo + m
            su = s1[hi] - s1[lo]
            qu = s2[hi] - s2[lo]
            mean = su / m
            if runs[hi - 1] == runs[lo]:
                mean = values[lo]
                var = 0.0
            else:
                var = qu / m - mean * mean
                if var < 0.0:
                    var = 0.0
            mu[i] = mean
            sd[i] = sqrt(var)

    return mu_arr, sd_arr
