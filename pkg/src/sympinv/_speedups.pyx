# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the pure-Python series kernels in ``_kernels_py``."""

import numpy as np


def mul1(a, b, Py_ssize_t n_out):
    """Truncated univariate product: first n_out coefficients of a*b."""
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.zeros(n_out)
    cdef double[::1] ov = out
    cdef Py_ssize_t na = av.shape[0]
    cdef Py_ssize_t nb = bv.shape[0]
    cdef Py_ssize_t k, i, lo, hi
    cdef double acc
    for k in range(n_out):
        acc = 0.0
        lo = k - nb + 1
        if lo < 0:
            lo = 0
        hi = k
        if hi > na - 1:
            hi = na - 1
        for i in range(lo, hi + 1):
            acc += av[i] * bv[k - i]
        ov[k] = acc
    return out


def mul_table(a, b, pi, pj, pr, Py_ssize_t n_out):
    """Truncated multivariate product through a precomputed pair table."""
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef long[::1] iv = pi
    cdef long[::1] jv = pj
    cdef long[::1] rv = pr
    out = np.zeros(n_out)
    cdef double[::1] ov = out
    cdef Py_ssize_t t, n = iv.shape[0]
    for t in range(n):
        ov[rv[t]] += av[iv[t]] * bv[jv[t]]
    return out
