"""Pure-Python (numpy) implementations of the hot series kernels.

These mirror the signatures of the compiled twins in ``_speedups.pyx``; the
active backend is chosen in :mod:`sympinv.kernels`.
"""

import numpy as np


def mul1(a, b, n_out):
    """Truncated univariate product: first n_out coefficients of a*b."""
    return np.convolve(a, b)[:n_out]


def mul_table(a, b, pi, pj, pr, n_out):
    """Truncated multivariate product through a precomputed pair table."""
    return np.bincount(pr, weights=a[pi] * b[pj], minlength=n_out)
