# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled compensated-summation scan kernels.

Compiled with -ffp-contract=off and without -ffast-math so that every
kernel is bit-identical to the pure-Python fallback in _pure.py.
"""

from libc.math cimport pow

import numpy as np


def kahan_sum(double[::1] values):
    """Compensated (Kahan) total of a float64 vector, left to right."""
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i, n = values.shape[0]
    for i in range(n):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def kahan_cumsum(double[::1] values):
    """Compensated prefix sums of a float64 vector, left to right."""
    cdef Py_ssize_t i, n = values.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double s = 0.0, c = 0.0, y, t
    for i in range(n):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out_arr


def tn_scan(double[::1] x, double[::1] y, double mu_hat, double p):
    """Resampled-statistic scan.

    out[i] = (i+1)^(-1/p) * S_{i+1} where S_n is the compensated prefix
    sum of (x_k - mu_hat) * y_k over k = 1..n.
    """
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double s = 0.0, c = 0.0, yv, t, z
    cdef double neg_inv_p = -1.0 / p
    for i in range(n):
        z = (x[i] - mu_hat) * y[i]
        yv = z - c
        t = s + yv
        c = (t - s) - yv
        s = t
        out[i] = s * pow(<double> (i + 1), neg_inv_p)
    return out_arr
