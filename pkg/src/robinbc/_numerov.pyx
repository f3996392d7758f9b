# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Numerov recurrence for psi'' = f psi on a uniform grid."""

import numpy as np

from libc.math cimport fabs, log

cdef double BIG = 1e150
cdef double SMALL = 1e-150


def numerov(const double[::1] f, double h, double y0, double y1):
    """March the three-term recurrence; returns (psi, log_scale).

    When |psi| exceeds 1e150 the whole prefix is rescaled by 1e-150 and the
    factor is accumulated in ``log_scale``.
    """
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t i, j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double c = h * h / 12.0
    cdef double log_scale = 0.0
    cdef double log_big = log(BIG)
    if n < 2:
        raise ValueError("need at least two grid points")
    with nogil:
        y[0] = y0
        y[1] = y1
        for i in range(1, n - 1):
            y[i + 1] = ((2.0 + 10.0 * c * f[i]) * y[i] - (1.0 - c * f[i - 1]) * y[i - 1]) \
                / (1.0 - c * f[i + 1])
            if fabs(y[i + 1]) > BIG:
                for j in range(i + 2):
                    y[j] *= SMALL
                log_scale += log_big
    return out, log_scale
