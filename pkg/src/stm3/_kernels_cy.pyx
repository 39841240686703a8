# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel-matrix assemblies (hot path of the determinant scans).

Same contract as `stm3._kernels_py`; one fused pass per matrix entry, no
temporaries.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, atanh, sqrt

cnp.import_array()

IMPLEMENTATION = "compiled"


def angular_log_matrix(double a, const double[::1] y, const double[::1] x):
    cdef Py_ssize_t ny = y.shape[0]
    cdef Py_ssize_t nx = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double yi, d, u
    out = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(ny):
        yi = y[i]
        for j in range(nx):
            d = a - yi * yi - x[j] * x[j]
            u = yi * x[j]
            if u > 0.0:
                o[i, j] = 2.0 * atanh(u / d) / u
            else:
                o[i, j] = 2.0 / d
    return out


def stm_kernel_matrix(double e3, double eps2, const double[::1] y, const double[::1] x,
                      const double[:, ::1] log_sub):
    cdef Py_ssize_t ny = y.shape[0]
    cdef Py_ssize_t nx = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double yi, xj, d, u, al, tau
    cdef double se2 = sqrt(eps2)
    cdef double fourpi = 4.0 * M_PI
    cdef double twopi2 = 2.0 * M_PI * M_PI
    out = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(ny):
        yi = y[i]
        tau = 1.0 / (twopi2 * (se2 - sqrt(0.75 * yi * yi - e3)))
        for j in range(nx):
            xj = x[j]
            d = e3 - yi * yi - xj * xj
            u = yi * xj
            if u > 0.0:
                al = 2.0 * atanh(u / d) / u
            else:
                al = 2.0 / d
            o[i, j] = fourpi * tau * xj * xj * (al - log_sub[i, j])
    return out
