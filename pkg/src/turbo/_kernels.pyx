# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Matérn-5/2 ARD kernels. Mirrors ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

cdef double SQRT5 = sqrt(5.0)


def matern52(const double[:, ::1] X1, const double[:, ::1] X2, const double[::1] lengthscales,
             double signal_variance):
    cdef Py_ssize_t n1 = X1.shape[0], n2 = X2.shape[0], d = X1.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, t, sr
    cdef double[::1] inv = np.empty(d)
    for k in range(d):
        inv[k] = 1.0 / lengthscales[k]
    out = np.empty((n1, n2))
    cdef double[:, ::1] K = out
    for i in range(n1):
        for j in range(n2):
            acc = 0.0
            for k in range(d):
                t = (X1[i, k] - X2[j, k]) * inv[k]
                acc += t * t
            sr = SQRT5 * sqrt(acc)
            K[i, j] = signal_variance * (1.0 + sr + sr * sr / 3.0) * exp(-sr)
    return out


def matern52_lengthscale_grad(const double[:, ::1] X, const double[::1] lengthscales,
                              double signal_variance, const double[:, ::1] W):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, t, sr, f
    cdef double[::1] inv = np.empty(d)
    cdef double[::1] sq = np.empty(d)
    out = np.zeros(d)
    cdef double[::1] g = out
    for k in range(d):
        inv[k] = 1.0 / lengthscales[k]
    # diagonal terms vanish (zero distance); off-diagonal pairs counted twice
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                t = (X[i, k] - X[j, k]) * inv[k]
                sq[k] = t * t
                acc += sq[k]
            sr = SQRT5 * sqrt(acc)
            f = 2.0 * W[i, j] * (1.0 + sr) * exp(-sr)
            for k in range(d):
                g[k] += f * sq[k]
    for k in range(d):
        g[k] *= (5.0 / 3.0) * signal_variance
    return out


def matern52_symmetric(const double[:, ::1] X, const double[::1] lengthscales,
                       double signal_variance):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, t, sr, v
    cdef double[::1] inv = np.empty(d)
    for k in range(d):
        inv[k] = 1.0 / lengthscales[k]
    out = np.empty((n, n))
    cdef double[:, ::1] K = out
    for i in range(n):
        K[i, i] = signal_variance
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                t = (X[i, k] - X[j, k]) * inv[k]
                acc += t * t
            sr = SQRT5 * sqrt(acc)
            v = signal_variance * (1.0 + sr + sr * sr / 3.0) * exp(-sr)
            K[i, j] = v
            K[j, i] = v
    return out
