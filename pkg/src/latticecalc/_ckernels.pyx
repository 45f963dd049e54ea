# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Signatures mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sin, cos, sqrt, ceil, M_PI

cnp.import_array()

cdef double RESCALE_AT = 1e250
cdef double RESCALE_BY = 1e-250


cdef double _series(long n, double t) nogil:
    cdef double half = 0.5 * t
    cdef double pre = exp(-t)
    cdef double term = 1.0, total = 1.0, q = half * half
    cdef long i, m
    for i in range(1, n + 1):
        pre *= half / i
        if pre == 0.0:
            return 0.0
    for m in range(500):
        term *= q / ((m + 1.0) * (m + n + 1.0))
        total += term
        if term < 1e-17 * total:
            break
    return pre * total


def scaled_series(long n, double t):
    return _series(n, t)


def series_row(double t, long n_max):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n_max + 1)
    cdef long n
    for n in range(n_max + 1):
        out[n] = _series(n, t)
        if out[n] == 0.0:
            break
    return out


def miller_start(double t, long n_max):
    return n_max + <long>ceil(12.0 * sqrt(t)) + 40


def miller_row(double t, long n_max):
    cdef long start = miller_start(t, n_max)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n_max + 1)
    cdef double upper = 0.0, cur = 1e-280, lower, total = 0.0
    cdef double two_over_t = 2.0 / t
    cdef long k, i
    for k in range(start, 0, -1):
        if k <= n_max:
            out[k] = cur
        total += cur
        lower = upper + k * two_over_t * cur
        upper = cur
        cur = lower
        if cur > RESCALE_AT:
            cur *= RESCALE_BY
            upper *= RESCALE_BY
            total *= RESCALE_BY
            for i in range(k, n_max + 1):
                out[i] *= RESCALE_BY
    out[0] = cur
    total = 2.0 * total + cur
    for i in range(n_max + 1):
        out[i] /= total
    return out


def heat_diff_trapezoid(double t, long n, int l, long nodes):
    cdef double acc = 0.0, theta, s, shift = n + 0.5 * l, phase = 0.5 * l * M_PI
    cdef double step = 2.0 * M_PI / nodes
    cdef long k
    for k in range(nodes):
        theta = k * step
        s = sin(0.5 * theta)
        acc += (2.0 * s) ** l * cos(shift * theta - phase) * exp(-4.0 * t * s * s)
    return acc / nodes


def partial_sums(const double[::1] kernel, const double[::1] fwin, const long[::1] centers,
                 const long[::1] levels):
    cdef long half = (kernel.shape[0] - 1) // 2
    cdef long rows = centers.shape[0], nlev = levels.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((rows, nlev))
    cdef long r, j, c, li
    cdef double acc
    for r in range(rows):
        c = centers[r]
        acc = kernel[half] * fwin[c]
        li = 0
        while li < nlev and levels[li] == 0:
            out[r, li] = acc
            li += 1
        for j in range(1, half + 1):
            acc += kernel[half + j] * fwin[c - j] + kernel[half - j] * fwin[c + j]
            while li < nlev and levels[li] == j:
                out[r, li] = acc
                li += 1
            if li == nlev:
                break
    return out
