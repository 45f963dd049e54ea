"""Truncated lattice convolutions and tail extrapolation."""

from __future__ import annotations

import numpy as np
from scipy import signal

from ._backend import kernels

FFT_WORK_THRESHOLD = 2e7


def level_sums(row, f, ns, levels):
    """Partial sums ``S_L(n) = sum_{|j| <= L} row[j] f(n - j)`` for each level ``L``.

    Parameters
    ----------
    row : ndarray
        Kernel values at offsets ``-J..J``.
    f : LatticeFunction
    ns : ndarray of int
    levels : sequence of int
        Increasing truncation radii, the last at most ``J``.

    Returns
    -------
    ndarray, shape (len(levels), len(ns))
    """
    ns = np.asarray(ns, dtype=np.int64)
    levels = np.asarray(levels, dtype=np.int64)
    J = (row.size - 1) // 2
    lo = int(ns.min()) - J
    fwin = np.ascontiguousarray(f.values(lo, int(ns.max()) + J), dtype=float)
    centers = np.ascontiguousarray(ns - lo, dtype=np.int64)
    work = ns.size * levels[-1]
    if work < FFT_WORK_THRESHOLD or ns.size < 64:
        out = kernels.partial_sums(np.ascontiguousarray(row, dtype=float), fwin, centers, levels)
        return np.asarray(out).T
    out = np.empty((levels.size, ns.size))
    for i, L in enumerate(levels):
        L = int(L)
        sub = row[J - L: J + L + 1]
        span = fwin[centers.min() - L: centers.max() + L + 1]
        conv = signal.fftconvolve(span, sub, mode="valid")
        out[i] = conv[centers - centers.min()]
    return out


def richardson(sums, exponents, ratio=2.0):
    """Eliminate ``J^e`` tail terms from partial sums at ``J0 * ratio^i``.

    Parameters
    ----------
    sums : ndarray, shape (levels, ...)
    exponents : sequence of float
        Tail exponents in the order they are removed.

    Returns
    -------
    (ndarray, ndarray)
        Extrapolated values and the size of the last correction.
    """
    table = [np.asarray(s, dtype=float) for s in sums]
    prev_best = table[-1]
    for e in exponents[: len(table) - 1]:
        factor = ratio ** e
        prev_best = table[-1]
        table = [(b - factor * a) / (1.0 - factor) for a, b in zip(table[:-1], table[1:])]
    best = table[-1]
    return best, np.abs(best - prev_best)


def estimate_exponent(sums):
    """Tail exponent from the ratio of the last two increments."""
    d1 = sums[-2] - sums[-3]
    d2 = sums[-1] - sums[-2]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.abs(d2 / d1)
    r = r[np.isfinite(r) & (r > 0)]
    if r.size == 0:
        return None
    return float(np.log2(np.median(r)))
