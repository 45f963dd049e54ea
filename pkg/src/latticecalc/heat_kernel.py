"""Discrete heat kernel ``G(t, n) = exp(-2t) I_n(2t)`` and its differences.

Differences of nearly equal kernel values lose every significant digit once
``t`` is large, so for ``t > 30`` they are taken on the Fourier side, where the
multiplier ``(1 - e^{ix})^l exp(-4t sin^2(x/2))`` is smooth and periodic and the
trapezoid rule converges geometrically.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import kernels
from ._spectral import fft_row, next_pow2
from .bessel_core import _check_t, _row_values, bessel_i_scaled, moment_value
from .errors import DomainError
from .kernel_table import KernelTable

DIRECT_MAX_T = 30.0
MAX_DIFF_ORDER = 8
MAX_TDERIV_ORDER = 4


def _check_order(value, cap, name):
    if int(value) != value or value < 0 or value > cap:
        raise DomainError(f"{name} must be an integer in [0, {cap}], got {value}")
    return int(value)


def _check_tol(tol, lo, hi):
    if not lo < tol < hi:
        raise DomainError(f"tol must lie in ({lo:g}, {hi:g}), got {tol}")
    return float(tol)


def _stencil(order):
    """Coefficients of ``delta_right^order``: ``sum_i C(order,i)(-1)^i f(n+i)``."""
    return np.array([math.comb(order, i) * (-1) ** i for i in range(order + 1)], dtype=float)


def heat_kernel(t, n):
    """``G(t, n)``; the delta at ``t = 0``."""
    t = _check_t(t)
    return bessel_i_scaled(n, 2.0 * t)


def _direct_block(t, lo, hi):
    """``G(t, j)`` for ``j = lo..hi`` from one Bessel row."""
    top = max(abs(lo), abs(hi))
    row = _row_values(2.0 * t, top)
    return row[np.abs(np.arange(lo, hi + 1))]


def trapezoid_nodes(t, n, order):
    """Node count resolving both the peak width ``1/sqrt(t)`` and the phase ``n``."""
    return max(64, 2 * (abs(int(n)) + order) + 16 * int(math.ceil(math.sqrt(t))))


def heat_diff(t, n, l):
    """``delta_right^l G(t, n) = sum_i C(l,i) (-1)^i G(t, n+i)``.

    Direct alternating sum for ``t <= 30``; periodic trapezoid rule on
    ``(2 sin(x/2))^l cos((n + l/2)x - l pi/2) exp(-4t sin^2(x/2))`` otherwise.
    """
    t = _check_t(t)
    l = _check_order(l, MAX_DIFF_ORDER, "l")
    n = int(n)
    if t <= DIRECT_MAX_T:
        block = _direct_block(t, n, n + l)
        return float(np.dot(_stencil(l), block))
    return kernels.heat_diff_trapezoid(t, n, l, trapezoid_nodes(t, n, l))


def heat_tderiv(t, n, k):
    """``d^k/dt^k G(t, n)``, evaluated as ``Laplacian^k G = delta_right^(2k) G(t, n - k)``."""
    k = _check_order(k, MAX_TDERIV_ORDER, "k")
    return heat_diff(t, int(n) - k, 2 * k)


def heat_spectral(t, n, l=0, k=0, nodes=None):
    """Trapezoid evaluation of ``delta_right^l Laplacian^k G(t, n)`` at any ``t > 0``.

    Independent of the Bessel recurrences; used to cross-check both routes.
    """
    t = _check_t(t, allow_zero=False)
    nodes = nodes or trapezoid_nodes(t, n, l + 2 * k)
    x = np.arange(nodes) * (2.0 * math.pi / nodes)
    s = np.sin(0.5 * x)
    vals = ((2.0 * s) ** l * np.cos((n + 0.5 * l) * x - 0.5 * l * math.pi)
            * (-4.0 * s * s) ** k * np.exp(-4.0 * t * s * s))
    return float(np.mean(vals))


def heat_row(t, half_width, l=0, k=0):
    """``delta_right^l Laplacian^k G(t, j)`` for ``j = -J..J`` as an array."""
    t = _check_t(t)
    J = int(half_width)
    d = l + 2 * k
    if t <= DIRECT_MAX_T:
        base = _direct_block(t, -J - k, J - k + d)
        if d == 0:
            return base
        return np.correlate(base, _stencil(d), mode="valid")
    nodes = next_pow2(2 * J + 2 * d + 32 * math.sqrt(t) + 64)

    def multiplier(x):
        s = np.sin(0.5 * x)
        return (1.0 - np.exp(1j * x)) ** l * (-4.0 * s * s) ** k * np.exp(-4.0 * t * s * s)

    return fft_row(multiplier, J, nodes)


def _markov_width(t, scale, tol, k=3, shift=0):
    """Smallest ``J`` with ``scale * p_k(2t) / (J - shift)^(2k) <= tol``."""
    p = moment_value(k, 2.0 * t)
    J = shift + max(1, int(math.ceil((scale * p / tol) ** (1.0 / (2 * k)))))
    return J, scale * p / (J - shift) ** (2 * k)


def heat_table(t, tol):
    """Kernel row ``G(t, j)``, ``|j| <= J``, with ``sum_{|j|>J} G <= tol``.

    The tail is bounded by the sixth moment: ``sum_{|j|>J} G <= p_3(2t) / J^6``.
    """
    t = _check_t(t, allow_zero=False)
    tol = _check_tol(tol, 1e-15, 0.1)
    J, tail = _markov_width(t, 1.0, tol)
    row = np.array(_direct_block(t, -J, J))
    return KernelTable(t, J, "heat", tail, row)


def heat_diff_table(t, l, tol, k=0):
    """Row of ``delta_right^l Laplacian^k G(t, .)`` with certified absolute tail.

    ``sum_{|j|>J} |delta^d G| <= 2^d sum_{|m| > J - d} G <= 2^d p_4(2t) / (J-d)^8``.
    """
    t = _check_t(t, allow_zero=False)
    l = _check_order(l, MAX_DIFF_ORDER, "l")
    k = _check_order(k, MAX_TDERIV_ORDER, "k")
    d = l + 2 * k
    if d > MAX_DIFF_ORDER:
        raise DomainError(f"total difference order {d} exceeds {MAX_DIFF_ORDER}")
    J, tail = _markov_width(t, 2.0 ** d, tol, k=4, shift=d + k)
    kind = "heat" if d == 0 else (f"heat_tderiv({k})" if l == 0 else f"heat_diff({l})" if k == 0
                                  else f"heat_diff({l})_tderiv({k})")
    return KernelTable(t, J, kind, tail, np.array(heat_row(t, J, l, k)))


def heat_l1_diff_norm(t, l, tol):
    """``sum_j |delta_right^l G(t, j)|`` with certified tail below ``tol``."""
    tol = _check_tol(tol, 0.0, 1.0)
    table = heat_diff_table(t, l, tol)
    return math.fsum(np.abs(table.core))


def domination_ratios(t, l):
    """``|delta^l G(t,n)| t^(l/2) / G(t,n)`` for ``1 <= n <= sqrt(t) - 1/2``."""
    top = int(math.floor(math.sqrt(t) - 0.5))
    if top < 1:
        return np.zeros(0)
    n = np.arange(1, top + 1)
    diffs = np.array([heat_diff(t, int(m), l) for m in n])
    base = np.array([heat_kernel(t, int(m)) for m in n])
    return np.abs(diffs) * t ** (0.5 * l) / base
