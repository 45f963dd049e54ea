"""Fourier-coefficient machinery for symmetric multipliers on the circle.

A kernel ``c_j = (1/2pi) int_{-pi}^{pi} exp(i j x) M(x) dx`` is produced here in
three ways:

* pointwise, by composite Gauss-Legendre on ``[0, pi]`` with panels graded
  geometrically towards ``x = 0`` (where multipliers built from
  ``|sin(x/2)|`` have a kink or an integrable singularity);
* as a whole row by FFT, with the aliasing images removed analytically;
* far from the origin, by the asymptotic expansion obtained from one-sided
  Taylor jets of ``M`` at ``0+`` and ``2pi-`` (repeated integration by parts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

GRADING_RATIO = 0.3
GRADING_LEVELS = 35
PANEL_NODES = 24


@lru_cache(maxsize=64)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=64)
def _jacobi(n, power):
    return special.roots_jacobi(n, 0.0, power)


@lru_cache(maxsize=256)
def graded_rule(freq, singular_power=0.0):
    """Nodes and weights for ``int_0^pi g(x) dx``.

    Parameters
    ----------
    freq : int
        Rough upper bound on the oscillation rate of ``g``; panels are split
        so each spans at most a few radians of phase.
    singular_power : float
        If negative, ``g`` behaves like ``x**singular_power`` times a smooth
        factor at 0 and the innermost panel uses the matching Gauss-Jacobi rule.
    """
    xs, ws = [], []
    edges = [math.pi * GRADING_RATIO ** k for k in range(GRADING_LEVELS)][::-1]
    first = edges[0]
    if singular_power < 0:
        x, w = _jacobi(PANEL_NODES, float(singular_power))
        half = 0.5 * first
        u = half * (x + 1.0)
        # weights absorb the factor u^p, so callers pass the full integrand
        xs.append(u)
        ws.append(w * half ** (1.0 + singular_power) * u ** (-singular_power))
    gx, gw = _legendre(PANEL_NODES)
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(math.ceil((b - a) * (freq + 1) / 3.0)))
        h = (b - a) / pieces
        for p in range(pieces):
            lo = a + p * h
            xs.append(lo + 0.5 * h * (gx + 1.0))
            ws.append(0.5 * h * gw)
    if singular_power >= 0:
        # innermost panel [0, first]: the integrand is bounded there
        xs.append(0.5 * first * (gx + 1.0))
        ws.append(0.5 * first * gw)
    return np.concatenate(xs), np.concatenate(ws)


def half_range_coefficient(radial, j, l=0, freq=0, singular_power=0.0):
    """``c_j`` for ``M(x) = (1 - exp(ix))^l * radial(|x|)`` with ``radial`` real.

    Uses ``Re[exp(ijx)(1 - exp(ix))^l] = (2 sin(x/2))^l cos((j + l/2)x - l pi/2)``
    on ``[0, pi]``.
    """
    x, w = graded_rule(int(abs(j) + l + freq), singular_power)
    s = np.sin(0.5 * x)
    phase = np.cos((j + 0.5 * l) * x - 0.5 * l * math.pi)
    return float(np.dot(w, (2.0 * s) ** l * phase * radial(x)) / math.pi)


# --------------------------------------------------------------------------
# truncated power series (jets)

def _jet_mul(a, b):
    return np.convolve(a, b)[: a.size]


def _jet_exp(a):
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    k = np.arange(a.size)
    for n in range(1, a.size):
        out[n] = np.dot(k[1: n + 1] * a[1: n + 1], out[n - 1:: -1][: n]) / n
    return out


def _jet_pow(a, p):
    out = np.zeros_like(a)
    out[0] = 1.0
    for _ in range(p):
        out = _jet_mul(out, a)
    return out


def _sin_half(order):
    """Jet of ``sin(x/2)``."""
    out = np.zeros(order + 1, dtype=complex)
    for k in range(1, order + 1, 2):
        out[k] = (-1) ** ((k - 1) // 2) / (math.factorial(k) * 2.0 ** k)
    return out


def _unit(order):
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    return out


def _expi(order, sign):
    """Jet of ``exp(sign * i x)``."""
    k = np.arange(order + 1)
    return np.array([(sign * 1j) ** n / math.factorial(n) for n in k], dtype=complex)


@dataclass(frozen=True)
class FarField:
    """Asymptotic expansion ``c_j ~ sum_p coeffs[p] * j**(-p)``.

    ``coeffs[0]`` and ``coeffs[1]`` are zero for continuous multipliers.
    """

    coeffs: np.ndarray

    leading_power: int

    def __call__(self, j):
        j = np.asarray(j, dtype=float)
        inv = 1.0 / j
        acc = np.zeros_like(j)
        for a in self.coeffs[::-1]:
            acc = acc * inv + a
        return acc

    def last_term(self, j):
        p = self.coeffs.size - 1
        return abs(self.coeffs[p]) * abs(float(j)) ** (-p)

    def tail_sum(self, J, side=1):
        """``sum_{j > J} c_j`` (side=1) or ``sum_{j < -J} c_j`` (side=-1) by Hurwitz zeta."""
        total = 0.0
        for p, a in enumerate(self.coeffs):
            if p >= 2 and a != 0.0:
                total += a * (side ** p) * special.zeta(p, J + 1.0)
        return float(total)

    def alias(self, j, period):
        """``sum_{r != 0} c_{j + r * period}`` for ``|j| < period``."""
        j = np.asarray(j, dtype=float)
        acc = np.zeros_like(j)
        for p, a in enumerate(self.coeffs):
            if p >= 2 and a != 0.0:
                up = special.zeta(p, 1.0 + j / period)
                down = special.zeta(p, 1.0 - j / period)
                acc += a * period ** (-p) * (up + (-1) ** p * down)
        return acc


def poisson_family_far_field(y, m=0, l=0, order=24):
    """Far field of ``M(x) = (1 - e^{ix})^l (-2 sin(x/2))^m exp(-2y sin(x/2))`` on ``(0, 2pi)``.

    Integration by parts on ``(0, 2pi)`` gives
    ``c_j = -(1/2pi) sum_r D_r / (-i j)^(r+1)`` with ``D_r`` the jump of the
    ``r``-th derivative across ``x = 0``.
    """
    n = order + 1
    s = _sin_half(n)
    radial = _jet_mul(_jet_pow(-2.0 * s, m), _jet_exp(-2.0 * y * s))
    right = _jet_mul(_jet_pow(-_expi(n, 1.0) + _unit(n), l), radial)    # x -> 0+
    left = _jet_mul(_jet_pow(-_expi(n, -1.0) + _unit(n), l), radial)    # x = 2pi - u, u -> 0+
    r = np.arange(n + 1)
    fact = np.array([math.factorial(k) for k in r], dtype=float)
    jumps = fact * ((-1.0) ** r * left - right)
    coeffs = np.zeros(n + 1)
    for k in range(n):
        coeffs[k + 1] = (-jumps[k] / (2.0 * math.pi * (-1j) ** (k + 1))).real
    lead = l + m + (1 if m % 2 else 2)
    coeffs[:lead] = 0.0
    return FarField(coeffs[: order + 1], lead)


def fft_row(multiplier, half_width, nodes):
    """Periodic trapezoid coefficients ``c~_j`` for ``|j| <= half_width``.

    ``multiplier`` is evaluated on ``x_k = 2 pi k / nodes`` in ``[0, 2pi)``.
    The result contains aliasing images ``sum_r c_{j + r nodes}``.
    """
    x = np.arange(nodes) * (2.0 * math.pi / nodes)
    vals = multiplier(x)
    coef = np.fft.ifft(vals).real
    idx = np.arange(-half_width, half_width + 1) % nodes
    return coef[idx]


def next_pow2(n):
    return 1 << max(4, int(math.ceil(math.log2(max(n, 16)))))
