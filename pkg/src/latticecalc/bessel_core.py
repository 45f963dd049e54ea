"""Exponentially scaled modified Bessel functions of integer order.

Every public value is ``exp(-t) * I_n(t)``; the unscaled function overflows
near ``t = 710`` and is never returned.

Evaluation switches on ``t``:

* ``t <= 30``: power series, stopped once a term falls below ``1e-17`` of the
  partial sum (at most 500 terms).
* ``t > 30``: Miller backward recurrence started well above the requested
  order and normalised with ``I_0 + 2 * sum(I_n) = exp(t)``.

The large-``t`` expansion in :func:`asymptotic_scaled` is a cross-check only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from ._backend import kernels
from .errors import AccuracyError, CapacityError, DomainError

SERIES_MAX_T = 30.0
MAX_ORDER = 100_000
MAX_T = 1e6
#: largest ``j_max`` accepted by :func:`q_coeffs` (entries are Python ints, so
#: the cap bounds memory and time rather than integer width)
MAX_Q_ORDER = 2000
MAX_MOMENT_K = 8
MAX_MOMENT_T = 1e5


def _check_t(t, allow_zero=True):
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t}")
    if t < 0 or (t == 0 and not allow_zero):
        raise DomainError(f"t must be {'>=' if allow_zero else '>'} 0, got {t}")
    return t


def _check_order(n):
    if int(n) != n:
        raise DomainError(f"order must be an integer, got {n}")
    n = abs(int(n))
    if n > MAX_ORDER:
        raise CapacityError(f"|n| = {n} exceeds the supported order {MAX_ORDER}")
    return n


@dataclass(frozen=True)
class ScaledBesselRow:
    """Values ``exp(-t) I_n(t)`` for ``n = 0..n_max``.

    Attributes
    ----------
    t : float
        Argument.
    n_max : int
        Largest order stored.
    values : numpy.ndarray
        Read-only array of length ``n_max + 1``.
    """

    t: float
    n_max: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, n):
        return float(self.values[abs(int(n))])

    def partial_mass(self):
        """``values[0] + 2 * sum(values[1:])``, which tends to 1 from below."""
        return float(self.values[0] + 2.0 * np.sum(self.values[1:]))

    def symmetric(self):
        """Row extended to orders ``-n_max..n_max``."""
        return np.concatenate((self.values[:0:-1], self.values))


def _row_values(t, n_max):
    if t == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if t <= SERIES_MAX_T:
        return np.asarray(kernels.series_row(t, n_max))
    return np.asarray(kernels.miller_row(t, n_max))


def bessel_i_scaled(n, t):
    """Return ``exp(-t) * I_|n|(t)``.

    Parameters
    ----------
    n : int
        Order; negative orders are reflected.
    t : float
        Nonnegative argument, at most ``1e6``.

    Returns
    -------
    float
        Relative error below ``1e-12`` whenever the result is a normal float.
    """
    t = _check_t(t)
    n = _check_order(n)
    if t > MAX_T:
        raise DomainError(f"t = {t} exceeds the supported range {MAX_T}")
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    if t <= SERIES_MAX_T:
        return kernels.scaled_series(n, t)
    return float(kernels.miller_row(t, n)[n])


def bessel_row(t, n_max):
    """Return the row ``exp(-t) I_n(t)``, ``n = 0..n_max``, as a :class:`ScaledBesselRow`."""
    t = _check_t(t)
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a nonnegative integer, got {n_max}")
    n_max = _check_order(n_max)
    if t > MAX_T:
        raise DomainError(f"t = {t} exceeds the supported range {MAX_T}")
    return ScaledBesselRow(t, n_max, _row_values(t, n_max))


def bessel_fourier_check(n, t, quad_points):
    """Trapezoid value of ``(1/2pi) * int cos(n x) exp(-2t sin^2(x/2)) dx`` over a period.

    The integrand is smooth and periodic, so the rule converges geometrically
    once ``quad_points`` resolves both ``n`` and the peak width ``1/sqrt(t)``.
    """
    t = _check_t(t, allow_zero=False)
    if quad_points < 16:
        raise DomainError(f"quad_points must be >= 16, got {quad_points}")
    theta = np.arange(int(quad_points)) * (2.0 * math.pi / quad_points)
    s = np.sin(0.5 * theta)
    return float(np.mean(np.cos(int(n) * theta) * np.exp(-2.0 * t * s * s)))


def asymptotic_scaled(n, t, terms=8):
    """Large-``t`` expansion ``(2 pi t)^(-1/2) sum_k (-1)^k a_k(n) / t^k``.

    Only a cross-check: the partial sums stall at a relative error that
    depends on ``n`` and ``t`` in an uncontrolled way.
    """
    t = _check_t(t, allow_zero=False)
    mu = 4.0 * int(n) ** 2
    total, coeff = 1.0, 1.0
    for k in range(1, terms):
        coeff *= -(mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        total += coeff
    return total / math.sqrt(2.0 * math.pi * t)


@dataclass(frozen=True)
class QCoeffTable:
    """Triangular integer table ``c[k][j]`` for ``0 <= k <= j <= j_max``.

    ``c[k]`` is a dict keyed by ``j``. Row ``j`` holds the coefficients of the
    polynomial ``Q_j(s, t) = sum_k c[j - k][j] (s t)^k``.
    """

    j_max: int
    c: tuple

    def entry(self, k, j):
        return self.c[k][j]

    def polynomial(self, j):
        """Coefficients of ``Q_j`` in increasing powers of ``s t``."""
        return [self.c[j - k][j] for k in range(j + 1)]

    @staticmethod
    def closed_form(k, j):
        """``(j-k+1)(j-k+2)...(j+k) / (2 * 4 * ... * 2k)`` in exact arithmetic."""
        num = math.prod(range(j - k + 1, j + k + 1))
        den = math.prod(2 * v for v in range(1, k + 1))
        q, r = divmod(num, den)
        if r:
            raise ArithmeticError(f"closed form not integral at k={k}, j={j}")
        return q


def q_coeffs(j_max):
    """Build the coefficient table by the integer recurrence.

    Arbitrary-precision Python integers are used, so the only limit is
    :data:`MAX_Q_ORDER`.
    """
    if int(j_max) != j_max or j_max < 1:
        raise DomainError(f"j_max must be a positive integer, got {j_max}")
    j_max = int(j_max)
    if j_max > MAX_Q_ORDER:
        raise CapacityError(f"j_max = {j_max} exceeds the supported maximum {MAX_Q_ORDER}")
    c = [dict() for _ in range(j_max + 1)]
    for j in range(j_max + 1):
        c[0][j] = 1
        for k in range(1, j):
            c[k][j] = c[k][j - 1] + c[k - 1][j] * (j - k + 1)
        if j >= 1:
            c[j][j] = c[j - 1][j]
    return QCoeffTable(j_max, tuple(c))


@lru_cache(maxsize=None)
def moment_polynomial(k):
    """Integer coefficients of ``p_k`` with ``exp(-t) sum_n n^(2k) I_n(t) = p_k(t)``.

    Obtained from the generating function: the moment is the ``2k``-th
    derivative of ``exp(t (cosh x - 1))`` at ``x = 0``.

    Returns
    -------
    tuple of int
        ``coeffs[r]`` multiplies ``t**r``.
    """
    if k < 0 or k > 2 * MAX_MOMENT_K:
        raise DomainError(f"moment order k must lie in [0, {2 * MAX_MOMENT_K}]")
    order = 2 * k
    # cosh(x) - 1 truncated at x^order
    base = [Fraction(0)] * (order + 1)
    for m in range(1, k + 1):
        base[2 * m] = Fraction(1, math.factorial(2 * m))
    coeffs = [Fraction(0)] * (k + 1)
    coeffs[0] = Fraction(1 if k == 0 else 0)
    power = [Fraction(1)] + [Fraction(0)] * order
    for r in range(1, k + 1):
        nxt = [Fraction(0)] * (order + 1)
        for a, pa in enumerate(power):
            if pa:
                for b in range(2, order + 1 - a):
                    if base[b]:
                        nxt[a + b] += pa * base[b]
        power = nxt
        coeffs[r] = power[order] * math.factorial(order) / math.factorial(r)
    out = []
    for q in coeffs:
        if q.denominator != 1:
            raise ArithmeticError("moment polynomial is not integral")
        out.append(int(q))
    return tuple(out)


def moment_value(k, t):
    """Evaluate ``p_k(t)`` in floating point (Horner)."""
    acc = 0.0
    for a in reversed(moment_polynomial(k)):
        acc = acc * t + a
    return acc


def moment_sum(k, t, tol):
    """Truncated ``exp(-t) sum_n n^(2k) I_n(t)`` with neglected tail below ``tol``.

    The cut ``|n| = ceil(t + m sqrt(t) + 20)`` grows with ``m`` until the last
    included term is below ``tol / 10``.
    """
    if int(k) != k or not 0 <= k <= MAX_MOMENT_K:
        raise DomainError(f"k must be an integer in [0, {MAX_MOMENT_K}]")
    t = _check_t(t, allow_zero=False)
    if t > MAX_MOMENT_T:
        raise DomainError(f"t = {t} exceeds {MAX_MOMENT_T}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    scale = max(1.0, moment_value(int(k), t))
    if tol < 1e-15 * scale:
        raise AccuracyError(f"tol = {tol} is below the double-precision floor {1e-15 * scale:.3g}")
    k = int(k)
    m = 4.0
    while True:
        cut = int(math.ceil(t + m * math.sqrt(t) + 20))
        vals = _row_values(t, cut)
        n = np.arange(cut + 1, dtype=float)
        terms = n ** (2 * k) * vals
        if terms[-1] < tol / 10 or m > 200:
            break
        m *= 2.0
    if terms[-1] >= tol / 10:
        raise AccuracyError("moment tail did not fall below tol")
    return float(terms[0] + 2.0 * math.fsum(terms[1:]))


def odd_moment_sum(k, t, half_width):
    """Symmetric truncation of ``exp(-t) sum n^(2k+1) I_n(t)``; zero by pairing."""
    t = _check_t(t)
    vals = _row_values(t, int(half_width))
    total = 0.0
    for n in range(1, int(half_width) + 1):
        term = n ** (2 * k + 1) * vals[n]
        total += term + (-term)
    return total


def int_fract_bessel_check(n, gamma, c):
    """Quadrature and closed form of ``int_0^inf exp(-c s) I_n(c s) s^(-gamma-1) ds``.

    Returns
    -------
    (float, float)
        ``(quadrature, closed_form)`` with the closed form
        ``(2c)^gamma Gamma(1/2+gamma) Gamma(n-gamma) / (sqrt(pi) Gamma(n+1+gamma))``.

    Notes
    -----
    On ``[0, 1]`` the integrand is ``s^(n-gamma-1)`` times a smooth factor and
    on ``[1, inf)`` the substitution ``s = 1/u`` leaves ``u^(gamma-1/2)`` times a
    smooth factor; both pieces go to QUADPACK's algebraic-weight rule.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    gamma = float(gamma)
    if not -0.5 < gamma < n:
        raise DomainError(f"gamma must satisfy -1/2 < gamma < n, got gamma={gamma}, n={n}")
    c = float(c)
    if not (math.isfinite(c) and c > 0):
        raise DomainError(f"c must be positive, got {c}")

    return bessel_power_integral(n, gamma, c)


def bessel_power_integral(n, gamma, c):
    """Unchecked core of :func:`int_fract_bessel_check`; also valid for ``n = 0`` with ``gamma < 0``."""
    n, gamma, c = abs(int(n)), float(gamma), float(c)

    def near(s):
        return bessel_i_scaled(n, c * s) / s ** n if s > 0 else (0.5 * c) ** n / math.factorial(n)

    def far(u):
        if u <= 0:
            return 1.0 / math.sqrt(2.0 * math.pi * c)
        s = c / u
        value = asymptotic_scaled(n, s) if s > 1e5 and s > 100 * n * n else bessel_i_scaled(n, s)
        return value / math.sqrt(u)

    opts = dict(epsabs=0.0, epsrel=1e-11, limit=200)
    lower, _ = integrate.quad(near, 0.0, 1.0, weight="alg", wvar=(n - gamma - 1.0, 0.0), **opts)
    upper, _ = integrate.quad(far, 0.0, 1.0, weight="alg", wvar=(gamma - 0.5, 0.0), **opts)
    log_closed = (gamma * math.log(2.0 * c) + math.lgamma(0.5 + gamma) + math.lgamma(n - gamma)
                  - 0.5 * math.log(math.pi) - math.lgamma(n + 1 + gamma))
    return lower + upper, math.exp(log_closed)
