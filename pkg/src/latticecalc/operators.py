"""Heat, Poisson, fractional-power and Bessel-potential operators on lattice functions.

Every operator is a convolution ``sum_j K(j) f(n - j)`` with a kernel that is
either closed-form or tabulated once and cached. Values come with an error
bound. With Gaussian or exponential kernels that bound is a certified,
growth-weighted tail estimate. Algebraically decaying kernels use
Richardson extrapolation of the partial sums over doubling windows; the
bound is then the size of the last correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from . import heat_kernel as hk
from . import poisson_kernel as pk
from ._conv import estimate_exponent, level_sums, richardson
from ._spectral import graded_rule
from .bessel_core import MAX_T as BESSEL_MAX_T
from .bessel_core import bessel_power_integral, bessel_row, moment_value
from .errors import AccuracyError, CapacityError, ContractError, DomainError
from .kernel_table import KernelTable
from .lattice_fn import LatticeFunction, require_weighted

DEFAULT_TOL = 1e-8
MIN_TOL = 1e-14
EPS = np.finfo(float).eps
RICHARDSON_LEVELS = 4
MAX_RICHARDSON_LEVELS = 7
MAX_HEAT_WIDTH = 1 << 22
MARKOV_ORDER = 8
BESSEL_POTENTIAL_WIDTH = 128
# strip of analyticity of (1 + 4 sin^2(x/2))^(-beta/2) is |Im x| < 2 asinh(1/2)
_BESSEL_STRIP = 0.9 * 2.0 * math.asinh(0.5)


@dataclass(frozen=True)
class ApplyResult:
    """Operator values on a set of points with per-point error bounds."""

    ns: np.ndarray
    values: np.ndarray
    error_bounds: np.ndarray
    method: str = ""

    def __post_init__(self):
        for arr in (self.ns, self.values, self.error_bounds):
            arr.setflags(write=False)

    def csv_rows(self):
        for n, v, e in zip(self.ns, self.values, self.error_bounds):
            yield int(n), float(v), float(e)


def _points(n):
    arr = np.atleast_1d(np.asarray(n))
    if arr.size == 0 or np.any(arr != np.round(arr)):
        raise DomainError("evaluation points must be integers")
    return arr.astype(np.int64)


def _check_tol(tol):
    tol = float(tol)
    if not tol > 0 or not math.isfinite(tol):
        raise DomainError(f"tol must be positive, got {tol}")
    if tol < MIN_TOL:
        raise AccuracyError(f"tol={tol:g} is below the attainable {MIN_TOL:g}")
    return tol


def _unwrap(result, n):
    if np.ndim(n) == 0:
        return float(result.values[0])
    return np.array(result.values)


def _finish(ns, values, bounds, tol, method, what):
    bounds = np.asarray(bounds, dtype=float) * np.ones_like(values)
    worst = float(np.max(bounds))
    if not worst <= tol:
        raise AccuracyError(f"{what}: error bound {worst:.3g} exceeds tol={tol:g}")
    return ApplyResult(ns, np.asarray(values, dtype=float), bounds, method)


def _growth(f, what):
    """``(alpha, C)`` with ``|f(n)| <= C (1 + |n|^alpha)``."""
    if f.support is not None and f.growth_constant is not None:
        return 0.0, f.growth_constant
    if f.growth_exponent is None or f.growth_constant is None:
        raise ContractError(f"{what}: {f.name} has no growth certificate")
    return float(f.growth_exponent), float(f.growth_constant)


def _abs_of(f):
    return replace(f, name=f"abs:{f.name}", rule=lambda n: np.abs(f.rule(n)))


def _rounding(row, f, ns, J):
    scale = level_sums(np.abs(row), _abs_of(f), ns, [J])[0]
    return 8.0 * EPS * math.sqrt(2 * J + 1) * scale


def _direct(row, f, ns, what, tol, extra=0.0):
    J = (row.size - 1) // 2
    values = level_sums(row, f, ns, [J])[0]
    return _finish(ns, values, _rounding(row, f, ns, J) + extra, tol, "direct", what)


def _finite_radius(f, ns, kernel_support=None):
    """Half width that makes the truncated sum exact, or ``None``."""
    reach = int(np.max(np.abs(ns)))
    if kernel_support is not None:
        return kernel_support
    if f.support is not None:
        return f.support + reach
    return None


# --------------------------------------------------------------------------
# Richardson engine for algebraically decaying kernels

def _start_width(f, ns, scale):
    reach = int(np.max(np.abs(ns)))
    J0 = max(256, 16 * reach, int(math.ceil(scale)), int(math.ceil(8 * f.asymptotic_from)))
    return 1 << (J0 - 1).bit_length()


def _extrapolated(row_for, f, ns, tol, decay, scale, what, envelope=None):
    """Sum ``row * f`` over the whole lattice for a kernel decaying like ``|j|^-decay``.

    Parameters
    ----------
    row_for : callable
        ``J -> kernel values on -J..J``.
    decay : float
        Leading decay power ``p`` of the kernel.
    envelope : callable, optional
        ``(J, ns) -> bound`` on the discarded sum, used when ``f`` has no
        declared tail and the partial sums show no clean power law.
    """
    J0 = _start_width(f, ns, scale)
    gamma = f.tail_power
    e0 = None
    if gamma is not None and math.isfinite(gamma):
        e0 = gamma + 1.0 - decay
        if e0 >= 0:
            raise ContractError(f"{what}: the series diverges for {f.name}")
    for count in range(RICHARDSON_LEVELS, MAX_RICHARDSON_LEVELS + 1):
        levels = [J0 << i for i in range(count)]
        row = row_for(levels[-1])
        sums = level_sums(row, f, ns, levels)
        if e0 is None and gamma is None and envelope is None:
            est = estimate_exponent(sums)
            e0 = est if est is not None and est < -0.05 else None
        if e0 is None:
            break
        exps = [e0 - i for i in range(count - 1)]
        value, correction = richardson(sums, exps)
        if np.max(correction) <= 0.1 * tol:
            break
    rounding = _rounding(row, f, ns, levels[-1])
    if e0 is None:
        bound = envelope(levels[-1], ns) if envelope is not None else np.full(ns.shape, math.inf)
        return _finish(ns, sums[-1], bound + rounding, tol, "envelope", what)
    amplification = np.prod([(1 + 2.0 ** e) / (1 - 2.0 ** e) for e in exps])
    return _finish(ns, value, correction + amplification * rounding, tol, "richardson", what)


# --------------------------------------------------------------------------
# heat semigroup

@lru_cache(maxsize=128)
def _heat_row_cached(t, J, l, k):
    row = np.array(hk.heat_row(t, J, l, k), dtype=float)
    row.setflags(write=False)
    return row


def _heat_tail(t, d, J, alpha, C, reach):
    """Bound on ``C sum_{|j|>J} |K(j)| (1 + |n - j|^alpha)`` for a heat row with ``d`` differences.

    ``|K(j)| <= sum_i binom(d, i) G(t, j + i - k)`` and Markov's inequality with
    the ``2q``-th moment ``p_q(2t)`` bound every weighted Gaussian tail.
    """
    M = J - d
    if M < 1:
        return math.inf
    q = MARKOV_ORDER
    p = moment_value(q, 2.0 * t)
    ca = max(1.0, 2.0 ** (alpha - 1.0))
    t0 = p / M ** (2 * q)
    ta = ca * (p / M ** (2 * q - alpha) + d ** alpha * t0)
    return C * 2.0 ** d * ((1.0 + ca * reach ** alpha) * t0 + ca * ta)


def _heat_family(f, t, ns, tol, l=0, k=0, what="heat_apply"):
    t = float(t)
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"t must be positive, got {t}")
    tol = _check_tol(tol)
    alpha, C = _growth(f, what)
    d = l + 2 * k
    reach = float(np.max(np.abs(ns)))
    J = max(16, d + int(math.ceil(8.0 * math.sqrt(2.0 * t))))
    while _heat_tail(t, d, J, alpha, C, reach) > 0.1 * tol:
        J *= 2
        if J > MAX_HEAT_WIDTH:
            raise AccuracyError(f"{what}: no heat row narrower than {MAX_HEAT_WIDTH} reaches tol={tol:g}")
    # shrink back towards the smallest admissible width
    lo = J // 2
    while J - lo > 1:
        mid = (lo + J) // 2
        if _heat_tail(t, d, mid, alpha, C, reach) > 0.1 * tol:
            lo = mid
        else:
            J = mid
    finite = _finite_radius(f, ns)
    if finite is not None:
        J = min(J, finite + d)
        tail = 0.0
    else:
        tail = _heat_tail(t, d, J, alpha, C, reach)
    row = _heat_row_cached(t, J, l, k)
    return _direct(row, f, ns, what, tol, extra=tail)


def heat_apply(f, t, n, tol=DEFAULT_TOL):
    """``e^{t Laplacian} f(n) = sum_j G(t, n - j) f(j)``.

    Parameters
    ----------
    f : LatticeFunction
        Needs a growth certificate ``|f(n)| <= C (1 + |n|^alpha)``.
    t : float
    n : int or array of int
    tol : float
        Bound on the growth-weighted kernel tail.

    Returns
    -------
    float or ndarray
    """
    return _unwrap(heat_apply_result(f, t, n, tol), n)


def heat_apply_result(f, t, n, tol=DEFAULT_TOL, l=0):
    """:func:`heat_apply` (optionally after ``l`` right differences) with error bounds."""
    return _heat_family(f, t, _points(n), tol, l=int(l))


def heat_tderiv_apply(f, t, n, k, tol=DEFAULT_TOL):
    """``d^k/dt^k e^{t Laplacian} f(n) = Laplacian^k e^{t Laplacian} f(n)``."""
    return _unwrap(heat_tderiv_result(f, t, n, k, tol), n)


def heat_tderiv_result(f, t, n, k, tol=DEFAULT_TOL, l=0):
    k = int(k)
    if not 1 <= k <= hk.MAX_TDERIV_ORDER:
        raise DomainError(f"k must be in [1, {hk.MAX_TDERIV_ORDER}], got {k}")
    return _heat_family(f, t, _points(n), tol, l=int(l), k=k, what="heat_tderiv_apply")


# --------------------------------------------------------------------------
# Poisson semigroup

@lru_cache(maxsize=64)
def _poisson_row_cached(y, J, m, l):
    row = np.array(pk.poisson_row(y, J, m, l), dtype=float)
    row.setflags(write=False)
    return row


def poisson_admissibility_power(m=0, l=0):
    """Weight power ``p`` in ``sum |f(j)| / (1+|j|)^p < inf`` needed for the ``(m, l)`` kernel."""
    return pk._far(1.0, int(m), int(l)).leading_power


def _poisson_family(f, y, ns, tol, m=0, l=0, what="poisson_apply"):
    y = pk._check_y(y)
    m, l = pk._check_orders(m, l)
    tol = _check_tol(tol)
    far = pk._far(y, m, l)
    power = far.leading_power
    finite = _finite_radius(f, ns)
    if finite is not None:
        return _direct(_poisson_row_cached(y, finite, m, l), f, ns, what, tol)
    require_weighted(f, power, what)
    alpha, C = _growth(f, what)

    def envelope(J, pts):
        # |K(j)| <= sum_p |a_p| j^-p beyond the core, weighted by the growth bound
        ca = max(1.0, 2.0 ** (alpha - 1.0))
        a = np.abs(far.coeffs)
        total = np.zeros(pts.shape)
        for p, ap in enumerate(a):
            if ap == 0.0:
                continue
            base = special.zeta(p, J + 1.0)
            grow = special.zeta(p - alpha, J + 1.0) if p - alpha > 1 else math.inf
            total = total + 2.0 * ap * (base * (1.0 + ca * np.abs(pts) ** alpha) + ca * grow)
        return C * total

    return _extrapolated(lambda J: _poisson_row_cached(y, J, m, l), f, ns, tol, power,
                         16 * y + 64, what, envelope)


def poisson_apply(f, y, n, tol=DEFAULT_TOL):
    """``e^{-y sqrt(-Laplacian)} f(n) = sum_j P(y, j) f(n - j)``.

    ``f`` must satisfy ``sum |f(j)| / (1+|j|)^2 < inf``; this is checked
    numerically and a :class:`ContractError` is raised otherwise.
    """
    return _unwrap(poisson_apply_result(f, y, n, tol), n)


def poisson_apply_result(f, y, n, tol=DEFAULT_TOL, l=0):
    return _poisson_family(f, y, _points(n), tol, 0, int(l))


def poisson_yderiv_apply(f, y, n, l, tol=DEFAULT_TOL):
    """``d^l/dy^l e^{-y sqrt(-Laplacian)} f(n)`` for ``l = 1..3``."""
    return _unwrap(poisson_yderiv_result(f, y, n, l, tol), n)


def poisson_yderiv_result(f, y, n, l, tol=DEFAULT_TOL, diff=0):
    l = int(l)
    if not 1 <= l <= pk.MAX_Y_DERIV:
        raise DomainError(f"l must be in [1, {pk.MAX_Y_DERIV}], got {l}")
    return _poisson_family(f, y, _points(n), tol, l, int(diff), what="poisson_yderiv_apply")


# --------------------------------------------------------------------------
# fractional kernels

def _is_integer(beta):
    return float(beta).is_integer()


def _check_beta_pos(beta):
    beta = float(beta)
    if not beta > 0 or not math.isfinite(beta):
        raise DomainError(f"beta must be positive, got {beta}")
    return beta


def _check_beta_neg(beta):
    beta = float(beta)
    if not 0 < beta < 0.5:
        raise DomainError(f"negative powers need 0 < beta < 1/2, got {beta}")
    return beta


def frac_kernel_pos_exact(beta, n):
    """``K_beta(n)`` for integer ``beta`` as an exact integer: ``(-1)^n binom(2 beta, beta + |n|)``."""
    b, a = int(beta), abs(int(n))
    if b != beta or b < 1:
        raise DomainError(f"exact kernel needs a positive integer beta, got {beta}")
    if a > b:
        return 0
    return (-1) ** a * math.comb(2 * b, b + a)


def _frac_pos_values(beta, a):
    a = np.abs(np.asarray(a, dtype=np.int64))
    if _is_integer(beta):
        b = int(beta)
        return np.array([float(frac_kernel_pos_exact(b, x)) for x in a.ravel()]).reshape(a.shape)
    out = np.empty(a.shape)
    lg = math.lgamma(2.0 * beta + 1.0)
    near = a < 1.0 + beta
    an = a[near].astype(float)
    # Gamma(1 + beta - |n|) has a positive argument here
    out[near] = (-1.0) ** an * np.exp(lg - special.gammaln(1.0 + beta + an) - special.gammaln(1.0 + beta - an))
    af = a[~near].astype(float)
    # reflection: 1/Gamma(z) = Gamma(1-z) sin(pi z) / pi with z = 1 + beta - |n| < 0
    out[~near] = -math.sin(math.pi * beta) / math.pi * math.exp(lg) / special.poch(af - beta, 1.0 + 2.0 * beta)
    return out


def _frac_neg_values(beta, a):
    a = np.abs(np.asarray(a, dtype=np.int64)).astype(float)
    pre = 4.0 ** (-beta) * math.gamma(0.5 - beta) / (math.sqrt(math.pi) * math.gamma(beta))
    return pre / special.poch(a + beta, 1.0 - 2.0 * beta)


def frac_kernel_pos(beta, n):
    """Kernel ``K_beta(n)`` of ``(-Laplacian)^beta``.

    ``(-1)^|n| Gamma(2 beta + 1) / (Gamma(1 + beta + |n|) Gamma(1 + beta - |n|))``,
    zero when ``|n| - beta - 1`` is a nonnegative integer. Integer ``beta``
    gives the exact binomial stencil.
    """
    beta = _check_beta_pos(beta)
    if np.ndim(n) == 0:
        return float(_frac_pos_values(beta, [int(n)])[0])
    return _frac_pos_values(beta, n)


def frac_kernel_neg(beta, n):
    """Kernel of ``(-Laplacian)^-beta``, ``0 < beta < 1/2``.

    ``4^-beta Gamma(1/2 - beta) Gamma(|n| + beta) / (sqrt(pi) Gamma(beta) Gamma(|n| + 1 - beta))``.
    """
    beta = _check_beta_neg(beta)
    if np.ndim(n) == 0:
        return float(_frac_neg_values(beta, [int(n)])[0])
    return _frac_neg_values(beta, n)


def frac_kernel_neg_quadrature(beta, n):
    """``(1/Gamma(beta)) int_0^inf G(tau, n) tau^(beta-1) dtau`` by algebraic-weight quadrature."""
    beta = _check_beta_neg(beta)
    value, _ = bessel_power_integral(int(n), -beta, 2.0)
    return value / math.gamma(beta)


@dataclass(frozen=True)
class FracKernel:
    """Kernel of ``(-Laplacian)^beta`` (``sign='+'``) or ``(-Laplacian)^-beta`` (``sign='-'``).

    Attributes
    ----------
    beta : float
    sign : str
    """

    beta: float
    sign: str = "+"

    def __post_init__(self):
        if self.sign == "+":
            _check_beta_pos(self.beta)
        elif self.sign == "-":
            _check_beta_neg(self.beta)
        else:
            raise DomainError(f"sign must be '+' or '-', got {self.sign!r}")

    @property
    def decay_exponent(self):
        return 1.0 + 2.0 * self.beta if self.sign == "+" else 1.0 - 2.0 * self.beta

    @property
    def support(self):
        """Radius of the support, ``None`` when infinite."""
        if self.sign == "+" and _is_integer(self.beta):
            return int(self.beta)
        return None

    def evaluator(self, n):
        values = _frac_pos_values if self.sign == "+" else _frac_neg_values
        return values(self.beta, n)

    def __call__(self, n):
        if np.ndim(n) == 0:
            return float(self.evaluator([int(n)])[0])
        return self.evaluator(n)

    def row(self, J):
        return _frac_row(self.beta, self.sign, int(J))


@lru_cache(maxsize=64)
def _frac_row(beta, sign, J):
    values = _frac_pos_values if sign == "+" else _frac_neg_values
    row = values(beta, np.arange(-J, J + 1))
    row.setflags(write=False)
    return row


def frac_kernel_sum(beta, J):
    """``sum_{|j| <= J} K_beta(j)`` and its tail-corrected limit.

    The partial sums approach zero like ``J^(-2 beta)``; extrapolating over
    ``J, 2J, 4J, 8J`` removes the leading tail terms.
    """
    beta = _check_beta_pos(beta)
    J = int(J)
    levels = [J << i for i in range(RICHARDSON_LEVELS)]
    row = _frac_row(beta, "+", levels[-1])
    half = levels[-1]
    sums = [math.fsum(row[half - L: half + L + 1]) for L in levels]
    if _is_integer(beta):
        return sums[0], sums[0]
    limit, _ = richardson(np.array(sums), [-2.0 * beta - i for i in range(RICHARDSON_LEVELS - 1)])
    return sums[0], float(limit)


# --------------------------------------------------------------------------
# fractional powers

def _frac_family(f, beta, ns, tol, sign):
    kern = FracKernel(beta, sign)
    what = "frac_laplacian_pos" if sign == "+" else "frac_laplacian_neg"
    tol = _check_tol(tol)
    finite = _finite_radius(f, ns, kern.support)
    if finite is not None:
        return _direct(kern.row(finite), f, ns, what, tol)
    klass = "l_beta" if sign == "+" else "l_-beta"
    require_weighted(f, kern.decay_exponent, f"{what} ({klass} membership)")
    return _extrapolated(kern.row, f, ns, tol, kern.decay_exponent, 0, what)


def frac_laplacian_pos(f, beta, n, tol=DEFAULT_TOL):
    """``(-Laplacian)^beta f(n) = sum_j K_beta(j) (f(n - j) - f(n))`` for ``f`` in ``l_beta``.

    Since ``sum_j K_beta(j) = 0`` the centred form equals the plain convolution,
    which is what gets summed. For integer ``beta`` this is the finite stencil
    of ``(-Laplacian)^beta``.
    """
    return _unwrap(frac_pos_result(f, beta, n, tol), n)


def frac_pos_result(f, beta, n, tol=DEFAULT_TOL):
    return _frac_family(f, _check_beta_pos(beta), _points(n), tol, "+")


def frac_laplacian_neg(f, beta, n, tol=DEFAULT_TOL):
    """``(-Laplacian)^-beta f(n) = sum_m K_-beta(n - m) f(m)`` for ``f`` in ``l_-beta``."""
    return _unwrap(frac_neg_result(f, beta, n, tol), n)


def frac_neg_result(f, beta, n, tol=DEFAULT_TOL):
    return _frac_family(f, _check_beta_neg(beta), _points(n), tol, "-")


# --------------------------------------------------------------------------
# semigroup route for positive powers

@lru_cache(maxsize=64)
def c_beta(beta):
    """``int_0^inf (e^-tau - 1)^k tau^(-1-beta) dtau`` with ``k = floor(beta) + 1``, by quadrature.

    On ``[0, 1]`` the factor ``tau^(k-1-beta)`` goes into an algebraic weight.
    On ``[1, inf)`` the constant ``(-1)^k`` is integrated exactly and the
    remainder, bounded by ``k e^-tau``, is cut at ``tau = 60``.
    """
    beta = _check_beta_pos(beta)
    k = int(math.floor(beta)) + 1
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    near, _ = integrate.quad(lambda s: (np.expm1(-s) / s) ** k if s > 0 else (-1.0) ** k,
                             0.0, 1.0, weight="alg", wvar=(k - 1.0 - beta, 0.0), **opts)
    far, _ = integrate.quad(lambda s: (np.expm1(-s) ** k - (-1.0) ** k) * s ** (-1.0 - beta),
                            1.0, 60.0, **opts)
    return near + far + (-1.0) ** k / beta


def c_beta_closed(beta):
    """``Gamma(-beta) sum_i binom(k, i) (-1)^(k-i) i^beta`` for non-integer ``beta``."""
    beta = _check_beta_pos(beta)
    if _is_integer(beta):
        raise DomainError("the Gamma closed form needs non-integer beta")
    k = int(math.floor(beta)) + 1
    return math.gamma(-beta) * math.fsum(math.comb(k, i) * (-1) ** (k - i) * i ** beta for i in range(1, k + 1))


@lru_cache(maxsize=32)
def _stirling2_row(r_max, k):
    """``S(r, k)`` for ``r = 0..r_max`` as exact integers."""
    table = [[0] * (k + 1) for _ in range(r_max + 1)]
    table[0][0] = 1
    for r in range(1, r_max + 1):
        for j in range(1, k + 1):
            table[r][j] = j * table[r - 1][j] + table[r - 1][j - 1]
    return tuple(row[k] for row in table)


SEMIGROUP_SERIES_TERMS = 40
ASYMPTOTIC_TERMS = 10


def _semigroup_point(f, beta, n, tol):
    k = int(math.floor(beta)) + 1
    R = f.support
    ms = np.arange(-R, R + 1)
    fm = f(ms)
    keep = fm != 0
    ms, fm = ms[keep], fm[keep]
    d = np.abs(n - ms)
    dmax = int(d.max()) if d.size else 0
    fn = f(n)
    binom = [math.comb(k, i) * (-1) ** (k - i) for i in range(k + 1)]

    def heat_at(s):
        return float(np.dot(bessel_row(2.0 * s, dmax).values[d], fm)) if s > 0 else fn

    def H(tau):
        return binom[0] * fn + sum(binom[i] * heat_at(i * tau) for i in range(1, k + 1))

    # [0, tau_s]: (e^{tau L} - I)^k = k! sum_{r>=k} S(r, k) tau^r L^r / r!
    # terms behave like (2 k tau)^r / r!, so tau_s = 1/(2k) keeps them below 2^r / r!
    tau_s = 1.0 / (2.0 * k)
    rmax = SEMIGROUP_SERIES_TERMS
    window = f.values(n - rmax, n + rmax)
    stirling = _stirling2_row(rmax, k)
    small, term = 0.0, 0.0
    for r in range(rmax + 1):
        if r >= k:
            lap_r = window[window.size // 2]
            term = (math.factorial(k) * stirling[r] / math.factorial(r)
                    * lap_r * tau_s ** (r - beta) / (r - beta))
            small += term
        window = np.diff(window, 2)
    # H(tau) cancels values up to max|f|; its rounding error is weighted by tau^-beta
    scale = max(abs(fn), float(np.max(np.abs(fm))) if fm.size else 0.0)
    err = abs(term) + 8.0 * EPS * scale * (2.0 ** k * tau_s ** -beta / beta + math.e ** 2)

    # [tau_s, T]: adaptive quadrature in log tau, decade by decade; beyond T the
    # expansion terms shrink like (d^2 / 4s)^q / q!, so T = 4 d^2 leaves ~1e-19
    T = max(1e3, 4.0 * dmax * dmax)
    if 2.0 * k * T > BESSEL_MAX_T:
        raise CapacityError(f"semigroup route: support plus window {dmax} is too wide (limit about "
                            f"{int(math.sqrt(BESSEL_MAX_T / (8 * k)))})")
    edges = [tau_s]
    while edges[-1] < T:
        edges.append(min(edges[-1] * 10.0, T))
    middle = 0.0
    budget = 0.05 * tol * abs(c_beta(beta)) / max(1, len(edges) - 1)
    for a, b in zip(edges[:-1], edges[1:]):
        val, qerr = integrate.quad(lambda u: H(math.exp(u)) * math.exp(-beta * u), math.log(a), math.log(b),
                                   epsabs=budget, epsrel=1e-13, limit=200)
        middle += val
        err += qerr + 8.0 * EPS * abs(val)

    # [T, inf): large-time expansion G(s, d) ~ (4 pi s)^-1/2 sum_q b_q(d) s^-q
    mu = 4.0 * (n - ms).astype(float) ** 2
    coeff = np.ones_like(mu)
    large = binom[0] * fn * T ** (-beta) / beta
    for q in range(ASYMPTOTIC_TERMS):
        if q:
            coeff = coeff * (-(mu - (2 * q - 1) ** 2) / (16.0 * q))
        Uq = float(np.dot(coeff, fm)) / math.sqrt(4.0 * math.pi)
        expo = 0.5 + q + beta
        term = sum(binom[i] * Uq * i ** (-0.5 - q) * T ** (-expo) / expo for i in range(1, k + 1))
        large += term
    err += abs(term)
    cb = abs(c_beta(beta))
    return (small + middle + large) / c_beta(beta), err / cb


def frac_laplacian_pos_semigroup(f, beta, n, tol=DEFAULT_TOL):
    """``(-Laplacian)^beta f(n)`` from ``(1/c_beta) int_0^inf (e^{tau L} - I)^k f(n) tau^(-1-beta) dtau``.

    ``k = floor(beta) + 1``. Needs finitely supported ``f`` (use ``trunc:R:...``).
    Integer ``beta`` is accepted too and reproduces the classical power.
    """
    return _unwrap(frac_pos_semigroup_result(f, beta, n, tol), n)


def frac_pos_semigroup_result(f, beta, n, tol=DEFAULT_TOL):
    beta = _check_beta_pos(beta)
    tol = _check_tol(tol)
    ns = _points(n)
    if f.support is None:
        raise ContractError("semigroup route needs a finitely supported function; truncate it with trunc:R:<spec>")
    pairs = [_semigroup_point(f, beta, int(x), tol) for x in ns]
    values = np.array([p[0] for p in pairs])
    return _finish(ns, values, np.array([p[1] for p in pairs]), tol, "semigroup", "frac_laplacian_pos_semigroup")


# --------------------------------------------------------------------------
# Bessel potential

def _bessel_symbol_sup(beta):
    """``max |1 + 4 sin^2(z/2)|^(-beta/2)`` on ``Im z = +-b`` with ``b`` inside the analyticity strip."""
    x = np.linspace(0.0, math.pi, 2001)
    modulus = np.abs(3.0 - 2.0 * np.cos(x + 1j * _BESSEL_STRIP))
    return float(np.max(modulus ** (-0.5 * beta)))


@lru_cache(maxsize=32)
def bessel_potential_row(beta, J=BESSEL_POTENTIAL_WIDTH):
    """``B_beta(j)``, ``j = -J..J``, by quadrature over the heat semigroup.

    ``B_beta(j) = (1/Gamma(beta/2)) int_0^inf e^-tau tau^(beta/2 - 1) G(tau, j) dtau``
    with ``tau = u^2/(1-u)^2``; on ``u < 1/2`` the endpoint factor ``u^(beta-1)``
    is removed by ``u = v^(1/beta)``.

    Returns
    -------
    (ndarray, float)
        Row and the absolute quadrature error estimate.
    """
    beta = _check_beta_pos(beta)
    J = int(J)
    norm = 1.0 / math.gamma(0.5 * beta)

    def heat(u):
        tau = (u / (1.0 - u)) ** 2
        if tau > 745.0:
            return np.zeros(J + 1)
        return math.exp(-tau) * bessel_row(2.0 * tau, J).values[: J + 1]

    def inner(v):
        u = v ** (1.0 / beta)
        return (2.0 / beta) * (1.0 - u) ** (-1.0 - beta) * heat(u)

    def outer(u):
        if u >= 1.0:
            return np.zeros(J + 1)
        return 2.0 * u ** (beta - 1.0) * (1.0 - u) ** (-1.0 - beta) * heat(u)

    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=4000, norm="max")
    a, ea = integrate.quad_vec(inner, 0.0, 0.5 ** beta, **opts)
    b, eb = integrate.quad_vec(outer, 0.5, 1.0, **opts)
    half = norm * (a + b)
    row = np.concatenate([half[:0:-1], half])
    row.setflags(write=False)
    return row, norm * (ea + eb)


def bessel_potential_kernel(beta, j, route="quadrature"):
    """``B_beta(j)`` via ``quadrature`` (heat semigroup) or ``spectral`` (symbol coefficients)."""
    beta = _check_beta_pos(beta)
    j = int(j)
    if route == "spectral":
        return spectral_oracle(_DELTA, Symbol("bessel", beta), j)
    if route != "quadrature":
        raise DomainError(f"route must be 'quadrature' or 'spectral', got {route!r}")
    if abs(j) > BESSEL_POTENTIAL_WIDTH:
        return 0.0
    row, _ = bessel_potential_row(beta)
    return float(row[j + BESSEL_POTENTIAL_WIDTH])


def bessel_potential_result(f, beta, n, tol=DEFAULT_TOL):
    beta = _check_beta_pos(beta)
    tol = _check_tol(tol)
    ns = _points(n)
    alpha, C = _growth(f, "bessel_potential")
    row, qerr = bessel_potential_row(beta)
    J = BESSEL_POTENTIAL_WIDTH
    # |B(j)| <= M e^{-b|j|} from analyticity of the symbol in |Im z| < b
    M = _bessel_symbol_sup(beta)
    i = np.arange(J + 1, J + 4001, dtype=float)
    ca = max(1.0, 2.0 ** (alpha - 1.0))
    env = M * np.exp(-_BESSEL_STRIP * i)
    tail = 2.0 * C * (env.sum() * (1.0 + ca * np.abs(ns) ** alpha) + ca * np.dot(env, i ** alpha))
    scale = level_sums(np.ones_like(row), _abs_of(f), ns, [J])[0]
    return _direct(row, f, ns, "bessel_potential", tol, extra=tail + qerr * scale)


def bessel_potential(f, beta, n, tol=DEFAULT_TOL):
    """``(I - Laplacian)^(-beta/2) f(n)`` by convolution with the potential kernel ``B_beta``."""
    return _unwrap(bessel_potential_result(f, beta, n, tol), n)


def frac_kernel_table(beta, sign, half_width):
    """:class:`KernelTable` of the fractional kernel on ``-R..R``.

    ``tail_bound`` bounds ``sum_{|j| > R} |K(j)|``: zero past the support for
    integer powers, a Richardson-extrapolated tail for the other positive
    powers, and ``inf`` for negative powers, whose kernels are not summable.
    """
    kern = FracKernel(beta, sign)
    R = int(half_width)
    if R < 0:
        raise DomainError("half_width must be nonnegative")
    row = np.array(kern.row(R))
    if sign == "-":
        tail = math.inf
    elif kern.support is not None:
        tail = 0.0 if R >= kern.support else math.fsum(np.abs(kern.row(kern.support))) - math.fsum(np.abs(row))
    else:
        J0 = 1 << max(6, (4 * R).bit_length())
        levels = [J0 << i for i in range(RICHARDSON_LEVELS + 1)]
        wide = np.abs(kern.row(levels[-1]))
        mid = levels[-1]
        sums = np.array([[math.fsum(wide[mid - L: mid + L + 1])] for L in levels])
        limit, corr = richardson(sums, [-2.0 * beta - i for i in range(RICHARDSON_LEVELS)])
        tail = float(limit[0] - math.fsum(np.abs(row)) + 10.0 * corr[0])
    kind = "frac_pos" if sign == "+" else "frac_neg"
    return KernelTable(float(beta), R, kind, tail, row)


def bessel_potential_table(beta, half_width=BESSEL_POTENTIAL_WIDTH):
    """:class:`KernelTable` of ``B_beta`` on ``-R..R`` with the analyticity-strip tail bound."""
    R = int(half_width)
    if R < 1:
        raise DomainError("half_width must be positive")
    row, qerr = bessel_potential_row(_check_beta_pos(beta), R)
    M = _bessel_symbol_sup(beta)
    decay = math.exp(-_BESSEL_STRIP)
    tail = 2.0 * M * decay ** (R + 1) / (1.0 - decay) + (2 * R + 1) * qerr
    return KernelTable(float(beta), R, "bessel_potential", tail, np.array(row))


# --------------------------------------------------------------------------
# spectral oracle

_DELTA = LatticeFunction("delta:0", lambda n: (n == 0).astype(float), 0.0, 1.0, -math.inf, support=0)


SYMBOL_KINDS = ("identity", "heat", "poisson", "frac", "bessel")


@dataclass(frozen=True)
class Symbol:
    """Named even multiplier ``m(x)`` on the circle.

    ``kind`` is one of ``identity``, ``heat`` (param ``t``), ``poisson``
    (param ``y``), ``frac`` (param ``beta``, negative for inverse powers) and
    ``bessel`` (param ``beta``).
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in SYMBOL_KINDS:
            raise DomainError(f"unknown symbol {self.kind!r}")
        p = float(self.param)
        if self.kind in ("heat", "poisson", "bessel") and not p > 0:
            raise DomainError(f"{self.kind} symbol needs a positive parameter")
        if self.kind == "frac" and not (p > 0 or -0.5 < p < 0):
            raise DomainError("frac symbol needs beta > 0 or -1/2 < beta < 0")

    def __call__(self, x):
        s = np.sin(0.5 * np.asarray(x, dtype=float))
        p = float(self.param)
        if self.kind == "identity":
            return np.ones_like(s)
        if self.kind == "heat":
            return np.exp(-4.0 * p * s * s)
        if self.kind == "poisson":
            return np.exp(-2.0 * p * np.abs(s))
        if self.kind == "frac":
            return (4.0 * s * s) ** p
        return (1.0 + 4.0 * s * s) ** (-0.5 * p)

    @property
    def singular_power(self):
        if self.kind == "frac" and self.param < 0:
            return 2.0 * float(self.param)
        return 0.0

    @property
    def bandwidth(self):
        if self.kind == "poisson":
            return int(2 * self.param)
        return 0


def spectral_oracle(f, symbol, n):
    """``(1/2pi) int f_hat(x) m(x) e^{inx} dx`` for finitely supported ``f``.

    Each Fourier coefficient ``(1/pi) int_0^pi m(x) cos(jx) dx`` comes from
    composite Gauss-Legendre on panels graded towards ``x = 0``, with a
    Gauss-Jacobi panel when ``m`` has an integrable singularity there.
    """
    if f.support is None:
        raise ContractError(f"spectral oracle needs finite support, {f.name} has none")
    if not isinstance(symbol, Symbol):
        raise DomainError("multiplier must be a Symbol")
    n = int(n)
    if symbol.kind == "identity":
        return f(n)
    R = f.support
    ms = np.arange(-R, R + 1)
    fm = f(ms)
    keep = fm != 0
    d = np.abs(n - ms[keep])
    if d.size == 0:
        return 0.0
    x, w = graded_rule(int(d.max()) + symbol.bandwidth, symbol.singular_power)
    mw = w * symbol(x) / math.pi
    coeffs = np.cos(np.outer(d, x)) @ mw
    return float(np.dot(coeffs, fm[keep]))


# --------------------------------------------------------------------------
# operator outputs as new lattice functions

def kernel_function(kern):
    """A :class:`FracKernel` (the image of the unit impulse) as a LatticeFunction."""
    decay = kern.decay_exponent
    support = kern.support
    tail = -math.inf if support is not None else -decay
    return LatticeFunction(f"frac_kernel:{kern.sign}{kern.beta:g}", lambda n: kern.evaluator(n),
                           0.0, float(abs(kern(0))), tail, support=support)


def image_of_finite(f, op, param):
    """``op(f)`` for finitely supported ``f`` as an exact LatticeFunction.

    ``op`` is ``frac_pos``, ``frac_neg`` or ``bessel_potential``. The image is
    ``sum_m f(m) K(n - m)`` with the kernel evaluated in closed form, so it
    can be fed to another operator without truncation.
    """
    if f.support is None:
        raise ContractError("image_of_finite needs finite support")
    R = f.support
    ms = np.arange(-R, R + 1)
    fm = f(ms)
    keep = fm != 0
    ms, fm = ms[keep], fm[keep]
    if op == "bessel_potential":
        row, _ = bessel_potential_row(float(param))
        J = BESSEL_POTENTIAL_WIDTH

        def rule(n):
            d = n[..., None] - ms
            vals = np.where(np.abs(d) <= J, row[np.clip(d + J, 0, 2 * J)], 0.0)
            return vals @ fm

        return LatticeFunction(f"bessel_potential:{param:g}:{f.name}", rule, 0.0,
                               float(np.abs(fm).sum() * row.max()), -math.inf, support=R + J)
    sign = {"frac_pos": "+", "frac_neg": "-"}.get(op)
    if sign is None:
        raise DomainError(f"unknown operator {op!r}")
    kern = FracKernel(float(param), sign)

    def rule(n):
        return kern.evaluator(n[..., None] - ms) @ fm

    support = None if kern.support is None else R + kern.support
    tail = -math.inf if support is not None else -kern.decay_exponent
    bound = float(np.abs(fm).sum() * abs(kern(0)))
    return LatticeFunction(f"{op}:{param:g}:{f.name}", rule, 0.0, bound, tail, support=support)


__all__ = [
    "ApplyResult", "FracKernel", "Symbol", "DEFAULT_TOL",
    "heat_apply", "heat_apply_result", "heat_tderiv_apply", "heat_tderiv_result",
    "poisson_apply", "poisson_apply_result", "poisson_yderiv_apply", "poisson_yderiv_result",
    "poisson_admissibility_power",
    "frac_kernel_pos", "frac_kernel_pos_exact", "frac_kernel_neg", "frac_kernel_neg_quadrature",
    "frac_kernel_sum", "frac_laplacian_pos", "frac_pos_result", "frac_laplacian_neg", "frac_neg_result",
    "c_beta", "c_beta_closed", "frac_laplacian_pos_semigroup", "frac_pos_semigroup_result",
    "bessel_potential", "bessel_potential_result", "bessel_potential_row", "bessel_potential_kernel",
    "frac_kernel_table", "bessel_potential_table",
    "spectral_oracle", "kernel_function", "image_of_finite",
]
