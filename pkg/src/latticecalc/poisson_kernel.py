"""Discrete Poisson kernel ``P(y, j)`` and its ``y``-derivatives and differences.

The operator ``exp(-y sqrt(-Laplacian))`` has multiplier ``exp(-2y |sin(x/2)|)``.
That symbol has a kink at ``x = 0``, so the kernel decays only like ``y / (pi j^2)``.
Pointwise values come from graded Gauss-Legendre on ``[0, pi]``; whole rows
come from an FFT whose aliasing images are removed with the analytic far
field, which also gives the tails in closed form through Hurwitz zeta sums.

An independent route averages heat kernels against the subordination
density ``(y / 2 sqrt(pi)) exp(-y^2 / 4 tau) tau^(-3/2)``, integrated with the
trapezoid rule in ``log(tau)``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ._spectral import fft_row, half_range_coefficient, next_pow2, poisson_family_far_field
from .bessel_core import bessel_i_scaled
from .errors import AccuracyError, CapacityError, DomainError
from .kernel_table import KernelTable

MAX_Y_DERIV = 3
MAX_DIFF = 4
ROUTE_AGREEMENT = 1e-8
SUBORDINATION_NODES = (128, 256)
MAX_HALF_WIDTH = 1 << 40


def _check_y(y):
    y = float(y)
    if not (math.isfinite(y) and y > 0):
        raise DomainError(f"y must be positive and finite, got {y}")
    return y


def _check_orders(m, l):
    if int(m) != m or not 0 <= m <= MAX_Y_DERIV:
        raise DomainError(f"m must be an integer in [0, {MAX_Y_DERIV}], got {m}")
    if int(l) != l or not 0 <= l <= MAX_DIFF:
        raise DomainError(f"l must be an integer in [0, {MAX_DIFF}], got {l}")
    return int(m), int(l)


def _radial(y, m):
    def fn(x):
        s = np.sin(0.5 * x)
        return (-2.0 * s) ** m * np.exp(-2.0 * y * s)
    return fn


def poisson_spectral(y, j, m=0, l=0):
    """``delta_right^l d^m/dy^m P(y, j)`` by graded quadrature of the symbol."""
    y = _check_y(y)
    m, l = _check_orders(m, l)
    return half_range_coefficient(_radial(y, m), int(j), l, freq=int(2 * y))


def _heat_asymptotic(tau, j, terms=10):
    """Large-``tau`` expansion of ``G(tau, j)``, valid once ``j^2 << tau``."""
    mu = 4.0 * j * j
    total = np.ones_like(tau)
    coeff = np.ones_like(tau)
    for k in range(1, terms):
        coeff = coeff * (-(mu - (2 * k - 1) ** 2) / (k * 16.0 * tau))
        total = total + coeff
    return total / np.sqrt(4.0 * math.pi * tau)


def poisson_subordinated(y, j, nodes=SUBORDINATION_NODES[0]):
    """``P(y, j)`` from the subordination integral over heat kernels.

    With ``tau = exp(s)`` the integrand decays double-exponentially as
    ``s -> -inf`` and like ``exp(-s)`` as ``s -> inf``, so the plain trapezoid
    rule on a long uniform grid converges geometrically. Beyond
    ``tau = max(1e5, 100 j^2)`` the heat kernel is continued by its
    large-``tau`` expansion.
    """
    y = _check_y(y)
    j = abs(int(j))
    lo = math.log(y * y / 240.0)
    hi = math.log(y) + 17.0 * math.log(10.0)
    h = (hi - lo) / nodes
    s = lo + h * np.arange(nodes + 1)
    tau = np.exp(s)
    switch = min(max(1e5, 100.0 * j * j), 4e5)
    heat = np.empty_like(tau)
    near = tau <= switch
    heat[near] = [bessel_i_scaled(j, 2.0 * v) for v in tau[near]]
    heat[~near] = _heat_asymptotic(tau[~near], j)
    density = y / (2.0 * math.sqrt(math.pi)) * np.exp(-y * y / (4.0 * tau)) / np.sqrt(tau)
    return float(h * np.sum(density * heat))


def poisson_kernel(y, j, cross_check=True):
    """``P(y, j)`` to about ``1e-15`` absolute.

    With ``cross_check`` the subordination route must agree within ``1e-8``
    (128 nodes, then 256) or :class:`AccuracyError` is raised.
    """
    value = poisson_spectral(y, j)
    if cross_check:
        for nodes in SUBORDINATION_NODES:
            if abs(poisson_subordinated(y, j, nodes) - value) <= ROUTE_AGREEMENT:
                break
        else:
            raise AccuracyError(f"Poisson routes disagree at y={y}, j={j}")
    return value


def poisson_y_deriv(y, j, m):
    """``d^m/dy^m P(y, j)`` via the multiplier ``(-2 sin(x/2))^m exp(-2y sin(x/2))``."""
    return poisson_spectral(y, j, m=m)


def core_width(y):
    """Half-width beyond which the far-field expansion is used (``|j| >= 16 y``)."""
    return int(math.ceil(16.0 * y)) + 64


@lru_cache(maxsize=64)
def _far(y, m, l):
    return poisson_family_far_field(y, m, l)


@lru_cache(maxsize=32)
def _core_row(y, m, l):
    width = core_width(y)
    nodes = next_pow2(32 * width)
    radial = _radial(y, m)

    def multiplier(x):
        return (1.0 - np.exp(1j * x)) ** l * radial(x)

    raw = fft_row(multiplier, width, nodes)
    j = np.arange(-width, width + 1)
    row = raw - _far(y, m, l).alias(j, nodes)
    row.setflags(write=False)
    return row


def poisson_row(y, half_width, m=0, l=0):
    """Values of ``delta_right^l d^m/dy^m P(y, j)`` for ``j = -J..J``."""
    y = _check_y(y)
    m, l = _check_orders(m, l)
    core = _core_row(y, m, l)
    width = (core.size - 1) // 2
    J = int(half_width)
    if J <= width:
        return core[width - J: width + J + 1].copy()
    j = np.arange(width + 1, J + 1, dtype=float)
    far = _far(y, m, l)
    return np.concatenate((far(-j[::-1]), core, far(j)))


def _tail_pair(far, J):
    return far.tail_sum(J, 1), far.tail_sum(J, -1)


def _kind(m, l):
    if m == 0 and l == 0:
        return "poisson"
    parts = ["poisson"] if m == 0 else [f"poisson_yderiv({m})"]
    if l:
        parts.append(f"diff({l})")
    return "_".join(parts)


def poisson_family_table(y, tol, m=0, l=0):
    """Kernel table for ``delta^l d^m/dy^m P(y, .)`` with tail below ``tol``.

    The far field is monotone in ``|j|`` with a fixed sign per side, so the
    discarded mass equals ``|sum_{j>J}| + |sum_{j<-J}|``, computed exactly
    from the expansion. Four times the size of the last expansion term is
    added for the truncation of the expansion itself.
    """
    y = _check_y(y)
    m, l = _check_orders(m, l)
    if not 1e-12 < tol < 0.1:
        raise DomainError(f"tol must lie in (1e-12, 0.1), got {tol}")
    core = _core_row(y, m, l)
    width = (core.size - 1) // 2
    far = _far(y, m, l)

    def bound(J):
        a, b = _tail_pair(far, J)
        return abs(a) + abs(b) + 8.0 * far.last_term(J + 1) * (J + 1)

    J = width
    if bound(J) > tol:
        p = far.leading_power
        J = int(width * (bound(width) / tol) ** (1.0 / (p - 1))) + 1
        while bound(J) > tol:
            J = int(J * 1.1) + 1
        lo = width
        while J - lo > 1:
            mid = (lo + J) // 2
            if bound(mid) <= tol:
                J = mid
            else:
                lo = mid
    if J > MAX_HALF_WIDTH:
        raise CapacityError(f"table for y={y}, tol={tol} would need half-width {J}")
    tail = bound(J)
    if J > width:
        a1, b1 = _tail_pair(far, J)
        a2, b2 = _tail_pair(far, 2 * J)
        if abs(a1 - a2) + abs(b1 - b2) >= tail:
            raise AccuracyError("widening test failed for the Poisson tail bound")
    return KernelTable(y, J, _kind(m, l), tail, np.array(core), far if J > width else None)


def poisson_table(y, tol):
    """Kernel table of ``P(y, .)`` whose discarded mass is below ``tol``."""
    return poisson_family_table(y, tol)


def poisson_l1_norm(y, m, l, tol):
    """``sum_j |delta_right^l d^m/dy^m P(y, j)|`` over all of the lattice.

    The core is summed directly and the two far tails in closed form, so the
    only truncation is that of the asymptotic expansion (checked against
    ``tol``).
    """
    y = _check_y(y)
    m, l = _check_orders(m, l)
    core = _core_row(y, m, l)
    width = (core.size - 1) // 2
    far = _far(y, m, l)
    a, b = _tail_pair(far, width)
    if 8.0 * far.last_term(width + 1) * (width + 1) > tol:
        raise AccuracyError("far-field expansion too short for the requested tol")
    return math.fsum(np.abs(core)) + abs(a) + abs(b)
