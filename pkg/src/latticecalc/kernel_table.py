"""Immutable kernel rows with certified tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import CapacityError

#: rows longer than this are never materialised as one array
MAX_MATERIALIZED = 1 << 23


@dataclass(frozen=True)
class KernelTable:
    """Kernel values at offsets ``-J..J`` plus a bound on the discarded mass.

    Short rows store every value in ``core``. Algebraically decaying rows
    store ``core`` for ``|j| <= core_width`` and an asymptotic ``far_field``
    for ``core_width < |j| <= half_width``, so very wide tables stay cheap.

    Attributes
    ----------
    param : float
        ``t`` for heat kernels, ``y`` for Poisson kernels, ``beta`` otherwise.
    half_width : int
        ``J``.
    kind : str
        ``heat``, ``heat_diff(l)``, ``heat_tderiv(k)``, ``poisson``,
        ``poisson_yderiv(m)``, ...
    tail_bound : float
        Upper bound on ``sum_{|j| > J} |value(j)|``.
    """

    param: float
    half_width: int
    kind: str
    tail_bound: float
    core: np.ndarray = field(repr=False)
    far_field: object = field(default=None, repr=False)

    def __post_init__(self):
        self.core.setflags(write=False)

    @property
    def core_width(self):
        return (self.core.size - 1) // 2

    def value(self, j):
        j = int(j)
        if abs(j) > self.half_width:
            return 0.0
        if abs(j) <= self.core_width:
            return float(self.core[j + self.core_width])
        return float(self.far_field(float(j)))

    def values_on(self, lo, hi):
        """Values for offsets ``lo..hi`` (zero outside ``[-J, J]``)."""
        j = np.arange(int(lo), int(hi) + 1)
        out = np.zeros(j.size)
        inside = np.abs(j) <= self.half_width
        near = np.abs(j) <= self.core_width
        out[near] = self.core[j[near] + self.core_width]
        far = inside & ~near
        if far.any():
            out[far] = self.far_field(j[far].astype(float))
        return out

    @property
    def values(self):
        """All ``2J + 1`` values as one read-only array."""
        if self.half_width == self.core_width:
            return self.core
        if 2 * self.half_width + 1 > MAX_MATERIALIZED:
            raise CapacityError(
                f"table of half-width {self.half_width} is too wide to materialise; use values_on"
            )
        out = self.values_on(-self.half_width, self.half_width)
        out.setflags(write=False)
        return out

    @property
    def offsets(self):
        return np.arange(-self.half_width, self.half_width + 1)

    def _far_power_sums(self, lo, hi):
        """Exact ``sum_{lo <= j <= hi} j^(-p)`` weights applied to the far field."""
        total_pos = total_neg = 0.0
        for p, a in enumerate(self.far_field.coeffs):
            if p < 2 or a == 0.0:
                continue
            piece = special.zeta(p, lo) - special.zeta(p, hi + 1.0)
            total_pos += a * piece
            total_neg += a * (-1) ** p * piece
        return total_pos, total_neg

    def total(self):
        """Sum of all stored values."""
        s = math.fsum(self.core)
        if self.half_width > self.core_width:
            pos, neg = self._far_power_sums(self.core_width + 1.0, float(self.half_width))
            s += pos + neg
        return s

    def abs_total(self):
        """Sum of ``|value|``; the far field has a fixed sign on each side."""
        s = math.fsum(np.abs(self.core))
        if self.half_width > self.core_width:
            pos, neg = self._far_power_sums(self.core_width + 1.0, float(self.half_width))
            s += abs(pos) + abs(neg)
        return s

    def moment(self, power):
        """``sum_j j**power * value(j)`` over the core (heat tables only)."""
        j = np.arange(-self.core_width, self.core_width + 1, dtype=float)
        return math.fsum(j ** power * self.core)

    def csv_rows(self, lo=None, hi=None):
        """Rows ``(param, kind, j, value, tail_bound)``."""
        lo = -self.half_width if lo is None else max(lo, -self.half_width)
        hi = self.half_width if hi is None else min(hi, self.half_width)
        if hi - lo + 1 > MAX_MATERIALIZED:
            raise CapacityError("requested CSV range is too wide; pass a smaller range")
        vals = self.values_on(lo, hi)
        for j, v in zip(range(lo, hi + 1), vals):
            yield (self.param, self.kind, j, float(v), self.tail_bound)
