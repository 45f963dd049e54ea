"""Real functions on the integers, difference calculus and summability checks."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ContractError, DomainError

MAX_MIXED_ORDER = 8
CONVERGENCE_RTOL = 1e-6


@dataclass(frozen=True)
class LatticeFunction:
    """A function ``f: Z -> R`` with growth metadata.

    Attributes
    ----------
    name : str
        Spec string that rebuilds the function (``abs_pow:0.5``, ...).
    rule : callable
        Vectorised evaluator on integer arrays.
    growth_exponent : float or None
        ``alpha`` with ``|f(n)| <= growth_constant * (1 + |n|^alpha)`` everywhere.
    growth_constant : float or None
        Constant of that bound; exact for generators, sampled for tables.
    tail_power : float or None
        ``gamma`` when ``f`` has a smooth power-law tail ``|n|^gamma (a + b/n + ...)``
        on each side; ``-inf`` for finite support; ``None`` when unknown.
    support : int or None
        Radius of the support when finite.
    extension : str or None
        Extension policy of table-backed functions.
    asymptotic_from : float
        Radius beyond which the tail expansion behind ``tail_power`` is accurate.
    """

    name: str
    rule: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    growth_exponent: float | None = None
    growth_constant: float | None = None
    tail_power: float | None = None
    support: int | None = None
    extension: str | None = None
    asymptotic_from: float = 0.0

    def __call__(self, n):
        if np.ndim(n) == 0:
            return float(self.rule(np.array([int(n)], dtype=np.int64))[0])
        return np.asarray(self.rule(np.asarray(n, dtype=np.int64)), dtype=float)

    def values(self, lo, hi):
        """Values on ``lo..hi`` inclusive."""
        return self(np.arange(int(lo), int(hi) + 1, dtype=np.int64))

    def scaled(self, c):
        c = float(c)
        gc = None if self.growth_constant is None else abs(c) * self.growth_constant
        return replace(self, name=f"{c}*{self.name}", rule=lambda n: c * self.rule(n), growth_constant=gc)


# --------------------------------------------------------------------------
# generators

def abs_pow(alpha):
    alpha = float(alpha)
    if alpha < 0:
        raise DomainError("abs_pow exponent must be nonnegative")
    return LatticeFunction(f"abs_pow:{alpha:g}", lambda n: np.abs(n).astype(float) ** alpha,
                           alpha, 1.0, alpha)


def linear():
    return LatticeFunction("linear", lambda n: n.astype(float), 1.0, 1.0, 1.0)


def constant(c=1.0):
    c = float(c)
    return LatticeFunction(f"constant:{c:g}", lambda n: np.full(n.shape, c), 0.0, abs(c), 0.0)


def unit_impulse(at=0):
    at = int(at)
    return LatticeFunction(f"delta:{at}", lambda n: (n == at).astype(float), 0.0, 1.0, -math.inf,
                           support=abs(at))


def damped_pow(alpha, length, power=1):
    """``|n|^alpha / (1 + |n| / length)^power``.

    Behaves like ``|n|^alpha`` for ``|n| << length`` and has tail ``|n|^(alpha - power)``.
    """
    alpha, length, power = float(alpha), float(length), int(power)
    if alpha < 0 or length <= 0 or power < 1:
        raise DomainError("damped_pow needs alpha >= 0, length > 0 and an integer power >= 1")

    def rule(n):
        a = np.abs(n).astype(float)
        return a ** alpha / (1.0 + a / length) ** power

    name = f"damped_pow:{alpha:g}:{length:g}" + ("" if power == 1 else f":{power}")
    return LatticeFunction(name, rule, alpha, 1.0, alpha - power, asymptotic_from=length)


def rademacher(seed):
    """Random signs, constant on each dyadic shell ``2^k <= |n| < 2^(k+1)``.

    Each side of the origin gets its own sign sequence. Bounded, with a jump
    at every dyadic scale where neighbouring shells differ.
    """
    rng = np.random.default_rng(int(seed))
    pos = rng.choice([-1.0, 1.0], size=64)
    neg = rng.choice([-1.0, 1.0], size=64)
    origin = float(rng.choice([-1.0, 1.0]))

    def rule(n):
        a = np.abs(n)
        shell = np.frexp(np.maximum(a, 1).astype(float))[1] - 1
        out = np.where(n > 0, pos[shell], neg[shell])
        return np.where(n == 0, origin, out)

    return LatticeFunction(f"rademacher:{int(seed)}", rule, 0.0, 1.0, None)


ZYGMUND_TERMS = 100


def zygmund_w():
    """``sum_{k>=1} 2^k (cos(n / 2^k) - 1)``: second differences ``O(h)``, first differences unbounded."""
    scales = 2.0 ** np.arange(1, ZYGMUND_TERMS + 1)

    def rule(n):
        x = n.astype(float)[..., None]
        return -np.sum(2.0 * scales * np.sin(x / (2.0 * scales)) ** 2, axis=-1)

    return LatticeFunction("zygmund_w", rule, 1.0, 4.0, None)


def truncated(f, radius):
    """``f`` on ``|n| <= radius`` and zero outside."""
    radius = int(radius)
    inner = f.values(-radius, radius)
    bound = float(np.max(np.abs(inner))) if inner.size else 0.0

    def rule(n):
        return np.where(np.abs(n) <= radius, f.rule(np.clip(n, -radius, radius)), 0.0)

    return LatticeFunction(f"trunc:{radius}:{f.name}", rule, 0.0, bound, -math.inf, support=radius)


def from_table(values, lo, extension="zero", alpha=None, name=None):
    """Table-backed function on ``lo..lo+len(values)-1``.

    ``extension`` is ``zero``, ``clamp`` or ``power_growth``; the last one
    continues each end as ``f(edge) * (|n| / |edge|)^alpha``.
    """
    vals = np.array(values, dtype=float)
    lo = int(lo)
    hi = lo + vals.size - 1
    if extension not in ("zero", "clamp", "power_growth"):
        raise DomainError(f"unknown extension policy {extension!r}")
    if extension == "power_growth":
        if alpha is None or alpha <= 0 or lo >= 0 or hi <= 0:
            raise DomainError("power_growth needs alpha > 0 and a window straddling 0")
        alpha = float(alpha)

    def rule(n):
        idx = np.clip(n - lo, 0, vals.size - 1)
        out = vals[idx]
        if extension == "zero":
            return np.where((n < lo) | (n > hi), 0.0, out)
        if extension == "clamp":
            return out
        right = vals[-1] * (np.abs(n) / hi) ** alpha
        left = vals[0] * (np.abs(n) / -lo) ** alpha
        return np.where(n > hi, right, np.where(n < lo, left, out))

    if name is None:
        name = f"table:{hashlib.sha1(vals.tobytes()).hexdigest()[:12]}:{lo}"
    n = np.arange(lo, hi + 1)
    if extension == "power_growth":
        ratio = np.abs(vals) / (1.0 + np.abs(n) ** alpha)
        edge = max(abs(vals[0]) / (-lo) ** alpha, abs(vals[-1]) / hi ** alpha)
        gexp, gconst, tail, support = alpha, float(max(ratio.max(), edge)), alpha, None
    else:
        gexp, gconst = 0.0, float(np.max(np.abs(vals)))
        tail = -math.inf if extension == "zero" else 0.0
        support = max(abs(lo), abs(hi)) if extension == "zero" else None
    return LatticeFunction(name, rule, gexp, gconst, tail, support, extension)


def snapshot(f, radius, extension="power_growth", alpha=None):
    """Table copy of ``f`` on ``[-radius, radius]`` with the given extension."""
    if extension == "power_growth" and alpha is None:
        alpha = f.growth_exponent
    return from_table(f.values(-radius, radius), -radius, extension, alpha,
                      name=f"snapshot:{radius}:{extension}:{f.name}")


def from_csv(path, extension="zero", alpha=None):
    """Load ``n,value`` rows (header optional) covering a contiguous range."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().lower() == "n":
                continue
            rows.append((int(rec[0]), float(rec[1])))
    if not rows:
        raise DomainError(f"{path}: no data rows")
    rows.sort()
    ns = [r[0] for r in rows]
    if ns != list(range(ns[0], ns[-1] + 1)):
        raise DomainError(f"{path}: rows must cover a contiguous range of n")
    return from_table([r[1] for r in rows], ns[0], extension, alpha, name=f"csv:{path}")


def parse_function(spec):
    """Build a function from its spec string.

    Accepted forms: ``abs_pow:A``, ``linear``, ``constant[:C]``, ``delta[:AT]``,
    ``rademacher:SEED``, ``zygmund_w``, ``damped_pow:A:L[:Q]``, ``trunc:R:<spec>``,
    ``csv:PATH[:EXTENSION[:ALPHA]]``.
    """
    head, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if head == "abs_pow":
            return abs_pow(float(args[0]))
        if head == "linear":
            return linear()
        if head == "constant":
            return constant(float(args[0]) if args else 1.0)
        if head == "delta":
            return unit_impulse(int(args[0]) if args else 0)
        if head == "rademacher":
            return rademacher(int(args[0]) if args else 0)
        if head == "zygmund_w":
            return zygmund_w()
        if head == "damped_pow":
            return damped_pow(float(args[0]), float(args[1]), int(args[2]) if len(args) > 2 else 1)
        if head == "trunc":
            radius, _, inner = rest.partition(":")
            return truncated(parse_function(inner), int(radius))
        if head == "csv":
            path = args[0]
            ext = args[1] if len(args) > 1 else "zero"
            alpha = float(args[2]) if len(args) > 2 else None
            return from_csv(path, ext, alpha)
    except (IndexError, ValueError) as exc:
        raise DomainError(f"malformed function spec {spec!r}: {exc}") from None
    raise DomainError(f"unknown function spec {spec!r}")


# --------------------------------------------------------------------------
# differences

def _side_stencil(order):
    return np.array([math.comb(order, i) * (-1) ** i for i in range(order + 1)], dtype=float)


def delta(f, side, n):
    """``f(n) - f(n+1)`` for ``side='right'``, ``f(n) - f(n-1)`` for ``side='left'``."""
    if side == "right":
        return f(n) - f(np.asarray(n) + 1)
    if side == "left":
        return f(n) - f(np.asarray(n) - 1)
    raise DomainError(f"side must be 'right' or 'left', got {side!r}")


def mixed_stencil(l, s):
    """Offsets and weights of ``delta_right^l delta_left^s``."""
    if min(l, s) < 0 or l + s > MAX_MIXED_ORDER:
        raise DomainError(f"need l, s >= 0 and l + s <= {MAX_MIXED_ORDER}")
    weights = np.convolve(_side_stencil(l), _side_stencil(s)[::-1])
    offsets = np.arange(-s, l + 1)
    return offsets, weights


def mixed_diff(f, l, s, n):
    """``delta_right^l delta_left^s f(n)`` (the two commute)."""
    offsets, weights = mixed_stencil(int(l), int(s))
    n = np.asarray(n, dtype=np.int64)
    vals = f(n[..., None] + offsets)
    out = np.asarray(vals) @ weights
    return float(out) if out.ndim == 0 else out


def mixed_diff_values(values, l, s):
    """Apply ``delta_right^l delta_left^s`` to samples; output loses ``l + s`` points."""
    _, weights = mixed_stencil(int(l), int(s))
    return np.correlate(np.asarray(values, dtype=float), weights, mode="valid")


def discrete_laplacian(f, n):
    """``f(n+1) - 2 f(n) + f(n-1)``."""
    n = np.asarray(n, dtype=np.int64)
    out = f(n + 1) - 2.0 * f(n) + f(n - 1)
    return float(out) if np.ndim(out) == 0 else out


def differenced(f, l, s=0):
    """The function ``n -> delta_right^l delta_left^s f(n)`` as a new LatticeFunction."""
    offsets, weights = mixed_stencil(int(l), int(s))

    def rule(n):
        return f.rule(n[..., None] + offsets) @ weights

    gexp = None if f.growth_exponent is None else f.growth_exponent
    const = None if f.growth_constant is None else f.growth_constant * float(np.sum(np.abs(weights))) * 2.0 ** (gexp or 0)
    tail = None if f.tail_power is None else (f.tail_power - (l + s) if f.tail_power != -math.inf else -math.inf)
    support = None if f.support is None else f.support + max(l, s)
    return LatticeFunction(f"diff({l},{s}):{f.name}", rule, gexp, const, tail, support, f.extension)


# --------------------------------------------------------------------------
# summability and growth

@dataclass(frozen=True)
class WeightedNormReport:
    """Partial sums of ``sum_m |f(m)| / (1+|m|)^(1 +- 2 beta)`` over doubling windows.

    ``converged`` is true when the tail-extrapolated sums of the last
    doublings agree to ``1e-6`` relative. ``history`` holds ``(N, partial_sum)``.
    """

    beta: float
    sign: str
    partial_sum: float
    window: int
    tail_estimate: float
    converged: bool
    history: tuple = ()

    def to_dict(self):
        return {"beta": self.beta, "sign": self.sign, "partial_sum": self.partial_sum,
                "window": self.window, "tail_estimate": self.tail_estimate,
                "converged": self.converged, "history": [list(h) for h in self.history]}


def _weight_power(beta, sign):
    beta = float(beta)
    if sign == "+":
        if not beta > 0:
            raise DomainError("sign '+' needs beta > 0")
        return 1.0 + 2.0 * beta
    if sign == "-":
        if not 0 < beta < 0.5:
            raise DomainError("sign '-' needs 0 < beta < 1/2")
        return 1.0 - 2.0 * beta
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def _extrapolate(sums, e0):
    """Richardson limit of partial sums at doubling windows with tail ``N^e0, N^(e0-1), ...``."""
    table = list(sums)
    for level in range(len(sums) - 1):
        factor = 2.0 ** (e0 - level)
        table = [(b - factor * a) / (1.0 - factor) for a, b in zip(table[:-1], table[1:])]
    return table[-1]


def _converged(f, power, history):
    """``(converged, tail)`` from the doubling partial sums seen so far."""
    sums = [h[1] for h in history]
    if len(sums) < 6:
        return False, math.inf
    incr = np.diff(sums)
    if incr[-1] <= 4.0 * np.finfo(float).eps * abs(sums[-1]):
        return True, 0.0
    if not (incr[-2] > 0 and incr[-1] > 0 and incr[-3] > 0):
        return False, math.inf
    e_data = math.log2(incr[-1] / incr[-2])
    if f.tail_power is not None and math.isfinite(f.tail_power):
        # declared tail |f| ~ |m|^gamma fixes the increment exponent exactly
        e0 = f.tail_power + 1.0 - power
        plausible = abs(e0 - e_data) < 0.1
    else:
        e0 = e_data
        plausible = abs(e0 - math.log2(incr[-2] / incr[-3])) < 0.1
    if e0 < -0.05 and plausible:
        last = _extrapolate(sums[-4:], e0)
        before = _extrapolate(sums[-5:-1], e0)
        if abs(last - before) < CONVERGENCE_RTOL * max(abs(last), 1e-300):
            return True, last - sums[-1]
    return False, math.inf


@lru_cache(maxsize=256)
def weighted_sum_report(f, power, N_max=1 << 22, N_start=64, label=(0.0, "+")):
    """Doubling partial sums of ``sum |f(m)| / (1+|m|)^power`` with tail extrapolation.

    The decay exponent of the increments comes from the declared tail power
    of ``f`` when available and from the last windows otherwise; when it is
    clearly negative the tail is removed by Richardson
    extrapolation, and the series counts as convergent once two successive
    extrapolants agree to ``1e-6`` relative.
    """
    N_max = int(N_max)
    if N_max < 16 * N_start:
        raise DomainError(f"N_max must be at least {16 * N_start}")
    chunk = 1 << 20
    first = np.arange(-N_start, N_start + 1)
    total = math.fsum(np.abs(f(first)) / (1.0 + np.abs(first)) ** power)
    history = [(N_start, total)]
    N = N_start
    converged, tail = _converged(f, power, history)
    while not converged and N < N_max:
        nxt = min(2 * N, N_max)
        acc = 0.0
        for a in range(N + 1, nxt + 1, chunk):
            m = np.arange(a, min(a + chunk, nxt + 1), dtype=np.int64)
            w = (1.0 + m) ** (-power)
            acc += math.fsum(np.abs(f(m)) * w) + math.fsum(np.abs(f(-m)) * w)
        total += acc
        N = nxt
        history.append((N, total))
        converged, tail = _converged(f, power, history)
    beta, sign = label
    return WeightedNormReport(beta, sign, total, N, tail, converged, tuple(history))


def weighted_norm(f, beta, sign, N_max=1 << 22):
    """Membership data for the weighted class ``l_{+beta}`` or ``l_{-beta}``."""
    power = _weight_power(beta, sign)
    return weighted_sum_report(f, power, N_max, label=(float(beta), sign))


def require_weighted(f, power, what):
    """Raise :class:`ContractError` unless ``sum |f| / (1+|m|)^power`` converges."""
    if f.support is not None:
        return None
    rep = weighted_sum_report(f, power)
    if not rep.converged:
        raise ContractError(f"{what}: sum |f(m)|/(1+|m|)^{power:g} does not converge for {f.name}")
    return rep


def growth_certificate(f, alpha, N):
    """``sup_{|n| <= N} |f(n)| / (1 + |n|^alpha)``."""
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    n = np.arange(-int(N), int(N) + 1)
    return float(np.max(np.abs(f(n)) / (1.0 + np.abs(n).astype(float) ** alpha)))
