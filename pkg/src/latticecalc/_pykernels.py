"""Pure-Python versions of the compiled hot loops.

Used when the extension is not built. Results agree with ``_ckernels`` to
rounding; the benchmark in ``benchmarks/`` compares their speed.
"""

import math

import numpy as np

RESCALE_AT = 1e250
RESCALE_BY = 1e-250


def scaled_series(n, t):
    half = 0.5 * t
    pre = math.exp(-t)
    for i in range(1, n + 1):
        pre *= half / i
        if pre == 0.0:
            return 0.0
    term = total = 1.0
    q = half * half
    for m in range(500):
        term *= q / ((m + 1.0) * (m + n + 1.0))
        total += term
        if term < 1e-17 * total:
            break
    return pre * total


def series_row(t, n_max):
    n = np.arange(n_max + 1, dtype=float)
    half = 0.5 * t
    with np.errstate(under="ignore"):
        pre = math.exp(-t) * np.cumprod(np.concatenate(([1.0], half / n[1:])))
    term = np.ones_like(n)
    total = np.ones_like(n)
    q = half * half
    for m in range(500):
        term *= q / ((m + 1.0) * (m + n + 1.0))
        total += term
        if np.all(term < 1e-17 * total):
            break
    return pre * total


def miller_start(t, n_max):
    return n_max + int(math.ceil(12.0 * math.sqrt(t))) + 40


def miller_row(t, n_max):
    start = miller_start(t, n_max)
    out = np.zeros(n_max + 1)
    upper, cur, total = 0.0, 1e-280, 0.0
    two_over_t = 2.0 / t
    for k in range(start, 0, -1):
        if k <= n_max:
            out[k] = cur
        total += cur
        upper, cur = cur, upper + k * two_over_t * cur
        if cur > RESCALE_AT:
            cur *= RESCALE_BY
            upper *= RESCALE_BY
            total *= RESCALE_BY
            out[k:] *= RESCALE_BY
    out[0] = cur
    return out / (2.0 * total + cur)


def heat_diff_trapezoid(t, n, l, nodes):
    theta = np.arange(nodes) * (2.0 * math.pi / nodes)
    s = np.sin(0.5 * theta)
    vals = (2.0 * s) ** l * np.cos((n + 0.5 * l) * theta - 0.5 * l * math.pi)
    return float(np.sum(vals * np.exp(-4.0 * t * s * s)) / nodes)


def partial_sums(kernel, fwin, centers, levels):
    half = (kernel.shape[0] - 1) // 2
    top = int(levels[-1])
    out = np.empty((centers.shape[0], levels.shape[0]))
    for r, c in enumerate(centers):
        right = kernel[half + 1: half + top + 1] * fwin[c - top: c][::-1]
        left = kernel[half - top: half][::-1] * fwin[c + 1: c + top + 1]
        acc = np.concatenate(([kernel[half] * fwin[c]], right + left))
        out[r] = np.cumsum(acc)[levels]
    return out
