"""Time the compiled and pure-Python kernels on the same inputs.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the environment switch is not
needed here. Results are printed as a table of best-of-N wall times and the
speedup of the compiled version; the outputs are also compared.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from latticecalc import _pykernels

try:
    from latticecalc import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    J = 4096
    kernel = rng.standard_normal(2 * J + 1)
    fwin = rng.standard_normal(2 * J + 512)
    centers = np.arange(J, J + 256, dtype=np.int64)
    levels = np.array([512, 1024, 2048, 4096], dtype=np.int64)
    return [
        ("scaled_series(n=40, t=25)", "scaled_series", (40, 25.0)),
        ("series_row(t=20, n_max=200)", "series_row", (20.0, 200)),
        ("miller_row(t=5e3, n_max=2000)", "miller_row", (5e3, 2000)),
        ("heat_diff_trapezoid(t=1e4, l=4)", "heat_diff_trapezoid", (1e4, 3, 4, 1700)),
        ("partial_sums(256 pts, J=4096)", "partial_sums", (kernel, fwin, centers, levels)),
    ]


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the Python timings are shown", file=sys.stderr)
    print(f"{'case':36s} {'python':>12s} {'cython':>12s} {'speedup':>9s} {'max |diff|':>11s}")
    for label, name, fargs in cases():
        py = best_time(getattr(_pykernels, name), fargs, args.repeat)
        if _ckernels is None:
            print(f"{label:36s} {py * 1e6:10.1f}us {'-':>12s} {'-':>9s} {'-':>11s}")
            continue
        cy = best_time(getattr(_ckernels, name), fargs, args.repeat)
        diff = np.max(np.abs(np.asarray(getattr(_pykernels, name)(*fargs))
                             - np.asarray(getattr(_ckernels, name)(*fargs))))
        print(f"{label:36s} {py * 1e6:10.1f}us {cy * 1e6:10.1f}us {py / cy:8.1f}x {diff:11.2e}")


if __name__ == "__main__":
    main()
