"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run all of them with::

    python -m pytest tests/test_acceptance.py -v

or as a script, which prints only the summary lines::

    python tests/test_acceptance.py [NUMBER ...]

Each criterion returns ``(passed, detail)``; the pytest wrapper prints the
line and then asserts. Tolerances are fixed here and are never loosened to
make a criterion pass.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import tempfile
import time

import numpy as np
import pytest
from scipy.signal import fftconvolve

from latticecalc import bessel_core as bc
from latticecalc import heat_kernel as hk
from latticecalc import lattice_fn as lf
from latticecalc import operators as ops
from latticecalc import poisson_kernel as pk
from latticecalc import regularity as reg

CRITERIA = {}

LEMMA_IDS = ("Lemma3.1", "Remark1", "pointbessel", "heatbounds", "remheatbounds", "kernelest",
             "Remkernelest", "Poissonlema", "Poissonest", "RemPoissonest", "obs", "semigroupP",
             "decay", "subirk", "cambioyx", "sizeCalpha", "sequeda")


def criterion(number, title):
    def register(fn):
        CRITERIA[number] = (title, fn)
        return fn

    return register


def _slope(xs, ys):
    return reg.fit_power_law(np.asarray(xs, dtype=float), np.abs(np.asarray(ys, dtype=float)))[0]


def _worst(items):
    """``(all ok, text)`` from ``(label, value, limit)`` triples checked as ``value <= limit``."""
    ok = all(v <= lim for _, v, lim in items)
    bad = [f"{lab}: {v:.3g} > {lim:g}" for lab, v, lim in items if not v <= lim]
    top = max(items, key=lambda x: x[1] / x[2] if x[2] else x[1])
    return ok, "; ".join(bad) if bad else f"worst {top[0]}: {top[1]:.3g} (limit {top[2]:g})"


def _slopes(items, tolerance):
    """``(label, slope, expected)`` triples checked as ``|slope - expected| <= tolerance``."""
    return _worst([(f"{lab} slope {s:.4f} vs {e:g}", abs(s - e), tolerance) for lab, s, e in items])


# --------------------------------------------------------------------------

@criterion(1, "mass and second moment of heat tables")
def c1():
    tol = 1e-10
    items = []
    for t in (0.01, 1.0, 100.0, 1e4):
        table = hk.heat_table(t, tol)
        items.append((f"mass t={t:g}", abs(table.total() - 1.0), tol + 1e-12))
        items.append((f"moment t={t:g}", abs(table.moment(2) / (2 * t) - 1.0), 1e-6))
    return _worst(items)


@criterion(2, "heat and Poisson semigroup identities")
def c2():
    items = []
    for t in (0.5, 1.0, 4.0):
        for s in (0.5, 1.0, 4.0):
            a, b, c = (hk.heat_table(x, 1e-13) for x in (t, s, t + s))
            conv = fftconvolve(a.values, b.values)
            J = (conv.size - 1) // 2
            items.append((f"heat t={t:g},s={s:g}", float(np.max(np.abs(conv - c.values_on(-J, J)))), 1e-10))
    J, window = 1 << 13, 50
    for y1 in (0.5, 1.0, 5.0):
        for y2 in (0.5, 1.0, 5.0):
            a = pk.poisson_row(y1, J)
            b = pk.poisson_row(y2, J)
            conv = fftconvolve(a, b)[2 * J - window: 2 * J + window + 1]
            ref = pk.poisson_row(y1 + y2, window)
            items.append((f"poisson y={y1:g}+{y2:g}", float(np.max(np.abs(conv - ref))), 1e-8))
    return _worst(items)


@criterion(3, "heat and Poisson equation residuals")
def c3():
    items = []
    h = 1e-4
    exact = fd = 0.0
    for t in (0.5, 1.0, 5.0, 20.0):
        for n in range(-50, 51):
            lap = hk.heat_kernel(t, n + 1) - 2 * hk.heat_kernel(t, n) + hk.heat_kernel(t, n - 1)
            dt = hk.heat_tderiv(t, n, 1)
            exact = max(exact, abs(dt - lap))
            fd = max(fd, abs(dt - (hk.heat_kernel(t + h, n) - hk.heat_kernel(t - h, n)) / (2 * h)))
    items.append(("heat d/dt vs Laplacian", exact, 1e-15))
    items.append(("heat d/dt vs finite difference", fd, 1e-6))
    poisson = 0.0
    for y in (0.5, 1.0, 5.0, 20.0):
        row = pk.poisson_row(y, 51)
        lap = row[2:] - 2 * row[1:-1] + row[:-2]
        poisson = max(poisson, float(np.max(np.abs(pk.poisson_row(y, 50, m=2) + lap))))
    items.append(("poisson d2/dy2 + Laplacian", poisson, 1e-8))
    return _worst(items)


@criterion(4, "l1 decay slopes of heat and Poisson kernels")
def c4():
    ts = reg.geometric_grid(10, 1e4, 12)
    ys = reg.geometric_grid(10, 1e3, 12)
    items = [(f"heat l={l}", _slope(ts, [hk.heat_l1_diff_norm(t, l, 1e-10) for t in ts]), -l / 2)
             for l in (1, 2, 3, 4)]
    items += [(f"poisson d/dy^{m}", _slope(ys, [pk.poisson_l1_norm(y, m, 0, 1e-10) for y in ys]), -m)
              for m in (1, 2, 3)]
    items += [(f"poisson delta^{l}", _slope(ys, [pk.poisson_l1_norm(y, 0, l, 1e-10) for y in ys]), -l)
              for l in (1, 2)]
    # symmetric second difference P(j+1) - 2P(j) + P(j-1); its tail beyond J is O(y / J^3)
    sym = []
    for y in ys:
        row = pk.poisson_row(y, 4 * pk.core_width(y))
        sym.append(float(np.sum(np.abs(row[2:] - 2 * row[1:-1] + row[:-2]))))
    items.append(("poisson second difference", _slope(ys, sym), -2))
    return _slopes(items, 0.05)


@criterion(5, "pointwise slopes of heat-kernel differences")
def c5():
    ts = reg.geometric_grid(1e2, 1e5, 12)
    items = []
    for n in (0, 1, 2):
        for l in (1, 2, 3, 4):
            expected = -((l + 1) // 2 + 0.5)
            items.append((f"n={n},l={l}", _slope(ts, [hk.heat_diff(t, n, l) for t in ts]), expected))
    return _slopes(items, 0.05)


@criterion(6, "fractional kernels: stencil, zero sum, decay, closed form")
def c6():
    items = []
    stencil = [ops.frac_kernel_pos(1, n) for n in range(-3, 4)]
    items.append(("K_1 stencil", float(np.max(np.abs(np.array(stencil) - [0, 0, -1, 2, -1, 0, 0]))), 0.0))
    for beta in (0.3, 0.5, 0.7, 1.5):
        items.append((f"sum K_{beta}", abs(ops.frac_kernel_sum(beta, 1024)[1]), 1e-4))
    ns = np.unique(np.geomspace(10, 1000, 24).astype(int))
    for beta in (0.3, 0.5, 0.7, 1.5):
        s = _slope(ns, ops.frac_kernel_pos(beta, ns))
        items.append((f"slope K_{beta} = {s:.4f}", abs(s + 1 + 2 * beta), 0.05))
    for beta in (0.1, 0.25, 0.4):
        rel = max(abs(ops.frac_kernel_neg_quadrature(beta, n) / ops.frac_kernel_neg(beta, n) - 1)
                  for n in (0, 1, 3, 10, 100))
        items.append((f"K_-{beta} quadrature", rel, 1e-8))
        s = _slope(ns, ops.frac_kernel_neg(beta, ns))
        items.append((f"slope K_-{beta} = {s:.4f}", abs(s + 1 - 2 * beta), 0.02))
    return _worst(items)


@criterion(7, "route equivalence and spectral compositions")
def c7():
    items = []
    ns = np.arange(-10, 11)
    for beta in (0.5, 1.5):
        for f in (lf.unit_impulse(), lf.truncated(lf.abs_pow(3.2), 20)):
            kernel = ops.frac_laplacian_pos(f, beta, ns, 1e-8)
            semigroup = ops.frac_laplacian_pos_semigroup(f, beta, ns, 1e-8)
            items.append((f"beta={beta} {f.name}", float(np.max(np.abs(kernel - semigroup))), 1e-5))
    impulse = (ns == 0).astype(float)
    stencil = np.where(ns == 0, 2.0, np.where(np.abs(ns) == 1, -1.0, 0.0))
    half = ops.kernel_function(ops.FracKernel(0.5, "+"))
    items.append(("(-L)^1/2 (-L)^1/2 delta", float(np.max(np.abs(ops.frac_laplacian_pos(half, 0.5, ns) - stencil))), 1e-5))
    for beta in (0.2, 0.4):
        g = ops.image_of_finite(lf.unit_impulse(), "frac_neg", beta)
        items.append((f"(-L)^{beta} (-L)^-{beta} delta",
                      float(np.max(np.abs(ops.frac_laplacian_pos(g, beta, ns) - impulse))), 1e-5))
    d = lf.unit_impulse()
    for beta in (0.5, 1.5, -0.25):
        oracle = np.array([ops.spectral_oracle(d, ops.Symbol("frac", beta), int(n)) for n in ns])
        kern = ops.frac_kernel_pos(beta, ns) if beta > 0 else ops.frac_kernel_neg(-beta, ns)
        items.append((f"oracle vs kernel beta={beta}", float(np.max(np.abs(oracle - kern))), 1e-5))
    return _worst(items)


@criterion(8, "Gamma-formula identity for the Bessel power integral")
def c8():
    items = []
    for n in (1, 3, 6):
        for gamma in (-0.25, 0.3, 0.75):
            quad, closed = bc.int_fract_bessel_check(n, gamma, 1.0)
            items.append((f"n={n},gamma={gamma}", abs(quad / closed - 1.0), 1e-6))
    return _worst(items)


@criterion(9, "coefficient recurrence equals the closed form")
def c9():
    table = bc.q_coeffs(12)
    bad = [(k, j) for j in range(13) for k in range(j + 1)
           if not isinstance(table.entry(k, j), int) or table.entry(k, j) != table.closed_form(k, j)]
    return not bad, f"mismatches at {bad}" if bad else "all 91 entries are equal integers"


@criterion(10, "three-channel characterisation of |n|^alpha")
def c10():
    items = []
    for alpha in (0.3, 0.5, 0.8, 1.3, 1.7):
        report = reg.characterize(lf.abs_pow(alpha))
        est = report["estimates"]
        gap = max(est.values()) - min(est.values()) if len(est) == 3 else math.inf
        items.append((f"alpha={alpha} gap " + ",".join(f"{v:.3f}" for v in est.values()), gap, 0.1))
    f = lf.abs_pow(1.0)
    heat = reg.heat_exponent_fit(f, 1).alpha_hat
    poisson = reg.poisson_exponent_fit(f, 2).alpha_hat
    items.append((f"|n| heat {heat:.4f}", abs(heat - 1.0), 0.07))
    items.append((f"|n| poisson {poisson:.4f}", abs(poisson - 1.0), 0.07))
    z = [reg.zygmund_seminorm(f, 1, w).value for w in (16, 32, 64)]
    items.append((f"Z1 seminorm {z}", max(abs(v - 2.0) for v in z), 0.0))
    return _worst(items)


@criterion(11, "regularity shifts of fractional powers and Bessel potentials")
def c11():
    runs = [
        (lf.rademacher(7), "bessel_potential", 0.6),
        (lf.damped_pow(0.4, 2e4, 2), "frac_neg", 0.2),
        (lf.damped_pow(0.8, 1e4), "frac_pos", 0.25),
    ]
    items = []
    for f, op, beta in runs:
        r = reg.regularity_shift_experiment(f, op, beta)
        label = (f"{op}({beta}) on {f.name}: {r['alpha_hat_before']:.3f} -> {r['alpha_hat_after']:.3f}, "
                 f"shift {r['observed_shift']:+.3f} vs {r['predicted_shift']:+.2f}")
        items.append((label, abs(r["observed_shift"] - r["predicted_shift"]), 0.1))
    ok, _ = _worst(items)
    return ok, " | ".join(f"{'ok' if v <= lim else 'MISS'} {lab}" for lab, v, lim in items)


@criterion(12, "lemma harness with the default configuration")
def c12():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "report.json")
        proc = subprocess.run([sys.executable, "-m", "latticecalc", "verify", "--lemmas", "all", "--report", out],
                              capture_output=True, text=True, timeout=600)
        with open(out, encoding="utf-8") as fh:
            report = json.load(fh)
    problems = []
    if proc.returncode != 0:
        failed = [k for k, v in report["lemmas"].items() if not v["passed"]]
        problems.append(f"exit {proc.returncode}, failing: {', '.join(failed)}")
    if not report.get("schema", "").endswith("v1"):
        problems.append("unversioned report")
    missing = [i for i in LEMMA_IDS if i not in report["lemmas"]]
    if missing:
        problems.append(f"missing ids {missing}")
    checks = [c for v in report["lemmas"].values() for c in v["checks"]]
    if not any("slope" in c for c in checks) or not any("constant_ratio" in c for c in checks):
        problems.append("report lacks slope or constant-ratio fields")
    if not all("passed" in c for c in checks):
        problems.append("a check lacks its pass flag")
    return not problems, "; ".join(problems) or f"{len(LEMMA_IDS)} lemmas, {len(checks)} checks, exit 0"


# --------------------------------------------------------------------------

def run_criterion(number):
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # an exception is a failure of the criterion
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} ({title}) [{elapsed:.1f}s]: {detail}"
    return ok, line, elapsed


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line, elapsed = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    assert elapsed <= 120.0, f"criterion {number} exceeded 2 minutes"
    assert ok, line


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    results = [run_criterion(n) for n in wanted]
    for _, line, _ in results:
        print(line)
    print(f"{sum(r[0] for r in results)}/{len(results)} criteria passed, {sum(r[2] for r in results):.0f}s total")
    sys.exit(0 if all(r[0] for r in results) else 1)
