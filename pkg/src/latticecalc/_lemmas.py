"""Numerical checks behind :func:`latticecalc.regularity.verify_lemma_suite`.

Each check sweeps one quantity, fits a slope or an envelope constant and
returns a list of plain dict entries. Failures are data, never exceptions.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, special

from . import bessel_core as bc
from . import heat_kernel as hk
from . import lattice_fn as lf
from . import operators as ops
from . import poisson_kernel as pk
from . import regularity as reg

KERNEL_SLOPE_TOL = 0.05
APPLIED_SLOPE_TOL = 0.1
CONSTANT_STABILITY = 4.0
DOMINATION_STABILITY = 2.0
IDENTITY_TOL = 1e-8
REPORT_SCHEMA = "latticecalc.lemma-report/v1"

DEFAULT_CONFIG = {
    "kernel_tol": 1e-10,
    "tol": 1e-8,
    "sample": "abs_pow:0.5",
    "seed": 20240229,
    "grid_points": 12,
}


# --------------------------------------------------------------------------
# entry builders

def _slope(label, xs, ys, expected, tolerance):
    ys = np.abs(np.asarray(ys, dtype=float))
    if np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        return {"check": label, "kind": "slope", "slope": None, "expected": expected,
                "tolerance": tolerance, "passed": False, "note": "nonpositive sample"}
    slope, _, r2, used = reg.fit_power_law(xs, ys)
    return {"check": label, "kind": "slope", "slope": slope, "expected": expected,
            "tolerance": tolerance, "r_squared": r2, "points": int(np.sum(used)),
            "passed": bool(abs(slope - expected) <= tolerance)}


def _stability(label, constants, limit, sweep):
    c = np.asarray(constants, dtype=float)
    ok = bool(np.all(np.isfinite(c)) and np.all(c > 0))
    ratio = float(c.max() / c.min()) if ok else math.inf
    return {"check": label, "kind": "constant", "constants": [float(x) for x in c],
            "sweep": list(sweep), "constant_ratio": ratio, "limit": limit,
            "passed": bool(ok and ratio < limit)}


def _identity(label, error, tolerance):
    return {"check": label, "kind": "identity", "max_error": float(error),
            "tolerance": tolerance, "passed": bool(error <= tolerance)}


def _monotone(label, sweep, values, strict_ratio=None):
    v = np.abs(np.asarray(values, dtype=float))
    ok = bool(np.all(np.diff(v) < 0))
    if strict_ratio is not None:
        ok = ok and bool(v[-1] <= strict_ratio * v[0])
    return {"check": label, "kind": "monotone", "sweep": list(sweep),
            "values": [float(x) for x in v], "passed": ok}


def _grid(lo, hi, cfg):
    return reg.geometric_grid(lo, hi, int(cfg["grid_points"]))


# --------------------------------------------------------------------------
# Bessel-function identities

def _integral_representation(n, j, t, table):
    """Scaled ``I_n(t) e^{-t}`` from the iterated integral with ``Q_{j-1}``."""
    poly = table.polynomial(j - 1)
    power = n - 0.5 - j

    def integrand(s):
        q = sum(c * (s * t) ** k for k, c in enumerate(poly))
        return math.exp(-t * (s + 1.0)) * s * q / t ** (j - 1)

    with warnings.catch_warnings():
        # the comparison below measures the actual error
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, -1.0, 1.0, weight="alg", wvar=(power, power),
                                epsabs=0.0, epsrel=1e-13, limit=200)
    pref = (-1) ** j * t ** (n - j) / (math.sqrt(math.pi) * 2.0 ** (n - j) * special.gamma(n + 0.5 - j))
    return pref * val


def check_integral_representation(cfg):
    table = bc.q_coeffs(8)
    worst = 0.0
    for n in range(1, 7):
        for j in range(1, n + 1):
            for t in (2.0, 10.0, 40.0):
                exact = bc.bessel_i_scaled(n, t)
                worst = max(worst, abs(_integral_representation(n, j, t, table) - exact) / exact)
    return [_identity("iterated integral vs scaled Bessel, n<=6, t in {2,10,40} (relative)",
                      worst, IDENTITY_TOL)]


def check_coefficients(cfg):
    table = bc.q_coeffs(12)
    bad = [(k, j) for j in range(2, 13) for k in range(1, j)
           if table.entry(k, j) != table.closed_form(k, j)]
    integral = all(isinstance(table.entry(k, j), int) for j in range(13) for k in range(j + 1))
    ends = all(table.entry(0, j) == 1 for j in range(13)) and all(
        table.entry(j, j) == table.entry(j - 1, j) for j in range(1, 13))
    return [_identity("recurrence equals closed form for j <= 12 (mismatches)", len(bad), 0),
            {"check": "integer entries and edge values", "kind": "exact",
             "passed": bool(integral and ends)}]


# --------------------------------------------------------------------------
# heat kernel

def check_pointwise_decay(cfg):
    ts = _grid(1e2, 1e5, cfg)
    out = []
    for n in (0, 1, 2):
        for l in range(1, 5):
            vals = [hk.heat_diff(t, n, l) for t in ts]
            out.append(_slope(f"n={n} l={l}", ts, vals, -((l + 1) // 2 + 0.5), KERNEL_SLOPE_TOL))
    return out


def _full_bound(t, n, l, row, J):
    G = lambda m: row[J + abs(m)]
    lead = sum(((n + 0.5) ** 2 / t) ** (0.5 * l - u) * G(n + l - 2 * u) for u in range(l // 2 + 1))
    rest = G(n) * sum(t ** -u for u in range(l // 2 + 1, l))
    return lead / t ** (0.5 * l) + rest


def check_heat_bounds(cfg):
    sweep = (10.0, 100.0, 1000.0)
    out = []
    for l in range(1, 5):
        consts = []
        for t in sweep:
            top = int(6 * math.sqrt(t)) + 10
            J = top + l + 2
            row = hk.heat_row(t, J)
            ratio = max(abs(hk.heat_diff(t, n, l)) / _full_bound(t, n, l, row, J) for n in range(0, top))
            consts.append(ratio)
        out.append(_stability(f"l={l}, 0 <= n <= 6 sqrt(t)", consts, CONSTANT_STABILITY, sweep))
    return out


def check_domination(cfg):
    sweep = (10.0, 100.0, 1000.0)
    return [_stability(f"l={l}, 1 <= n <= sqrt(t) - 1/2",
                       [float(np.max(hk.domination_ratios(t, l))) for t in sweep],
                       DOMINATION_STABILITY, sweep) for l in range(1, 5)]


def check_l1_decay(cfg):
    ts = _grid(10.0, 1e4, cfg)
    tol = cfg["kernel_tol"]
    out = [_slope(f"l={l}", ts, [hk.heat_l1_diff_norm(t, l, tol) for t in ts], -0.5 * l, KERNEL_SLOPE_TOL)
           for l in range(1, 5)]
    out.append({"check": "t -> 0 branch: norm(t=1e-3, l=3) <= 2^3", "kind": "bound",
                "value": hk.heat_l1_diff_norm(1e-3, 3, tol), "limit": 8.0,
                "passed": bool(hk.heat_l1_diff_norm(1e-3, 3, tol) <= 8.0)})
    return out


def check_time_derivative_norms(cfg):
    ts = _grid(10.0, 1e4, cfg)
    tol = cfg["kernel_tol"]
    out = []
    for k in (1, 2):
        norms = [math.fsum(np.abs(hk.heat_diff_table(t, 0, tol, k=k).core)) for t in ts]
        out.append(_slope(f"k={k}", ts, norms, -float(k), KERNEL_SLOPE_TOL))
        even = [hk.heat_l1_diff_norm(t, 2 * k, tol) for t in ts]
        err = max(abs(a - b) / b for a, b in zip(even, norms))
        out.append(_identity(f"norm of delta^{2 * k} G equals norm of d^{k}/dt^{k} G (relative)", err, 1e-9))
    return out


# --------------------------------------------------------------------------
# Poisson kernel

def check_poisson_envelopes(cfg):
    sweep = (1.0, 10.0, 100.0)
    out = []
    for l in range(3):
        consts = {key: [] for key in ("i", "ii", "iii", "iv")}
        for y in sweep:
            J = int(40 * y) + 64
            j = np.arange(-J, J + 1, dtype=float)
            base = np.abs(pk.poisson_row(y, J, m=l))
            diff = np.abs(pk.poisson_row(y, J, m=l, l=1))
            off = j != 0
            consts["i"].append(np.max(base * y ** l * (1 + np.abs(j))))
            consts["ii"].append(np.max(base[off] * y ** (l - 1) * j[off] ** 2))
            consts["iii"].append(np.max(diff * y ** (l + 2)))
            consts["iv"].append(np.max(diff[off] * y ** l * j[off] ** 2))
        for key, vals in consts.items():
            out.append(_stability(f"({key}) l={l}", vals, CONSTANT_STABILITY, sweep))
    return out


def check_poisson_l1(cfg):
    ys = _grid(10.0, 1e3, cfg)
    tol = cfg["kernel_tol"]
    out = [_slope(f"d^{m}/dy^{m}", ys, [pk.poisson_l1_norm(y, m, 0, tol) for y in ys], -float(m),
                  KERNEL_SLOPE_TOL) for m in range(1, 4)]
    mass = [pk.poisson_l1_norm(y, 0, 0, tol) for y in ys]
    out.insert(0, _identity("m=0: norm equals 1 for every y", max(abs(v - 1.0) for v in mass), 1e-8))
    out += [_slope(f"delta^{l}", ys, [pk.poisson_l1_norm(y, 0, l, tol) for y in ys], -float(l),
                   KERNEL_SLOPE_TOL) for l in (1, 2)]
    return out


def check_poisson_second_difference(cfg):
    ys = _grid(10.0, 1e3, cfg)
    tol = cfg["kernel_tol"]
    second = [pk.poisson_l1_norm(y, 0, 2, tol) for y in ys]
    yy = [pk.poisson_l1_norm(y, 2, 0, tol) for y in ys]
    err = max(abs(a - b) / b for a, b in zip(second, yy))
    return [_slope("norm of second difference", ys, second, -2.0, KERNEL_SLOPE_TOL),
            _identity("second-difference norm equals d^2/dy^2 norm (relative)", err, 1e-6)]


# --------------------------------------------------------------------------
# semigroups applied to functions

def _random_table(cfg, radius=40):
    rng = np.random.default_rng(int(cfg["seed"]))
    return lf.from_table(rng.standard_normal(2 * radius + 1), -radius, "zero", name="random_table")


def check_commutation(cfg):
    tol = cfg["tol"]
    f = _random_table(cfg)
    ns = np.arange(-60, 61)
    out = []
    t1, t2 = 1.5, 2.5
    kernel_side = ops.heat_apply_result(f, t1 + t2, ns, tol, l=1).values
    function_side = ops.heat_apply_result(lf.differenced(f, 1), t1 + t2, ns, tol).values
    out.append(_identity("heat: differencing commutes with the semigroup",
                         np.max(np.abs(kernel_side - function_side)), 2 * tol))
    reach = f.support + 200
    inner = ops.heat_apply_result(f, t2, np.arange(-reach, reach + 1), tol)
    g = lf.from_table(inner.values, -reach, "zero")
    whole = ops.heat_apply_result(f, t1 + t2, ns, tol).values
    split = ops.heat_apply_result(g, t1, ns, tol).values
    out.append(_identity("heat: e^{(t1+t2)L} f = e^{t1 L} e^{t2 L} f", np.max(np.abs(whole - split)), 2 * tol))
    dwhole = ops.heat_tderiv_result(f, t1 + t2, ns, 1, tol).values
    dsplit = ops.heat_tderiv_result(g, t1, ns, 1, tol).values
    dinner = ops.heat_tderiv_result(f, t2, np.arange(-reach, reach + 1), 1, tol)
    dsplit2 = ops.heat_apply_result(lf.from_table(dinner.values, -reach, "zero"), t1, ns, tol).values
    out.append(_identity("heat: time derivative moves to either factor",
                         max(np.max(np.abs(dwhole - dsplit)), np.max(np.abs(dwhole - dsplit2))), 2 * tol))
    y = 3.0
    p_kernel = ops.poisson_apply_result(f, y, ns, tol, l=1).values
    p_function = ops.poisson_apply_result(lf.differenced(f, 1), y, ns, tol).values
    out.append(_identity("Poisson: differencing commutes with the semigroup",
                         np.max(np.abs(p_kernel - p_function)), 2 * tol))
    return out


def _sample(cfg):
    return lf.parse_function(cfg["sample"])


def check_semigroup_growth(cfg):
    tol = cfg["tol"]
    f = _sample(cfg)
    alpha, _ = f.growth_exponent, f.growth_constant
    ns = np.arange(-256, 257)
    weight = 1.0 + np.abs(ns) ** alpha
    sweep = (0.01, 1.0, 100.0, 1e4)
    consts = [np.max(np.abs(ops.heat_apply_result(f, t, ns, tol).values) / (weight + t ** (0.5 * alpha)))
              for t in sweep]
    out = [_stability("A(i) growth of e^{tL} f", consts, CONSTANT_STABILITY, sweep)]
    for l in (1, 2):
        consts = []
        for t in sweep:
            vals = np.abs(ops.heat_apply_result(f, t, ns, tol, l=l).values)
            consts.append(np.max(vals / (weight * min(1.0, t ** (-0.5 * l)) + t ** (0.5 * (alpha - l)))))
        out.append(_stability(f"A(ii) differences l={l}", consts, CONSTANT_STABILITY, sweep))
    small = (1.0, 0.1, 0.01, 0.001)
    pts = np.array([0, 1, 5])
    exact = f(pts)
    heat_gap = [np.max(np.abs(ops.heat_apply_result(f, t, pts, tol).values - exact)) for t in small]
    out.append(_monotone("A(iii) |e^{tL} f - f| shrinks as t -> 0", small, heat_gap, 0.01))
    pois_gap = [np.max(np.abs(ops.poisson_apply_result(f, y, pts, tol).values - exact)) for y in small]
    out.append(_monotone("B |P_y f - f| shrinks as y -> 0", small, pois_gap, 0.01))
    return out


def check_decay_at_infinity(cfg):
    tol = cfg["tol"]
    f = _sample(cfg)
    ts = (1e1, 1e2, 1e3, 1e4)
    ys = (1e1, 1e2, 1e3)
    n = np.array([0])
    out = []
    for l, m in ((1, 0), (0, 1), (1, 1)):
        vals = [(ops.heat_tderiv_result(f, t, n, l, tol, l=m) if l else ops.heat_apply_result(f, t, n, tol, l=m)).values[0]
                for t in ts]
        out.append(_monotone(f"heat: d^{l}/dt^{l} delta^{m} at n=0", ts, vals))
    for l, m in ((1, 0), (0, 1)):
        vals = [(ops.poisson_yderiv_result(f, y, n, l, tol, diff=m) if l
                 else ops.poisson_apply_result(f, y, n, tol, l=m)).values[0] for y in ys]
        out.append(_monotone(f"Poisson: d^{l}/dy^{l} delta^{m} at n=0", ys, vals))
    return out


def _alpha_check(label, a, b):
    gap = abs(a - b)
    return {"check": label, "kind": "agreement", "alpha_low": a, "alpha_high": b, "gap": gap,
            "tolerance": APPLIED_SLOPE_TOL, "passed": bool(gap <= APPLIED_SLOPE_TOL)}


def check_order_independence(cfg):
    f = _sample(cfg)
    tol = cfg["tol"]
    h1 = reg.heat_exponent_fit(f, 1, tol=tol).alpha_hat
    h2 = reg.heat_exponent_fit(f, 2, tol=tol).alpha_hat
    p1 = reg.poisson_exponent_fit(f, 1, tol=tol).alpha_hat
    p2 = reg.poisson_exponent_fit(f, 2, tol=tol).alpha_hat
    return [_alpha_check("heat: k=1 vs k=2", h1, h2), _alpha_check("Poisson: q=1 vs p=2", p1, p2)]


def check_mixed_orders(cfg):
    f = _sample(cfg)
    tol = cfg["tol"]
    alpha = f.tail_power
    out = []
    for l, m in ((1, 1), (0, 2)):
        fit = reg.heat_exponent_fit(f, l, tol=tol, m=m)
        out.append(_slope(f"heat l={l} m={m}", fit.grid, fit.sup_norms, -(l + 0.5 * m) + 0.5 * alpha,
                          APPLIED_SLOPE_TOL))
    for l, m in ((1, 1), (0, 1)):
        fit = reg.poisson_exponent_fit(f, l, tol=tol, m=m)
        out.append(_slope(f"Poisson l={l} m={m}", fit.grid, fit.sup_norms, -(l + m) + alpha,
                          APPLIED_SLOPE_TOL))
    return out


def check_growth_certificate(cfg):
    f = _sample(cfg)
    alpha = f.growth_exponent
    windows = (64, 256, 1024, 4096)
    return [_stability(f"sup |f|/(1+|n|^{alpha:g}) over growing windows",
                       [lf.growth_certificate(f, alpha, N) for N in windows], CONSTANT_STABILITY, windows)]


def _heat_image(f, s, tol):
    def rule(n):
        return ops.heat_apply_result(f, s, np.asarray(n), tol).values
    return lf.LatticeFunction(f"heat:{s:g}:{f.name}", rule, f.growth_exponent, None, f.tail_power)


def check_weighted_classes(cfg):
    tol = cfg["tol"]
    out = []
    cases = ((lf.damped_pow(0.4, 500.0, 2), 0.2, "-"), (lf.abs_pow(0.3), 0.25, "+"))
    for f, beta, sign in cases:
        base = lf.weighted_norm(f, beta, sign, N_max=1 << 18)
        for s in (1.0, 10.0):
            rep = lf.weighted_norm(_heat_image(f, s, tol), beta, sign, N_max=1 << 18)
            total = rep.partial_sum + rep.tail_estimate
            ref = base.partial_sum + base.tail_estimate
            out.append({"check": f"l_{sign}{beta:g}: e^{{{s:g}L}} {f.name}", "kind": "summability",
                        "converged": rep.converged, "norm": total, "norm_of_input": ref,
                        "passed": bool(rep.converged and base.converged)})
    return out


# --------------------------------------------------------------------------

LEMMAS = {
    "Lemma3.1": ("iterated integral representation of I_n", check_integral_representation),
    "Remark1": ("integer coefficient recurrence and closed form", check_coefficients),
    "pointbessel": ("pointwise decay of kernel differences", check_pointwise_decay),
    "heatbounds": ("Gaussian-weighted bound on kernel differences", check_heat_bounds),
    "remheatbounds": ("domination by G(t,n)/t^(l/2) in the central region", check_domination),
    "kernelest": ("l1 decay of heat kernel differences", check_l1_decay),
    "Remkernelest": ("l1 decay of time derivatives of the heat kernel", check_time_derivative_norms),
    "Poissonlema": ("pointwise envelopes of the Poisson kernel", check_poisson_envelopes),
    "Poissonest": ("l1 decay of Poisson kernel derivatives and differences", check_poisson_l1),
    "RemPoissonest": ("second differences match second y-derivatives", check_poisson_second_difference),
    "obs": ("commutation and semigroup factorization", check_commutation),
    "semigroupP": ("growth and initial limits of the semigroups", check_semigroup_growth),
    "decay": ("derivatives of the semigroups vanish at infinity", check_decay_at_infinity),
    "subirk": ("exponent estimate independent of derivative order", check_order_independence),
    "cambioyx": ("mixed time/space derivative decay", check_mixed_orders),
    "sizeCalpha": ("polynomial growth of Holder functions", check_growth_certificate),
    "sequeda": ("heat semigroup preserves the weighted classes", check_weighted_classes),
}


def run(selector=None, config=None):
    cfg = dict(DEFAULT_CONFIG)
    cfg.update(config or {})
    if isinstance(selector, str):
        selector = [s.strip() for s in selector.split(",") if s.strip()]
    if not selector or selector == ["all"]:
        ids = list(LEMMAS)
    else:
        ids = list(selector)
        unknown = [i for i in ids if i not in LEMMAS]
        if unknown:
            raise reg.DomainError(f"unknown lemma id(s): {', '.join(unknown)}")
    lemmas = {}
    for lid in ids:
        title, fn = LEMMAS[lid]
        try:
            checks = fn(cfg)
            error = None
        except Exception as exc:  # a crashing check is a failed check
            checks, error = [], f"{type(exc).__name__}: {exc}"
        entry = {"title": title, "checks": checks,
                 "passed": bool(checks) and error is None and all(c["passed"] for c in checks)}
        if error:
            entry["error"] = error
        lemmas[lid] = entry
    return {"schema": REPORT_SCHEMA, "config": cfg, "lemmas": lemmas,
            "passed": all(e["passed"] for e in lemmas.values())}
