"""Hölder and Zygmund seminorms, semigroup decay fits and regularity experiments."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import operators as ops
from .errors import ContractError, DegenerateFitError, DomainError
from .lattice_fn import from_table, mixed_diff_values, require_weighted

DEFAULT_SUP_WINDOW = 64
DEFAULT_GRID_POINTS = 20
HEAT_GRID = (1e2, 1e5)
POISSON_GRID = (1e1, 1e3)
POINTWISE_GRID = (4, 1024)
MIN_R_SQUARED = 0.95
SUP_STABILITY = 0.05
MAX_SUP_DOUBLINGS = 4
TRIM_THRESHOLD = 3.0
NEAR_INTEGER = 0.1


def geometric_grid(lo, hi, points=DEFAULT_GRID_POINTS):
    """``points`` values spaced evenly in ``log`` between ``lo`` and ``hi``."""
    if not 0 < lo < hi or points < 3:
        raise DomainError("grid needs 0 < lo < hi and at least 3 points")
    return tuple(float(x) for x in np.geomspace(lo, hi, int(points)))


# --------------------------------------------------------------------------
# seminorms

@dataclass(frozen=True)
class SeminormReport:
    """Largest difference quotient over a window and where it is attained.

    ``attained_at`` is ``(n, m)`` for Hölder quotients and ``(center, shift)``
    for Zygmund quotients; ``differenced`` is the split ``(l, s)`` of the
    mixed difference applied first.
    """

    kind: str
    alpha: float
    value: float
    attained_at: tuple
    window: int
    differenced: tuple

    def to_dict(self):
        return asdict(self)


def _splits(k):
    return [(l, k - l) for l in range(k + 1)]


def _pick(candidates):
    """Tie-break: largest value, then smallest ``|a| + |b|``, then largest ``a``."""
    return min(candidates, key=lambda c: (-c[0], abs(c[1]) + abs(c[2]), -c[1]))


def holder_seminorm(f, alpha, window):
    """``max |D f(n) - D f(m)| / |n - m|^(alpha - k)`` over ``|n|, |m| <= window``.

    ``k = floor(alpha)`` and ``D`` runs over every mixed difference
    ``delta_right^l delta_left^s`` with ``l + s = k``.
    """
    alpha = float(alpha)
    if not alpha > 0 or alpha.is_integer():
        raise DomainError(f"holder_seminorm needs positive non-integer alpha, got {alpha} (use zygmund_seminorm)")
    window = int(window)
    if window < 2:
        raise DomainError("window must be at least 2")
    k = int(math.floor(alpha))
    frac = alpha - k
    n = np.arange(-window, window + 1)
    dist = np.abs(n[:, None] - n[None, :]).astype(float)
    np.fill_diagonal(dist, np.inf)
    best = None
    for l, s in _splits(k):
        g = mixed_diff_values(f.values(-window - s, window + l), l, s)
        ratio = np.abs(g[:, None] - g[None, :]) / dist ** frac
        top = float(ratio.max())
        rows, cols = np.nonzero((ratio >= top * (1.0 - 1e-12)) & (dist < np.inf))
        cand = _pick([(top, int(n[r]), int(n[c])) for r, c in zip(rows, cols)])
        if best is None or top > best[0]:
            best = (top, cand[1], cand[2], (l, s))
    return SeminormReport("holder", alpha, best[0], (best[1], best[2]), window, best[3])


def zygmund_seminorm(f, alpha, window):
    """``max |D f(c + h) + D f(c - h) - 2 D f(c)| / h`` for ``|c| <= window``, ``0 < h <= window``.

    ``D`` runs over the mixed differences of total order ``alpha - 1``.
    """
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"zygmund_seminorm needs a positive integer alpha, got {alpha}")
    alpha = int(alpha)
    window = int(window)
    if window < 1:
        raise DomainError("window must be positive")
    centers = np.arange(-window, window + 1)
    shifts = np.arange(1, window + 1)
    best = None
    for l, s in _splits(alpha - 1):
        g = mixed_diff_values(f.values(-2 * window - s, 2 * window + l), l, s)
        mid = 2 * window
        c_idx = centers[:, None] + mid
        second = g[c_idx + shifts] + g[c_idx - shifts] - 2.0 * g[c_idx]
        ratio = np.abs(second) / shifts
        top = float(ratio.max())
        rows, cols = np.nonzero(ratio >= top * (1.0 - 1e-12))
        cand = _pick([(top, int(centers[r]), int(shifts[c])) for r, c in zip(rows, cols)])
        if best is None or top > best[0]:
            best = (top, cand[1], cand[2], (l, s))
    return SeminormReport("zygmund", float(alpha), best[0], (best[1], best[2]), window, best[3])


# --------------------------------------------------------------------------
# decay fits

@dataclass(frozen=True)
class DecayFitReport:
    """Log-log fit of sup norms against the semigroup parameter.

    ``alpha_hat`` is ``2 (k + m/2 + slope)`` for the heat channel (``k`` time
    derivatives, ``m`` differences), ``l + m + slope`` for the Poisson channel
    and ``slope`` for the pointwise channel.
    """

    channel: str
    order: int
    grid: tuple
    sup_norms: tuple
    slope: float
    intercept: float
    r_squared: float
    alpha_hat: float
    accepted: bool
    used: tuple = ()
    sup_windows: tuple = ()
    sup_stable: bool = True
    differences: int = 0

    def to_dict(self):
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["sup_norms"] = list(self.sup_norms)
        return d


def _ols(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), max(0.0, min(1.0, r2)), resid


def _studentized(x, resid):
    n = x.size
    if n <= 3:
        return np.zeros(n)
    s = math.sqrt(float(np.sum(resid ** 2)) / (n - 2))
    if s == 0:
        return np.zeros(n)
    h = 1.0 / n + (x - x.mean()) ** 2 / float(np.sum((x - x.mean()) ** 2))
    return resid / (s * np.sqrt(np.maximum(1.0 - h, 1e-12)))


def fit_power_law(xs, ys):
    """OLS in log-log; the first or last point is dropped if its studentized residual exceeds 3.

    Returns
    -------
    (slope, intercept, r_squared, used_mask)
    """
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    used = np.ones(x.size, dtype=bool)
    slope, icpt, r2, resid = _ols(x, y)
    stud = _studentized(x, resid)
    for end in (0, -1):
        if abs(stud[end]) > TRIM_THRESHOLD:
            used[end] = False
    if not used.all():
        slope, icpt, r2, _ = _ols(x[used], y[used])
    return slope, icpt, r2, used


def _sup_norm(evaluate, window):
    """``sup_{|n| <= W} |u(n)|`` with doubling until it moves by less than 5%."""
    W = int(window)
    for _ in range(MAX_SUP_DOUBLINGS + 1):
        ns = np.arange(-2 * W, 2 * W + 1)
        vals = np.abs(evaluate(ns))
        inner = float(vals[W: 3 * W + 1].max())
        outer = float(vals.max())
        if outer <= inner * (1.0 + SUP_STABILITY):
            return inner, W, True
        W *= 2
    return outer, W, False


def _decay_fit(channel, order, grid, evaluate, sup_window, tol, alpha_of, differences=0):
    grid = tuple(float(g) for g in grid)
    sups, windows, stable = [], [], True
    for p in grid:
        s, W, ok = _sup_norm(lambda ns: evaluate(p, ns), sup_window)
        sups.append(s)
        windows.append(W)
        stable &= ok
    sups = np.array(sups)
    keep = sups >= 10.0 * tol
    if keep.sum() < 3:
        raise DegenerateFitError(f"{channel} fit: sup norms below 10*tol={10 * tol:g} (function too smooth)")
    slope, icpt, r2, used = fit_power_law(np.array(grid)[keep], sups[keep])
    mask = np.zeros(len(grid), dtype=bool)
    mask[np.nonzero(keep)[0][used]] = True
    return DecayFitReport(channel, order, grid, tuple(float(s) for s in sups), slope, icpt, r2,
                          alpha_of(slope), r2 >= MIN_R_SQUARED, tuple(bool(u) for u in mask),
                          tuple(windows), stable, differences)


def heat_exponent_fit(f, k=1, t_grid=None, sup_window=DEFAULT_SUP_WINDOW, tol=ops.DEFAULT_TOL, m=0):
    """Fit ``sup |d^k/dt^k delta^m e^{tL} f| ~ C t^slope`` and report ``alpha_hat = 2(k + m/2 + slope)``.

    Raises
    ------
    DegenerateFitError
        When the sup norms are all below ``10 tol``.
    """
    k, m = int(k), int(m)
    grid = t_grid or geometric_grid(*HEAT_GRID)

    def evaluate(t, ns):
        if k == 0:
            return ops.heat_apply_result(f, t, ns, tol, l=m).values
        return ops.heat_tderiv_result(f, t, ns, k, tol, l=m).values

    return _decay_fit(f"heat({k})", k, grid, evaluate, sup_window, tol,
                      lambda s: 2.0 * (k + 0.5 * m + s), m)


def poisson_exponent_fit(f, l=1, y_grid=None, sup_window=DEFAULT_SUP_WINDOW, tol=ops.DEFAULT_TOL, m=0):
    """Fit ``sup |d^l/dy^l delta^m P_y f| ~ C y^slope`` and report ``alpha_hat = l + m + slope``."""
    l, m = int(l), int(m)
    grid = y_grid or geometric_grid(*POISSON_GRID)

    def evaluate(y, ns):
        if l == 0:
            return ops.poisson_apply_result(f, y, ns, tol, l=m).values
        return ops.poisson_yderiv_result(f, y, ns, l, tol, diff=m).values

    return _decay_fit(f"poisson({l})", l, grid, evaluate, sup_window, tol, lambda s: l + m + s, m)


def pointwise_exponent(f, center=0, h_grid=None, order=2):
    """Exponent of ``|sum_i (-1)^i binom(2r, r+i) f(center + i h)| ~ C h^alpha``.

    The symmetric difference of order ``2r`` removes polynomials of degree
    below ``2r`` and measures the local power at ``center`` for ``alpha < 2r``.
    """
    r = int(order)
    grid = h_grid or tuple(int(round(h)) for h in np.geomspace(*POINTWISE_GRID, DEFAULT_GRID_POINTS))
    grid = tuple(sorted(set(int(h) for h in grid)))
    i = np.arange(-r, r + 1)
    w = np.array([(-1) ** abs(x) * math.comb(2 * r, r + x) for x in i], dtype=float)
    vals = np.array([abs(float(f(center + i * h) @ w)) for h in grid])
    scale = float(np.max(np.abs(f(center + np.array(grid)))) + abs(f(center)))
    keep = vals > 1e-12 * max(scale, 1e-300)
    if keep.sum() < 3:
        raise DegenerateFitError("pointwise fit: symmetric differences vanish")
    slope, icpt, r2, used = fit_power_law(np.array(grid, dtype=float)[keep], vals[keep])
    mask = np.zeros(len(grid), dtype=bool)
    mask[np.nonzero(keep)[0][used]] = True
    return DecayFitReport(f"pointwise({2 * r})", 2 * r, tuple(float(h) for h in grid),
                          tuple(float(v) for v in vals), slope, icpt, r2, slope,
                          r2 >= MIN_R_SQUARED, tuple(bool(u) for u in mask))


# --------------------------------------------------------------------------
# characterisation

def channel_orders(alpha):
    """``(k, l, integer_alpha)`` for the heat and Poisson channels at exponent ``alpha``.

    Exponents within 0.1 of a positive integer are treated as that integer.
    """
    near = round(alpha)
    if near >= 1 and abs(alpha - near) < NEAR_INTEGER:
        a = int(near)
        return a // 2 + 1, a + 1, a
    return int(math.floor(alpha / 2)) + 1, int(math.floor(alpha)) + 1, None


def _safe(fn):
    try:
        return fn(), None
    except DegenerateFitError as exc:
        return None, str(exc)


def characterize(f, alpha_range=None, config=None):
    """Compare the pointwise, heat and Poisson exponent estimates of ``f``.

    Parameters
    ----------
    f : LatticeFunction
    alpha_range : (float, float), optional
        Expected exponent range; its midpoint selects the derivative orders.
        When omitted, the pointwise estimate is used.
    config : dict, optional
        ``t_grid``, ``y_grid``, ``sup_window``, ``tol``, ``seminorm_windows``.

    Returns
    -------
    dict
    """
    cfg = dict(config or {})
    tol = float(cfg.get("tol", ops.DEFAULT_TOL))
    sup_window = int(cfg.get("sup_window", DEFAULT_SUP_WINDOW))
    windows = tuple(cfg.get("seminorm_windows", (16, 32, 64)))
    report = {"function": f.name, "estimates": {}, "fits": {}, "degenerate": {}}

    point, why = _safe(lambda: pointwise_exponent(f))
    if point is None:
        report["degenerate"]["pointwise"] = why
    else:
        report["fits"]["pointwise"] = point.to_dict()
        report["estimates"]["pointwise"] = point.alpha_hat
    if alpha_range is not None:
        guess = 0.5 * (float(alpha_range[0]) + float(alpha_range[1]))
    elif point is not None:
        guess = point.alpha_hat
    else:
        guess = 0.5
    guess = max(guess, 1e-3)
    k, l, integer = channel_orders(guess)
    report["orders"] = {"heat_k": k, "poisson_l": l, "alpha_guess": guess}

    heat, why = _safe(lambda: heat_exponent_fit(f, k, cfg.get("t_grid"), sup_window, tol))
    if heat is None:
        report["degenerate"]["heat"] = why
    else:
        report["fits"]["heat"] = heat.to_dict()
        report["estimates"]["heat"] = heat.alpha_hat
    poisson, why = _safe(lambda: poisson_exponent_fit(f, l, cfg.get("y_grid"), sup_window, tol))
    if poisson is None:
        report["degenerate"]["poisson"] = why
    else:
        report["fits"]["poisson"] = poisson.to_dict()
        report["estimates"]["poisson"] = poisson.alpha_hat

    if integer is not None:
        semis = [zygmund_seminorm(f, integer, w) for w in windows]
    else:
        semis = [holder_seminorm(f, guess, w) for w in windows]
    values = [s.value for s in semis]
    report["seminorm"] = {
        "kind": semis[0].kind, "alpha": semis[0].alpha, "windows": list(windows), "values": values,
        "bounded": bool(values[-1] <= 1.1 * values[-2] + 1e-300),
        "attained_at": list(semis[-1].attained_at),
    }
    est = list(report["estimates"].values())
    gap = max(est) - min(est) if len(est) > 1 else 0.0
    report["max_gap"] = gap
    if len(est) < 3:
        report["verdict"] = "degenerate"
    else:
        report["verdict"] = "consistent" if gap <= 0.1 else "inconsistent"
    return report


# --------------------------------------------------------------------------
# regularity shifts

SHIFT_OPERATORS = ("bessel_potential", "frac_neg", "frac_pos")


def _predicted_shift(op, beta):
    return {"bessel_potential": beta, "frac_neg": 2.0 * beta, "frac_pos": -2.0 * beta}[op]


def image_window(sup_window, t_max):
    """Half-width of the tabulated operator image for heat fits up to ``t_max``."""
    reach = 2 * int(sup_window) << MAX_SUP_DOUBLINGS
    return reach + int(math.ceil(12.0 * math.sqrt(2.0 * t_max)))


def regularity_shift_experiment(f, op, beta, config=None):
    """Measure how ``op`` changes the heat-channel exponent of ``f``.

    The image ``op(f)`` is tabulated on a window with ``clamp`` extension and
    fitted again.

    Returns
    -------
    dict
        ``alpha_hat_before``, ``alpha_hat_after``, ``predicted_shift``,
        ``observed_shift`` and the two fits.
    """
    if op not in SHIFT_OPERATORS:
        raise DomainError(f"op must be one of {SHIFT_OPERATORS}, got {op!r}")
    cfg = dict(config or {})
    beta = float(beta)
    tol = float(cfg.get("tol", ops.DEFAULT_TOL))
    image_tol = float(cfg.get("image_tol", 1e-6))
    sup_window = int(cfg.get("sup_window", DEFAULT_SUP_WINDOW))
    grid = tuple(cfg.get("t_grid") or geometric_grid(*HEAT_GRID))
    before = heat_exponent_fit(f, 1, grid, sup_window, tol)
    alpha = before.alpha_hat
    if op == "frac_neg":
        if not 0 < beta < 0.5:
            raise DomainError("frac_neg needs 0 < beta < 1/2")
        require_weighted(f, 1.0 - 2.0 * beta, "frac_neg hypothesis (l_-beta membership)")
        apply = ops.frac_neg_result
    elif op == "frac_pos":
        require_weighted(f, 1.0 + 2.0 * beta, "frac_pos hypothesis (l_beta membership)")
        if not alpha > 2.0 * beta:
            raise ContractError(f"frac_pos hypothesis alpha > 2 beta fails: alpha_hat={alpha:.3f}, beta={beta}")
        apply = ops.frac_pos_result
    else:
        if f.growth_exponent is None and f.support is None:
            raise ContractError("bessel_potential hypothesis: no growth certificate")
        apply = ops.bessel_potential_result
    N = int(cfg.get("image_window", image_window(sup_window, max(grid))))
    image = apply(f, beta, np.arange(-N, N + 1), image_tol)
    g = from_table(image.values, -N, "clamp", name=f"{op}:{beta:g}:{f.name}")
    predicted = _predicted_shift(op, beta)
    k_after = channel_orders(max(alpha + predicted, 1e-3))[0]
    after = heat_exponent_fit(g, k_after, grid, sup_window, tol)
    observed = after.alpha_hat - alpha
    return {
        "function": f.name, "operator": op, "beta": beta,
        "alpha_hat_before": alpha, "alpha_hat_after": after.alpha_hat,
        "predicted_shift": predicted, "observed_shift": observed,
        "passed": bool(abs(observed - predicted) <= 0.1),
        "image_window": N, "image_max_error": float(np.max(image.error_bounds)),
        "fit_before": before.to_dict(), "fit_after": after.to_dict(),
    }


# --------------------------------------------------------------------------
# lemma harness

def verify_lemma_suite(selector=None, config=None):
    """Run the numerical lemma checks.

    Parameters
    ----------
    selector : str or iterable of str, optional
        Lemma ids, or ``"all"`` (the default).
    config : dict, optional
        Overrides for ``tol``, ``kernel_tol``, ``sample``, ``seed`` and
        ``grid_points``.

    Returns
    -------
    dict
        Versioned report keyed by lemma id; each entry lists its checks with
        slope or constant-ratio data and a ``passed`` flag.
    """
    from . import _lemmas

    return _lemmas.run(selector, config)
