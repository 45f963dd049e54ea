"""Command-line front end: kernels, operator applications, classification, lemma checks.

Every command accepts ``--config FILE`` (flat ``key = value`` lines, ``#``
comments). Values on the command line override the file, and the fully
resolved configuration is written next to the output (``<out>.cfg``) or to
stderr, in the same format, so a rerun with ``--config`` reproduces the
output byte for byte.

Exit codes: 0 success, 1 a verification or consistency check failed,
2 domain or contract error, 3 accuracy error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import os
import sys
import tempfile

import click
import numpy as np
from click.core import ParameterSource

from . import _svg
from ._lemmas import DEFAULT_CONFIG as LEMMA_DEFAULTS
from . import heat_kernel as hk
from . import operators as ops
from . import poisson_kernel as pk
from . import regularity as reg
from .errors import DomainError, LatticeCalcError
from .lattice_fn import parse_function, truncated

EXIT_OK, EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_ACCURACY = 0, 1, 2, 3
KERNEL_KINDS = ("heat", "poisson", "frac-pos", "frac-neg", "bessel-potential")
APPLY_OPS = KERNEL_KINDS
SCHEMA = "v1"


# --------------------------------------------------------------------------
# config files

def read_config(path):
    """Parse a flat ``key = value`` file into a dict of ints, floats and strings."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            out[key.strip().replace("-", "_")] = _coerce(value.strip())
    return out


def _coerce(text):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def format_config(cfg):
    lines = []
    for key in sorted(cfg):
        value = cfg[key]
        if value is None:
            continue
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _resolve(ctx, names, **values):
    """Merge defaults, the ``--config`` file and explicit flags (in that order)."""
    path = values.pop("config", None)
    file_cfg = read_config(path) if path else {}
    cfg = {"command": ctx.command.name}
    for name in names:
        source = ctx.get_parameter_source(name)
        explicit = source not in (ParameterSource.DEFAULT, None)
        if not explicit and name in file_cfg:
            cfg[name] = file_cfg[name]
        else:
            cfg[name] = values.get(name)
    return cfg


# --------------------------------------------------------------------------
# output

def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and an atomic rename."""
    target = os.path.abspath(path)
    folder = os.path.dirname(target)
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg, text):
    out = cfg.get("out")
    if out:
        write_atomic(out, text)
        write_atomic(out + ".cfg", format_config(cfg))
    else:
        click.echo(text, nl=False)
        click.echo("# resolved config\n" + format_config(cfg), err=True, nl=False)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def _json(payload):
    return json.dumps(payload, indent=2, default=_json_default, allow_nan=True) + "\n"


def _tail_slope(xs, ys):
    x = np.asarray(xs, dtype=float)
    y = np.abs(np.asarray(ys, dtype=float))
    keep = (x > 0) & (y > 0)
    x, y = x[keep], y[keep]
    if x.size < 4:
        return None
    upper = x >= x.max() / 4.0
    if upper.sum() < 3:
        upper = np.ones_like(x, dtype=bool)
    slope, _, _, _ = reg.fit_power_law(x[upper], y[upper])
    return slope


def _guard(fn):
    """Map library errors to exit codes with a one-line message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LatticeCalcError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _need(cfg, key, what):
    if cfg.get(key) is None:
        raise DomainError(f"{what} needs --{key.replace('_', '-')}")
    return cfg[key]


# --------------------------------------------------------------------------
# commands

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Discrete heat/Poisson semigroups, fractional operators and regularity on the integers."""


_common = [
    click.option("--config", type=click.Path(exists=True, dir_okay=False), help="key = value file."),
    click.option("--out", type=click.Path(dir_okay=False), help="Output path (stdout if omitted)."),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@main.command("kernel")
@click.argument("kind", required=False, type=click.Choice(KERNEL_KINDS))
@click.option("--t", "t", type=float, help="Heat time.")
@click.option("--y", "y", type=float, help="Poisson height.")
@click.option("--beta", type=float, help="Fractional or Bessel-potential order.")
@click.option("--tol", type=float, default=ops.DEFAULT_TOL, show_default=True)
@click.option("--range", "range", type=int, help="Emit offsets -R..R.")
@click.option("--format", "format", type=click.Choice(["csv", "json", "svg"]), default="csv", show_default=True)
@_with_common
@click.pass_context
@_guard
def cmd_kernel(ctx, **values):
    """Tabulate a kernel: rows param,kind,j,value,tail_bound."""
    cfg = _resolve(ctx, ["kind", "t", "y", "beta", "tol", "range", "format", "out"], **values)
    kind = _need(cfg, "kind", "kernel")
    if kind not in KERNEL_KINDS:
        raise DomainError(f"kind must be one of {KERNEL_KINDS}")
    table, R = _kernel_table(kind, cfg)
    lo, hi = -R, R
    vals = table.values_on(lo, hi)
    tail = table.tail_bound
    if R < table.half_width:
        tail += max(0.0, table.abs_total() - math.fsum(np.abs(vals)))
    js = np.arange(lo, hi + 1)
    cfg["range"] = R
    if cfg["format"] == "csv":
        text = _csv(["param", "kind", "j", "value", "tail_bound"],
                    ((table.param, kind, int(j), float(v), float(tail)) for j, v in zip(js, vals)))
    elif cfg["format"] == "json":
        text = _json({"schema": SCHEMA, "config": cfg, "param": table.param, "kind": kind,
                      "range": R, "tail_bound": tail, "sum": math.fsum(vals),
                      "rows": [[int(j), float(v)] for j, v in zip(js, vals)]})
    else:
        pos = js > 0
        slope = _tail_slope(js[pos], vals[pos])
        notes = [f"tail bound beyond |j|>{R}: {tail:.3g}"]
        if slope is not None:
            notes.insert(0, f"fitted tail slope: {slope:.3f}")
        text = _svg.loglog_chart([(f"|{kind}(j)|", js[pos], vals[pos])],
                                 f"{kind} kernel, param={table.param:g}", "j", "|K(j)|", notes,
                                 metadata=format_config(cfg))
    _emit(cfg, text)


def _kernel_table(kind, cfg):
    tol, R = cfg["tol"], cfg.get("range")
    if kind == "heat":
        table = hk.heat_table(_need(cfg, "t", "kernel heat"), tol)
        return table, min(table.half_width, R) if R is not None else table.half_width
    if kind == "poisson":
        table = pk.poisson_table(_need(cfg, "y", "kernel poisson"), tol)
        return table, R if R is not None else table.core_width
    beta = _need(cfg, "beta", f"kernel {kind}")
    if R is not None and R < 0:
        raise DomainError("--range must be nonnegative")
    if kind == "bessel-potential":
        R = ops.BESSEL_POTENTIAL_WIDTH if R is None else R
        return ops.bessel_potential_table(beta, max(R, 1)), R
    R = 32 if R is None else R
    return ops.frac_kernel_table(beta, "+" if kind == "frac-pos" else "-", R), R


@main.command("apply")
@click.argument("op", required=False, type=click.Choice(APPLY_OPS))
@click.option("--f", "f", help="Function spec, e.g. abs_pow:0.5, rademacher:7, csv:path.")
@click.option("--t", "t", type=float)
@click.option("--y", "y", type=float)
@click.option("--beta", type=float)
@click.option("--deriv", type=int, default=0, show_default=True, help="d/dt or d/dy order (heat, poisson).")
@click.option("--diff", type=int, default=0, show_default=True, help="Right differences (heat, poisson).")
@click.option("--window", type=int, default=32, show_default=True, help="Evaluate on -W..W.")
@click.option("--tol", type=float, default=ops.DEFAULT_TOL, show_default=True)
@click.option("--route", type=click.Choice(["kernel", "semigroup"]), default="kernel", show_default=True)
@click.option("--support", type=int, help="Truncate f to |n| <= N first.")
@click.option("--format", "format", type=click.Choice(["csv", "json", "svg"]), default="csv", show_default=True)
@_with_common
@click.pass_context
@_guard
def cmd_apply(ctx, **values):
    """Apply an operator to a function: rows n,value,error_bound."""
    cfg = _resolve(ctx, ["op", "f", "t", "y", "beta", "deriv", "diff", "window", "tol", "route",
                         "support", "format", "out"], **values)
    op = _need(cfg, "op", "apply")
    f = parse_function(_need(cfg, "f", "apply"))
    if cfg.get("support") is not None:
        f = truncated(f, int(cfg["support"]))
    W = int(cfg["window"])
    if W < 0:
        raise DomainError("--window must be nonnegative")
    ns = np.arange(-W, W + 1)
    res = _apply(op, f, ns, cfg)
    if cfg["format"] == "csv":
        text = _csv(["n", "value", "error_bound"], res.csv_rows())
    elif cfg["format"] == "json":
        text = _json({"schema": SCHEMA, "config": cfg, "function": f.name, "method": res.method,
                      "rows": [list(r) for r in res.csv_rows()]})
    else:
        pos = ns > 0
        slope = _tail_slope(ns[pos], res.values[pos])
        notes = [] if slope is None else [f"fitted slope: {slope:.3f}"]
        text = _svg.loglog_chart([(f"|{op} f(n)|", ns[pos], res.values[pos])],
                                 f"{op} applied to {f.name}", "n", "|value|", notes, metadata=format_config(cfg))
    _emit(cfg, text)


def _apply(op, f, ns, cfg):
    tol, route = cfg["tol"], cfg["route"]
    if route == "semigroup" and op != "frac-pos":
        raise DomainError("--route semigroup is available for frac-pos only")
    if op == "heat":
        t = _need(cfg, "t", "apply heat")
        if cfg["deriv"]:
            return ops.heat_tderiv_result(f, t, ns, cfg["deriv"], tol, l=cfg["diff"])
        return ops.heat_apply_result(f, t, ns, tol, l=cfg["diff"])
    if op == "poisson":
        y = _need(cfg, "y", "apply poisson")
        if cfg["deriv"]:
            return ops.poisson_yderiv_result(f, y, ns, cfg["deriv"], tol, diff=cfg["diff"])
        return ops.poisson_apply_result(f, y, ns, tol, l=cfg["diff"])
    if cfg["deriv"] or cfg["diff"]:
        raise DomainError("--deriv and --diff apply to heat and poisson only")
    beta = _need(cfg, "beta", f"apply {op}")
    if op == "frac-pos":
        if route == "semigroup":
            return ops.frac_pos_semigroup_result(f, beta, ns, tol)
        return ops.frac_pos_result(f, beta, ns, tol)
    if op == "frac-neg":
        return ops.frac_neg_result(f, beta, ns, tol)
    return ops.bessel_potential_result(f, beta, ns, tol)


@main.command("classify")
@click.option("--f", "f", help="Function spec.")
@click.option("--alpha-min", type=float, help="Expected exponent range (selects derivative orders).")
@click.option("--alpha-max", type=float)
@click.option("--sup-window", type=int, default=reg.DEFAULT_SUP_WINDOW, show_default=True)
@click.option("--tol", type=float, default=ops.DEFAULT_TOL, show_default=True)
@click.option("--format", "format", type=click.Choice(["json", "svg"]), default="json", show_default=True)
@_with_common
@click.pass_context
@_guard
def cmd_classify(ctx, **values):
    """Pointwise, heat and Poisson exponent estimates; exit 1 if they disagree."""
    cfg = _resolve(ctx, ["f", "alpha_min", "alpha_max", "sup_window", "tol", "format", "out"], **values)
    f = parse_function(_need(cfg, "f", "classify"))
    rng = None
    if cfg.get("alpha_min") is not None or cfg.get("alpha_max") is not None:
        rng = (_need(cfg, "alpha_min", "an exponent range"), _need(cfg, "alpha_max", "an exponent range"))
    report = reg.characterize(f, rng, {"sup_window": cfg["sup_window"], "tol": cfg["tol"]})
    if cfg["format"] == "json":
        text = _json({"schema": SCHEMA, "config": cfg, **report})
    else:
        series, notes = [], []
        for name in ("heat", "poisson"):
            fit = report["fits"].get(name)
            if fit:
                series.append((f"{name} sup norm", fit["grid"], fit["sup_norms"]))
                notes.append(f"{name}: slope {fit['slope']:.3f}, alpha {fit['alpha_hat']:.3f}")
        text = _svg.loglog_chart(series, f"decay of semigroup derivatives, {f.name}", "t or y",
                                 "sup norm", notes, metadata=format_config(cfg))
    _emit(cfg, text)
    for name, value in report["estimates"].items():
        click.echo(f"{name}: alpha_hat = {value:.4f}", err=True)
    click.echo(f"verdict: {report['verdict']}", err=True)
    if report["verdict"] == "inconsistent":
        sys.exit(EXIT_CHECK_FAILED)


@main.command("verify")
@click.option("--lemmas", default="all", show_default=True, help="Comma-separated lemma ids or 'all'.")
@click.option("--report", "out", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@click.option("--seed", type=int, default=LEMMA_DEFAULTS["seed"], show_default=True)
@click.option("--sample", default=LEMMA_DEFAULTS["sample"], show_default=True,
              help="Function used by the checks that apply a semigroup.")
@click.option("--grid-points", type=int, default=LEMMA_DEFAULTS["grid_points"], show_default=True)
@click.option("--tol", type=float, default=LEMMA_DEFAULTS["tol"], show_default=True)
@click.option("--kernel-tol", type=float, default=LEMMA_DEFAULTS["kernel_tol"], show_default=True)
@click.option("--config", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@_guard
def cmd_verify(ctx, **values):
    """Run the lemma checks; exit 1 if any selected check fails."""
    cfg = _resolve(ctx, ["lemmas", "seed", "sample", "grid_points", "tol", "kernel_tol", "out"], **values)
    suite_cfg = {k: cfg[k] for k in ("seed", "sample", "grid_points", "tol", "kernel_tol")}
    report = reg.verify_lemma_suite(str(cfg["lemmas"]), suite_cfg)
    report["config"] = cfg
    _emit(cfg, _json(report))
    for lid, entry in report["lemmas"].items():
        click.echo(f"{'PASS' if entry['passed'] else 'FAIL'} {lid}", err=True)
    sys.exit(EXIT_OK if report["passed"] else EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()
