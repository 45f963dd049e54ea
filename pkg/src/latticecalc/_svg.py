"""Self-contained log-log line charts (inline styling, no external assets)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 440
MARGIN = {"left": 78, "right": 24, "top": 44, "bottom": 58}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x):
    return f"{x:.2f}"


def _decades(lo, hi):
    a, b = math.floor(lo), math.ceil(hi)
    if a == b:
        b = a + 1
    return a, b


def loglog_chart(series, title, xlabel, ylabel, annotations=(), metadata=None):
    """Render ``series`` as an SVG document string.

    Parameters
    ----------
    series : list of (label, xs, ys)
        Non-positive points are dropped (log axes).
    annotations : iterable of str
        Lines printed in the upper right corner, e.g. fitted slopes.
    metadata : str, optional
        Stored verbatim in a ``<metadata>`` element for reproducibility.
    """
    clean = []
    for label, xs, ys in series:
        x = np.asarray(xs, dtype=float)
        y = np.abs(np.asarray(ys, dtype=float))
        keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
        if keep.any():
            clean.append((label, np.log10(x[keep]), np.log10(y[keep])))
    if clean:
        xlo, xhi = _decades(min(c[1].min() for c in clean), max(c[1].max() for c in clean))
        ylo, yhi = _decades(min(c[2].min() for c in clean), max(c[2].max() for c in clean))
    else:
        xlo, xhi, ylo, yhi = 0, 1, 0, 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(lx):
        return MARGIN["left"] + (lx - xlo) / (xhi - xlo) * pw

    def py(ly):
        return MARGIN["top"] + (yhi - ly) / (yhi - ylo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif" font-size="12">']
    if metadata:
        out.append(f"<metadata>{escape(metadata)}</metadata>")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')
    out.append(f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')
    x0, y0 = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<rect x="{x0}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="#333333"/>')
    step_x = max(1, (xhi - xlo) // 8)
    for d in range(xlo, xhi + 1, step_x):
        X = _fmt(px(d))
        out.append(f'<line x1="{X}" y1="{MARGIN["top"]}" x2="{X}" y2="{y0}" stroke="#dddddd"/>')
        out.append(f'<text x="{X}" y="{y0 + 18}" text-anchor="middle">1e{d}</text>')
    step_y = max(1, (yhi - ylo) // 8)
    for d in range(ylo, yhi + 1, step_y):
        Y = _fmt(py(d))
        out.append(f'<line x1="{x0}" y1="{Y}" x2="{x0 + pw}" y2="{Y}" stroke="#dddddd"/>')
        out.append(f'<text x="{x0 - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">1e{d}</text>')
    out.append(f'<text x="{x0 + pw / 2:.1f}" y="{HEIGHT - 16}" text-anchor="middle">{escape(xlabel)} (log scale)</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.1f})">{escape(ylabel)} (log scale)</text>')
    for i, (label, lx, ly) in enumerate(clean):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(lx, ly))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        ly_key = MARGIN["top"] + 16 + 16 * i
        out.append(f'<line x1="{x0 + 10}" y1="{ly_key}" x2="{x0 + 30}" y2="{ly_key}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x0 + 36}" y="{ly_key + 4}">{escape(label)}</text>')
    for i, text in enumerate(annotations):
        out.append(f'<text x="{x0 + pw - 8}" y="{MARGIN["top"] + 18 + 16 * i}" text-anchor="end">{escape(text)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
