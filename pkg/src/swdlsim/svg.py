"""Minimal SVG line plots (polylines on a framed axis, no plotting dependency)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["write_svg"]

WIDTH, HEIGHT = 640, 420
MARGIN = (70, 20, 30, 50)  # left, right, top, bottom
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _limits(values: np.ndarray) -> Tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def write_svg(
    path,
    series: Sequence[Tuple[str, Sequence[float], Sequence[float]]],
    xlabel: str,
    ylabel: str,
    title: str = "",
) -> None:
    """Plot ``(label, x, y)`` series; non-finite points break the line."""
    xs = [np.asarray(x, dtype=float) for _, x, _ in series]
    ys = [np.asarray(y, dtype=float) for _, _, y in series]
    all_x = np.concatenate([x[np.isfinite(x)] for x in xs]) if xs else np.zeros(1)
    all_y = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.zeros(1)
    if all_x.size == 0:
        all_x = np.zeros(1)
    if all_y.size == 0:
        all_y = np.zeros(1)
    x0, x1 = _limits(all_x)
    y0, y1 = _limits(all_y)
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
        f'<text x="{WIDTH / 2:.1f}" y="{top - 10}" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for k in range(5):
        fx = x0 + (x1 - x0) * k / 4
        fy = y0 + (y1 - y0) * k / 4
        out.append(f'<text x="{px(fx):.1f}" y="{top + ph + 15}" text-anchor="middle">{fx:.4g}</text>')
        out.append(f'<text x="{left - 5}" y="{py(fy) + 4:.1f}" text-anchor="end">{fy:.4g}</text>')
    for i, ((label, _, _), x, y) in enumerate(zip(series, xs, ys)):
        color = COLORS[i % len(COLORS)]
        ok = np.isfinite(x) & np.isfinite(y)
        runs, cur = [], []
        for xi, yi, good in zip(x, y, ok):
            if good:
                cur.append(f"{px(xi):.2f},{py(yi):.2f}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(run)}"/>')
        out.append(
            f'<text x="{left + pw - 5}" y="{top + 15 + 14 * i}" text-anchor="end" fill="{color}">{escape(label)}</text>'
        )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
