"""Minimal deterministic SVG line plots (fixed layout, no external deps).

Output bytes depend only on the input data, so repeated runs of the same
configuration produce identical files.
"""
from __future__ import annotations

import math
from pathlib import Path

__all__ = ["emit_svg"]

_WIDTH, _HEIGHT = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 62, 16, 20, 44
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#8c564b"]
_DASHES = ["", "8,4", "3,3", "8,3,2,3"]


def _nice_ticks(lo: float, hi: float, target: int = 5):
    if not math.isfinite(lo) or not math.isfinite(hi):
        lo, hi = 0.0, 1.0
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(value) < 1e-12 * step else value)
        value += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def emit_svg(series, labels, path, x_label: str = "t", y_label: str = "") -> None:
    """Write a line plot of the given series to path.

    series is a sequence of (x, y) array pairs; labels the matching legend
    entries. Each pair must have equal-length x and y. An empty series list
    produces a valid plot frame with axes only.
    """
    if len(series) != len(labels):
        raise ValueError("series and labels must have the same length")
    for xs, ys in series:
        if len(xs) != len(ys):
            raise ValueError("series x and y must have the same length")

    xs_all = [float(v) for xs, _ in series for v in xs]
    ys_all = [float(v) for _, ys in series for v in ys]
    x_lo, x_hi = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    y_lo, y_hi = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return _MARGIN_T + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]

    for tick in _nice_ticks(x_lo, x_hi):
        x = px(tick)
        parts.append(f'<line x1="{x:.2f}" y1="{_MARGIN_T + plot_h}" x2="{x:.2f}" '
                     f'y2="{_MARGIN_T + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{_MARGIN_T + plot_h + 18}" '
                     f'font-family="sans-serif" font-size="11" text-anchor="middle">'
                     f'{_fmt(tick)}</text>')
    for tick in _nice_ticks(y_lo, y_hi):
        y = py(tick)
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" x2="{_MARGIN_L}" '
                     f'y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="end">{_fmt(tick)}</text>')

    parts.append(f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_HEIGHT - 8}" '
                 f'font-family="sans-serif" font-size="12" text-anchor="middle">{x_label}</text>')
    if y_label:
        y_mid = _MARGIN_T + plot_h / 2
        parts.append(f'<text x="14" y="{y_mid:.2f}" font-family="sans-serif" font-size="12" '
                     f'text-anchor="middle" transform="rotate(-90 14 {y_mid:.2f})">{y_label}</text>')

    for i, ((xs, ys), label) in enumerate(zip(series, labels)):
        color = _COLORS[i % len(_COLORS)]
        dash = _DASHES[i % len(_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        points = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.3"'
                     f'{dash_attr} points="{points}"/>')
        ly = _MARGIN_T + 16 + 16 * i
        lx = _MARGIN_L + plot_w - 150
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 26}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.3"{dash_attr}/>')
        parts.append(f'<text x="{lx + 32}" y="{ly}" font-family="sans-serif" '
                     f'font-size="11">{label}</text>')

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
