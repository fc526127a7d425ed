"""Minimal built-in SVG emitter: log-log scatter plus fitted lines.

Deliberately dependency-free; enough for convergence plots (points per
series, optional power-law fit line, decade ticks on both axes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = ["Series", "render_loglog"]

_WIDTH, _HEIGHT = 720, 520
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 40, 55
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class Series:
    """One plotted series: positive (x, y) points and an optional log-space fit.

    ``fit`` is (slope, intercept) for log y = intercept + slope * log x.
    """

    label: str
    points: tuple[tuple[float, float], ...]
    fit: tuple[float, float] | None = None


def _decades(lo: float, hi: float):
    start = math.floor(lo)
    stop = math.ceil(hi)
    return [d for d in range(start, stop + 1) if lo - 1e-9 <= d <= hi + 1e-9]


def render_loglog(
    series: Sequence[Series],
    title: str = "",
    xlabel: str = "h",
    ylabel: str = "error",
) -> str:
    """Render series to an SVG document string (log10 axes)."""
    pts = [(x, y) for s in series for (x, y) in s.points if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing to plot: no positive points")
    lx = [math.log10(x) for x, _ in pts]
    ly = [math.log10(y) for _, y in pts]
    pad = 0.15
    x_lo, x_hi = min(lx) - pad, max(lx) + pad
    y_lo, y_hi = min(ly) - pad, max(ly) + pad
    if x_hi - x_lo < 1e-9:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(logx: float) -> float:
        return _MARGIN_L + (logx - x_lo) / (x_hi - x_lo) * plot_w

    def sy(logy: float) -> float:
        return _MARGIN_T + (y_hi - logy) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333"/>',
    ]
    if title:
        out.append(
            f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15">{title}</text>'
        )
    for d in _decades(x_lo, x_hi):
        x = sx(d)
        out.append(
            f'<line x1="{x:.1f}" y1="{_MARGIN_T}" x2="{x:.1f}" y2="{_MARGIN_T + plot_h}" '
            'stroke="#ddd"/>'
        )
        out.append(
            f'<text x="{x:.1f}" y="{_MARGIN_T + plot_h + 18}" text-anchor="middle">1e{d}</text>'
        )
    for d in _decades(y_lo, y_hi):
        y = sy(d)
        out.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.1f}" x2="{_MARGIN_L + plot_w}" y2="{y:.1f}" '
            'stroke="#ddd"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end">1e{d}</text>'
        )
    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle">'
        f"{xlabel}</text>"
    )
    out.append(
        f'<text x="18" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>'
    )
    legend_y = _MARGIN_T + 10
    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        vis = [(x, y) for (x, y) in s.points if x > 0 and y > 0]
        for x, y in vis:
            out.append(
                f'<circle cx="{sx(math.log10(x)):.1f}" cy="{sy(math.log10(y)):.1f}" '
                f'r="3.5" fill="{color}"/>'
            )
        if s.fit is not None and vis:
            slope, intercept = s.fit
            lx0 = math.log10(min(x for x, _ in vis))
            lx1 = math.log10(max(x for x, _ in vis))
            # the fit lives in natural logs: log y = intercept + slope*log x
            ly0 = (intercept + slope * lx0 * math.log(10.0)) / math.log(10.0)
            ly1 = (intercept + slope * lx1 * math.log(10.0)) / math.log(10.0)
            out.append(
                f'<line x1="{sx(lx0):.1f}" y1="{sy(ly0):.1f}" x2="{sx(lx1):.1f}" '
                f'y2="{sy(ly1):.1f}" stroke="{color}" stroke-dasharray="5,3"/>'
            )
        out.append(
            f'<rect x="{_MARGIN_L + plot_w + 12}" y="{legend_y - 9}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L + plot_w + 27}" y="{legend_y}">{s.label}</text>'
        )
        legend_y += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"
