"""Hand-emitted SVG charts: bar panels with CI error bars, pairwise heatmaps,
and scatter plots. No plotting dependency; layout constants below.

Bars are filled by significance tier via CSS classes (sig-high p<0.001,
sig-mid p<0.01, sig-low p<0.05, ns otherwise).
"""

from __future__ import annotations

import math
from typing import Sequence

from .stats import CorrelationResult, SteigerResult, significance_tier

PANEL_WIDTH = 640
PANEL_HEIGHT = 360
MARGIN_LEFT = 56
MARGIN_RIGHT = 16
MARGIN_TOP = 40
MARGIN_BOTTOM = 96
BAR_GAP_FRACTION = 0.25

_TIER_CLASS = {"p<0.001": "sig-high", "p<0.01": "sig-mid", "p<0.05": "sig-low", "ns": "ns"}

_STYLE = """
  .sig-high { fill: #1a5fb4; }
  .sig-mid  { fill: #62a0ea; }
  .sig-low  { fill: #b5cfee; }
  .ns       { fill: #d8d8d8; }
  .axis     { stroke: #333; stroke-width: 1; }
  .err      { stroke: #222; stroke-width: 1.2; }
  .grid     { stroke: #eee; stroke-width: 1; }
  text      { font-family: sans-serif; font-size: 11px; fill: #222; }
  .title    { font-size: 13px; font-weight: bold; }
"""


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _svg_doc(width: int, height: int, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">')
    return "\n".join([head, f"<style>{_STYLE}</style>", *body, "</svg>"]) + "\n"


def _nice_limits(lo: float, hi: float) -> tuple[float, float]:
    if lo > 0:
        lo = 0.0
    if hi < 0:
        hi = 0.0
    span = max(hi - lo, 1e-9)
    pad = 0.08 * span
    return lo - pad, hi + pad


def bar_panel(results: Sequence[CorrelationResult], title: str,
              labels: Sequence[str] | None = None) -> str:
    """One panel: a bar per method (caller supplies chronological order),
    error bars from the bootstrap CI, fill class by p tier."""
    if not results:
        raise ValueError("no results to plot")
    labels = list(labels) if labels is not None else [r.method for r in results]
    lo = min(min(r.ci_low, r.r) for r in results)
    hi = max(max(r.ci_high, r.r) for r in results)
    vmin, vmax = _nice_limits(lo, hi)
    plot_w = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def y(value: float) -> float:
        return MARGIN_TOP + (vmax - value) / (vmax - vmin) * plot_h

    slot = plot_w / len(results)
    bar_w = slot * (1 - BAR_GAP_FRACTION)
    body = [f'<text class="title" x="{MARGIN_LEFT}" y="20">{_esc(title)}</text>']
    for tick in _ticks(vmin, vmax):
        ty = y(tick)
        body.append(f'<line class="grid" x1="{MARGIN_LEFT}" y1="{ty:.2f}" '
                    f'x2="{MARGIN_LEFT + plot_w}" y2="{ty:.2f}"/>')
        body.append(f'<text x="{MARGIN_LEFT - 8}" y="{ty + 4:.2f}" '
                    f'text-anchor="end">{tick:g}</text>')
    zero_y = y(0.0)
    body.append(f'<line class="axis" x1="{MARGIN_LEFT}" y1="{zero_y:.2f}" '
                f'x2="{MARGIN_LEFT + plot_w}" y2="{zero_y:.2f}"/>')
    for i, (res, label) in enumerate(zip(results, labels)):
        cx = MARGIN_LEFT + slot * i + slot / 2
        x0 = cx - bar_w / 2
        top = y(max(res.r, 0.0))
        height = abs(y(res.r) - zero_y)
        tier = _TIER_CLASS[significance_tier(res.p_value)]
        body.append(f'<rect class="{tier}" x="{x0:.2f}" y="{top:.2f}" '
                    f'width="{bar_w:.2f}" height="{height:.2f}">'
                    f'<title>{_esc(res.method)}: r={res.r:.3f} '
                    f'[{res.ci_low:.3f}, {res.ci_high:.3f}] p={res.p_value:.2g}</title></rect>')
        y_lo, y_hi = y(res.ci_low), y(res.ci_high)
        if abs(y_lo - y_hi) > 1e-9:
            body.append(f'<line class="err" x1="{cx:.2f}" y1="{y_hi:.2f}" '
                        f'x2="{cx:.2f}" y2="{y_lo:.2f}"/>')
            for ye in (y_lo, y_hi):
                body.append(f'<line class="err" x1="{cx - 4:.2f}" y1="{ye:.2f}" '
                            f'x2="{cx + 4:.2f}" y2="{ye:.2f}"/>')
        lx = cx
        ly = MARGIN_TOP + plot_h + 12
        body.append(f'<text x="{lx:.2f}" y="{ly:.2f}" text-anchor="end" '
                    f'transform="rotate(-45 {lx:.2f} {ly:.2f})">{_esc(label)}</text>')
    return _svg_doc(PANEL_WIDTH, PANEL_HEIGHT, body)


def _ticks(vmin: float, vmax: float, target: int = 5) -> list[float]:
    span = vmax - vmin
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s for s in (1 * mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw),
               default=raw)
    first = math.ceil(vmin / step) * step
    ticks = []
    t = first
    while t <= vmax + 1e-12:
        ticks.append(round(t, 10))
        t += step
    return ticks


CELL = 34
HEAT_MARGIN = 110


def steiger_heatmap(method_ids: Sequence[str],
                    grid: dict[tuple[str, str], SteigerResult], title: str) -> str:
    """k x k pairwise-comparison heatmap: hue by winner, opacity by p tier."""
    k = len(method_ids)
    width = HEAT_MARGIN + CELL * k + 20
    height = HEAT_MARGIN + CELL * k + 20
    body = [f'<text class="title" x="10" y="20">{_esc(title)}</text>']
    tiers = {"p<0.001": 1.0, "p<0.01": 0.75, "p<0.05": 0.5, "ns": 0.15}
    for i, row in enumerate(method_ids):
        ly = HEAT_MARGIN + CELL * i + CELL / 2 + 4
        body.append(f'<text x="{HEAT_MARGIN - 6}" y="{ly}" text-anchor="end">'
                    f'{_esc(row)}</text>')
        lx = HEAT_MARGIN + CELL * i + CELL / 2
        body.append(f'<text x="{lx}" y="{HEAT_MARGIN - 6}" text-anchor="start" '
                    f'transform="rotate(-60 {lx} {HEAT_MARGIN - 6})">{_esc(row)}</text>')
        for j, col in enumerate(method_ids):
            x = HEAT_MARGIN + CELL * j
            yy = HEAT_MARGIN + CELL * i
            if i == j:
                body.append(f'<rect x="{x}" y="{yy}" width="{CELL}" height="{CELL}" '
                            f'fill="#f5f5f5" stroke="#ccc"/>')
                continue
            res = grid[(row, col)]
            color = "#15803d" if res.z > 0 else "#1d4ed8"
            opacity = tiers[significance_tier(res.p_value)]
            body.append(
                f'<rect x="{x}" y="{yy}" width="{CELL}" height="{CELL}" '
                f'fill="{color}" fill-opacity="{opacity}" stroke="#ccc">'
                f'<title>{_esc(row)} vs {_esc(col)}: Z={res.z:.3f} '
                f'p={res.p_value:.2g}</title></rect>')
    return _svg_doc(width, height, body)


def scatter_panel(points: Sequence[tuple[float, float, str]], title: str,
                  x_label: str, y_label: str,
                  fit: tuple[float, float] | None = None) -> str:
    """Scatter of (x, y, label) points with an optional y = a + b*x fit line
    (fit given as (slope, intercept))."""
    if not points:
        raise ValueError("no points to plot")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    xmin, xmax = min(xs), max(xs)
    if xmax == xmin:
        xmax = xmin + 1.0
    ymin, ymax = _nice_limits(min(ys), max(ys))
    plot_w = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = PANEL_HEIGHT - MARGIN_TOP - 50

    def sx(v: float) -> float:
        return MARGIN_LEFT + (v - xmin) / (xmax - xmin) * plot_w

    def sy(v: float) -> float:
        return MARGIN_TOP + (ymax - v) / (ymax - ymin) * plot_h

    body = [f'<text class="title" x="{MARGIN_LEFT}" y="20">{_esc(title)}</text>',
            f'<line class="axis" x1="{MARGIN_LEFT}" y1="{MARGIN_TOP + plot_h}" '
            f'x2="{MARGIN_LEFT + plot_w}" y2="{MARGIN_TOP + plot_h}"/>',
            f'<line class="axis" x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" '
            f'x2="{MARGIN_LEFT}" y2="{MARGIN_TOP + plot_h}"/>',
            f'<text x="{MARGIN_LEFT + plot_w / 2}" y="{PANEL_HEIGHT - 10}" '
            f'text-anchor="middle">{_esc(x_label)}</text>',
            f'<text x="14" y="{MARGIN_TOP + plot_h / 2}" text-anchor="middle" '
            f'transform="rotate(-90 14 {MARGIN_TOP + plot_h / 2})">{_esc(y_label)}</text>']
    if fit is not None:
        slope, intercept = fit
        body.append(f'<line class="err" x1="{sx(xmin):.2f}" '
                    f'y1="{sy(intercept + slope * xmin):.2f}" x2="{sx(xmax):.2f}" '
                    f'y2="{sy(intercept + slope * xmax):.2f}"/>')
    for x, y, label in points:
        body.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3.5" '
                    f'class="sig-mid"><title>{_esc(label)}: ({x:.3g}, {y:.3g})'
                    f'</title></circle>')
    return _svg_doc(PANEL_WIDTH, PANEL_HEIGHT, body)
