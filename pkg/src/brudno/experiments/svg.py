"""A small SVG line-chart writer, enough for rate-versus-n curves."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=160, top=40, bottom=55)


def _ticks(lo: float, hi: float, count: int = 5) -> list:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        out.append(round(v, 12))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def line_chart(series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
               hlines: dict = None, log_x: bool = False) -> str:
    """SVG text for ``series`` (name -> list of (x, y)); ``hlines`` adds labelled horizontal rules."""
    hlines = hlines or {}
    pts = [(x, y) for s in series.values() for x, y in s if math.isfinite(y)]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    fx = (lambda x: math.log2(x)) if log_x else (lambda x: float(x))
    xs = [fx(x) for x, _ in pts]
    ys = [y for _, y in pts] + [v for v in hlines.values() if math.isfinite(v)]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (fx(x) - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + (1 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>']
    left, top, bottom = MARGIN["left"], MARGIN["top"], MARGIN["top"] + ph
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 4}" y1="{py(t):.1f}" x2="{left}" y2="{py(t):.1f}" stroke="#444"/>')
        out.append(f'<text x="{left - 7}" y="{py(t) + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    xticks = sorted({x for x, _ in pts}) if log_x else _ticks(x0, x1)
    for t in xticks:
        out.append(f'<line x1="{px(t):.1f}" y1="{bottom}" x2="{px(t):.1f}" y2="{bottom + 4}" stroke="#444"/>')
        out.append(f'<text x="{px(t):.1f}" y="{bottom + 17}" text-anchor="middle">{_fmt(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(18 {top + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    legend_y = top + 10
    for i, (label, value) in enumerate(hlines.items()):
        if not math.isfinite(value):
            continue
        y = py(value)
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" '
                   f'stroke="#888" stroke-dasharray="5,4"/>')
        out.append(f'<text x="{left + pw + 8}" y="{y + 4:.1f}" fill="#666">{escape(label)}</text>')
    for i, (label, data) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        data = [(x, y) for x, y in data if math.isfinite(y)]
        if not data:
            continue
        path = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in data)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        for x, y in data:
            out.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="2.5" fill="{color}"/>')
        ly = legend_y + 18 * i
        out.append(f'<line x1="{left + pw + 8}" y1="{ly}" x2="{left + pw + 26}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 30}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
