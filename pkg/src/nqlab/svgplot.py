"""Hand-rolled static SVG line plots.

Vector-only on purpose: no raster payloads, no plotting dependency, and
byte-deterministic output so emitted figures can live under version
control and diff cleanly.  Numbers are formatted with the same %.6g
convention as every other emitted file.
"""

from __future__ import annotations

import math

from .datafiles import fmt

_PALETTE = ("#1f6fb4", "#d95f02", "#2a9d54", "#7b4fa6", "#b02730")

_MARGIN_L = 64.0
_MARGIN_R = 16.0
_MARGIN_T = 34.0
_MARGIN_B = 46.0


def _nice_ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def line_plot(series, xlabel: str, ylabel: str, title: str = None,
              width: int = 640, height: int = 420) -> str:
    """Render labeled (x, y) series as an SVG document string.

    Parameters
    ----------
    series : list of (label, x, y)
        One polyline per entry; labels go into the legend.
    xlabel, ylabel : str
        Axis labels; put units here, they are not inferred.
    """
    series = [(str(label), [float(v) for v in x], [float(v) for v in y])
              for label, x, y in series]
    if not series or any(len(x) != len(y) or len(x) < 2 for _, x, y in series):
        raise ValueError("each series needs equal-length x, y with >= 2 points")

    x_lo = min(min(x) for _, x, _ in series)
    x_hi = max(max(x) for _, x, _ in series)
    y_lo = min(min(y) for _, _, y in series)
    y_hi = max(max(y) for _, _, y in series)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        pad = abs(y_lo) if y_lo != 0.0 else 1.0
        y_lo, y_hi = y_lo - 0.5 * pad, y_hi + 0.5 * pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    px_w = width - _MARGIN_L - _MARGIN_R
    px_h = height - _MARGIN_T - _MARGIN_B

    def sx(v):
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * px_w

    def sy(v):
        return _MARGIN_T + (y_hi - v) / (y_hi - y_lo) * px_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    axis = (f'M {fmt(_MARGIN_L)} {fmt(_MARGIN_T)} '
            f'L {fmt(_MARGIN_L)} {fmt(_MARGIN_T + px_h)} '
            f'L {fmt(_MARGIN_L + px_w)} {fmt(_MARGIN_T + px_h)}')
    parts.append(f'<path d="{axis}" stroke="black" fill="none" stroke-width="1"/>')

    for tick in _nice_ticks(x_lo, x_hi):
        if tick < x_lo or tick > x_hi:
            continue
        px = sx(tick)
        parts.append(f'<line x1="{fmt(px)}" y1="{fmt(_MARGIN_T + px_h)}" '
                     f'x2="{fmt(px)}" y2="{fmt(_MARGIN_T + px_h + 5)}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{fmt(px)}" y="{fmt(_MARGIN_T + px_h + 18)}" '
                     f'font-size="11" text-anchor="middle" '
                     f'font-family="sans-serif">{fmt(tick)}</text>')
    for tick in _nice_ticks(y_lo, y_hi):
        if tick < y_lo or tick > y_hi:
            continue
        py = sy(tick)
        parts.append(f'<line x1="{fmt(_MARGIN_L - 5)}" y1="{fmt(py)}" '
                     f'x2="{fmt(_MARGIN_L)}" y2="{fmt(py)}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{fmt(_MARGIN_L - 8)}" y="{fmt(py + 4)}" '
                     f'font-size="11" text-anchor="end" '
                     f'font-family="sans-serif">{fmt(tick)}</text>')

    parts.append(f'<text x="{fmt(_MARGIN_L + px_w / 2)}" y="{fmt(height - 10)}" '
                 f'font-size="12" text-anchor="middle" '
                 f'font-family="sans-serif">{_escape(xlabel)}</text>')
    parts.append(f'<text x="14" y="{fmt(_MARGIN_T + px_h / 2)}" font-size="12" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'transform="rotate(-90 14 {fmt(_MARGIN_T + px_h / 2)})">'
                 f'{_escape(ylabel)}</text>')
    if title:
        parts.append(f'<text x="{fmt(_MARGIN_L + px_w / 2)}" y="20" '
                     f'font-size="13" text-anchor="middle" '
                     f'font-family="sans-serif">{_escape(title)}</text>')

    for k, (label, x, y) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        points = " ".join(f"{fmt(sx(xv))},{fmt(sy(yv))}" for xv, yv in zip(x, y))
        parts.append(f'<polyline points="{points}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        ly = _MARGIN_T + 8 + 14 * k
        lx = _MARGIN_L + px_w - 130
        parts.append(f'<line x1="{fmt(lx)}" y1="{fmt(ly)}" x2="{fmt(lx + 18)}" '
                     f'y2="{fmt(ly)}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{fmt(lx + 23)}" y="{fmt(ly + 4)}" font-size="11" '
                     f'font-family="sans-serif">{_escape(label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def write_svg(path, svg_text: str):
    with open(path, "w", newline="") as fh:
        fh.write(svg_text)
