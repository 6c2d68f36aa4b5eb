"""Self-contained SVG line plots — no plotting dependencies, deterministic
output, optional confidence band and log-scaled x axis."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 32, 44


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    step = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= step * mult:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list[float]:
    ticks = []
    for e in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1):
        t = 10.0 ** e
        if lo / 1.001 <= t <= hi * 1.001:
            ticks.append(t)
    return ticks or [lo, hi]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def line_plot(xs, ys, *, title: str = "", xlabel: str = "", ylabel: str = "",
              width: int = 720, height: int = 480, log_x: bool = False,
              band=None, comments=None) -> str:
    """SVG text for y(x) as a polyline with axes and ticks.  `band` is an
    optional (lower, upper) pair of sequences drawn as a shaded region;
    `comments` lines are embedded as an XML comment for provenance."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys) or not xs:
        raise ValueError("xs and ys must be equal-length and nonempty")
    if log_x:
        if min(xs) <= 0:
            raise ValueError("log x axis requires positive x values")
        tx = [math.log10(x) for x in xs]
    else:
        tx = xs

    ylo, yhi = min(ys), max(ys)
    if band is not None:
        lo_b, hi_b = band
        ylo = min(ylo, min(float(v) for v in lo_b))
        yhi = max(yhi, max(float(v) for v in hi_b))
    xlo, xhi = min(tx), max(tx)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    ypad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - ypad, yhi + ypad

    pw = width - _MARGIN_L - _MARGIN_R
    ph = height - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        v = math.log10(x) if log_x else x
        return _MARGIN_L + (v - xlo) / (xhi - xlo) * pw

    def py(y: float) -> float:
        return _MARGIN_T + (yhi - y) / (yhi - ylo) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">']
    if comments:
        safe = "\n".join(str(c).replace("--", "- -") for c in comments)
        parts.append(f"<!--\n{safe}\n-->")
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')

    if log_x:
        xticks = _log_ticks(min(xs), max(xs))
    else:
        xticks = _nice_ticks(xlo, xhi)
    yticks = _nice_ticks(ylo, yhi)

    axis = 'stroke="#444" stroke-width="1"'
    grid = 'stroke="#ddd" stroke-width="0.5"'
    x0, y0 = _MARGIN_L, _MARGIN_T + ph
    for t in xticks:
        x = px(t)
        parts.append(f'<line x1="{x:.2f}" y1="{_MARGIN_T}" x2="{x:.2f}" y2="{y0}" {grid}/>')
        parts.append(f'<text x="{x:.2f}" y="{y0 + 16}" font-size="11" '
                     f'text-anchor="middle" font-family="monospace">{_fmt(t)}</text>')
    for t in yticks:
        y = py(t)
        parts.append(f'<line x1="{x0}" y1="{y:.2f}" x2="{x0 + pw}" y2="{y:.2f}" {grid}/>')
        parts.append(f'<text x="{x0 - 6}" y="{y + 4:.2f}" font-size="11" '
                     f'text-anchor="end" font-family="monospace">{_fmt(t)}</text>')
    parts.append(f'<line x1="{x0}" y1="{_MARGIN_T}" x2="{x0}" y2="{y0}" {axis}/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" {axis}/>')

    if band is not None:
        lo_b = [float(v) for v in band[0]]
        hi_b = [float(v) for v in band[1]]
        pts = [f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, hi_b)]
        pts += [f"{px(x):.2f},{py(v):.2f}" for x, v in zip(reversed(xs), reversed(lo_b))]
        parts.append(f'<polygon points="{" ".join(pts)}" fill="#9ec9e8" '
                     f'fill-opacity="0.5" stroke="none"/>')

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>')
    if len(xs) <= 64:
        for x, y in zip(xs, ys):
            parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="#1f5fa8"/>')

    if title:
        parts.append(f'<text x="{width / 2:.2f}" y="20" font-size="14" '
                     f'text-anchor="middle" font-family="sans-serif">{escape(title)}</text>')
    if xlabel:
        parts.append(f'<text x="{_MARGIN_L + pw / 2:.2f}" y="{height - 10}" font-size="12" '
                     f'text-anchor="middle" font-family="sans-serif">{escape(xlabel)}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{_MARGIN_T + ph / 2:.2f}" font-size="12" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'transform="rotate(-90 16 {_MARGIN_T + ph / 2:.2f})">{escape(ylabel)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
