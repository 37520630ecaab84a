"""Minimal static SVG rendering of a realized path."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT, MARGIN = 640, 480, 40


def render_svg(rows: Sequence[tuple[float, float]], title: str = "", reference: bool = True) -> str:
    """Polyline through ``rows`` with dashed y = t (red) and y = -t (blue) guides."""
    ts = [t for t, _ in rows]
    xs = [x for _, x in rows]
    t0, t1 = min(ts), max(ts)
    if reference:
        xs = xs + [t0, t1, -t0, -t1]
    y0, y1 = min(xs), max(xs)
    if t1 == t0:
        t1 = t0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(t):
        return MARGIN + (t - t0) / (t1 - t0) * (WIDTH - 2 * MARGIN)

    def sy(y):
        return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    def line(a, b, colour):
        return (f'<line x1="{sx(t0):.2f}" y1="{sy(a):.2f}" x2="{sx(t1):.2f}" y2="{sy(b):.2f}" '
                f'stroke="{colour}" stroke-dasharray="6,4" stroke-width="1"/>')

    points = " ".join(f"{sx(t):.2f},{sy(x):.2f}" for t, x in rows)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{sy(0.0) if y0 <= 0 <= y1 else HEIGHT - MARGIN:.2f}" '
        f'x2="{WIDTH - MARGIN}" y2="{sy(0.0) if y0 <= 0 <= y1 else HEIGHT - MARGIN:.2f}" stroke="#888"/>',
    ]
    if reference:
        parts += [line(t0, t1, "red"), line(-t0, -t1, "blue")]
    parts.append(f'<polyline fill="none" stroke="black" stroke-width="1" points="{points}"/>')
    if title:
        parts.append(f'<text x="{MARGIN}" y="{MARGIN / 2:.0f}" font-size="14">{escape(title)}</text>')
    parts.append(f'<text x="{MARGIN}" y="{HEIGHT - 10}" font-size="11">t = {t0:g}</text>')
    parts.append(f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - 10}" font-size="11" text-anchor="end">t = {t1:g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
