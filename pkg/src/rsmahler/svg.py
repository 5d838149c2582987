"""Minimal hand-written SVG charts (histograms and line plots).

Coordinates are printed with fixed precision so identical data always
produces identical bytes.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

W, H = 640, 400
ML, MR, MT, MB = 60, 20, 30, 50


def _f(x: float) -> str:
    return f"{x:.2f}"


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{ML}" y1="{H - MB}" x2="{W - MR}" y2="{H - MB}" stroke="black"/>',
        f'<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{H - MB}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {H / 2})">{escape(ylabel)}</text>',
    ]


def _ticks(lo: float, hi: float, sx, sy, ylo: float, yhi: float) -> list[str]:
    out = []
    for i in range(5):
        xv = lo + (hi - lo) * i / 4
        yv = ylo + (yhi - ylo) * i / 4
        out.append(f'<text x="{_f(sx(xv))}" y="{H - MB + 16}" text-anchor="middle" '
                   f'font-size="10">{xv:.4g}</text>')
        out.append(f'<text x="{ML - 4}" y="{_f(sy(yv) + 3)}" text-anchor="end" '
                   f'font-size="10">{yv:.4g}</text>')
    return out


def _scales(xlo, xhi, ylo, yhi):
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0

    def sx(x):
        return ML + (x - xlo) / (xhi - xlo) * (W - ML - MR)

    def sy(y):
        return H - MB - (y - ylo) / (yhi - ylo) * (H - MT - MB)

    return sx, sy, xhi, yhi


def histogram_svg(edges: Sequence[float], masses: Sequence[float],
                  limit: Sequence[float], title: str = "", xlabel: str = "value") -> str:
    """Bars for ``masses`` with the limiting masses drawn as a red step line."""
    xlo, xhi = float(edges[0]), float(edges[-1])
    ytop = max(max(masses, default=0.0), max(limit, default=0.0)) * 1.1 or 1.0
    sx, sy, xhi, ytop = _scales(xlo, xhi, 0.0, ytop)
    out = _frame(title, xlabel, "mass")
    for a, b, m in zip(edges[:-1], edges[1:], masses):
        x0, x1 = sx(float(a)), sx(float(b))
        y = sy(float(m))
        out.append(f'<rect x="{_f(x0)}" y="{_f(y)}" width="{_f(x1 - x0)}" '
                   f'height="{_f(H - MB - y)}" fill="steelblue" stroke="white"/>')
    pts = []
    for a, b, m in zip(edges[:-1], edges[1:], limit):
        pts.append(f"{_f(sx(float(a)))},{_f(sy(float(m)))}")
        pts.append(f"{_f(sx(float(b)))},{_f(sy(float(m)))}")
    out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="crimson" stroke-width="1.5"/>')
    out.extend(_ticks(xlo, xhi, sx, sy, 0.0, ytop))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_svg(xs: Sequence[float], ys: Sequence[float], title: str = "",
             xlabel: str = "parameter", ylabel: str = "gap") -> str:
    """Polyline with point markers; non-finite points are skipped."""
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(y)]
    if not pts:
        pts = [(0.0, 0.0)]
    xlo = min(p[0] for p in pts)
    xhi = max(p[0] for p in pts)
    ylo = min(0.0, min(p[1] for p in pts))
    yhi = max(0.0, max(p[1] for p in pts))
    pad = 0.05 * (yhi - ylo or 1.0)
    sx, sy, xhi, yhi = _scales(xlo, xhi, ylo - pad, yhi + pad)
    ylo -= pad
    out = _frame(title, xlabel, ylabel)
    out.append(f'<line x1="{ML}" y1="{_f(sy(0.0))}" x2="{W - MR}" y2="{_f(sy(0.0))}" '
               f'stroke="gray" stroke-dasharray="4 3"/>')
    poly = " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in pts)
    out.append(f'<polyline points="{poly}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    for x, y in pts:
        out.append(f'<circle cx="{_f(sx(x))}" cy="{_f(sy(y))}" r="3" fill="steelblue"/>')
    out.extend(_ticks(xlo, xhi, sx, sy, ylo, yhi))
    out.append("</svg>")
    return "\n".join(out) + "\n"
