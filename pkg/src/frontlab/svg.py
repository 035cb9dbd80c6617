"""Minimal standalone SVG 1.1 line plots (no scripts, no external renderer)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


@dataclass
class LinePlot:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    vlines: list[tuple[float, str]] = field(default_factory=list)
    width: int = 640
    height: int = 420


def nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [round(t, 12) for t in np.arange(start, hi + step * 1e-9, step)]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _runs(x: np.ndarray, y: np.ndarray):
    """Split into runs of finite points so gaps are not bridged."""
    ok = np.isfinite(x) & np.isfinite(y)
    start = None
    for i, good in enumerate(ok):
        if good and start is None:
            start = i
        elif not good and start is not None:
            yield slice(start, i)
            start = None
    if start is not None:
        yield slice(start, len(ok))


def render(plot: LinePlot) -> str:
    W, H = plot.width, plot.height
    left, right, top, bottom = 70, 20, 40, 55
    pw, ph = W - left - right, H - top - bottom
    xs = [np.asarray(s.x, dtype=float) for s in plot.series]
    ys = [np.asarray(s.y, dtype=float) for s in plot.series]
    allx = np.concatenate(xs + [np.array([v for v, _ in plot.vlines], dtype=float)]) if xs else np.array([0.0, 1.0])
    ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    allx, ally = allx[np.isfinite(allx)], ally[np.isfinite(ally)]
    x0, x1 = (float(allx.min()), float(allx.max())) if allx.size else (0.0, 1.0)
    y0, y1 = (float(ally.min()), float(ally.max())) if ally.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def X(v):
        return left + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{escape(plot.title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(x0, x1):
        px = X(t)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    for t in nice_ticks(y0, y1):
        py = Y(t)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(plot.xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(plot.ylabel)}</text>'
    )
    for v, label in plot.vlines:
        px = X(v)
        out.append(f'<line class="marker" x1="{px:.2f}" y1="{top}" x2="{px:.2f}" y2="{top + ph}" stroke="gray" stroke-dasharray="5,4"/>')
        out.append(f'<text x="{px + 4:.2f}" y="{top + 14}" font-family="sans-serif" font-size="11" fill="gray">{escape(label)}</text>')
    for i, (s, x, y) in enumerate(zip(plot.series, xs, ys)):
        color = PALETTE[i % len(PALETTE)]
        for sl in _runs(x, y):
            pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(x[sl], y[sl]))
            out.append(f'<polyline class="series" fill="none" stroke="{color}" stroke-width="1.6" points="{pts}"/>')
        ly = top + 16 + 16 * i
        out.append(f'<line x1="{left + pw - 110}" y1="{ly}" x2="{left + pw - 85}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 80}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
