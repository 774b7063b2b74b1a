"""
Small hand-written SVG charts: labelled scatter plots (optionally with a fitted
line) and a bar chart for explained variance. Output depends only on the input
values, so files diff cleanly between runs.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
PADDING = 0.05
TICKS = 5

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#bcbd22",
    "#17becf",
    "#7f7f7f",
)
NOISE_COLOUR = "#b0b0b0"


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick(value: float) -> str:
    return f"{value:.4g}"


def _range(values: np.ndarray) -> Tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo
    if span == 0:
        span = abs(lo) if lo != 0 else 1.0
    return lo - PADDING * span, hi + PADDING * span


class _Canvas:
    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float], title: str):
        self.x_range = x_range
        self.y_range = y_range
        self.parts: List[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        ]

    def px(self, x: float) -> float:
        lo, hi = self.x_range
        return MARGIN_LEFT + (x - lo) / (hi - lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)

    def py(self, y: float) -> float:
        lo, hi = self.y_range
        return HEIGHT - MARGIN_BOTTOM - (y - lo) / (hi - lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)

    def axes(self, x_label: str, y_label: str, x_ticks: bool = True) -> None:
        left, right = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
        top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
        self.parts.append(
            f'<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>'
        )
        for i in range(TICKS + 1):
            fraction = i / TICKS
            y_value = self.y_range[0] + fraction * (self.y_range[1] - self.y_range[0])
            y = self.py(y_value)
            self.parts.append(f'<line x1="{left - 4}" y1="{_fmt(y)}" x2="{left}" y2="{_fmt(y)}" stroke="black"/>')
            self.parts.append(
                f'<text x="{left - 6}" y="{_fmt(y + 4)}" text-anchor="end">{_tick(y_value)}</text>'
            )
            if x_ticks:
                x_value = self.x_range[0] + fraction * (self.x_range[1] - self.x_range[0])
                x = self.px(x_value)
                self.parts.append(
                    f'<line x1="{_fmt(x)}" y1="{bottom}" x2="{_fmt(x)}" y2="{bottom + 4}" stroke="black"/>'
                )
                self.parts.append(
                    f'<text x="{_fmt(x)}" y="{bottom + 16}" text-anchor="middle">{_tick(x_value)}</text>'
                )
        self.parts.append(
            f'<text x="{(left + right) / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(x_label)}</text>'
        )
        self.parts.append(
            f'<text x="15" y="{(top + bottom) / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 15 {(top + bottom) / 2:.0f})">{escape(y_label)}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def colour_for(label: int) -> str:
    return NOISE_COLOUR if label < 0 else PALETTE[label % len(PALETTE)]


def scatter_svg(
    x: Sequence[float],
    y: Sequence[float],
    names: Sequence[str],
    labels: Optional[Sequence[int]] = None,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    line: Optional[Tuple[float, float]] = None,
) -> str:
    """Scatter of named points coloured by cluster label; line is (slope, intercept)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    labels = [0] * len(x) if labels is None else [int(label) for label in labels]
    canvas = _Canvas(_range(x), _range(y), title)
    canvas.axes(x_label, y_label)

    if line is not None:
        slope, intercept = line
        x0, x1 = canvas.x_range
        canvas.parts.append(
            f'<line x1="{_fmt(canvas.px(x0))}" y1="{_fmt(canvas.py(slope * x0 + intercept))}" '
            f'x2="{_fmt(canvas.px(x1))}" y2="{_fmt(canvas.py(slope * x1 + intercept))}" '
            f'stroke="#d62728" stroke-dasharray="6 4"/>'
        )

    for xi, yi, name, label in zip(x, y, names, labels):
        px, py = canvas.px(xi), canvas.py(yi)
        canvas.parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="5" fill="{colour_for(label)}" stroke="black"/>'
        )
        canvas.parts.append(f'<text x="{_fmt(px + 7)}" y="{_fmt(py - 7)}">{escape(name)}</text>')

    legend = sorted(set(labels))
    for row, label in enumerate(legend if len(legend) > 1 else []):
        y_pos = MARGIN_TOP + 14 * row
        text = "noise" if label < 0 else f"cluster {label + 1}"
        canvas.parts.append(
            f'<rect x="{WIDTH - 110}" y="{y_pos}" width="10" height="10" fill="{colour_for(label)}"/>'
        )
        canvas.parts.append(f'<text x="{WIDTH - 95}" y="{y_pos + 9}">{text}</text>')
    return canvas.render()


def bar_svg(
    values: Sequence[float], title: str = "", x_label: str = "", y_label: str = "", cumulative: bool = True
) -> str:
    """One bar per value (component 1..n) with an optional cumulative-sum polyline"""
    values = np.asarray(values, dtype=float)
    count = max(len(values), 1)
    canvas = _Canvas((0.0, float(count)), (0.0, 1.0), title)
    canvas.axes(x_label, y_label, x_ticks=False)

    bar_width = (canvas.px(1.0) - canvas.px(0.0)) * 0.7
    for i, value in enumerate(values):
        centre = canvas.px(i + 0.5)
        top = canvas.py(value)
        canvas.parts.append(
            f'<rect x="{_fmt(centre - bar_width / 2)}" y="{_fmt(top)}" width="{_fmt(bar_width)}" '
            f'height="{_fmt(canvas.py(0.0) - top)}" fill="{PALETTE[0]}"/>'
        )
        canvas.parts.append(
            f'<text x="{_fmt(centre)}" y="{HEIGHT - MARGIN_BOTTOM + 16}" text-anchor="middle">{i + 1}</text>'
        )

    if cumulative and len(values):
        points = " ".join(
            f"{_fmt(canvas.px(i + 0.5))},{_fmt(canvas.py(total))}" for i, total in enumerate(np.cumsum(values))
        )
        canvas.parts.append(f'<polyline points="{points}" fill="none" stroke="{PALETTE[1]}"/>')
    return canvas.render()


def write_svg(svg: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(svg, encoding="utf-8")
    return path
