"""Standalone SVG line plots written as plain markup.

Output depends only on the input numbers and the PlotSpec, so identical
inputs give identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import EmptySeries, ValidationError

__all__ = ["Series", "PlotSpec", "emit_plot", "render_plot"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class Series:
    label: str
    x: tuple
    y: tuple
    dashed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValidationError(f"series {self.label!r}: x and y lengths differ")


@dataclass(frozen=True)
class PlotSpec:
    title: str = ""
    xlabel: str = "t"
    ylabel: str = ""
    log_y: bool = False
    width: int = 640
    height: int = 400
    metadata: str = ""  # embedded verbatim (escaped) in a <metadata> block


def _num(v):
    return f"{v:.6g}"


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def _decades(lo, hi):
    first, last = math.floor(lo), math.ceil(hi)
    step = max(1, (last - first) // 6)
    return list(range(first, last + 1, step))


def render_plot(series, spec=PlotSpec()):
    """SVG document as a string."""
    series = [s if isinstance(s, Series) else Series(*s) for s in series]
    if not series or not any(s.x for s in series):
        raise EmptySeries("nothing to plot")
    left, right, top, bottom = 70, 20, 36, 46
    W, H = spec.width, spec.height
    pw, ph = W - left - right, H - top - bottom

    def ymap(v):
        if spec.log_y:
            return math.log10(v) if v > 0 else None
        return v if math.isfinite(v) else None

    xs = [x for s in series for x in s.x if math.isfinite(x)]
    ys = [v for s in series for v in map(ymap, s.y) if v is not None]
    if not xs or not ys:
        raise EmptySeries("no finite points to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        pad = 0.5 if spec.log_y else max(abs(y0) * 0.1, 0.5)
        y0, y1 = y0 - pad, y1 + pad
    if spec.log_y:
        y0, y1 = math.floor(y0), math.ceil(y1)

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
    ]
    if spec.metadata:
        out.append(f"<metadata>{escape(spec.metadata)}</metadata>")
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
    if spec.title:
        out.append(f'<text x="{W / 2:g}" y="20" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{_num(X)}" y1="{top + ph}" x2="{_num(X)}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(X)}" y="{top + ph + 18}" text-anchor="middle" font-size="11">{_num(t)}</text>')
    yticks = _decades(y0, y1) if spec.log_y else _ticks(y0, y1)
    for t in yticks:
        Y = py(t)
        label = f"1e{t}" if spec.log_y else _num(t)
        out.append(f'<line x1="{left - 5}" y1="{_num(Y)}" x2="{left}" y2="{_num(Y)}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_num(Y + 4)}" text-anchor="end" font-size="11">{label}</text>')
    out.append(f'<text x="{left + pw / 2:g}" y="{H - 8}" text-anchor="middle" font-size="12">{escape(spec.xlabel)}</text>')
    ylab = spec.ylabel + (" (log10)" if spec.log_y else "")
    out.append(f'<text x="14" y="{top + ph / 2:g}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 14 {top + ph / 2:g})">{escape(ylab)}</text>')
    for k, s in enumerate(series):
        colour = PALETTE[k % len(PALETTE)]
        # break the polyline at points that cannot be drawn (e.g. zeros on a log axis)
        runs, cur = [], []
        for x, y in zip(s.x, s.y):
            v = ymap(y)
            if v is None or not math.isfinite(x):
                if cur:
                    runs.append(cur)
                cur = []
                continue
            cur.append(f"{_num(px(x))},{_num(py(v))}")
        if cur:
            runs.append(cur)
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{" ".join(run)}"/>')
        ly = top + 14 + 16 * k
        out.append(f'<line x1="{left + pw - 150}" y1="{ly}" x2="{left + pw - 126}" y2="{ly}" stroke="{colour}"{dash}/>')
        out.append(f'<text x="{left + pw - 120}" y="{ly + 4}" font-size="11">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(series, spec, path):
    """Write the plot to ``path``; raises EmptySeries for empty input."""
    text = render_plot(series, spec)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    return path
