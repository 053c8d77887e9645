"""
Standalone SVG 1.1 rendering of a PlotSpec.

Output is deterministic: numbers are written with 6 significant digits and
elements appear in layer order.
"""
from typing import Iterable, List, Tuple
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from plotting.spec import Layer, LayerKind, PlotSpec

MARGIN_LEFT = 64
MARGIN_RIGHT = 20
MARGIN_TOP = 36
MARGIN_BOTTOM = 52
TICKS = 5
PAD = 0.04


def fmt(value: float) -> str:
    return format(float(value), ".6g")


class SvgDocument:
    """Accumulates SVG elements as text."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def open_group(self, css_class: str, label: str = ""):
        title = f"<title>{escape(label)}</title>" if label else ""
        self.parts.append(f'<g class={quoteattr(css_class)}>{title}')

    def close_group(self):
        self.parts.append("</g>")

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0):
        self.parts.append(
            f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{fmt(width)}"/>'
        )

    def text(self, x, y, content: str, anchor="middle", size=11, rotate=False):
        transform = f' transform="rotate(-90 {fmt(x)} {fmt(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{fmt(x)}" y="{fmt(y)}" text-anchor="{anchor}" font-size="{size}" '
            f'font-family="sans-serif"{transform}>{escape(content)}</text>'
        )

    def polygon(self, points: Iterable[Tuple[float, float]], fill: str, opacity: float):
        coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in points)
        self.parts.append(f'<polygon points="{coords}" fill="{fill}" fill-opacity="{fmt(opacity)}" stroke="none"/>')

    def polyline(self, points: Iterable[Tuple[float, float]], stroke: str, width: float):
        coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in points)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{fmt(width)}"/>')

    def circle(self, x, y, r, fill: str):
        self.parts.append(f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="{fmt(r)}" fill="{fill}"/>')

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
            f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _range(values: List[np.ndarray]) -> Tuple[float, float]:
    finite = [v[np.isfinite(v)] for v in values]
    finite = [v for v in finite if v.size]
    if not finite:
        return 0.0, 1.0
    lo = min(float(v.min()) for v in finite)
    hi = max(float(v.max()) for v in finite)
    if hi == lo:
        half = max(abs(lo) * 0.5, 0.5)
        return lo - half, hi + half
    pad = (hi - lo) * PAD
    return lo - pad, hi + pad


class _Frame:
    """Maps data coordinates to pixels; infinite values go to the frame edge."""

    def __init__(self, spec: PlotSpec):
        xs = [layer.x for layer in spec.layers]
        ys = [series for layer in spec.layers for series in layer.values]
        self.x_lo, self.x_hi = _range(xs)
        self.y_lo, self.y_hi = _range(ys)
        self.left = MARGIN_LEFT
        self.right = spec.width - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = spec.height - MARGIN_BOTTOM

    def px(self, x: np.ndarray) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), self.x_lo, self.x_hi)
        return self.left + (x - self.x_lo) / (self.x_hi - self.x_lo) * (self.right - self.left)

    def py(self, y: np.ndarray) -> np.ndarray:
        y = np.clip(np.asarray(y, dtype=float), self.y_lo, self.y_hi)
        return self.bottom - (y - self.y_lo) / (self.y_hi - self.y_lo) * (self.bottom - self.top)


def _axes(doc: SvgDocument, frame: _Frame, spec: PlotSpec):
    doc.open_group("axes")
    doc.line(frame.left, frame.bottom, frame.right, frame.bottom)
    doc.line(frame.left, frame.bottom, frame.left, frame.top)
    for value in np.linspace(frame.x_lo, frame.x_hi, TICKS):
        x = float(frame.px(value))
        doc.line(x, frame.bottom, x, frame.bottom + 5)
        doc.text(x, frame.bottom + 18, format(value, ".3g"))
    for value in np.linspace(frame.y_lo, frame.y_hi, TICKS):
        y = float(frame.py(value))
        doc.line(frame.left - 5, y, frame.left, y)
        doc.text(frame.left - 8, y + 4, format(value, ".3g"), anchor="end")
    doc.text((frame.left + frame.right) / 2, spec.height - 12, spec.x_label, size=12)
    doc.text(16, (frame.top + frame.bottom) / 2, spec.y_label, size=12, rotate=True)
    if spec.title:
        doc.text(spec.width / 2, 20, spec.title, size=14)
    doc.close_group()


def _draw(doc: SvgDocument, frame: _Frame, layer: Layer):
    xs = frame.px(layer.x)
    doc.open_group(layer.kind.value, layer.label)
    if layer.kind is LayerKind.BAND:
        lower, upper = (frame.py(series) for series in layer.values)
        outline = list(zip(xs, upper)) + list(zip(xs[::-1], lower[::-1]))
        doc.polygon(outline, layer.style.color, layer.style.opacity)
    elif layer.kind is LayerKind.LINE:
        doc.polyline(zip(xs, frame.py(layer.values[0])), layer.style.color, layer.style.line_width)
    else:
        for x, y in zip(xs, frame.py(layer.values[0])):
            doc.circle(x, y, layer.style.point_size, layer.style.color)
    doc.close_group()


def emit_svg(spec: PlotSpec) -> str:
    """SVG document text for the plot."""
    doc = SvgDocument(spec.width, spec.height)
    frame = _Frame(spec)
    doc.parts.append(f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>')
    _axes(doc, frame, spec)
    for layer in spec.layers:
        _draw(doc, frame, layer)
    return doc.render()
