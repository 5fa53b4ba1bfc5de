"""Deterministic SVG renderings of surfaces and unfolded traces.

SVG output is plain text with fixed float formatting, so renders of the
same input compare equal byte-for-byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .surface import FlatSurface
from .tracer import GeodesicTrace, unfold

_FACE_FILLS = ("#dce8f5", "#f5e8dc", "#e2f0dc", "#f3e0ee", "#e9e3f7", "#f7f3d9")


@dataclass(frozen=True)
class RenderSpec:
    width: int = 800
    height: int = 600
    stroke_width: float = 1.0
    trace_stroke_width: float = 1.5
    edge_color: str = "#555555"
    trace_color: str = "#c0392b"
    cone_color: str = "#8e44ad"
    flat_vertex_color: str = "#95a5a6"
    face_fills: tuple[str, ...] = field(default=_FACE_FILLS)
    mode: str = "per-chart"  # or "unfolded"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("render dimensions must be positive")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


class _Canvas:
    def __init__(self, spec: RenderSpec):
        self.spec = spec
        self.items: list[str] = []
        self.min_x = math.inf
        self.min_y = math.inf
        self.max_x = -math.inf
        self.max_y = -math.inf

    def see(self, pts):
        for x, y in pts:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def polygon(self, pts, fill, stroke, width):
        self.see(pts)
        coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in pts)
        self.items.append(
            f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}" stroke-linejoin="round"/>'
        )

    def line(self, a, b, color, width):
        self.see([a, b])
        self.items.append(
            f'<line x1="{_fmt(a[0])}" y1="{_fmt(-a[1])}" x2="{_fmt(b[0])}" y2="{_fmt(-b[1])}" '
            f'stroke="{color}" stroke-width="{_fmt(width)}" stroke-linecap="round"/>'
        )

    def circle(self, c, r, color):
        self.see([c])
        self.items.append(
            f'<circle cx="{_fmt(c[0])}" cy="{_fmt(-c[1])}" r="{_fmt(r)}" fill="{color}"/>'
        )

    def to_svg(self) -> str:
        pad = 0.05 * max(self.max_x - self.min_x, self.max_y - self.min_y, 1e-9)
        x0 = self.min_x - pad
        y0 = -self.max_y - pad
        w = (self.max_x - self.min_x) + 2 * pad
        h = (self.max_y - self.min_y) + 2 * pad
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.spec.width}" '
            f'height="{self.spec.height}" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">'
        )
        return head + "\n" + "\n".join(self.items) + "\n</svg>\n"


def render_surface(surface: FlatSurface, spec: RenderSpec | None = None) -> str:
    """Draw every chart, laid out on a grid, with cone points marked."""
    spec = spec or RenderSpec()
    canvas = _Canvas(spec)
    n = len(surface.triangles)
    cols = max(1, int(math.ceil(math.sqrt(n))))
    cell = 0.0
    for t in surface.triangles:
        xs = [c[0] for c in t.corners]
        ys = [c[1] for c in t.corners]
        cell = max(cell, max(xs) - min(xs), max(ys) - min(ys))
    cell *= 1.3
    stroke = spec.stroke_width * cell / 100.0
    for i, t in enumerate(surface.triangles):
        ox = (i % cols) * cell
        oy = -(i // cols) * cell
        xs = [c[0] for c in t.corners]
        ys = [c[1] for c in t.corners]
        shift = (ox - min(xs), oy - min(ys))
        pts = [(c[0] + shift[0], c[1] + shift[1]) for c in t.corners]
        canvas.polygon(pts, spec.face_fills[i % len(spec.face_fills)], spec.edge_color, stroke)
        for k, pt in enumerate(pts):
            v = surface.vertex_of(t.id, k)
            color = spec.cone_color if v.is_cone() else spec.flat_vertex_color
            canvas.circle(pt, 2.2 * stroke, color)
    return canvas.to_svg()


def render_unfolded(
    surface: FlatSurface, trace_: GeodesicTrace, spec: RenderSpec | None = None
) -> str:
    """Draw the developed triangle chain with the trace as one straight segment."""
    spec = spec or RenderSpec()
    canvas = _Canvas(spec)
    placements, start, end = unfold(surface, trace_)
    scale = surface._trace_tables().scale
    stroke = spec.stroke_width * scale / 100.0
    for i, (tri_id, iso) in enumerate(placements):
        t = surface.triangle(tri_id)
        pts = [iso.apply(c) for c in t.corners]
        canvas.polygon(pts, spec.face_fills[i % len(spec.face_fills)], spec.edge_color, stroke)
    canvas.line(start, end, spec.trace_color, spec.trace_stroke_width * scale / 100.0)
    canvas.circle(start, 2.5 * stroke, spec.trace_color)
    return canvas.to_svg()
