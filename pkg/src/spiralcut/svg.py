"""Static SVG figures: unfolded layouts and overlap curves.

Output is deterministic: numbers carry 9 significant digits and no
timestamps are written.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SvgStyle:
    width: float = 800.0  # pixels; height follows the aspect ratio
    margin: float = 20.0
    face_fill: str = "#f2f2f2"
    rho_color: str = "purple"
    lambda_color: str = "green"
    vertex_color: str = "red"
    crossing_color: str = "orange"
    line_width: float = 1.5
    dot_radius: float = 3.0
    show_vertices: bool = True
    show_faces: bool = True


def num(x: float) -> str:
    s = format(float(x), ".9g")
    return "0" if s == "-0" else s


def _points(xy) -> str:
    return " ".join(f"{num(x)},{num(y)}" for x, y in xy)


class _Canvas:
    def __init__(self, lo, hi, style: SvgStyle):
        span = np.maximum(hi - lo, 1e-12)
        self.s = (style.width - 2 * style.margin) / span[0]
        self.h = span[1] * self.s + 2 * style.margin
        self.lo, self.hi, self.m = lo, hi, style.margin
        self.style = style
        self.parts = []

    def map(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, float))
        x = self.m + (xy[:, 0] - self.lo[0]) * self.s
        y = self.m + (self.hi[1] - xy[:, 1]) * self.s
        return np.c_[x, y]

    def add(self, text: str):
        self.parts.append(text)

    def text(self) -> str:
        w = self.style.width
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{num(w)}" height="{num(self.h)}" '
                f'viewBox="0 0 {num(w)} {num(self.h)}">')
        return "\n".join([head] + self.parts + ["</svg>"]) + "\n"


def layout_svg(lay, style: SvgStyle = None, crossings=()) -> str:
    """Faces in light fill, rho and lambda as polylines, polyhedron vertices dotted."""
    st = style or SvgStyle()
    xy = lay.tri_xy.reshape(-1, 2)
    c = _Canvas(xy.min(axis=0), xy.max(axis=0), st)
    if st.show_faces:
        c.add(f'<g fill="{st.face_fill}" stroke="{st.face_fill}" stroke-width="0.5">')
        for t in lay.tri_xy:
            c.add(f'<polygon points="{_points(c.map(t))}"/>')
        c.add("</g>")
    for pts, color, name in ((lay.rho, st.rho_color, "rho"), (lay.lam, st.lambda_color, "lambda")):
        c.add(f'<polyline id="{name}" fill="none" stroke="{color}" '
              f'stroke-width="{num(st.line_width)}" points="{_points(c.map(pts))}"/>')
    if st.show_vertices:
        c.add(f'<g fill="{st.vertex_color}">')
        for pts in (lay.rho, lay.lam):
            for q, iv in zip(c.map(pts), lay.is_vertex):
                if iv:
                    c.add(f'<circle cx="{num(q[0])}" cy="{num(q[1])}" r="{num(st.dot_radius)}"/>')
        c.add("</g>")
    if len(crossings):
        c.add(f'<g fill="none" stroke="{st.crossing_color}">')
        for q in c.map(np.asarray(list(crossings), float)):
            c.add(f'<circle cx="{num(q[0])}" cy="{num(q[1])}" r="{num(3 * st.dot_radius)}"/>')
        c.add("</g>")
    return c.text()


def curve_svg(ns, fractions, style: SvgStyle = None) -> str:
    """Line plot of overlap fraction against vertex count."""
    st = style or SvgStyle(width=480.0, margin=40.0)
    ns = np.asarray(ns, float)
    fr = np.asarray(fractions, float)
    x0, x1 = min(ns.min(), 0.0), ns.max()
    aspect = (x1 - x0) * 0.6  # plot height in data units of n
    c = _Canvas(np.array([x0, 0.0]), np.array([x1, aspect]), st)
    pts = c.map(np.c_[ns, fr * aspect])
    base = c.map([[x0, 0.0], [x1, 0.0], [x0, aspect]])
    c.add(f'<polyline fill="none" stroke="black" points="{_points(base[[2, 0, 1]])}"/>')
    c.add(f'<polyline fill="none" stroke="{st.rho_color}" stroke-width="{num(st.line_width)}" '
          f'points="{_points(pts)}"/>')
    c.add(f'<g fill="{st.vertex_color}">')
    for (x, y), n, f in zip(pts, ns, fr):
        c.add(f'<circle cx="{num(x)}" cy="{num(y)}" r="{num(st.dot_radius)}">'
              f'<title>n={int(n)} fraction={num(f)}</title></circle>')
    c.add("</g>")
    return c.text()
