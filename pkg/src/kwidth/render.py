"""JSON and SVG views of a graphic.

The SVG has two panels.  On the left is the plane curve; on the right is the
Moebius band of lines drawn as its fundamental rectangle ``[0, pi) x [-D, D]``
with the left and right edges glued after a flip of ``d`` (the arrows on the
seam point in opposite directions).  Faces are shaded by width.  The shading
comes from a coarse grid of exact intersection counts, which inside a face
equals that face's width; each face gets one numeric label placed at its
certified representative line.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from . import kernels
from .curve import PlaneCurve
from .graphic import Graphic, LineCoord, WidthResult

PI = math.pi

# light-to-dark ramp, interpolated linearly; index 0 is width 0
_RAMP = np.array([[247, 251, 255], [198, 219, 239], [107, 174, 214],
                  [33, 113, 181], [8, 48, 107]], float)


def _line_json(line: LineCoord) -> dict:
    return {"theta": line.theta, "d": line.d}


def graphic_to_json(g: Graphic, wr: WidthResult | None = None) -> dict:
    """Vertices, edges referring to vertex indices, faces with widths and topology."""
    faces = []
    for fc in g.faces:
        entry = {"index": fc.index, "topology": fc.topology, "chi": fc.chi,
                 "unbounded": fc.unbounded, "width": fc.width}
        if fc.representatives:
            entry["representative"] = _line_json(fc.representatives[0][0])
        faces.append(entry)
    doc = {
        "counts": {"v": g.v, "e": g.e, "f": g.f, "r": g.r},
        "checks": dict(g.checks),
        "euler_general": g.euler_general,
        "vertices": [{"index": v.index, "line": _line_json(v.line),
                      "params": [list(p) for p in v.params],
                      "same_orientation": v.same_orientation, "angle": v.angle}
                     for v in g.vertices],
        "cusps": [{"component": c.component, "u": c.u, "line": _line_json(c.line)}
                  for c in g.cusps],
        "edges": [{"component": e.component, "start": e.start, "end": e.end,
                   "u_start": e.u_start, "u_end": e.u_end, "cusps": e.cusps}
                  for e in g.edges],
        "faces": faces,
        "adjacency": [list(a) for a in g.adjacency],
        "seed_face": g.seed_face,
    }
    if wr is not None:
        doc["w2"] = wr.w2
        doc["certificate"] = [{"face": f, "line": _line_json(ln), "count": cnt}
                              for f, ln, cnt in wr.certificate]
    return doc


def _colour(width: int, top: int) -> str:
    if top <= 0:
        t = 0.0
    else:
        t = min(1.0, width / top) * (len(_RAMP) - 1)
    k = min(int(t), len(_RAMP) - 2)
    rgb = _RAMP[k] + (t - k) * (_RAMP[k + 1] - _RAMP[k])
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    """Affine map from data coordinates to an SVG box, y pointing up."""

    def __init__(self, x0, y0, w, h, xlo, xhi, ylo, yhi):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def __call__(self, x, y):
        sx = self.x0 + (np.asarray(x) - self.xlo) / (self.xhi - self.xlo) * self.w
        sy = self.y0 + self.h - (np.asarray(y) - self.ylo) / (self.yhi - self.ylo) * self.h
        return sx, sy


def _polyline(xs, ys, **attrs) -> str:
    pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(xs, ys))
    extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<polyline points="{pts}" fill="none" {extra}/>'


def _projection_panel(pc: PlaneCurve, box) -> list:
    out = ['<g class="projection">']
    xy = np.concatenate([c.xy for c in pc.components])
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = float(max(hi - lo)) * 1.1 or 1.0
    mid = 0.5 * (lo + hi)
    fr = _Frame(*box, mid[0] - span / 2, mid[0] + span / 2, mid[1] - span / 2, mid[1] + span / 2)
    out.append(f'<rect x="{box[0]}" y="{box[1]}" width="{box[2]}" height="{box[3]}" '
               'fill="white" stroke="#888"/>')
    for c in pc.components:
        pts = np.vstack([c.xy, c.xy[:1]])
        sx, sy = fr(pts[:, 0], pts[:, 1])
        out.append(_polyline(sx, sy, stroke="black", stroke_width="1.2"))
    out.append("</g>")
    return out


def _shading(pc: PlaneCurve, fr: _Frame, dmax: float, top: int, cols=180, rows=120) -> list:
    """Run-length rows of grid cells coloured by their intersection count."""
    xy, nxt = pc.stacked()
    dd = 2 * dmax / rows
    thetas = (np.arange(cols) + 0.5) * (PI / cols)
    counts = kernels.grid_counts(xy, nxt, thetas, -dmax + 0.5 * dd, dd, rows)
    cw, ch = fr.w / cols, fr.h / rows
    out = ['<g class="shading" shape-rendering="crispEdges">']
    for j in range(rows):
        row = counts[:, j]
        i = 0
        while i < cols:
            k = i
            while k + 1 < cols and row[k + 1] == row[i]:
                k += 1
            x = fr.x0 + i * cw
            y = fr.y0 + fr.h - (j + 1) * ch
            out.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt((k - i + 1) * cw + 0.3)}" '
                       f'height="{_fmt(ch + 0.3)}" fill="{_colour(int(row[i]), top)}"/>')
            i = k + 1
    out.append("</g>")
    return out


def _dual_paths(pc: PlaneCurve, fr: _Frame) -> list:
    from .graphic import dual_curve

    dc = dual_curve(pc)
    out = ['<g class="dual-curve">']
    for c in range(dc.n_components):
        th, d = dc.mobius_samples(c)
        th = np.append(th, th[:1])
        d = np.append(d, d[:1])
        # split the loop wherever it passes through the seam
        cut = np.nonzero(np.abs(np.diff(th)) > PI / 2)[0] + 1
        for a, b in zip(np.r_[0, cut], np.r_[cut, len(th)]):
            if b - a >= 2:
                sx, sy = fr(th[a:b], d[a:b])
                out.append(_polyline(sx, sy, stroke="black", stroke_width="1"))
    out.append("</g>")
    return out


def graphic_svg(pc: PlaneCurve, wr: WidthResult, title: str = "") -> str:
    """Both panels for the unit-diameter curve ``pc`` analysed into ``wr``."""
    g = wr.graphic
    _, radius = pc.center_radius()
    dmax = 1.5 * radius
    width, height = 1020, 520
    left = (20, 40, 440, 440)
    right = (500, 40, 500, 440)
    fr = _Frame(*right, 0.0, PI, -dmax, dmax)
    top = max(wr.face_widths, default=0)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="sans-serif">']
    if title:
        parts.append(f'<text x="20" y="24" font-size="16">{escape(title)}</text>')
    parts += _projection_panel(pc, left)
    parts.append('<g class="graphic">')
    parts += _shading(pc, fr, dmax, top)
    parts += _dual_paths(pc, fr)

    x0, y0, w, h = right
    parts.append(f'<rect class="fundamental-rectangle" x="{x0}" y="{y0}" width="{w}" '
                 f'height="{h}" fill="none" stroke="black" stroke-width="1.5"/>')
    # the seam: left edge glued to the right edge upside down
    ym = y0 + h / 2
    parts.append('<g class="seam" fill="#c0392b">')
    parts.append(f'<path d="M {x0 - 6} {ym + 8} L {x0} {ym - 8} L {x0 + 6} {ym + 8} Z"/>')
    parts.append(f'<path d="M {x0 + w - 6} {ym - 8} L {x0 + w} {ym + 8} L {x0 + w + 6} {ym - 8} Z"/>')
    parts.append("</g>")

    parts.append('<g class="cusps" stroke="#c0392b" fill="none" stroke-width="1.5">')
    for c in g.cusps:
        sx, sy = fr(c.line.theta, c.line.d)
        parts.append(f'<path class="cusp" d="M {_fmt(sx - 5)} {_fmt(sy + 5)} L {_fmt(sx)} '
                     f'{_fmt(sy - 4)} L {_fmt(sx + 5)} {_fmt(sy + 5)}"/>')
    parts.append("</g>")
    parts.append('<g class="vertices" fill="#1a5e20">')
    for v in g.vertices:
        sx, sy = fr(v.line.theta, v.line.d)
        parts.append(f'<circle class="vertex" cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="3"/>')
    parts.append("</g>")

    parts.append('<g class="face-labels" font-size="13" text-anchor="middle">')
    certs = {f: ln for f, ln, _ in wr.certificate}
    for fc in g.faces:
        line = certs.get(fc.index) or fc.representatives[0][0]
        sx, sy = fr(line.theta, line.d)
        colour = "white" if top and fc.width > 0.6 * top else "black"
        parts.append(f'<text class="face-label" data-face="{fc.index}" '
                     f'data-width="{fc.width}" data-topology="{fc.topology}" '
                     f'x="{_fmt(sx)}" y="{_fmt(sy + 4)}" fill="{colour}">{fc.width}</text>')
    parts.append("</g>")
    parts.append("</g>")

    parts.append(f'<text x="{x0}" y="{y0 + h + 22}" font-size="12">theta from 0 to pi, '
                 f'd from {-dmax:.3g} to {dmax:.3g}; w2 = {wr.w2}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
