"""Crossings, inflections and bitangents of a plane curve, and the
Fabricius-Bjerre count ``c + i/2 = t - s`` built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .curve import DEFAULT_TOL, TWO_PI, PlaneCurve, Tolerances
from .errors import DegenerateInflection, NearTripleTangency, NonTransverseCrossing
from .graphic import LineCoord, _mobius_vertices, _Segments, dual_curve, dual_vertices


@dataclass
class Crossing:
    params: tuple          # ((component, u), (component, u))
    point: tuple
    angle: float
    exterior: bool


@dataclass
class Inflection:
    param: tuple           # (component, u)
    point: tuple


@dataclass
class Bitangent:
    params: tuple
    line: LineCoord
    interior: bool


@dataclass
class FeatureReport:
    c: int
    i: int
    t: int
    s: int
    total_curvature: float
    crossings: list = field(default_factory=list, repr=False)
    inflections: list = field(default_factory=list, repr=False)
    bitangents: list = field(default_factory=list, repr=False)

    @property
    def fb_residual(self) -> Fraction:
        return Fraction(self.c) + Fraction(self.i, 2) - (self.t - self.s)

    def to_json(self) -> dict:
        r = self.fb_residual
        return {"c": self.c, "i": self.i, "t": self.t, "s": self.s,
                "total_curvature": float(self.total_curvature),
                "fb_residual": {"numerator": r.numerator, "denominator": r.denominator}}


# ---------------------------------------------------------------------------
# crossings
# ---------------------------------------------------------------------------


def _segments(pc: PlaneCurve):
    xy, nxt = pc.stacked()
    comp = np.concatenate([np.full(c.n, i) for i, c in enumerate(pc.components)])
    local = np.concatenate([np.arange(c.n) for c in pc.components])
    sizes = np.array([pc.components[i].n for i in comp])
    return xy, nxt, comp, local, sizes


def _ray_hits(xy, nxt, origin, direction) -> int:
    """Number of polyline segments met by the ray ``origin + s * direction``, s > 0."""
    a, b = xy, xy[nxt]
    e = b - a
    w = a - origin
    den = direction[0] * e[:, 1] - direction[1] * e[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / den
        t = (w[:, 0] * direction[1] - w[:, 1] * direction[0]) / den
    return int(np.count_nonzero((den != 0) & (s > 0) & (t >= 0) & (t < 1)))


def find_crossings(pc: PlaneCurve, tol: Tolerances = DEFAULT_TOL, backend=None) -> list:
    """Transverse double points of the projection, across all components.

    A crossing is exterior when one of the four corners next to it can reach
    infinity along a ray without meeting the curve; eight ray directions are
    tried from each corner.
    """
    xy, nxt, comp, local, sizes = _segments(pc)
    b = xy[nxt]
    ci, cj = kernels.candidate_pairs(xy, b, pad=1e-12, backend=backend)
    same = comp[ci] == comp[cj]
    gap = np.abs(local[ci] - local[cj])
    adjacent = same & ((gap <= 1) | (gap == sizes[ci] - 1))
    ci, cj = ci[~adjacent], cj[~adjacent]
    hit, s, t = kernels.segment_intersections(xy[ci], b[ci], xy[cj], b[cj], slack=1e-9)
    scale = pc.diameter()
    out = []
    seen = []
    dirs = [np.array([math.cos(a), math.sin(a)]) for a in
            (np.arange(8) * (math.pi / 4) + 0.1234)]
    for n in np.nonzero(hit)[0]:
        i, j = int(ci[n]), int(cj[n])
        ea, eb = b[i] - xy[i], b[j] - xy[j]
        p = xy[i] + s[n] * ea
        # a crossing on a shared sample is reported by several segment pairs
        if any(np.hypot(*(p - q)) < 1e-9 * scale for q in seen):
            continue
        seen.append(p)
        ua = ea / np.linalg.norm(ea)
        ub = eb / np.linalg.norm(eb)
        angle = math.acos(min(1.0, abs(float(ua @ ub))))
        if angle < tol.angle_min:
            raise NonTransverseCrossing(f"branches meet at angle {angle:.3g} rad")
        params = []
        for idx, f in ((i, s[n]), (j, t[n])):
            c = int(comp[idx])
            params.append((c, float((local[idx] + f) * TWO_PI / pc.components[c].n)))
        # corners between the branches, a short step away from the crossing
        step = 1e-4 * scale * min(1.0, 10 * angle)
        corners = [p + step * (sa * ua + sb * ub) / np.linalg.norm(sa * ua + sb * ub)
                   for sa in (1, -1) for sb in (1, -1)]
        exterior = any(min(_ray_hits(xy, nxt, q, d) for d in dirs) == 0 for q in corners)
        out.append(Crossing(tuple(params), (float(p[0]), float(p[1])), angle, exterior))
    return out


# ---------------------------------------------------------------------------
# inflections
# ---------------------------------------------------------------------------


def _curvature_at(comp, u):
    _, d1, d2 = comp.evaluate(u)
    cr = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    return cr / np.hypot(d1[:, 0], d1[:, 1]) ** 3


def find_inflections(pc: PlaneCurve, flat_tol: float = 1e-10, iters: int = 60) -> list:
    """Sign changes of the signed curvature, refined by bisection in ``u``."""
    out = []
    for ci, comp in enumerate(pc.components):
        kappa = comp.curvature
        scale = float(np.max(np.abs(kappa))) or 1.0
        flat = np.abs(kappa) <= flat_tol * scale
        if np.any(flat & np.roll(flat, -1)):
            raise DegenerateInflection(f"component {ci}: curvature vanishes on an interval")
        # treat exact zeros as belonging to the following sample's sign
        sgn = np.sign(kappa)
        for _ in range(2):
            sgn = np.where(sgn == 0, np.roll(sgn, -1), sgn)
        h = TWO_PI / comp.n
        for k in np.nonzero(sgn != np.roll(sgn, -1))[0]:
            lo, hi = k * h, (k + 1) * h
            klo = sgn[k]
            for _ in range(iters):
                mid = 0.5 * (lo + hi)
                if np.sign(_curvature_at(comp, mid)[0]) == klo:
                    lo = mid
                else:
                    hi = mid
            u = float(0.5 * (lo + hi)) % TWO_PI
            p, _, _ = comp.evaluate(u)
            out.append(Inflection((ci, u), (float(p[0, 0]), float(p[0, 1]))))
    return out


# ---------------------------------------------------------------------------
# bitangents
# ---------------------------------------------------------------------------


def _polish(pc, pa, pb, iters=30):
    """Newton on cross(p2 - p1, p1') = cross(p2 - p1, p2') = 0 in (u1, u2)."""
    (ca, ua), (cb, ub) = pa, pb
    fa, fb = pc.components[ca], pc.components[cb]
    x = np.array([ua, ub], float)
    for _ in range(iters):
        p1, t1, a1 = (v[0] for v in fa.evaluate(x[0]))
        p2, t2, a2 = (v[0] for v in fb.evaluate(x[1]))
        w = p2 - p1
        F = np.array([w[0] * t1[1] - w[1] * t1[0], w[0] * t2[1] - w[1] * t2[0]])
        # partial derivatives of F
        j11 = -(t1[0] * t1[1] - t1[1] * t1[0]) + (w[0] * a1[1] - w[1] * a1[0])
        j12 = t2[0] * t1[1] - t2[1] * t1[0]
        j21 = -(t1[0] * t2[1] - t1[1] * t2[0])
        j22 = (t2[0] * t2[1] - t2[1] * t2[0]) + (w[0] * a2[1] - w[1] * a2[0])
        jac = np.array([[j11, j12], [j21, j22]])
        try:
            dx = np.linalg.solve(jac, -F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(dx)) or np.max(np.abs(dx)) > 0.05:
            break  # leave the sampled estimate alone rather than jump branches
        x += dx
        if np.max(np.abs(dx)) < 1e-14:
            break
    return float(x[0] % TWO_PI), float(x[1] % TWO_PI)


def _side(comp, u, normal) -> int:
    """Side of the tangent line towards which the curve bends at ``u``."""
    _, d1, d2 = (v[0] for v in comp.evaluate(u))
    speed2 = float(d1 @ d1)
    accel_normal = d2 - (d2 @ d1) / speed2 * d1
    return int(np.sign(accel_normal @ normal))


def find_bitangents(pc: PlaneCurve, tol: Tolerances = DEFAULT_TOL, backend=None,
                    dc=None, verts=None) -> list:
    """Lines tangent at two places, from the transverse self-crossings of the dual curve."""
    if dc is None:
        dc = dual_curve(pc)
    segs = _Segments.build(dc)
    if verts is None:
        verts = dual_vertices(dc, segs, backend=backend)
    gverts, _ = _mobius_vertices(verts, segs, dc)
    out = []
    scale = pc.diameter()
    for gv in gverts:
        pa, pb = gv.params
        ua, ub = _polish(pc, pa, pb)
        ca, cb = pa[0], pb[0]
        p1, d1, _ = (v[0] for v in pc.components[ca].evaluate(ua))
        n = np.array([-d1[1], d1[0]]) / np.hypot(d1[0], d1[1])
        line = LineCoord(math.atan2(n[1], n[0]), float(p1 @ n))
        sa = _side(pc.components[ca], ua, n)
        sb = _side(pc.components[cb], ub, n)
        out.append(Bitangent(((ca, ua), (cb, ub)), line, sa != sb))
    _check_triples(out, tol, scale)
    return out


def _check_triples(bits: list, tol: Tolerances, scale: float = 1.0) -> None:
    """Two bitangents on the same line means three or more tangency points on it.

    Offsets are divided by ``scale`` (the curve's diameter) so the tolerance
    means the same thing at every size.
    """
    if len(bits) < 2:
        return
    th = np.array([b.line.theta for b in bits])
    d = np.array([b.line.d for b in bits]) / scale
    for k in range(len(bits)):
        dth = np.abs(th[k + 1:] - th[k])
        same = np.minimum(dth, math.pi - dth)
        # across the seam the offsets change sign
        dd = np.where(dth <= math.pi / 2, np.abs(d[k + 1:] - d[k]), np.abs(d[k + 1:] + d[k]))
        if np.any(np.hypot(same, dd) < tol.line_space_min):
            raise NearTripleTangency("two bitangent events share a line")


# ---------------------------------------------------------------------------
# curvature and the identity
# ---------------------------------------------------------------------------


def total_curvature(pc: PlaneCurve) -> float:
    """Integral of |kappa| ds, trapezoid rule on the periodic samples."""
    total = 0.0
    for comp in pc.components:
        # uniform parameter steps make the periodic trapezoid a plain sum
        total += float(np.sum(np.abs(comp.curvature) * comp.speed)) * (TWO_PI / comp.n)
    return total


def fabricius_bjerre_check(pc: PlaneCurve, tol: Tolerances = DEFAULT_TOL,
                           backend=None) -> FeatureReport:
    """All four counts, found on the unit-diameter copy of ``pc``.

    Points and lines in the report are mapped back to the coordinates of
    ``pc``; parameters are unchanged by the similarity.
    """
    npc, center, scale = pc.normalized()
    crossings = find_crossings(npc, tol, backend=backend)
    inflections = find_inflections(npc)
    bits = find_bitangents(npc, tol, backend=backend)

    def back(p):
        return tuple(float(x) for x in np.asarray(p) / scale + center)

    for cr in crossings:
        cr.point = back(cr.point)
    for fl in inflections:
        fl.point = back(fl.point)
    for bt in bits:
        bt.line = LineCoord(bt.line.theta, bt.line.d / scale + float(center @ bt.line.normal))
    s = sum(1 for b in bits if b.interior)
    return FeatureReport(len(crossings), len(inflections), len(bits) - s, s,
                         total_curvature(pc), crossings, inflections, bits)
