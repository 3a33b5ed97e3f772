"""Inequalities relating the 2-width to crossings, line counts and curvature,
each evaluated on a concrete curve and reported with its slack."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import TWO_PI, ParamCurve3, PlaneCurve, project_xy
from .errors import FlagViolation
from .features import FeatureReport, find_crossings, total_curvature
from .graphic import WidthResult

C_CURV = 1.0 / TWO_PI ** (2.0 / 3.0)


@dataclass
class BoundReport:
    name: str
    lhs: float
    rhs: float
    relation: str          # how lhs is compared with rhs, e.g. ">=" or "<"
    holds: bool
    slack: float           # distance to violation, positive when the bound holds
    provenance: str        # how lhs and rhs were obtained
    applicable: bool = True
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "relation": self.relation,
                "holds": self.holds, "slack": self.slack, "provenance": self.provenance,
                "applicable": self.applicable, "details": self.details}


def _compare(lhs, rhs, relation) -> tuple:
    ops = {">=": (lhs >= rhs, lhs - rhs), ">": (lhs > rhs, lhs - rhs),
           "<=": (lhs <= rhs, rhs - lhs), "<": (lhs < rhs, rhs - lhs)}
    holds, slack = ops[relation]
    return bool(holds), slack


def _report(name, lhs, rhs, relation, provenance, **details) -> BoundReport:
    holds, slack = _compare(lhs, rhs, relation)
    return BoundReport(name, lhs, rhs, relation, holds, slack, provenance, True, details)


def check_crossing_bound(fr: FeatureReport, wr: WidthResult) -> BoundReport:
    """``w2 >= 2c``, reported together with the intermediate chain
    ``w2 >= 2r > 2f = 2v >= 2c``.

    The verdict is the end-to-end inequality.  The chain links are kept in
    ``details`` with their own verdict: the first link fails whenever a face of
    width 0 is not paid for by wider faces (the circle has ``w2 = 2``, ``r = 2``).
    """
    g = wr.graphic
    w2, r, f, v, c = wr.w2, g.r, g.f, g.v, fr.c
    links = {"w2 >= 2r": w2 >= 2 * r, "2r > 2f": r > f, "2f = 2v": f == v, "2v >= 2c": v >= c}
    rep = _report("crossing_chain", w2 / 2, c, ">=",
                  "w2 from the arrangement, c from find_crossings",
                  chain={"w2": w2, "r": r, "f": f, "v": v, "c": c}, links=links)
    rep.details["chain_holds"] = all(links.values())
    return rep


def check_line_lower_bound(pc: PlaneCurve, wr: WidthResult) -> BoundReport:
    """``w2 >= n (n + 1)`` with ``2n`` the largest count over the face certificates."""
    top = max((cnt for _, _, cnt in wr.certificate), default=0)
    n = top // 2
    return _report("line_lower_bound", wr.w2, n * (n + 1), ">=",
                   "2n = largest certified line count over all faces", n=n, max_count=top)


def is_positively_curved_braid(curve) -> bool:
    """True for output of the braid generators (and the round circle, a one-strand braid)."""
    from .generators import POSITIVE_KINDS

    comps = getattr(curve, "components", [])
    descs = [getattr(c, "descriptor", None) for c in comps]
    return bool(descs) and all(d is not None and (d.get("kind") in POSITIVE_KINDS
                                                  or d.get("kind") == "circle")
                               for d in descs)


def check_braid_upper_bound(fr: FeatureReport, wr: WidthResult,
                            is_positively_curved_braid: bool) -> BoundReport:
    """``w2 <= (c + 1)(c + 2)`` for positively curved braid curves; n/a otherwise."""
    c = fr.c
    if not is_positively_curved_braid:
        return BoundReport("braid_upper_bound", wr.w2, (c + 1) * (c + 2), "<=", True, 0.0,
                           "only stated for positively curved braid curves", False)
    if fr.i:
        raise FlagViolation(f"curve has {fr.i} inflections but is flagged positively curved")
    return _report("braid_upper_bound", wr.w2, (c + 1) * (c + 2), "<=",
                   "c from find_crossings on the braid projection")


def check_curvature_bound(fr: FeatureReport, wr: WidthResult) -> BoundReport:
    """``w2 > x^(2/3) / (2 pi)^(2/3)`` with ``x`` the total curvature."""
    x = fr.total_curvature
    return _report("curvature_bound", wr.w2, C_CURV * x ** (2.0 / 3.0), ">",
                   "x = total curvature of the plane curve", x=x)


def positive_arcs(pc: PlaneCurve) -> list:
    """Total curvature of every maximal arc on which the curvature keeps one sign.

    Returns ``(component, u_start, u_end, curvature)`` tuples; a component
    without inflections is reported as one arc running all the way round.
    """
    out = []
    for ci, comp in enumerate(pc.components):
        kappa = comp.curvature
        dens = np.abs(kappa) * comp.speed * (TWO_PI / comp.n)
        sgn = np.sign(kappa)
        change = np.nonzero(sgn != np.roll(sgn, 1))[0]
        if len(change) == 0:
            out.append((ci, 0.0, TWO_PI, float(dens.sum())))
            continue
        for a, b in zip(change, np.roll(change, -1)):
            idx = np.arange(a, b if b > a else b + comp.n) % comp.n
            out.append((ci, a * TWO_PI / comp.n, b * TWO_PI / comp.n, float(dens[idx].sum())))
    return out


def check_positive_arc_bound(pc: PlaneCurve, wr: WidthResult) -> BoundReport:
    """``w2 > x^2 / (2 pi)^2`` with ``x`` the curvature of the best one-signed arc."""
    arcs = positive_arcs(pc)
    best = max(arcs, key=lambda a: a[3])
    x = best[3]
    return _report("positive_arc_bound", wr.w2, (x / TWO_PI) ** 2, ">",
                   "x = largest total curvature of an arc with one-signed curvature",
                   x=x, arc={"component": best[0], "u_start": best[1], "u_end": best[2]})


def check_projection_curvature(curve: ParamCurve3, wr: WidthResult,
                               pc: PlaneCurve | None = None) -> BoundReport:
    """Total curvature of the xy-projection is at most ``2 pi w2^(3/2)``."""
    if pc is None:
        pc = project_xy(curve)
    x = total_curvature(pc)
    return _report("projection_curvature", x, TWO_PI * wr.w2 ** 1.5, "<=",
                   "x = total curvature of the analyzed projection", x=x)


def example3_width(pc: PlaneCurve, grid: int = 64) -> int:
    """Width for the family of vertical lines: the crossing count of the projection.

    A vertical line meeting the curve ``n`` times has weight ``n (n - 1)``;
    generic points of the plane have ``n = 0`` and points on one branch
    ``n = 1``, so only crossings contribute.  The function checks that every
    crossing really is a point covered exactly twice, and that a coarse grid of
    vertical lines meets no sample with ``n >= 2`` away from the crossings.
    """
    crossings = find_crossings(pc)
    xy, nxt = pc.stacked()
    seg = np.linalg.norm(xy[nxt] - xy, axis=1)
    offsets = np.cumsum([0] + [c.n for c in pc.components])
    reach = 2.0 * float(seg.max())
    for cr in crossings:
        p = np.asarray(cr.point)
        # a disk just wider than the two segments through the crossing
        local = [seg[offsets[c] + int(u / TWO_PI * pc.components[c].n) % pc.components[c].n]
                 for c, u in cr.params]
        near = np.linalg.norm(xy - p, axis=1) <= 1.5 * max(local)
        # count separate passes of the curve through the little disk
        passes = int(np.count_nonzero(near & ~near[np.argsort(nxt)]))
        if passes != 2:
            raise AssertionError(f"crossing at {cr.point} is covered {passes} times")
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    gx = np.linspace(lo[0], hi[0], grid)
    gy = np.linspace(lo[1], hi[1], grid)
    pts = np.stack(np.meshgrid(gx, gy), axis=-1).reshape(-1, 2)
    for q in pts:
        if np.min(np.linalg.norm(xy - q, axis=1)) > 1e-12:
            continue  # off the curve: n = 0
        if not any(np.linalg.norm(q - np.asarray(c.point)) <= reach for c in crossings):
            hits = int(np.count_nonzero(np.linalg.norm(xy - q, axis=1) <= 1e-12))
            if hits >= 2:
                raise AssertionError(f"point {tuple(q)} is covered {hits} times")
    return len(crossings)


def all_bounds(curve: ParamCurve3 | None, pc: PlaneCurve, fr: FeatureReport,
               wr: WidthResult) -> list:
    braid = curve is not None and is_positively_curved_braid(curve)
    reps = [
        check_crossing_bound(fr, wr),
        check_line_lower_bound(pc, wr),
        check_braid_upper_bound(fr, wr, braid),
        check_curvature_bound(fr, wr),
        check_positive_arc_bound(pc, wr),
    ]
    if curve is not None:
        reps.append(check_projection_curvature(curve, wr, pc))
    return reps
