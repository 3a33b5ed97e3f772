"""Closed sampled curves in 3-space and their planar projections."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateHeights, DegenerateProjection, InvalidCurve

TWO_PI = 2.0 * math.pi
MIN_SAMPLES = 16

# analytic handle: u -> (position, first derivative, second derivative)
Analytic = Callable[[np.ndarray], tuple]


@dataclass(frozen=True)
class Tolerances:
    angle_min: float = 1e-4
    line_space_min: float = 1e-6

    def __post_init__(self):
        if not (self.angle_min > 0 and self.line_space_min > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerances()


def param_grid(n: int) -> np.ndarray:
    return np.arange(n) * (TWO_PI / n)


# ---------------------------------------------------------------------------
# 3D curves
# ---------------------------------------------------------------------------


@dataclass
class Component3:
    points: np.ndarray
    analytic: Optional[Analytic] = None
    descriptor: Optional[dict] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise InvalidCurve("component points must have shape (n, 3)")

    @property
    def u(self) -> np.ndarray:
        return param_grid(len(self.points))


@dataclass
class ParamCurve3:
    components: list
    name: str = "curve"

    def __post_init__(self):
        self.components = [c if isinstance(c, Component3) else Component3(c)
                           for c in self.components]
        validate_curve3(self)


def validate_curve3(curve: ParamCurve3) -> None:
    if not curve.components:
        raise InvalidCurve("curve has no components")
    for idx, comp in enumerate(curve.components):
        pts = comp.points
        if len(pts) < MIN_SAMPLES:
            raise InvalidCurve(f"component {idx} has {len(pts)} samples (< {MIN_SAMPLES})")
        if not np.all(np.isfinite(pts)):
            raise InvalidCurve(f"component {idx} has non-finite coordinates")
        step = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.any(step <= 0):
            raise InvalidCurve(f"component {idx} repeats a sample")


# ---------------------------------------------------------------------------
# plane curves
# ---------------------------------------------------------------------------


@dataclass
class PlaneComponent:
    """One closed component: samples at ``u_k = 2 pi k / n`` with derivatives."""

    xy: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    analytic: Optional[Analytic] = None

    def __post_init__(self):
        self.xy = np.asarray(self.xy, float)
        self.d1 = np.asarray(self.d1, float)
        self.d2 = np.asarray(self.d2, float)

    @property
    def n(self) -> int:
        return len(self.xy)

    @property
    def u(self) -> np.ndarray:
        return param_grid(self.n)

    @property
    def speed(self) -> np.ndarray:
        return np.hypot(self.d1[:, 0], self.d1[:, 1])

    @property
    def tangent(self) -> np.ndarray:
        return self.d1 / self.speed[:, None]

    @property
    def curvature(self) -> np.ndarray:
        cr = self.d1[:, 0] * self.d2[:, 1] - self.d1[:, 1] * self.d2[:, 0]
        return cr / self.speed ** 3

    def evaluate(self, u) -> tuple:
        """Position and derivatives at arbitrary parameters.

        Uses the analytic handle when present, otherwise periodic cubic
        Hermite interpolation of the stored samples.
        """
        u = np.atleast_1d(np.asarray(u, float))
        if self.analytic is not None:
            p, d1, d2 = self.analytic(u)
            return np.asarray(p)[:, :2], np.asarray(d1)[:, :2], np.asarray(d2)[:, :2]
        h = TWO_PI / self.n
        x = np.mod(u, TWO_PI) / h
        k = np.floor(x).astype(int) % self.n
        t = (x - np.floor(x))[:, None]
        k1 = (k + 1) % self.n
        p0, p1 = self.xy[k], self.xy[k1]
        m0, m1 = self.d1[k] * h, self.d1[k1] * h
        h00 = 2 * t**3 - 3 * t**2 + 1
        h10 = t**3 - 2 * t**2 + t
        h01 = -2 * t**3 + 3 * t**2
        h11 = t**3 - t**2
        p = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
        dd1 = ((6 * t**2 - 6 * t) * p0 + (3 * t**2 - 4 * t + 1) * m0
               + (-6 * t**2 + 6 * t) * p1 + (3 * t**2 - 2 * t) * m1) / h
        dd2 = (1 - t) * self.d2[k] + t * self.d2[k1]
        return p, dd1, dd2


@dataclass
class PlaneCurve:
    components: list
    name: str = "curve"
    meta: dict = field(default_factory=dict)

    @property
    def sample_count(self) -> int:
        return sum(c.n for c in self.components)

    def stacked(self) -> tuple:
        """All samples in one array plus the successor index of each sample."""
        xy = np.concatenate([c.xy for c in self.components])
        nxt = []
        off = 0
        for c in self.components:
            nxt.append(off + (np.arange(c.n) + 1) % c.n)
            off += c.n
        return xy, np.concatenate(nxt)

    def center_radius(self) -> tuple:
        xy = np.concatenate([c.xy for c in self.components])
        center = 0.5 * (xy.min(axis=0) + xy.max(axis=0))
        radius = float(np.max(np.linalg.norm(xy - center, axis=1)))
        return center, radius

    def diameter(self) -> float:
        xy = np.concatenate([c.xy for c in self.components])
        return _diameter(xy)

    def transformed(self, matrix, offset=(0.0, 0.0), name=None) -> "PlaneCurve":
        """Image under ``p -> matrix @ p + offset``."""
        a = np.asarray(matrix, float).reshape(2, 2)
        b = np.asarray(offset, float)
        comps = []
        for c in self.components:
            handle = None
            if c.analytic is not None:
                handle = _affine_handle(c.analytic, a, b)
            comps.append(PlaneComponent(c.xy @ a.T + b, c.d1 @ a.T, c.d2 @ a.T, handle))
        return PlaneCurve(comps, name or self.name, dict(self.meta))

    def refined(self, factor: int = 2) -> "PlaneCurve":
        """Same curve sampled ``factor`` times more densely, through ``evaluate``."""
        comps = []
        for c in self.components:
            xy, d1, d2 = c.evaluate(param_grid(c.n * int(factor)))
            comps.append(PlaneComponent(xy, d1, d2, c.analytic))
        return PlaneCurve(comps, self.name, dict(self.meta))

    def normalized(self) -> tuple:
        """Similar copy centred at the origin with unit diameter.

        Returns ``(curve, center, scale)`` with ``normalized = (p - center) * scale``.
        """
        center, _ = self.center_radius()
        diam = self.diameter()
        if not diam > 0:
            raise InvalidCurve("curve has zero diameter")
        s = 1.0 / diam
        out = self.transformed(np.eye(2) * s, -center * s)
        return out, center, s


def _affine_handle(f: Analytic, a, b) -> Analytic:
    def g(u):
        p, d1, d2 = f(u)
        p = np.asarray(p)[:, :2]
        return p @ a.T + b, np.asarray(d1)[:, :2] @ a.T, np.asarray(d2)[:, :2] @ a.T
    return g


def _diameter(xy: np.ndarray) -> float:
    pts = np.unique(np.round(xy, 15), axis=0)
    if len(pts) > 8:
        try:
            from scipy.spatial import ConvexHull

            pts = pts[ConvexHull(pts).vertices]
        except Exception:  # degenerate hull (collinear samples)
            pass
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))


def plane_curve(xys, name="curve") -> PlaneCurve:
    """Plane curve from raw closed point sequences (finite-difference derivatives)."""
    comps = []
    for xy in xys:
        xy = np.asarray(xy, float)
        d1, d2 = _periodic_fd(xy)
        comps.append(PlaneComponent(xy, d1, d2))
    return PlaneCurve(comps, name)


def _periodic_fd(p: np.ndarray) -> tuple:
    h = TWO_PI / len(p)
    nxt = np.roll(p, -1, axis=0)
    prv = np.roll(p, 1, axis=0)
    return (nxt - prv) / (2 * h), (nxt - 2 * p + prv) / (h * h)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def project_xy(curve: ParamCurve3) -> PlaneCurve:
    """Orthogonal projection to the xy-plane, keeping derivative data."""
    validate_curve3(curve)
    all_xy = np.concatenate([c.points[:, :2] for c in curve.components])
    scale = max(float(np.ptp(all_xy, axis=0).max()), 1e-300)
    comps = []
    for idx, c in enumerate(curve.components):
        xy = c.points[:, :2]
        step = np.linalg.norm(np.roll(xy, -1, axis=0) - xy, axis=1)
        if np.any(step <= 1e-12 * scale):
            raise DegenerateProjection(
                f"component {idx}: consecutive samples project to the same point")
        if c.analytic is not None:
            _, d1, d2 = c.analytic(c.u)
            d1 = np.asarray(d1)[:, :2]
            d2 = np.asarray(d2)[:, :2]
            handle = _planar_handle(c.analytic)
        else:
            d1, d2 = _periodic_fd(xy)
            handle = None
        speed = np.hypot(d1[:, 0], d1[:, 1])
        if np.any(speed <= 1e-12 * scale):
            raise DegenerateProjection(f"component {idx}: vertical tangent in projection")
        comps.append(PlaneComponent(xy.copy(), d1, d2, handle))
    return PlaneCurve(comps, curve.name)


def _planar_handle(f: Analytic) -> Analytic:
    def g(u):
        p, d1, d2 = f(u)
        return np.asarray(p)[:, :2], np.asarray(d1)[:, :2], np.asarray(d2)[:, :2]
    return g


def width1(curve: ParamCurve3, rel_tol: float = 1e-9) -> int:
    """Sum of intersection counts with one horizontal plane per critical gap."""
    validate_curve3(curve)
    crit = []
    for c in curve.components:
        z = c.points[:, 2]
        zp, zn = np.roll(z, 1), np.roll(z, -1)
        is_max = (z > zp) & (z > zn)
        is_min = (z < zp) & (z < zn)
        crit.extend(z[is_max | is_min].tolist())
    zall = np.concatenate([c.points[:, 2] for c in curve.components])
    span = float(np.ptp(zall))
    if not crit or span <= 0:
        raise DegenerateHeights("height function has no nondegenerate critical points")
    crit = np.sort(np.asarray(crit))
    if np.any(np.diff(crit) <= rel_tol * span):
        raise DegenerateHeights("two critical heights coincide")
    total = 0
    for lo, hi in zip(crit[:-1], crit[1:]):
        level = 0.5 * (lo + hi)
        for c in curve.components:
            g = c.points[:, 2] - level
            total += int(np.count_nonzero((g > 0) != (np.roll(g, -1) > 0)))
    return total


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def curve_to_json(curve: ParamCurve3) -> dict:
    comps = []
    for c in curve.components:
        entry = {"points": [[float(v) for v in row] for row in c.points]}
        if c.descriptor is not None:
            entry["analytic"] = c.descriptor
        comps.append(entry)
    return {"format_version": 1, "name": curve.name, "components": comps}


def curve_from_json(doc: dict) -> ParamCurve3:
    if not isinstance(doc, dict) or "components" not in doc:
        raise InvalidCurve("curve JSON needs a 'components' list")
    comps = []
    for entry in doc["components"]:
        pts = np.asarray(entry["points"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidCurve("points must be [[x, y, z], ...]")
        if not np.all(np.isfinite(pts)):
            raise InvalidCurve("curve JSON contains NaN or Inf")
        desc = entry.get("analytic")
        handle = None
        if desc is not None:
            from .generators import handle_from_descriptor

            handle = handle_from_descriptor(desc, pts)
        comps.append(Component3(pts, handle, desc if handle is not None else None))
    return ParamCurve3(comps, str(doc.get("name", "curve")))


def _reject_constant(tok):
    raise InvalidCurve(f"non-finite number {tok} in curve JSON")


def load_curve(path) -> ParamCurve3:
    with open(path) as fh:
        doc = json.load(fh, parse_constant=_reject_constant)
    return curve_from_json(doc)


def save_curve(curve: ParamCurve3, path) -> None:
    from .jsonio import dumps

    with open(path, "w") as fh:
        fh.write(dumps(curve_to_json(curve)))


def similarity(pc: PlaneCurve, angle: float, scale: float, shift) -> PlaneCurve:
    c, s = math.cos(angle), math.sin(angle)
    return pc.transformed(scale * np.array([[c, -s], [s, c]]), shift)


__all__ = [
    "Tolerances", "DEFAULT_TOL", "Component3", "ParamCurve3", "PlaneComponent",
    "PlaneCurve", "plane_curve", "project_xy", "width1", "curve_to_json",
    "curve_from_json", "load_curve", "save_curve", "similarity", "param_grid",
]
