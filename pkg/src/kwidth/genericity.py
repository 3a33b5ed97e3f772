"""Certifying that a plane curve is generic enough for the arrangement, and
repairing it with a small seeded deformation when it is not."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curve import DEFAULT_TOL, MIN_SAMPLES, TWO_PI, PlaneComponent, PlaneCurve, Tolerances
from .errors import KWidthError, PerturbationFailed
from .graphic import _mobius_vertices, _Segments, dual_curve, dual_vertices

# samples this close along the same dual sheet are neighbours, not a coincidence
_WINDOW = 12


@dataclass
class GenericityReport:
    vertical_tangent_found: bool
    near_triple_tangency_found: bool
    non_transverse_double_point_found: bool
    min_crossing_angle: float
    min_feature_separation: float

    @property
    def ok(self) -> bool:
        return not (self.vertical_tangent_found or self.near_triple_tangency_found
                    or self.non_transverse_double_point_found)

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("min_crossing_angle", "min_feature_separation"):
            if not math.isfinite(out[key]):
                out[key] = None
        out["ok"] = self.ok
        return out


def _line_features(theta, d):
    """Embedding of unoriented lines that is blind to (theta, d) ~ (theta + pi, -d)."""
    return np.stack([d * np.cos(theta), d * np.sin(theta),
                     0.5 * np.cos(2 * theta), 0.5 * np.sin(2 * theta)], axis=1)


def _overlapping_duals(dc, tol: float) -> bool:
    """True when two separate stretches of the dual curve run within ``tol`` of each other."""
    feats, owner, index, size = [], [], [], []
    for c in range(dc.n_components):
        s = dc.sheet(c)
        feats.append(_line_features(s.phi[:-1], s.d[:-1]))
        owner.append(np.full(s.n, c))
        index.append(np.arange(s.n))
        size.append(np.full(s.n, s.n))
    feats = np.concatenate(feats)
    owner, index, size = (np.concatenate(a) for a in (owner, index, size))
    pairs = cKDTree(feats).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return False
    a, b = pairs[:, 0], pairs[:, 1]
    gap = np.abs(index[a] - index[b])
    gap = np.minimum(gap, size[a] - gap)
    far = (owner[a] != owner[b]) | (gap > _WINDOW)
    # a transverse crossing puts at most a couple of sample pairs this close
    return int(np.count_nonzero(far)) > 3


def _crossing_angle(pc: PlaneCurve) -> float:
    from .features import find_crossings

    loose = Tolerances(angle_min=1e-300, line_space_min=DEFAULT_TOL.line_space_min)
    angles = [c.angle for c in find_crossings(pc, loose)]
    return min(angles) if angles else math.inf


def _event_lines(pc: PlaneCurve, dc):
    segs = _Segments.build(dc)
    verts = dual_vertices(dc, segs)
    gverts, _ = _mobius_vertices(verts, segs, dc)
    lines = [v.line for v in gverts]
    lines += [line for _, _, line in dc.cusps()]
    return lines


def check_generic(pc: PlaneCurve, tol: Tolerances = DEFAULT_TOL) -> GenericityReport:
    npc, _, _ = pc.normalized()
    speed = np.concatenate([c.speed for c in npc.components])
    vertical = bool(np.min(speed) <= 1e-8 * np.median(speed))
    angle = _crossing_angle(npc)
    non_transverse = angle < tol.angle_min
    dc = dual_curve(npc)
    overlap = _overlapping_duals(dc, tol.line_space_min)
    lines = _event_lines(npc, dc)
    sep = math.inf
    near = False
    if len(lines) > 1:
        feats = _line_features(np.array([ln.theta for ln in lines]),
                               np.array([ln.d for ln in lines]))
        dist, _ = cKDTree(feats).query(feats, k=2)
        sep = float(np.min(dist[:, 1]))
        near = sep < tol.line_space_min
    return GenericityReport(vertical, bool(near or overlap), bool(non_transverse or overlap),
                            float(angle), sep)


# ---------------------------------------------------------------------------
# repair
# ---------------------------------------------------------------------------


class _Deformation:
    """``p -> M p + v(M p)``: a near-identity linear map and a small smooth field."""

    def __init__(self, rng, size: float, scale: float, waves: int = 3):
        ang = rng.uniform(-1, 1) * size
        stretch = math.exp(rng.uniform(-1, 1) * size)
        rot = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
        self.m = rot @ np.diag([stretch, 1.0 / stretch])
        self.amp = rng.normal(size=(waves, 2))
        self.amp *= size * scale / (2.0 * np.abs(self.amp).sum())
        self.freq = rng.normal(size=(waves, 2)) * (2.0 / scale)
        self.phase = rng.uniform(0, TWO_PI, size=waves)

    def __call__(self, p, d1, d2):
        q, q1, q2 = p @ self.m.T, d1 @ self.m.T, d2 @ self.m.T
        arg = q @ self.freq.T + self.phase              # (n, waves)
        w1 = q1 @ self.freq.T
        w2 = q2 @ self.freq.T
        s, c = np.sin(arg), np.cos(arg)
        p_out = q + s @ self.amp
        d1_out = q1 + (c * w1) @ self.amp
        d2_out = q2 + (c * w2 - s * w1 ** 2) @ self.amp
        return p_out, d1_out, d2_out


def _apply(pc: PlaneCurve, f: _Deformation) -> PlaneCurve:
    comps = []
    for c in pc.components:
        xy, d1, d2 = f(c.xy, c.d1, c.d2)
        comps.append(PlaneComponent(xy, d1, d2, _mapped(c.analytic, f)))
    return PlaneCurve(comps, pc.name, dict(pc.meta))


def _mapped(base, f):
    """Compose an analytic parametrisation with the perturbation ``f``."""
    if base is None:
        return None

    def handle(u):
        p, a, b = base(u)
        return f(np.asarray(p)[:, :2], np.asarray(a)[:, :2], np.asarray(b)[:, :2])

    return handle


def perturb_to_generic(pc: PlaneCurve, seed: int = 0, tol: Tolerances = DEFAULT_TOL,
                       attempts: int = 32, size: float = 3e-4) -> PlaneCurve:
    """First curve, among the input and up to 31 seeded deformations, that passes.

    Every deformation moves each sample by at most ``2.5 * size`` times the
    diameter: the linear part contributes up to ``2 * size``, the field ``size / 2``.
    """
    if any(c.n < MIN_SAMPLES for c in pc.components):
        raise PerturbationFailed(f"every component needs at least {MIN_SAMPLES} samples")
    diam = pc.diameter()
    center, _ = pc.center_radius()
    for attempt in range(attempts):
        if attempt == 0:
            cand = pc
        else:
            rng = np.random.default_rng([int(seed), attempt])
            shifted = pc.transformed(np.eye(2), -center)
            cand = _apply(shifted, _Deformation(rng, size, diam)).transformed(np.eye(2), center)
            cand.meta["perturbation"] = {"seed": int(seed), "attempt": attempt}
        try:
            if check_generic(cand, tol).ok:
                return cand
        except KWidthError:
            continue
    raise PerturbationFailed(f"no generic curve after {attempts} attempts (seed {seed})")
