"""Analytic test curves, including closed braids placed near the unit cylinder.

Every generated component carries an analytic handle ``u -> (p, p', p'')``
with ``u`` in ``[0, 2 pi)`` and a JSON descriptor from which the handle can be
rebuilt after a round trip through the curve file format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import TWO_PI, Component3, ParamCurve3, param_grid, project_xy
from .errors import CurvatureSignFailure, ParseError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
KINDS = ("circle", "multi_circle", "figure_eight", "rose", "spiral_closed", "braid_word",
         "torus_2braid", "hopf", "unlink2", "torus_link_2_4", "bridge_embedding")
POSITIVE_KINDS = ("braid_word", "torus_2braid", "hopf", "torus_link_2_4")
SAMPLES_PER_WINDING = 512


@dataclass
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")


# ---------------------------------------------------------------------------
# braid words
# ---------------------------------------------------------------------------


def parse_braid_word(word: str, strands: int) -> list:
    """``"s1 S2 s1"`` -> ``[(1, +1), (2, -1), (1, +1)]``."""
    if strands < 2:
        raise ParseError("a braid needs at least two strands")
    out = []
    for tok in word.split():
        if len(tok) < 2 or tok[0] not in "sS" or not tok[1:].isdigit():
            raise ParseError(f"bad braid generator {tok!r}")
        k = int(tok[1:])
        if not 1 <= k < strands:
            raise ParseError(f"generator {tok!r} out of range for {strands} strands")
        out.append((k, 1 if tok[0] == "s" else -1))
    return out


def _smooth_step(tau):
    """Monotone 0 -> 1 with vanishing first and second derivative at both ends."""
    h = tau - np.sin(TWO_PI * tau) / TWO_PI
    h1 = 1.0 - np.cos(TWO_PI * tau)
    h2 = TWO_PI * np.sin(TWO_PI * tau)
    return h, h1, h2


class _Braid:
    def __init__(self, letters, strands, epsilon, z_amp=0.3, jitter=0.2):
        self.letters = letters
        self.k = strands
        self.eps = epsilon
        self.z_amp = z_amp
        nsec = max(len(letters), 1)
        w = 1.0 + jitter * (np.mod(np.arange(nsec) * GOLDEN, 1.0) - 0.5)
        self.bounds = np.concatenate([[0.0], np.cumsum(w) / w.sum() * TWO_PI])
        self.levels = (np.arange(strands) + 1.0) / (strands + 1.0)
        # level of the strand that starts at level l, at the start of sector j
        table = np.zeros((strands, nsec + 1), dtype=int)
        table[:, 0] = np.arange(strands)
        for j in range(nsec):
            lv = table[:, j].copy()
            if j < len(letters):
                g = letters[j][0]
                a, b = lv == g - 1, lv == g
                lv[a], lv[b] = g, g - 1
            table[:, j + 1] = lv
        self.table = table
        perm = table[:, -1]
        seen, cycles = set(), []
        for s in range(strands):
            if s in seen:
                continue
            cyc, cur = [], s
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = int(perm[cur])
            cycles.append(cyc)
        self.cycles = cycles

    def radial(self, start_level, theta):
        """rho, rho', rho'', z, z', z'' (derivatives in theta) for one lap."""
        out = [np.zeros_like(theta) for _ in range(6)]
        j = np.clip(np.searchsorted(self.bounds, theta, side="right") - 1, 0, len(self.bounds) - 2)
        for sec in np.unique(j):
            m = j == sec
            lv = self.table[start_level, sec]
            t0, t1 = self.bounds[sec], self.bounds[sec + 1]
            dth = t1 - t0
            tau = (theta[m] - t0) / dth
            if sec < len(self.letters):
                g, sign = self.letters[sec]
                moving = lv in (g - 1, g)
            else:
                moving = False
            if not moving:
                out[0][m] = self.levels[lv]
                continue
            dest = g if lv == g - 1 else g - 1
            r0, r1 = self.levels[lv], self.levels[dest]
            h, h1, h2 = _smooth_step(tau)
            out[0][m] = r0 + (r1 - r0) * h
            out[1][m] = (r1 - r0) * h1 / dth
            out[2][m] = (r1 - r0) * h2 / dth ** 2
            over = 1.0 if (dest > lv) == (sign > 0) else -1.0
            za = over * self.z_amp
            out[3][m] = za * np.sin(math.pi * tau) ** 2
            out[4][m] = za * math.pi * np.sin(TWO_PI * tau) / dth
            out[5][m] = za * 2 * math.pi ** 2 * np.cos(TWO_PI * tau) / dth ** 2
        return out

    def component_handle(self, cyc):
        laps = len(cyc)
        eps = self.eps

        def f(u):
            u = np.mod(np.asarray(u, float), TWO_PI)
            big = u * laps
            lap = np.minimum(np.floor(big / TWO_PI).astype(int), laps - 1)
            th = big - lap * TWO_PI
            rho = [np.zeros_like(u) for _ in range(6)]
            for i, start in enumerate(cyc):
                m = lap == i
                if m.any():
                    parts = self.radial(start, th[m])
                    for a in range(6):
                        rho[a][m] = parts[a]
            r = (1.0 - eps) + eps * rho[0]
            r1, r2 = eps * rho[1], eps * rho[2]
            c, s = np.cos(big), np.sin(big)
            p = np.stack([r * c, r * s, rho[3]], axis=1)
            d1 = np.stack([r1 * c - r * s, r1 * s + r * c, rho[4]], axis=1) * laps
            d2 = np.stack([r2 * c - 2 * r1 * s - r * c,
                           r2 * s + 2 * r1 * c - r * s, rho[5]], axis=1) * laps ** 2
            return p, d1, d2

        return f


def braid_to_curve(word: str, strands: int, epsilon: float = 0.05,
                   samples_per_winding: int = SAMPLES_PER_WINDING) -> ParamCurve3:
    """Closed braid in cylindrical coordinates, squeezed towards ``r = 1``."""
    letters = parse_braid_word(word, strands)
    br = _Braid(letters, strands, epsilon)
    comps = []
    for i, cyc in enumerate(br.cycles):
        f = br.component_handle(cyc)
        n = samples_per_winding * len(cyc)
        p, _, _ = f(param_grid(n))
        desc = {"kind": "braid_word", "word": word, "strands": strands,
                "epsilon": epsilon, "samples_per_winding": samples_per_winding,
                "component": i}
        comps.append(Component3(p, f, desc))
    return ParamCurve3(comps, f"braid[{word}]/{strands}")


# ---------------------------------------------------------------------------
# simple analytic curves
# ---------------------------------------------------------------------------


def _circle_handle(radius, center=(0.0, 0.0), tilt=0.0):
    cx, cy = center
    ct, st = math.cos(tilt), math.sin(tilt)

    def f(u):
        u = np.asarray(u, float)
        c, s = np.cos(u), np.sin(u)
        p = np.stack([cx + radius * c, cy + radius * s * ct, radius * s * st], axis=1)
        d1 = np.stack([-radius * s, radius * c * ct, radius * c * st], axis=1)
        d2 = np.stack([-radius * c, -radius * s * ct, -radius * s * st], axis=1)
        return p, d1, d2

    return f


def _figure_eight_handle(scale=1.0):
    def f(u):
        u = np.asarray(u, float)
        z = np.zeros_like(u)
        p = np.stack([np.sin(2 * u), np.sin(u), 0.1 * np.cos(u)], axis=1) * scale
        d1 = np.stack([2 * np.cos(2 * u), np.cos(u), -0.1 * np.sin(u)], axis=1) * scale
        d2 = np.stack([-4 * np.sin(2 * u), -np.sin(u), -0.1 * np.cos(u) + z], axis=1) * scale
        return p, d1, d2

    return f


def _polar_handle(radius_fn, theta_fn, z_fn=None):
    """Curve ``R(u) (cos T(u), sin T(u))`` from callables returning (value, d1, d2)."""
    def f(u):
        u = np.asarray(u, float)
        r, r1, r2 = radius_fn(u)
        t, t1, t2 = theta_fn(u)
        c, s = np.cos(t), np.sin(t)
        x1 = r1 * c - r * s * t1
        y1 = r1 * s + r * c * t1
        x2 = r2 * c - 2 * r1 * s * t1 - r * c * t1 ** 2 - r * s * t2
        y2 = r2 * s + 2 * r1 * c * t1 - r * s * t1 ** 2 + r * c * t2
        if z_fn is None:
            z = z1 = z2 = np.zeros_like(u)
        else:
            z, z1, z2 = z_fn(u)
        return (np.stack([r * c, r * s, z], axis=1), np.stack([x1, y1, z1], axis=1),
                np.stack([x2, y2, z2], axis=1))

    return f


def _rose_handle(k, amp, phase, nudge):
    # two low harmonics with unrelated phases break the k-fold symmetry, which
    # would otherwise put several bitangents on the same normal angle
    terms = [(amp, k, phase), (0.6 * nudge, 1, GOLDEN * 5.0), (0.4 * nudge, 2, GOLDEN * 11.0)]

    def radius(u):
        r, r1, r2 = np.ones_like(u), np.zeros_like(u), np.zeros_like(u)
        for a, m, ph in terms:
            arg = m * u + ph
            r = r + a * np.cos(arg)
            r1 = r1 - a * m * np.sin(arg)
            r2 = r2 - a * m * m * np.cos(arg)
        return r, r1, r2

    def theta(u):
        return u, np.ones_like(u), np.zeros_like(u)

    return _polar_handle(radius, theta)


def _spiral_handle(turns, a, b):
    w = turns * math.pi

    def radius(u):
        return (1 + a * np.cos(u) + b * np.sin(u), -a * np.sin(u) + b * np.cos(u),
                -a * np.cos(u) - b * np.sin(u))

    def theta(u):
        return w * (1 - np.cos(u)), w * np.sin(u), w * np.cos(u)

    def height(u):
        return 0.2 * np.sin(u), 0.2 * np.cos(u), -0.2 * np.sin(u)

    return _polar_handle(radius, theta, height)


def _torus_knot_handle(p, q, big_r=4.0, tilt=(0.13, 0.07)):
    """Torus knot T(p, q) turned so that height follows the p-fold winding.

    A core radius of 4 keeps the tube wobble from adding extra extrema, so
    T(n, q) has exactly n maxima in height.
    """
    def f(u):
        u = np.asarray(u, float)
        rr = big_r + np.cos(q * u)
        rr1 = -q * np.sin(q * u)
        rr2 = -q * q * np.cos(q * u)
        cp, sp = np.cos(p * u), np.sin(p * u)
        x = rr * cp
        x1 = rr1 * cp - p * rr * sp
        x2 = rr2 * cp - 2 * p * rr1 * sp - p * p * rr * cp
        y = rr * sp
        y1 = rr1 * sp + p * rr * cp
        y2 = rr2 * sp + 2 * p * rr1 * cp - p * p * rr * sp
        w = np.sin(q * u)
        w1 = q * np.cos(q * u)
        w2 = -q * q * np.sin(q * u)
        ta, tb = tilt
        pos = np.stack([y, w, x + ta * y + tb * w], axis=1)
        d1 = np.stack([y1, w1, x1 + ta * y1 + tb * w1], axis=1)
        d2 = np.stack([y2, w2, x2 + ta * y2 + tb * w2], axis=1)
        return pos, d1, d2

    return f


def _component(handle, n, desc):
    p, _, _ = handle(param_grid(n))
    return Component3(p, handle, desc)


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------


def generate(spec: GeneratorSpec) -> ParamCurve3:
    kind, prm = spec.kind, dict(spec.params)
    base = {"kind": kind, **prm}

    def desc(i):
        return {**base, "component": i}

    if kind == "circle":
        r = float(prm.get("radius", 1.0))
        n = int(prm.get("samples", 256))
        h = _circle_handle(r, tuple(prm.get("center", (0.0, 0.0))), float(prm.get("tilt", 0.0)))
        return ParamCurve3([_component(h, n, desc(0))], "circle")
    if kind in ("multi_circle", "unlink2"):
        if kind == "unlink2":
            radii = prm.get("radii", [1.0, 0.8])
            centers = prm.get("centers", [[-1.3, 0.0], [1.25, 0.35]])
        else:
            if "radii" not in prm:
                raise ValueError("multi_circle needs a 'radii' list")
            radii = prm["radii"]
            centers = prm.get("centers", [[0.0, 0.0]] * len(radii))
        n = int(prm.get("samples", 512))
        comps = [_component(_circle_handle(float(r), tuple(c)), n, desc(i))
                 for i, (r, c) in enumerate(zip(radii, centers))]
        return ParamCurve3(comps, kind)
    if kind == "figure_eight":
        n = int(prm.get("samples", 1024))
        return ParamCurve3([_component(_figure_eight_handle(), n, desc(0))], "figure_eight")
    if kind == "rose":
        k = int(prm.get("petals", 3))
        # past 1 / (1 + k^2) the petals turn concave and inflections appear;
        # four times that keeps every petal's pair of inflections well apart
        amp = float(prm.get("amplitude", 4.0 / (1 + k * k)))
        if "phase" in prm or "seed" not in prm:
            phase = float(prm.get("phase", 0.0))
        else:
            phase = float(np.random.default_rng(int(prm["seed"])).uniform(0, TWO_PI / k))
        nudge = float(prm.get("nudge", 0.1 * amp))
        n = int(prm.get("samples", max(1024, 256 * k)))
        return ParamCurve3([_component(_rose_handle(k, amp, phase, nudge), n, desc(0))], f"rose{k}")
    if kind == "spiral_closed":
        turns = float(prm.get("turns", 2.25))
        n = int(prm.get("samples", 4096))
        h = _spiral_handle(turns, float(prm.get("a", 0.5)), float(prm.get("b", 0.1)))
        return ParamCurve3([_component(h, n, desc(0))], f"spiral{turns:g}")
    if kind == "bridge_embedding":
        nb = int(prm.get("n", 2))
        q = int(prm.get("q", nb + 1))
        n = int(prm.get("samples", 2048))
        return ParamCurve3([_component(_torus_knot_handle(nb, q), n, desc(0))],
                           f"bridge_T({nb},{q})")
    if kind in POSITIVE_KINDS:
        if kind == "braid_word":
            word, strands = prm.get("word", ""), int(prm.get("strands", 2))
        elif kind == "torus_2braid":
            word, strands = " ".join(["s1"] * int(prm.get("q", 3))), 2
        elif kind == "hopf":
            word, strands = "s1 s1", 2
        else:
            word, strands = "s1 s1 s1 s1", 2
        eps = float(prm.get("epsilon", 0.05))
        spw = int(prm.get("samples_per_winding", SAMPLES_PER_WINDING))
        for _ in range(4):
            curve = braid_to_curve(word, strands, eps, spw)
            pc = project_xy(curve)
            if all(np.all(c.curvature > 0) for c in pc.components):
                curve.name = _braid_name(kind, prm, word, strands)
                return curve
            eps *= 0.5
        raise CurvatureSignFailure(f"{kind}: projection not positively curved")
    raise ValueError(kind)  # pragma: no cover


def _braid_name(kind, prm, word, strands):
    if kind == "torus_2braid":
        return f"torus(2,{int(prm.get('q', 3))})"
    if kind == "hopf":
        return "hopf"
    if kind == "torus_link_2_4":
        return "torus_link(2,4)"
    return f"braid[{word}]/{strands}"


def handle_from_descriptor(desc: dict, points: np.ndarray):
    """Rebuild the analytic handle of one component, or None if it does not match."""
    try:
        params = {k: v for k, v in desc.items() if k not in ("kind", "component")}
        if desc["kind"] == "braid_word" and "word" in desc:
            curve = braid_to_curve(desc["word"], int(desc["strands"]),
                                   float(desc.get("epsilon", 0.05)),
                                   int(desc.get("samples_per_winding", SAMPLES_PER_WINDING)))
        else:
            curve = generate(GeneratorSpec(desc["kind"], params))
        comp = curve.components[int(desc.get("component", 0))]
    except Exception:
        return None
    if comp.points.shape != points.shape:
        return None
    scale = max(1.0, float(np.abs(points).max()))
    if np.max(np.abs(comp.points - points)) > 1e-9 * scale:
        return None
    return comp.analytic


def corpus() -> dict:
    """The named curves the bound and oracle sweeps run over."""
    specs = {
        "circle": GeneratorSpec("circle"),
        "figure_eight": GeneratorSpec("figure_eight"),
        "unlink2": GeneratorSpec("unlink2"),
        "hopf": GeneratorSpec("hopf"),
        "torus_link_2_4": GeneratorSpec("torus_link_2_4"),
        "spiral": GeneratorSpec("spiral_closed"),
        "spiral4pi": GeneratorSpec("spiral_closed", {"turns": 1.1}),
    }
    for k in range(3, 8):
        specs[f"rose{k}"] = GeneratorSpec("rose", {"petals": k})
    for q in (3, 5, 7, 9):
        specs[f"torus_2_{q}"] = GeneratorSpec("torus_2braid", {"q": q})
    specs["figure_eight_knot"] = GeneratorSpec("braid_word", {"word": "s1 S2 s1 S2", "strands": 3})
    return specs
