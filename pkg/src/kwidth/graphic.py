"""Tangent-line dual curve, its arrangement in line space, and the 2-width.

Lines are handled on the double cover first: an oriented line is a point
``(phi, d)`` of the cylinder ``S^1 x R`` (unit normal at angle ``phi``, signed
offset ``d``).  The antipodal map ``A(phi, d) = (phi + pi, -d)`` reverses the
orientation, and the Moebius band of unoriented lines is the quotient.  Each
plane-curve component contributes two sheets to the cylinder picture: its
oriented tangent lines ``L`` and their reversals ``A L``.

The arrangement is computed by an angular sweep over the cylinder.  Between
consecutive events (dual self-intersections and dual folds, i.e. cusps) the
branches of the dual curve keep their vertical order, so the complement is a
stack of strips; strips are glued across event lines with a union-find.
Faces of the Moebius band are orbits of cylinder faces under ``A``.
"""
from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .curve import TWO_PI, PlaneCurve
from .errors import ArrangementInconsistent, TangentLine, WidthMismatch

PI = math.pi


@dataclass(frozen=True)
class LineCoord:
    """The line ``{p : p . (cos theta, sin theta) = d}`` with ``theta`` in ``[0, pi)``."""

    theta: float
    d: float

    def __post_init__(self):
        t = math.fmod(float(self.theta), TWO_PI)
        d = float(self.d)
        if t < 0:
            t += TWO_PI
        if t >= PI:
            t -= PI
            d = -d
        if t >= PI:  # rounding right at the seam
            t = 0.0
            d = -d
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "d", d)

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def distance(self, other: "LineCoord") -> float:
        """Product-metric distance on the Moebius band."""
        dt = abs(self.theta - other.theta)
        direct = math.hypot(dt, self.d - other.d)
        glued = math.hypot(PI - dt, self.d + other.d)
        return min(direct, glued)


def mobius_coords(phi, d):
    """Reduce oriented-line coordinates to ``theta in [0, pi)`` with the d-flip."""
    phi = np.asarray(phi, float)
    d = np.asarray(d, float)
    t = np.mod(phi, TWO_PI)
    flip = t >= PI
    t = np.where(flip, t - PI, t)
    return t, np.where(flip, -d, d)


# ---------------------------------------------------------------------------
# intersection counting
# ---------------------------------------------------------------------------


def line_intersections(pc: PlaneCurve, line: LineCoord, tol: float = 1e-9,
                       rounds: int = 4) -> int:
    """Number of transverse intersections of ``pc`` with ``line``.

    Counts sign changes of the signed distance along each component.  A
    sample closer than ``tol`` to the line, or a local extremum of the signed
    distance closer than the chord sag, makes the count uncertain; the
    component is then resampled at 4x density, up to ``rounds`` times.
    """
    n = line.normal
    total = 0
    for comp in pc.components:
        xy, d2 = comp.xy, comp.d2
        for attempt in range(rounds + 1):
            g = xy @ n - line.d
            h = TWO_PI / len(xy)
            sag = np.linalg.norm(d2, axis=1) * h * h / 8.0
            gp, gn = np.roll(g, 1), np.roll(g, -1)
            extremal = ((g >= gp) & (g >= gn)) | ((g <= gp) & (g <= gn))
            # a sample on the line is harmless when its neighbours clearly straddle it
            straddle = (gp * gn < 0) & (np.minimum(np.abs(gp), np.abs(gn)) > tol)
            risky = ((np.abs(g) <= tol) & ~straddle) | (extremal & (np.abs(g) <= 2.0 * sag + tol))
            if not risky.any():
                total += int(np.count_nonzero((g > 0) != (gn > 0)))
                break
            if attempt == rounds:
                raise TangentLine(
                    f"line (theta={line.theta:.6g}, d={line.d:.6g}) is not certifiably transverse")
            m = len(xy) * 4
            u = np.arange(m) * (TWO_PI / m)
            xy, _, d2 = comp.evaluate(u)
    return total


# ---------------------------------------------------------------------------
# dual curve
# ---------------------------------------------------------------------------


@dataclass
class DualSheet:
    component: int
    flipped: bool
    phi: np.ndarray        # lifted normal angle, n + 1 values (closing sample repeated)
    d: np.ndarray          # n + 1 offsets
    folds: np.ndarray      # sample indices where phi turns back (cusps)
    piece: np.ndarray      # piece index of every segment
    closed: bool           # True when the sheet has no folds
    rot: int               # rotation index of the component

    @property
    def n(self) -> int:
        return len(self.phi) - 1

    @property
    def index(self) -> int:
        return 2 * self.component + int(self.flipped)


@dataclass
class DualCurve:
    sheets: list
    n_components: int

    def sheet(self, component: int, flipped: bool = False) -> DualSheet:
        return self.sheets[2 * component + int(flipped)]

    def cusps(self) -> list:
        out = []
        for c in range(self.n_components):
            s = self.sheet(c)
            for k in s.folds:
                out.append((c, int(k), LineCoord(s.phi[k], s.d[k])))
        return out

    def wraps(self) -> list:
        """Seam crossings of each component's dual loop in the Moebius band."""
        return [abs(2 * self.sheet(c).rot) for c in range(self.n_components)]

    def mobius_samples(self, component: int) -> tuple:
        s = self.sheet(component)
        return mobius_coords(s.phi[:-1], s.d[:-1])


def dual_curve(pc: PlaneCurve) -> DualCurve:
    """Tangent lines of every sample, as two sheets per component on the cylinder."""
    sheets = []
    for ci, comp in enumerate(pc.components):
        tan = comp.tangent
        ang = np.unwrap(np.append(np.arctan2(tan[:, 1], tan[:, 0]),
                                  math.atan2(tan[0, 1], tan[0, 0])))
        rot = int(round((ang[-1] - ang[0]) / TWO_PI))
        ang[-1] = ang[0] + TWO_PI * rot
        phi = ang - PI / 2
        xy = np.vstack([comp.xy, comp.xy[:1]])
        d = xy[:, 0] * np.cos(phi) + xy[:, 1] * np.sin(phi)
        dphi = np.diff(phi)
        sgn = np.where(dphi >= 0, 1, -1)
        folds = np.nonzero(np.roll(sgn, 1) != sgn)[0]
        nseg = len(dphi)
        if len(folds) == 0:
            piece = np.zeros(nseg, dtype=np.int64)
            closed = True
        else:
            piece = (np.searchsorted(folds, np.arange(nseg), side="right") - 1) % len(folds)
            closed = False
        for flipped in (False, True):
            sheets.append(DualSheet(
                component=ci, flipped=flipped,
                phi=phi + (PI if flipped else 0.0), d=-d if flipped else d.copy(),
                folds=folds, piece=piece, closed=closed, rot=rot))
    return DualCurve(sheets, len(pc.components))


def dual_residual(dc: DualCurve, pc: PlaneCurve) -> float:
    """Largest deviation between the dual samples and the curve's tangent lines."""
    worst = 0.0
    for c, comp in enumerate(pc.components):
        s = dc.sheet(c)
        n = np.stack([np.cos(s.phi[:-1]), np.sin(s.phi[:-1])], axis=1)
        worst = max(worst, float(np.max(np.abs(np.einsum("ij,ij->i", comp.xy, n) - s.d[:-1]))))
        worst = max(worst, float(np.max(np.abs(np.einsum("ij,ij->i", comp.tangent, n)))))
    return worst


# ---------------------------------------------------------------------------
# segment table shared by intersection search and sweep
# ---------------------------------------------------------------------------


@dataclass
class _Segments:
    sheet: np.ndarray
    k: np.ndarray
    piece: np.ndarray
    phi0: np.ndarray
    phi1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    sign: np.ndarray       # +1 when crossing the branch upward adds two intersections
    closed: np.ndarray
    rot: np.ndarray
    nseg: np.ndarray       # segment count of the owning sheet

    @classmethod
    def build(cls, dc: DualCurve) -> "_Segments":
        cols = defaultdict(list)
        for s in dc.sheets:
            n = s.n
            dphi = np.diff(s.phi)
            direction = np.where(dphi >= 0, 1, -1)
            cols["sheet"].append(np.full(n, s.index))
            cols["k"].append(np.arange(n))
            cols["piece"].append(s.piece)
            # the piece that straddles sample 0 is lifted continuously across it
            lift = np.zeros(n)
            if len(s.folds) and s.rot:
                lift[:int(s.folds[0])] = TWO_PI * s.rot
            cols["phi0"].append(s.phi[:-1] + lift)
            cols["phi1"].append(s.phi[1:] + lift)
            cols["d0"].append(s.d[:-1])
            cols["d1"].append(s.d[1:])
            cols["sign"].append(direction if s.flipped else -direction)
            cols["closed"].append(np.full(n, s.closed))
            cols["rot"].append(np.full(n, abs(s.rot)))
            cols["nseg"].append(np.full(n, n))
        return cls(**{k: np.concatenate(v) for k, v in cols.items()})

    def branch_key(self, idx, m):
        idx = int(idx)
        m = int(m)
        if self.closed[idx]:
            m %= int(self.rot[idx])
        return (int(self.sheet[idx]), int(self.piece[idx]), m)

    def at(self, psi: float) -> tuple:
        """Branches met by the vertical line ``phi = psi``: (keys, d, seg idx), sorted by d."""
        lo = np.minimum(self.phi0, self.phi1)
        hi = np.maximum(self.phi0, self.phi1)
        m = np.ceil((lo - psi) / TWO_PI)
        val = psi + TWO_PI * m
        # rounding in the ceil can leave val a hair below lo; on a shared
        # sample that would report both neighbouring segments
        low = val < lo
        m[low] += 1
        val[low] = psi + TWO_PI * m[low]
        hit = np.nonzero(val < hi)[0]
        t = (val[hit] - self.phi0[hit]) / (self.phi1[hit] - self.phi0[hit])
        d = self.d0[hit] + t * (self.d1[hit] - self.d0[hit])
        order = np.argsort(d, kind="stable")
        hit, d, m = hit[order], d[order], m[hit][order]
        keys = [self.branch_key(i, mm) for i, mm in zip(hit, m)]
        return keys, d, hit


# ---------------------------------------------------------------------------
# dual self-intersections
# ---------------------------------------------------------------------------


@dataclass
class CylVertex:
    sheets: tuple     # (sheet a, sheet b)
    segs: tuple       # (segment index in table for a, for b)
    params: tuple     # (s along a, t along b)
    x: float          # phi in [0, 2 pi)
    d: float
    lifted: tuple     # lifted phi along a and along b
    angle: float      # crossing angle between the branches, in the (phi, d) chart


def dual_vertices(dc: DualCurve, segs: _Segments | None = None, backend=None) -> list:
    """All transverse self-intersections of the doubled dual curve on the cylinder.

    Only pairs involving an ``L`` sheet are searched; the images under the
    antipodal map are generated, so the vertex set is exactly symmetric.
    """
    if segs is None:
        segs = _Segments.build(dc)
    x0 = np.mod(segs.phi0, TWO_PI)
    x1 = x0 + (segs.phi1 - segs.phi0)
    base = np.arange(len(x0))
    idx = [base]
    shift = [np.zeros(len(x0))]
    over = np.maximum(x0, x1) >= TWO_PI
    under = np.minimum(x0, x1) < 0
    idx += [base[over], base[under]]
    shift += [np.full(over.sum(), -TWO_PI), np.full(under.sum(), TWO_PI)]
    idx = np.concatenate(idx)
    shift = np.concatenate(shift)
    a = np.stack([x0[idx] + shift, segs.d0[idx]], axis=1)
    b = np.stack([x1[idx] + shift, segs.d1[idx]], axis=1)
    ci, cj = kernels.candidate_pairs(a, b, pad=1e-12, backend=backend)
    si, sj = idx[ci], idx[cj]
    sheet_i, sheet_j = segs.sheet[si], segs.sheet[sj]
    same = sheet_i == sheet_j
    gap = np.abs(segs.k[si] - segs.k[sj])
    adjacent = same & ((gap <= 1) | (gap == segs.nseg[si] - 1))
    flip_i, flip_j = sheet_i % 2, sheet_j % 2
    comp_i, comp_j = sheet_i // 2, sheet_j // 2
    both_l = (flip_i == 0) & (flip_j == 0)
    # one L, one A: keep the (component, k) ordered representative only
    l_first = (flip_i == 0) & (flip_j == 1)
    l_second = (flip_i == 1) & (flip_j == 0)
    lc = np.where(l_first, comp_i, comp_j)
    lk = np.where(l_first, segs.k[si], segs.k[sj])
    ac = np.where(l_first, comp_j, comp_i)
    ak = np.where(l_first, segs.k[sj], segs.k[si])
    canonical = (lc < ac) | ((lc == ac) & (lk < ak))
    keep = ~adjacent & (si != sj) & (both_l | ((l_first | l_second) & canonical))
    ci, cj, si, sj = ci[keep], cj[keep], si[keep], sj[keep]
    # a vertex sitting exactly on shared samples can slip between the
    # half-open parameter ranges, so accept a sliver beyond each end and drop
    # the duplicates this produces
    hit, s, t = kernels.segment_intersections(a[ci], b[ci], a[cj], b[cj], slack=1e-9)
    out = []
    seen = []
    for n in np.nonzero(hit)[0]:
        p = a[ci[n]] + s[n] * (b[ci[n]] - a[ci[n]])
        if not (0.0 <= p[0] < TWO_PI):
            continue
        ia, ib = int(si[n]), int(sj[n])
        if any(_same_vertex(segs, ia, ib, q, p, other) for q, other in seen):
            continue
        ra = b[ci[n]] - a[ci[n]]
        rb = b[cj[n]] - a[cj[n]]
        cosang = abs(ra @ rb) / (np.linalg.norm(ra) * np.linalg.norm(rb))
        ang = math.acos(min(1.0, cosang))
        la = segs.phi0[ia] + s[n] * (segs.phi1[ia] - segs.phi0[ia])
        lb = segs.phi0[ib] + t[n] * (segs.phi1[ib] - segs.phi0[ib])
        v = CylVertex((int(segs.sheet[ia]), int(segs.sheet[ib])), (ia, ib),
                      (float(s[n]), float(t[n])), float(p[0]), float(p[1]),
                      (float(la), float(lb)), ang)
        w = _antipode(v, segs)
        out += [v, w]
        seen += [(p, (ia, ib)), (np.array([w.x, w.d]), w.segs)]
    return out


def _same_vertex(segs: _Segments, ia: int, ib: int, p, q, other) -> bool:
    if np.hypot(*(p - q)) > 1e-9:
        return False
    ja, jb = other

    def near(x, y):
        if segs.sheet[x] != segs.sheet[y]:
            return False
        gap = abs(int(segs.k[x]) - int(segs.k[y]))
        return min(gap, int(segs.nseg[x]) - gap) <= 1

    return (near(ia, ja) and near(ib, jb)) or (near(ia, jb) and near(ib, ja))


def _antipode(v: CylVertex, segs: _Segments) -> CylVertex:
    # sheet 2c <-> 2c + 1 share segment numbering, offset by that sheet's size
    def partner(ix):
        sh = int(segs.sheet[ix])
        return ix + segs.nseg[ix] if sh % 2 == 0 else ix - segs.nseg[ix]

    ia, ib = (int(partner(i)) for i in v.segs)
    return CylVertex((v.sheets[0] ^ 1, v.sheets[1] ^ 1), (ia, ib), v.params,
                     math.fmod(v.x + PI, TWO_PI), -v.d,
                     tuple(la - PI if sh % 2 else la + PI for la, sh in zip(v.lifted, v.sheets)),
                     v.angle)


# ---------------------------------------------------------------------------
# angular sweep
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent = []

    def make(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra


@dataclass
class _Slab:
    start: float
    end: float
    keys: list
    nodes: list
    signs: list


@dataclass
class _SweepResult:
    slabs: list
    uf: _UnionFind
    cells: list        # node per counted 2-cell
    intervals: list    # node per counted 1-cell on event lines
    origin: float


def _sweep(dc: DualCurve, segs: _Segments, verts: list) -> _SweepResult:
    events = []  # (angle, kind, payload)
    for v in verts:
        events.append((v.x, "cross", v))
    for s in dc.sheets:
        dphi = np.diff(s.phi)
        off = int(np.nonzero(segs.sheet == s.index)[0][0])
        for k in s.folds:
            k = int(k)
            kind = "end" if dphi[k - 1] > 0 else "start"
            events.append((float(np.mod(s.phi[k], TWO_PI)), kind, (s, k, off)))

    angles = np.sort(np.array([e[0] for e in events])) if events else np.array([])
    if len(angles):
        gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
        g = int(np.argmax(gaps))
        origin = float(angles[g] + 0.5 * gaps[g])
    else:
        origin = 0.0

    def frame(x):
        return origin + float(np.mod(x - origin, TWO_PI))

    events = sorted(((frame(e[0]), e[1], e[2]) for e in events), key=lambda e: e[0])
    uf = _UnionFind()
    cells: list = []
    intervals: list = []
    slabs: list = []

    keys, _, hit = segs.at(origin)
    gaps_nodes = [uf.make() for _ in range(len(keys) + 1)]
    first_nodes = list(gaps_nodes)
    signs = [int(segs.sign[i]) for i in hit]
    start = origin

    def close_slab(end):
        slabs.append(_Slab(start, end, list(keys), list(gaps_nodes), list(signs)))
        cells.extend(gaps_nodes)

    def position(key):
        try:
            return keys.index(key)
        except ValueError:
            raise ArrangementInconsistent(f"branch {key} missing from sweep state") from None

    for n_ev, (ang, kind, payload) in enumerate(events):
        close_slab(ang)
        if kind == "cross":
            v = payload
            ka = segs.branch_key(v.segs[0], round((v.lifted[0] - ang) / TWO_PI))
            kb = segs.branch_key(v.segs[1], round((v.lifted[1] - ang) / TWO_PI))
            ja, jb = position(ka), position(kb)
            if abs(ja - jb) != 1:
                raise ArrangementInconsistent(f"crossing branches not adjacent at phi={ang:.6g}")
            j = min(ja, jb)
            intervals.extend(gaps_nodes[:j + 1] + gaps_nodes[j + 2:])
            keys[j], keys[j + 1] = keys[j + 1], keys[j]
            signs[j], signs[j + 1] = signs[j + 1], signs[j]
            gaps_nodes[j + 1] = uf.make()
        else:
            sheet, k, off = payload
            ib, ia = off + (k - 1) % sheet.n, off + k
            prev_phi, prev_d = segs.phi0[ib], segs.d0[ib]
            here_phi = segs.phi0[ia]
            m_before = round((segs.phi1[ib] - ang) / TWO_PI)
            m_after = round((here_phi - ang) / TWO_PI)
            shift = here_phi - segs.phi1[ib]
            prev_phi += shift
            kb = segs.branch_key(off + (k - 1) % sheet.n, m_before)
            ka = segs.branch_key(off + k, m_after)
            if kind == "end":
                ja, jb = position(ka), position(kb)
                if abs(ja - jb) != 1:
                    raise ArrangementInconsistent(f"fold branches not adjacent at phi={ang:.6g}")
                j = min(ja, jb)
                intervals.extend(gaps_nodes[:j + 1] + gaps_nodes[j + 2:])
                merged = uf.union(gaps_nodes[j], gaps_nodes[j + 2])
                del keys[j:j + 2]
                del signs[j:j + 2]
                gaps_nodes[j:j + 3] = [merged]
            else:
                here, dh, _ = segs.at(ang)
                lookup = dict(zip(here, dh))
                dk = float(sheet.d[k])
                j = 0
                for key in keys:
                    if key not in lookup:
                        raise ArrangementInconsistent(f"branch {key} vanished at phi={ang:.6g}")
                    if lookup[key] < dk:
                        j += 1
                slope_before = (prev_d - sheet.d[k]) / (prev_phi - here_phi)
                slope_after = (segs.d1[ia] - sheet.d[k]) / (segs.phi1[ia] - here_phi)
                lower, upper = (kb, ka) if slope_before < slope_after else (ka, kb)
                sign_of = {kb: int(segs.sign[ib]), ka: int(segs.sign[ia])}
                intervals.extend(gaps_nodes + [gaps_nodes[j]])
                keys[j:j] = [lower, upper]
                signs[j:j] = [sign_of[lower], sign_of[upper]]
                gaps_nodes[j:j + 1] = [gaps_nodes[j], uf.make(), gaps_nodes[j]]
        start = ang
        nxt = events[n_ev + 1][0] if n_ev + 1 < len(events) else origin + TWO_PI
        if nxt - ang > 1e-9:
            check, _, _ = segs.at(0.5 * (ang + nxt))
            if check != keys:
                raise ArrangementInconsistent(f"sweep state diverged after phi={ang:.6g}")

    close_slab(origin + TWO_PI)
    final, _, _ = segs.at(origin + TWO_PI)
    if final != keys or len(gaps_nodes) != len(first_nodes):
        raise ArrangementInconsistent("sweep did not close up around the cylinder")
    # the seam line phi = origin is an ordinary line of the decomposition
    intervals.extend(gaps_nodes)
    for a, b in zip(gaps_nodes, first_nodes):
        uf.union(a, b)
    return _SweepResult(slabs, uf, cells, intervals, origin)


# ---------------------------------------------------------------------------
# graphic
# ---------------------------------------------------------------------------


@dataclass
class GraphicVertex:
    index: int
    line: LineCoord
    params: tuple          # ((component, u), (component, u))
    same_orientation: bool
    angle: float


@dataclass
class Cusp:
    component: int
    u: float
    line: LineCoord


@dataclass
class Edge:
    component: int
    start: int             # vertex index
    end: int
    u_start: float
    u_end: float
    cusps: int


@dataclass
class Face:
    index: int
    topology: str          # disk | annulus | mobius | other
    chi: float             # compactly supported Euler characteristic
    unbounded: bool
    representatives: list  # candidate (LineCoord, margin) pairs, best first
    width: int | None = None


@dataclass
class Graphic:
    vertices: list
    cusps: list
    edges: list
    faces: list
    adjacency: list        # (lower face, upper face, width change)
    seed_face: int
    v: int
    e: int
    f: int
    r: int
    cylinder_faces: int
    euler_general: int     # v - e + sum of face chi; zero for a consistent arrangement
    checks: dict = field(default_factory=dict)


def build_graphic(dc: DualCurve, pc: PlaneCurve, backend=None) -> Graphic:
    segs = _Segments.build(dc)
    verts = dual_vertices(dc, segs, backend=backend)
    sw = _sweep(dc, segs, verts)
    uf = sw.uf

    roots = sorted({uf.find(n) for n in sw.cells})
    rid = {r: i for i, r in enumerate(roots)}
    chi_cyl = np.zeros(len(roots), dtype=np.int64)
    for n in sw.cells:
        chi_cyl[rid[uf.find(n)]] += 1
    for n in sw.intervals:
        chi_cyl[rid[uf.find(n)]] -= 1
    if int(chi_cyl.sum()) != len(verts):
        raise ArrangementInconsistent(
            f"cylinder Euler count {int(chi_cyl.sum())} != vertex count {len(verts)}")

    # candidate representative points of each cylinder face
    cands = defaultdict(list)
    top_face = rid[uf.find(sw.slabs[0].nodes[-1])]
    for sl in sw.slabs:
        width = sl.end - sl.start
        if width <= 1e-9:
            continue
        for frac in (0.5, 0.3819660112501051, 0.6180339887498949):
            _add_candidates(cands, sl, segs, uf, rid, sl.start + frac * width, width)

    # antipodal action on cylinder faces
    image = {}
    for f, lst in cands.items():
        for _, psi, dm in sorted(lst, reverse=True)[:8]:
            try:
                image[f] = _locate(sw, segs, rid, psi + PI, -dm)
                break
            except ArrangementInconsistent:
                continue
        else:
            raise ArrangementInconsistent(f"cannot locate the antipodal image of face {f}")
    for f, g in image.items():
        if image.get(g) != f:
            raise ArrangementInconsistent("antipodal map is not an involution on faces")

    orbit = {}
    faces = []
    for f in range(len(roots)):
        if f in orbit:
            continue
        g = image[f]
        idx = len(faces)
        orbit[f] = orbit[g] = idx
        invariant = f == g
        chi = chi_cyl[f] / 2.0 if invariant else float(chi_cyl[f])
        unbounded = f == top_face or g == top_face
        if invariant:
            topo = "mobius" if chi == 0 else "other"
        elif chi == 1:
            topo = "disk"
        elif chi == 0 and unbounded:
            topo = "annulus"
        else:
            topo = "other"
        reps = sorted(cands[f] + ([] if invariant else cands[g]), reverse=True)
        reps = [(LineCoord(psi, dm), margin) for margin, psi, dm in reps]
        faces.append(Face(idx, topo, chi, unbounded, reps))

    adjacency = set()
    for sl in sw.slabs:
        if sl.end - sl.start <= 1e-9:
            continue
        for g, sgn in enumerate(sl.signs):
            lo = orbit[rid[uf.find(sl.nodes[g])]]
            hi = orbit[rid[uf.find(sl.nodes[g + 1])]]
            adjacency.add((lo, hi, 2 * sgn))

    gverts, visits = _mobius_vertices(verts, segs, dc)
    cusps = []
    for c in range(dc.n_components):
        s = dc.sheet(c)
        for k in s.folds:
            cusps.append(Cusp(c, float(k) * TWO_PI / s.n, LineCoord(s.phi[k], s.d[k])))
    edges = _edges(visits, cusps, dc.n_components)

    v = len(gverts)
    e = len(edges)
    f_disk = sum(1 for fc in faces if fc.topology == "disk")
    r = len(faces)
    euler_general = v - e + sum(fc.chi for fc in faces)
    has_mobius = any(fc.topology == "mobius" for fc in faces)
    checks = {
        "v_minus_e_plus_f_is_zero": v - e + f_disk == 0,
        "v_equals_f": v == f_disk,
        "r_is_f_plus_1_or_2": r in (f_disk + 1, f_disk + 2),
        "r_is_f_plus_2_iff_mobius": (r == f_disk + 2) == has_mobius,
        "general_euler_is_zero": euler_general == 0,
    }
    if euler_general != 0:
        raise ArrangementInconsistent(f"v - e + sum(chi) = {euler_general} on the Moebius band")
    return Graphic(gverts, cusps, edges, faces, sorted(adjacency), orbit[top_face],
                   v, e, f_disk, r, len(roots), int(euler_general), checks)


def _add_candidates(cands, sl, segs, uf, rid, psi, width):
    _, dv, _ = segs.at(psi)
    for g, node in enumerate(sl.nodes):
        f = rid[uf.find(node)]
        lo = dv[g - 1] if g > 0 else None
        hi = dv[g] if g < len(dv) else None
        if lo is None and hi is None:
            dm, h = 0.0, 1.0
        elif lo is None:
            dm, h = hi - 0.25, 0.5
        elif hi is None:
            dm, h = lo + 0.25, 0.5
        else:
            dm, h = 0.5 * (lo + hi), hi - lo
        # keep away from the angular ends of the slab as well
        margin = min(h, 2.0 * min(psi - sl.start, sl.end - psi), width)
        cands[f].append((margin, psi, dm))


def _locate(sw: _SweepResult, segs: _Segments, rid: dict, psi: float, d: float) -> int:
    psi = sw.origin + float(np.mod(psi - sw.origin, TWO_PI))
    for sl in sw.slabs:
        if sl.start <= psi < sl.end and sl.end - sl.start > 1e-9:
            _, dv, _ = segs.at(psi)
            if len(dv) != len(sl.keys):
                raise ArrangementInconsistent("point location hit an event line")
            g = int(np.searchsorted(dv, d))
            return rid[sw.uf.find(sl.nodes[g])]
    raise ArrangementInconsistent("point location failed")


def _mobius_vertices(verts: list, segs: _Segments, dc: DualCurve) -> tuple:
    """One vertex per antipodal pair, with its two tangency parameters."""
    out = []
    visits = []
    for v in verts[0::2]:  # dual_vertices emits (vertex, antipode) pairs
        params = []
        for ix, s in zip(v.segs, v.params):
            sheet = dc.sheets[int(segs.sheet[ix])]
            u = (int(segs.k[ix]) + s) * TWO_PI / sheet.n
            params.append((sheet.component, float(u)))
        idx = len(out)
        same = (v.sheets[0] % 2) == (v.sheets[1] % 2)
        out.append(GraphicVertex(idx, LineCoord(v.x, v.d), tuple(params), same, v.angle))
        visits.extend((c, u, idx) for c, u in params)
    return out, visits


def _edges(visits: list, cusps: list, ncomp: int) -> list:
    edges = []
    for c in range(ncomp):
        vs = sorted((u, i) for cc, u, i in visits if cc == c)
        cs = sorted(cu.u for cu in cusps if cu.component == c)
        for n, (u, i) in enumerate(vs):
            u2, j = vs[(n + 1) % len(vs)]
            if n + 1 == len(vs):
                inside = sum(1 for x in cs if x > u or x < u2)
            else:
                inside = sum(1 for x in cs if u < x < u2)
            edges.append(Edge(c, i, j, u, u2, inside))
    return edges


# ---------------------------------------------------------------------------
# widths
# ---------------------------------------------------------------------------


@dataclass
class WidthResult:
    w2: int
    face_widths: list
    certificate: list      # (face index, LineCoord, direct count)
    graphic: Graphic
    refinements: int = 0   # sample doublings needed before the labelings agreed

    @property
    def max_count(self) -> int:
        return max(self.face_widths) if self.face_widths else 0


def assign_widths(g: Graphic, pc: PlaneCurve, attempts: int = 16) -> WidthResult:
    """Direct intersection counts per face, cross-checked by propagation.

    The propagation starts from the unbounded face (width 0) and applies the
    +-2 change recorded for every edge crossing; any disagreement with the
    direct counts, or among the edge constraints themselves, is an error.
    """
    direct = {}
    cert = []
    for face in g.faces:
        last = None
        for line, _ in face.representatives[:attempts]:
            try:
                cnt = line_intersections(pc, line)
            except TangentLine as exc:
                last = exc
                continue
            direct[face.index] = cnt
            cert.append((face.index, line, cnt))
            break
        else:
            raise WidthMismatch(f"face {face.index}: no certifiably transverse representative "
                                f"({last})")

    nbrs = defaultdict(list)
    for lo, hi, delta in g.adjacency:
        nbrs[lo].append((hi, delta))
        nbrs[hi].append((lo, -delta))
    prop = {g.seed_face: 0}
    queue = deque([g.seed_face])
    while queue:
        a = queue.popleft()
        for b, delta in nbrs[a]:
            want = prop[a] + delta
            if b in prop:
                if prop[b] != want:
                    raise WidthMismatch(f"edge constraint between faces {a} and {b} violated")
            else:
                prop[b] = want
                queue.append(b)
    for face in g.faces:
        if prop.get(face.index) != direct[face.index]:
            raise WidthMismatch(
                f"face {face.index}: direct count {direct[face.index]} "
                f"!= propagated {prop.get(face.index)}")
        face.width = direct[face.index]
    widths = [direct[f.index] for f in g.faces]
    return WidthResult(int(sum(widths)), widths, cert, g)


def width2(pc: PlaneCurve, backend=None, refinements: int = 2) -> WidthResult:
    """2-width of ``pc`` from the arrangement of its dual curve.

    The dual curve is a polyline through the sampled tangent lines.  Where the
    true dual bends sharply (next to cusps) a face thinner than the chord error
    can get a representative that is really outside it; the direct count then
    disagrees with the propagated one.  Such a run is repeated on a curve
    sampled twice as densely, up to ``refinements`` times.
    """
    npc, _, _ = pc.normalized()
    for attempt in range(refinements + 1):
        try:
            dc = dual_curve(npc)
            g = build_graphic(dc, npc, backend=backend)
            result = assign_widths(g, npc)
            result.refinements = attempt
            return result
        except (WidthMismatch, ArrangementInconsistent):
            if attempt == refinements:
                raise
            npc = npc.refined(2)
