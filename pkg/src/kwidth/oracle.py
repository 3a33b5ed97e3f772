"""Brute-force 2-width: count intersections for a dense grid of lines and
flood-fill the cells of equal count.

This module shares no code with the arrangement in :mod:`kwidth.graphic`
beyond the curve samples, so agreement between the two is evidence for both.
The grid covers ``theta`` in ``[0, pi)`` and ``d`` in ``[-1.5 R, 1.5 R]`` of
the unit-diameter curve; column ``0`` is glued to column ``ntheta - 1`` with
``d`` reflected.  Cells within reach of the dual curve get the ``TANGENT``
sentinel: their centre line is too close to a tangent line for the polyline
count to stand in for the smooth curve's.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import jsonio, kernels
from ._accel import thread_count
from .curve import PlaneCurve
from .errors import LowConfidence
from .graphic import dual_curve

TANGENT = -1
DEFAULT_RESOLUTION = (1024, 1024)
WALL_RADIUS = 0.75     # cells
MAX_TANGENT_FRACTION = 0.05
# Pockets this small are slivers of a face cut off where it narrows to a
# corner at a vertex or cusp; they are set aside rather than counted.
MIN_REGION_CELLS = 8


@dataclass
class GridScan:
    resolution: tuple
    d_range: float
    counts: np.ndarray           # (ntheta, nd) int32, TANGENT where uncertified
    region_labels: np.ndarray    # (ntheta, nd) int32, -1 on TANGENT cells
    region_widths: dict          # region id -> intersection count
    region_sizes: dict           # region id -> number of cells
    confidence: float
    rounds_used: int
    debris_cells: int = 0        # cells in pockets below MIN_REGION_CELLS

    @property
    def estimate(self) -> int:
        return int(sum(self.region_widths.values()))

    @property
    def region_count(self) -> int:
        return len(self.region_widths)

    def width_multiset(self) -> list:
        return sorted(self.region_widths.values())

    def summary(self) -> dict:
        return {
            "resolution": list(self.resolution),
            "d_range": self.d_range,
            "estimate": self.estimate,
            "confidence": self.confidence,
            "rounds_used": self.rounds_used,
            "debris_cells": self.debris_cells,
            "regions": [{"id": int(k), "width": int(v), "cells": int(self.region_sizes[k])}
                        for k, v in sorted(self.region_widths.items())],
        }

    def to_json(self) -> str:
        return jsonio.dumps(self.summary())

    def write_pgm(self, path) -> None:
        """Heatmap: grey level grows with the cell's width, TANGENT cells are black."""
        top = max(self.region_widths.values(), default=0)
        img = np.zeros(self.counts.shape, np.uint8)
        ok = self.counts != TANGENT
        img[ok] = (40 + 215 * self.counts[ok] / max(top, 1)).astype(np.uint8)
        # rows are d, drawn with d increasing upwards; columns are theta
        img = img.T[::-1]
        with open(path, "wb") as fh:
            fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
            fh.write(np.ascontiguousarray(img).tobytes())


def _dual_points(pc: PlaneCurve, ntheta: int, nd: int, dmax: float) -> np.ndarray:
    """Dual curve samples in cell units, densified to steps below half a cell."""
    out = []
    for s in dual_curve(pc).sheets[0::2]:
        a = s.phi / math.pi * ntheta
        b = (s.d + dmax) / (2 * dmax) * nd
        step = np.hypot(np.diff(a), np.diff(b))
        sub = np.maximum(1, np.ceil(step / 0.4).astype(int))
        idx = np.repeat(np.arange(len(step)), sub)
        frac = np.concatenate([np.arange(k) / k for k in sub])
        phi = s.phi[idx] + frac * np.diff(s.phi)[idx]
        d = s.d[idx] + frac * np.diff(s.d)[idx]
        # reduce to theta in [0, pi), flipping d on odd half-turns
        turns = np.floor(phi / math.pi)
        theta = phi - turns * math.pi
        d = np.where(turns % 2 == 0, d, -d)
        out.append(np.stack([theta / math.pi * ntheta - 0.5,
                             (d + dmax) / (2 * dmax) * nd - 0.5], axis=1))
    return np.concatenate(out)


def _count_grid(xy, nxt, thetas, d0, dd, nd, threads, backend):
    chunks = np.array_split(np.arange(len(thetas)), max(1, threads))
    chunks = [c for c in chunks if len(c)]
    if len(chunks) == 1:
        return kernels.grid_counts(xy, nxt, thetas, d0, dd, nd, backend=backend)
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(
            lambda c: kernels.grid_counts(xy, nxt, thetas[c], d0, dd, nd, backend=backend),
            chunks))
    return np.concatenate(parts)


def _label(counts: np.ndarray) -> tuple:
    """Constant-count components with 4-connectivity and the Moebius seam gluing."""
    ntheta, nd = counts.shape
    labels = np.full(counts.shape, -1, np.int64)
    next_id = 0
    for value in np.unique(counts[counts != TANGENT]):
        lab, n = ndimage.label(counts == value)
        m = lab > 0
        labels[m] = lab[m] - 1 + next_id
        next_id += n
    parent = np.arange(next_id)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    last, first = labels[-1, :], labels[0, ::-1]
    same = (last >= 0) & (first >= 0) & (counts[-1, :] == counts[0, ::-1])
    for a, b in zip(last[same], first[same]):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(x) for x in range(next_id)], np.int64)
    uniq, dense = np.unique(roots, return_inverse=True)
    out = np.full(counts.shape, -1, np.int64)
    ok = labels >= 0
    out[ok] = dense[labels[ok]]
    return out, len(uniq)


def _scan(pc: PlaneCurve, resolution, threads, backend) -> GridScan:
    ntheta, nd = resolution
    _, radius = pc.center_radius()
    dmax = 1.5 * radius
    dd = 2 * dmax / nd
    d0 = -dmax + 0.5 * dd
    thetas = (np.arange(ntheta) + 0.5) * (math.pi / ntheta)
    xy, nxt = pc.stacked()
    counts = _count_grid(xy, nxt, thetas, d0, dd, nd, threads, backend).astype(np.int32)
    walls = kernels.mark_walls(_dual_points(pc, ntheta, nd, dmax), ntheta, nd,
                               WALL_RADIUS, mobius=True, backend=backend)
    counts[walls] = TANGENT
    labels, nreg = _label(counts)
    flat_l, flat_c = labels.ravel(), counts.ravel()
    ok = flat_l >= 0
    size = np.bincount(flat_l[ok], minlength=nreg)
    # every region has a single count by construction; read it off any cell
    first = np.full(nreg, -1, np.int64)
    idx = np.nonzero(ok)[0]
    first[flat_l[idx][::-1]] = idx[::-1]
    keep = np.nonzero(size >= MIN_REGION_CELLS)[0]
    remap = np.full(nreg + 1, -1, np.int64)
    remap[keep] = np.arange(len(keep))
    labels = remap[labels]          # label -1 indexes the trailing -1
    widths = {i: int(flat_c[first[r]]) for i, r in enumerate(keep)}
    sizes = {i: int(size[r]) for i, r in enumerate(keep)}
    debris = int(size[size < MIN_REGION_CELLS].sum())
    confidence = 1.0 - float(np.count_nonzero(walls)) / walls.size
    return GridScan((ntheta, nd), dmax, counts, labels.astype(np.int32), widths, sizes,
                    confidence, 0, debris)


def grid_width2(pc: PlaneCurve, resolution=DEFAULT_RESOLUTION, refine_rounds: int = 2,
                threads: int | None = None, backend=None) -> tuple:
    """``(estimate, GridScan)`` for the unit-diameter copy of ``pc``.

    When more than 5% of the cells are TANGENT the whole grid is redone at
    twice the resolution, at most ``refine_rounds`` times.
    """
    ntheta, nd = (int(x) for x in resolution)
    if min(ntheta, nd) < 2:
        raise ValueError("resolution must be at least 2x2")
    npc, _, _ = pc.normalized()
    workers = thread_count(threads)
    scan = None
    for rnd in range(refine_rounds + 1):
        scan = _scan(npc, (ntheta, nd), workers, backend)
        scan.rounds_used = rnd
        if 1.0 - scan.confidence <= MAX_TANGENT_FRACTION:
            return scan.estimate, scan
        ntheta, nd = 2 * ntheta, 2 * nd
    raise LowConfidence(
        f"{100 * (1 - scan.confidence):.1f}% of cells are TANGENT at {scan.resolution}")
