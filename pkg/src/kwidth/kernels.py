"""Hot numeric kernels.

Every kernel exists twice: a numba-compiled loop (``*_nb``) and a vectorised
numpy path (``*_np``).  The public wrappers pick one according to
:func:`kwidth._accel.numba_enabled`, or an explicit ``backend`` argument.
Both paths must return identical results; ``tests/test_kernels.py`` checks
this and ``benchmarks/bench_kernels.py`` times them.
"""
from __future__ import annotations

import numpy as np

from ._accel import njit, numba_enabled


def _use_numba(backend: str | None) -> bool:
    if backend is None:
        return numba_enabled()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend == "numba" and numba_enabled()


# ---------------------------------------------------------------------------
# bounding-box overlap candidates (sort and sweep along x)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _candidate_pairs_nb(order, xmin, xmax, ymin, ymax):
    n = order.size
    cap = 8 * n + 64
    out_i = np.empty(cap, np.int64)
    out_j = np.empty(cap, np.int64)
    cnt = 0
    for a in range(n):
        i = order[a]
        for b in range(a + 1, n):
            j = order[b]
            if xmin[j] > xmax[i]:
                break
            if ymin[j] > ymax[i] or ymin[i] > ymax[j]:
                continue
            if cnt == cap:
                cap *= 2
                ni = np.empty(cap, np.int64)
                nj = np.empty(cap, np.int64)
                ni[:cnt] = out_i[:cnt]
                nj[:cnt] = out_j[:cnt]
                out_i = ni
                out_j = nj
            out_i[cnt] = i
            out_j[cnt] = j
            cnt += 1
    return out_i[:cnt], out_j[:cnt]


def _candidate_pairs_np(order, xmin, xmax, ymin, ymax):
    xs = xmin[order]
    xe = xmax[order]
    n = order.size
    ends = np.searchsorted(xs, xe, side="right")
    starts = np.arange(1, n + 1)
    counts = np.maximum(ends - starts, 0)
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, np.int64)
        return empty, empty
    a = np.repeat(np.arange(n), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    b = a + 1 + offs
    i = order[a]
    j = order[b]
    keep = (ymin[j] <= ymax[i]) & (ymin[i] <= ymax[j])
    return i[keep].astype(np.int64), j[keep].astype(np.int64)


def candidate_pairs(p0, p1, pad=0.0, backend=None):
    """Index pairs ``(i, j)``, ``i != j``, of segments whose padded boxes overlap."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    xmin = np.minimum(p0[:, 0], p1[:, 0]) - pad
    xmax = np.maximum(p0[:, 0], p1[:, 0]) + pad
    ymin = np.minimum(p0[:, 1], p1[:, 1]) - pad
    ymax = np.maximum(p0[:, 1], p1[:, 1]) + pad
    order = np.argsort(xmin, kind="stable").astype(np.int64)
    if _use_numba(backend):
        i, j = _candidate_pairs_nb(order, xmin, xmax, ymin, ymax)
    else:
        i, j = _candidate_pairs_np(order, xmin, xmax, ymin, ymax)
    swap = i > j
    i, j = np.where(swap, j, i), np.where(swap, i, j)
    srt = np.lexsort((j, i))
    return i[srt], j[srt]


def segment_intersections(a0, a1, b0, b1, slack=0.0):
    """Vectorised segment/segment intersection.

    Returns ``(hit, s, t)`` where the intersection point is ``a0 + s (a1 - a0)``
    and ``b0 + t (b1 - b0)``.  Parameters are half-open, ``[0, 1)``, so a point
    shared by consecutive segments of a polyline is reported once.  A positive
    ``slack`` widens both ranges to ``[-slack, 1 + slack)``, for callers that
    remove the resulting duplicates themselves.
    """
    r = a1 - a0
    q = b1 - b0
    w = b0 - a0
    den = r[:, 0] * q[:, 1] - r[:, 1] * q[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (w[:, 0] * q[:, 1] - w[:, 1] * q[:, 0]) / den
        t = (w[:, 0] * r[:, 1] - w[:, 1] * r[:, 0]) / den
    lo, hi = -slack, 1.0 + slack
    hit = (den != 0) & (s >= lo) & (s < hi) & (t >= lo) & (t < hi)
    return hit, s, t


# ---------------------------------------------------------------------------
# intersection counts for a whole grid of lines
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _grid_counts_nb(xy, nxt, thetas, d0, dd, nd):
    nth = thetas.size
    n = xy.shape[0]
    out = np.zeros((nth, nd), np.int32)
    diff = np.zeros(nd + 1, np.int32)
    h = np.empty(n)
    for i in range(nth):
        c = np.cos(thetas[i])
        s = np.sin(thetas[i])
        for k in range(n):
            h[k] = xy[k, 0] * c + xy[k, 1] * s
        diff[:] = 0
        for k in range(n):
            h0 = h[k]
            h1 = h[nxt[k]]
            lo = min(h0, h1)
            hi = max(h0, h1)
            a = int(np.ceil((lo - d0) / dd))
            b = int(np.ceil((hi - d0) / dd))
            a = min(max(a, 0), nd)
            b = min(max(b, 0), nd)
            if a < b:
                diff[a] += 1
                diff[b] -= 1
        run = 0
        for j in range(nd):
            run += diff[j]
            out[i, j] = run
    return out


def _grid_counts_np(xy, nxt, thetas, d0, dd, nd, chunk=128):
    nth = thetas.size
    out = np.empty((nth, nd), np.int32)
    for lo_i in range(0, nth, chunk):
        th = thetas[lo_i:lo_i + chunk]
        m = th.size
        h = np.cos(th)[:, None] * xy[None, :, 0] + np.sin(th)[:, None] * xy[None, :, 1]
        h1 = h[:, nxt]
        lo = np.minimum(h, h1)
        hi = np.maximum(h, h1)
        a = np.clip(np.ceil((lo - d0) / dd), 0, nd).astype(np.int64)
        b = np.clip(np.ceil((hi - d0) / dd), 0, nd).astype(np.int64)
        base = (np.arange(m) * (nd + 1))[:, None]
        idx = np.concatenate([(a + base).ravel(), (b + base).ravel()])
        w = np.concatenate([np.ones(a.size), -np.ones(b.size)])
        diff = np.bincount(idx, weights=w, minlength=m * (nd + 1)).reshape(m, nd + 1)
        out[lo_i:lo_i + m] = np.cumsum(diff[:, :nd], axis=1).astype(np.int32)
    return out


def grid_counts(xy, nxt, thetas, d0, dd, nd, backend=None):
    """Intersection counts of closed polylines with lines ``(theta_i, d0 + j dd)``.

    ``xy`` holds all samples, ``nxt[k]`` is the sample following ``k`` on its
    component.  A segment contributes to the line when ``lo <= d < hi`` in the
    line's normal coordinate, which counts sign changes exactly.
    """
    xy = np.ascontiguousarray(xy, float)
    nxt = np.ascontiguousarray(nxt, np.int64)
    thetas = np.ascontiguousarray(thetas, float)
    if _use_numba(backend):
        return _grid_counts_nb(xy, nxt, thetas, float(d0), float(dd), int(nd))
    return _grid_counts_np(xy, nxt, thetas, float(d0), float(dd), int(nd))


# ---------------------------------------------------------------------------
# wall rasterisation on the Moebius rectangle
# ---------------------------------------------------------------------------


@njit(cache=True)
def _mark_walls_nb(pts, ncol, nrow, radius, mobius):
    mask = np.zeros((ncol, nrow), np.bool_)
    r2 = radius * radius
    span = int(np.ceil(radius))
    for p in range(pts.shape[0]):
        a = pts[p, 0]
        b = pts[p, 1]
        ia = int(np.floor(a))
        ib = int(np.floor(b))
        for i in range(ia - span, ia + span + 2):
            di = i - a
            for j in range(ib - span, ib + span + 2):
                dj = j - b
                if di * di + dj * dj > r2:
                    continue
                ii = i
                jj = j
                if ii < 0 or ii >= ncol:
                    if not mobius:
                        continue
                    if ii < 0:
                        ii += ncol
                    else:
                        ii -= ncol
                    jj = nrow - 1 - jj
                if jj < 0 or jj >= nrow:
                    continue
                mask[ii, jj] = True
    return mask


def _mark_walls_np(pts, ncol, nrow, radius, mobius):
    mask = np.zeros((ncol, nrow), bool)
    span = int(np.ceil(radius))
    base_i = np.floor(pts[:, 0]).astype(np.int64)
    base_j = np.floor(pts[:, 1]).astype(np.int64)
    for oi in range(-span, span + 2):
        for oj in range(-span, span + 2):
            i = base_i + oi
            j = base_j + oj
            near = (i - pts[:, 0]) ** 2 + (j - pts[:, 1]) ** 2 <= radius * radius
            i = i[near]
            j = j[near]
            out = (i < 0) | (i >= ncol)
            if mobius:
                i = np.where(i < 0, i + ncol, np.where(i >= ncol, i - ncol, i))
                j = np.where(out, nrow - 1 - j, j)
                ok = (j >= 0) & (j < nrow)
            else:
                ok = ~out & (j >= 0) & (j < nrow)
            mask[i[ok], j[ok]] = True
    return mask


def mark_walls(pts, ncol, nrow, radius, mobius=True, backend=None):
    """Boolean mask of cells whose centre lies within ``radius`` of a point.

    Coordinates are in cell units with cell ``(i, j)`` centred at ``(i, j)``.
    With ``mobius`` set, column ``-1`` is glued to column ``ncol - 1`` with the
    row index reflected, matching the identification ``(0, d) ~ (pi, -d)``.
    """
    pts = np.ascontiguousarray(pts, float).reshape(-1, 2)
    if _use_numba(backend):
        return _mark_walls_nb(pts, int(ncol), int(nrow), float(radius), bool(mobius))
    return _mark_walls_np(pts, int(ncol), int(nrow), float(radius), bool(mobius))


# ---------------------------------------------------------------------------
# sign changes of a signed distance along closed polylines
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sign_changes_nb(g, nxt):
    cnt = 0
    for k in range(g.size):
        if (g[k] > 0) != (g[nxt[k]] > 0):
            cnt += 1
    return cnt


def sign_changes(g, nxt, backend=None):
    g = np.ascontiguousarray(g, float)
    nxt = np.ascontiguousarray(nxt, np.int64)
    if _use_numba(backend):
        return int(_sign_changes_nb(g, nxt))
    return int(np.count_nonzero((g > 0) != (g[nxt] > 0)))
