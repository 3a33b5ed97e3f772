"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best of ``--repeat`` runs per backend after one warm-up
call, so numba compilation time is excluded (it is reported separately on the
first line).  Results from the two paths are compared for equality.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from kwidth import kernels, project_xy
from kwidth._accel import numba_enabled
from kwidth.generators import GeneratorSpec, generate
from kwidth.oracle import grid_width2


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(pc):
    xy, nxt = pc.stacked()
    p0, p1 = xy, xy[nxt]
    thetas = (np.arange(512) + 0.5) * (math.pi / 512)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 512, (40000, 2))
    return {
        "candidate_pairs": lambda b: kernels.candidate_pairs(p0, p1, pad=1e-12, backend=b),
        "grid_counts 512x512": lambda b: kernels.grid_counts(xy, nxt, thetas, -0.75, 1.5 / 512,
                                                             512, backend=b),
        "mark_walls 512x512": lambda b: kernels.mark_walls(pts, 512, 512, 0.75, backend=b),
        "grid_width2 1024x1024": lambda b: grid_width2(pc, (1024, 1024), refine_rounds=0,
                                                       backend=b)[0],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--q", type=int, default=7, help="torus knot T(2, q) used as input")
    args = ap.parse_args()

    pc = project_xy(generate(GeneratorSpec("torus_2braid", {"q": args.q}))).normalized()[0]
    print(f"curve T(2,{args.q}): {sum(c.n for c in pc.components)} samples")
    if not numba_enabled():
        print("numba is unavailable or disabled (KWIDTH_DISABLE_NUMBA=1); timing numpy only")

    t0 = time.perf_counter()
    for fn in cases(pc).values():
        if numba_enabled():
            fn("numba")
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f} s\n")

    print(f"{'kernel':<24}{'numpy s':>10}{'numba s':>10}{'speedup':>9}  equal")
    for name, fn in cases(pc).items():
        t_np, out_np = best_of(lambda: fn("numpy"), args.repeat)
        if numba_enabled():
            t_nb, out_nb = best_of(lambda: fn("numba"), args.repeat)
            print(f"{name:<24}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>8.1f}x  {same(out_np, out_nb)}")
        else:
            print(f"{name:<24}{t_np:>10.4f}{'-':>10}{'-':>9}  -")


if __name__ == "__main__":
    main()
