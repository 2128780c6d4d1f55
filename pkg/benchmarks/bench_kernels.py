"""Time the numpy and numba variants of each hot kernel on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

numba variants are warmed up once before timing, so compile time is excluded.
"""

import argparse
import math
import time

import numpy as np

from polarrep import _kernels as K
from polarrep.codec import AngleGrid
from polarrep.geometry import rasterize
from polarrep.experiments import synth_corpus


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    shapes = [inst.contour for inst in synth_corpus(1, 20, "star")]
    grid = AngleGrid(360)
    masks = [rasterize(c, 128, 128).bits for c in shapes]
    px, py = np.meshgrid(np.arange(128) + 0.5, np.arange(128) + 0.5)
    px, py = px.ravel(), py.ravel()

    def run(raster, ray, pip, trace):
        return {
            "rasterize 20x128^2": lambda: [raster(c.xs, c.ys, 128, 128) for c in shapes],
            "raycast 20x360 rays": lambda: [ray(c.xs, c.ys, 64.0, 64.0, grid.cos, grid.sin) for c in shapes],
            "points_in_polygon 20x16k": lambda: [pip(px, py, c.xs, c.ys) for c in shapes],
            "trace_boundary 20 masks": lambda: [trace(m) for m in masks],
        }

    numpy_fns = run(K.rasterize_numpy, K.raycast_numpy, K.points_in_polygon_numpy, K.trace_boundary_numpy)
    if not K.HAVE_NUMBA:
        return numpy_fns, None
    numba_fns = run(K.rasterize_numba, K.raycast_numba, K.points_in_polygon_numba, K.trace_boundary_numba)
    return numpy_fns, numba_fns


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    numpy_fns, numba_fns = cases()
    print(f"{'kernel':<28}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, fn in numpy_fns.items():
        t_np = best_of(fn, args.repeat) * 1e3
        if numba_fns is None:
            print(f"{name:<28}{t_np:>12.2f}{'n/a':>12}{'':>10}")
            continue
        numba_fns[name]()  # compile / load cache
        t_nb = best_of(numba_fns[name], args.repeat) * 1e3
        speed = t_np / t_nb if t_nb > 0 else math.inf
        print(f"{name:<28}{t_np:>12.2f}{t_nb:>12.2f}{speed:>9.1f}x")


if __name__ == "__main__":
    main()
