"""Time the numba and numpy versions of the hot kernels on the default grid.

    python benchmarks/bench_kernels.py [--repeat 5] [--N 2048]

The backend switch is read on every call, so both paths run in one process.
"""
import argparse
import os
import time

import numpy as np

from riccati_scattering import _kernels
from riccati_scattering.corpus import asymmetric_triple
from riccati_scattering.grid import Grid


def best_of(fn, repeat):
    out, best = None, np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(grid):
    t = asymmetric_triple(grid)
    up = t.u_plus.sample(grid.x_plus)
    xc = grid.x_plus
    shifts = np.rint(2 * xc / grid.h).astype(np.int64)[::-1]
    return {
        "propagate_cells": lambda: _kernels.propagate_cells(up[::-1], xc[::-1], grid.k, grid.h, -1.0),
        "series_propagate": lambda: _kernels.series_propagate(grid.h * up[::-1][-256:], shifts[-256:],
                                                              -1.0, 12, int(shifts.max())),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--N", type=int, default=2048)
    args = ap.parse_args()
    grid = Grid(N=args.N)
    print(f"grid N={grid.N}, {len(grid.k)} k-samples, numba threads="
          f"{_kernels.numba.get_num_threads() if _kernels.HAVE_NUMBA else 0}")
    print(f"{'kernel':18s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases(grid).items():
        os.environ["RICCATI_SCATTERING_BACKEND"] = "numba"
        fn()  # compile / load the cache outside the timing
        t_nb, r_nb = best_of(fn, args.repeat)
        os.environ["RICCATI_SCATTERING_BACKEND"] = "numpy"
        t_np, r_np = best_of(fn, max(1, args.repeat // 2))
        diff = max(float(np.abs(a - b).max()) for a, b in zip(r_nb, r_np))
        print(f"{name:18s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {diff:10.2e}")
    os.environ.pop("RICCATI_SCATTERING_BACKEND", None)


if __name__ == "__main__":
    main()
