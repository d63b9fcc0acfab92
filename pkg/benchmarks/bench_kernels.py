"""Time the compiled kernels against their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--grid 60] [--games 2000]
"""
from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from gpgames import kernels
from gpgames.certify import (
    Family,
    _theta_inputs,
    local_bounds,
    sampled_tables,
    utilities,
)
from gpgames.dynamics import _pairwise_arrays, externality_decomposition
from gpgames.graph import color_edges, grid, line, star


def timed(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), result


def cases(args):
    d = externality_decomposition(color_edges(grid(args.grid), 1))
    arrays = _pairwise_arrays(d)
    init = np.array([(i * 7919) % 2 for i in range(d.n)], dtype=np.int64)
    yield f"simulate grid({args.grid})", lambda b: b.simulate_pairwise(*arrays, init, 1, 10**7)

    fam = Family.build("star4", star(4))
    tables = sampled_tables(fam, range(-2, 3), args.games, 0)
    util = utilities(fam, tables)
    m = np.array(fam.space.m, dtype=np.int64)
    yield f"dag batch star4 x{args.games}", lambda b: b.dag_max_updates_batch(util, m)

    fam = Family.build("path4", line(4))
    tables = sampled_tables(fam, range(-2, 3), args.games, 1)
    pc_indptr, pc_idx, dist, R = _theta_inputs(fam)
    m = np.array(fam.space.m, dtype=np.int64)
    theta_args = (tables, fam.toff, fam.loc, pc_indptr, pc_idx, m, dist, local_bounds(tables), fam.D, R)
    yield f"theta scan path4 x{args.games}", lambda b: b.theta_scan_batch(*theta_args)


def same(x, y) -> bool:
    return all(np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b for a, b in zip(x, y))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--grid", type=int, default=60)
    ap.add_argument("--games", type=int, default=2000)
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled extension not available; build it with `pip install --no-build-isolation -e .`")
        return 1
    print(f"{'kernel':<28}{'python s':>12}{'cython s':>12}{'speedup':>10}  match")
    for name, fn in cases(args):
        t_py, r_py = timed(lambda: fn(kernels.python_backend), args.repeat)
        t_cy, r_cy = timed(lambda: fn(kernels.compiled_backend), args.repeat)
        print(f"{name:<28}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x  {same(r_py, r_cy)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
