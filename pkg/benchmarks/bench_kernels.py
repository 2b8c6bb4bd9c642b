#!/usr/bin/env python3
"""Benchmark the compiled series kernels against the pure-Python fallback.

Usage:  python benchmarks/bench_kernels.py [--repeat N]

Times the raw product kernels and a representative end-to-end workload
(pushforward of a hypersurface 2-jet plus the canonical-frame invariants);
the workload is run for whichever backend is active, so invoke once normally
and once with SYMPINV_PURE_PYTHON=1 to compare full-pipeline numbers.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from sympinv import _kernels_py, _tables

try:
    from sympinv import _speedups
except ImportError:
    _speedups = None


def time_fn(fn, repeat, inner=200):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        runs.append((time.perf_counter() - t0) / inner)
    return min(runs)


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for nvars, order in ((1, 8), (2, 6), (3, 6), (4, 6), (4, 8)):
        n = _tables.count(nvars, order)
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        if nvars == 1:
            py = time_fn(lambda: _kernels_py.mul1(a, b, n), repeat)
            cy = (time_fn(lambda: _speedups.mul1(a, b, n), repeat)
                  if _speedups else float("nan"))
        else:
            pi, pj, pr = _tables.product_table(nvars, order)
            py = time_fn(lambda: _kernels_py.mul_table(a, b, pi, pj, pr, n), repeat)
            cy = (time_fn(lambda: _speedups.mul_table(a, b, pi, pj, pr, n), repeat)
                  if _speedups else float("nan"))
        rows.append((f"product p={nvars} K={order} ({n} coeffs)", py, cy))
    return rows


def bench_workload(repeat):
    from sympinv import hypersurfaces
    from sympinv.geometry import CHARTS, JetPoint, pushforward
    from sympinv.kernels import backend_name
    from sympinv.symplectic import random_group_element

    chart = CHARTS["hypersurface"](2)
    rng = np.random.default_rng(1)
    point = JetPoint.random(chart, 3, rng)
    g = random_group_element(chart.space, "sp", 7)

    def work():
        moved = pushforward(point, g)
        hypersurfaces.invariants_r4(moved)

    dt = time_fn(work, repeat, inner=20)
    return backend_name(), dt


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    print(f"{'kernel':44s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for label, py, cy in bench_kernels(args.repeat):
        ratio = py / cy if cy == cy and cy > 0 else float("nan")
        print(f"{label:44s} {py*1e6:10.2f}us {cy*1e6:10.2f}us {ratio:7.1f}x")

    backend, dt = bench_workload(args.repeat)
    print(f"\nend-to-end pushforward + frame invariants [{backend} backend]: {dt*1e3:.2f} ms")
    if backend == "compiled" and os.environ.get("SYMPINV_BENCH_NESTED") != "1":
        env = dict(os.environ, SYMPINV_PURE_PYTHON="1", SYMPINV_BENCH_NESTED="1")
        out = subprocess.run([sys.executable, __file__, "--repeat", str(args.repeat)],
                             capture_output=True, text=True, env=env)
        for line in out.stdout.splitlines():
            if line.startswith("end-to-end"):
                print(line)


if __name__ == "__main__":
    main()
