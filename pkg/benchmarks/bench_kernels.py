#!/usr/bin/env python3
"""Side-by-side benchmark: numba-compiled kernels vs the plain-Python path.

The compiled path is what the package runs by default; the plain path is what
you get with DECONFLICT_DISABLE_NUMBA=1 (or without numba installed). Both
share one function body, so this compares execution modes, not algorithms.
"""

import time

import numpy as np

from deconflict import _kernels
from deconflict._kernels import (
    eades_order,
    elo_sweep,
    min_fas_order,
    python_impl,
    tarjan_scc_labels,
)

if not _kernels.NUMBA_ENABLED:
    raise SystemExit(
        "numba path is disabled (DECONFLICT_DISABLE_NUMBA set or numba missing); "
        "nothing to compare"
    )


def random_adjacency(n, rng, tie_prob=0.2):
    adj = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(i + 1, n):
            roll = rng.random()
            if roll < tie_prob:
                continue
            if rng.random() < 0.5:
                adj[i, j] = 1
            else:
                adj[j, i] = 1
    return adj


def bench(fn, workload, repeats=1):
    start = time.perf_counter()
    for _ in range(repeats):
        for args in workload:
            fn(*args)
    return time.perf_counter() - start


rng = np.random.default_rng(0)
workloads = {
    "tarjan_scc (g=12, 400x)": (
        tarjan_scc_labels,
        [(random_adjacency(12, rng),) for _ in range(400)],
    ),
    "min_fas_dp (g=10, 60x)": (
        min_fas_order,
        [(random_adjacency(10, rng),) for _ in range(60)],
    ),
    "eades_peel (g=40, 120x)": (
        eades_order,
        [(random_adjacency(40, rng),) for _ in range(120)],
    ),
    "elo_sweeps (g=8, 300x)": (
        elo_sweep,
        [
            (random_adjacency(8, rng).astype(np.int8) - random_adjacency(8, rng).astype(np.int8),
             32.0, 0.01, 100)
            for _ in range(300)
        ],
    ),
}

print("Warming up JIT compilation (first call compiles, not counted)...")
t0 = time.perf_counter()
for kernel, workload in workloads.values():
    kernel(*workload[0])
print(f"warmup: {time.perf_counter() - t0:.1f}s\n")

print(f"{'kernel':<28} {'numba (s)':>10} {'python (s)':>11} {'speedup':>8}")
print("-" * 62)
for name, (kernel, workload) in workloads.items():
    t_jit = bench(kernel, workload)
    t_py = bench(python_impl(kernel), workload)
    print(f"{name:<28} {t_jit:>10.3f} {t_py:>11.3f} {t_py / t_jit:>7.1f}x")
