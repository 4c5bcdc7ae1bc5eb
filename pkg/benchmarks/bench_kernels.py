#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py [--sizes 100,300,500] [--repeat 3]

The numba backend is compiled (and cached) on a tiny warmup call before
timing, so the table shows steady-state throughput.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from layerlens import kernels
from layerlens.cluster import Metric, pairwise_distances
from layerlens.metrics import kruskal_mst


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(n, rng):
    x = rng.normal(size=(n, 32))
    coords = rng.uniform(size=(n, 2))
    d = pairwise_distances(coords, Metric.EUCLIDEAN)
    labels = np.asarray(rng.integers(0, 4, n), dtype=np.int64)
    labels[:4] = np.arange(4, dtype=np.int64)
    sizes = np.bincount(labels, minlength=4).astype(np.int64)
    mst = kruskal_mst(d)
    iu, ju = np.triu_indices(n, 1)
    w = d[iu, ju]
    order = np.lexsort((ju, iu, w))
    us = iu[order].astype(np.int64)
    vs = ju[order].astype(np.int64)
    return {
        "pairwise_euclidean": lambda impl: impl(x),
        "pairwise_cosine": lambda impl: impl(x),
        "lance_williams": lambda impl: impl(d, 2),
        "silhouette": lambda impl: impl(d, labels, 4),
        "kruskal": lambda impl: impl(n, us, vs),
        "grow_rates": lambda impl: impl(mst.indptr, mst.nbrs, mst.wts, labels, sizes),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="100,300,500")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = ["numpy"] + (["numba"] if "numba" in kernels.IMPLS else [])
    if "numba" in kernels.IMPLS:
        saved = kernels.BACKEND
        kernels.warmup()
        print(f"active backend: {saved} (set {kernels.ENV_FLAG}=0 to force numpy)")
    else:
        print("numba unavailable; timing numpy only")

    rng = np.random.default_rng(0)
    header = f"{'kernel':<20}{'n':>6}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        cases = make_cases(n, rng)
        # compile everything for this size before timing
        for backend in backends:
            for name, call in cases.items():
                call(kernels.IMPLS[backend][name])
        for name, call in cases.items():
            times = {}
            for backend in backends:
                impl = kernels.IMPLS[backend][name]
                times[backend] = _time(lambda: call(impl), args.repeat)
            row = f"{name:<20}{n:>6}"
            for backend in backends:
                row += f"{times[backend] * 1e3:>12.2f}ms"
            if len(backends) == 2:
                row += f"{times['numpy'] / times['numba']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
