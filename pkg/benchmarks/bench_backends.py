"""Timing comparison of the jitted kernels against their numpy fallbacks.

Runs each hot kernel on a sized workload under both backends and prints the
best-of-N wall times plus the speedup ratio. The first numba call compiles,
so every (kernel, backend) pair gets one untimed warmup before the clock
starts.

Usage: python3 benchmarks/bench_backends.py [--repeats 5] [--seed 0]
"""

import argparse
import time

import numpy as np

from biascube._kernels import batch_influences, connected_batch
from biascube.measure import weights


def _time_best(fn, repeats: int) -> float:
    fn()  # warmup; compiles the jitted path on first use
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_influences(rng, repeats: int) -> dict[str, float]:
    n, count = 12, 512
    tables = (rng.random((count, 1 << n)) < 0.5).astype(np.uint8)
    base = weights(n - 1, 0.3)
    return {
        backend: _time_best(
            lambda b=backend: batch_influences(tables, n, base, backend=b), repeats
        )
        for backend in ("numpy", "numba")
    }


def bench_connectivity(rng, repeats: int) -> dict[str, float]:
    m, samples = 24, 20_000
    edge_u, edge_v = (idx.astype(np.int32) for idx in np.triu_indices(m, k=1))
    p = np.log(m) / m  # connectivity threshold regime, the interesting case
    present = (rng.random((samples, edge_u.size)) < p).astype(np.uint8)
    return {
        backend: _time_best(
            lambda b=backend: connected_batch(present, m, edge_u, edge_v, backend=b),
            repeats,
        )
        for backend in ("numpy", "numba")
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    results = {
        "batch_influences (512 tables, n=12)": bench_influences(rng, args.repeats),
        "connected_batch (20k samples, 24 vertices)": bench_connectivity(rng, args.repeats),
    }
    for name, times in results.items():
        ratio = times["numpy"] / times["numba"]
        print(f"{name}")
        print(f"  numpy  {times['numpy'] * 1e3:9.2f} ms")
        print(f"  numba  {times['numba'] * 1e3:9.2f} ms   ({ratio:.1f}x)")


if __name__ == "__main__":
    main()
