#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-NumPy twins.

    python benchmarks/bench_backends.py [--paths N] [--steps K] [--repeat R]

Covers the two hot loops (trajectory ensembles, field-space chains) plus
raw normal generation. The numba variants are warmed once so JIT time is
reported separately from steady-state throughput.
"""

import argparse
import time

import numpy as np

from stovaq import kernels as K


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_paths(n_traj, steps, repeat):
    x0 = np.linspace(-2.0, 2.0, n_traj)
    streams = np.arange(n_traj, dtype=np.uint64)
    key = K.derive_key(1234, 2)
    times = np.linspace(0.0, steps * 0.005, 9)
    xs = np.linspace(0, 2 * np.pi, 256)
    drift = np.array([-np.sin(xs + 0.3 * j) for j in range(9)])
    cps = np.array([steps], dtype=np.int64)

    def run(fn):
        out = np.empty((1, n_traj))
        fn(x0, streams, key, 0.0, 0.005, steps, 0, times, drift,
           -4.0, 8.0 / 255, 256, False, -4.0, 4.0, 0.5, cps, out)

    rows = [("sde_paths numpy", timeit(lambda: run(K.sde_paths_numpy), repeat))]
    if K.HAVE_NUMBA:
        run(K.sde_paths_numba)  # warm the JIT
        rows.append(("sde_paths numba", timeit(lambda: run(K.sde_paths_numba), repeat)))
    return rows


def bench_ou(chains, steps, repeat):
    n = 8
    rng = np.random.default_rng(0)
    m = rng.normal(0, 0.2, (n, n))
    drift = (m + m.T) / 2 + 2.5 * np.eye(n)
    phi0 = np.zeros((chains, n))
    cs = np.arange(chains, dtype=np.uint64)
    key = K.derive_key(1234, 3)

    def run(fn):
        out = np.empty((chains, 4, n))
        fn(phi0, drift, 5e-4, steps - 4 * 16, 4, 16, key, cs, 0.03, out)

    rows = [("ou_chains numpy", timeit(lambda: run(K.ou_chains_numpy), repeat))]
    if K.HAVE_NUMBA:
        run(K.ou_chains_numba)
        rows.append(("ou_chains numba", timeit(lambda: run(K.ou_chains_numba), repeat)))
    return rows


def bench_normals(count, repeat):
    streams = np.arange(count, dtype=np.uint64)
    za = K.stream_state_numpy(K.derive_key(7, 2), streams)
    rows = [("normals numpy", timeit(lambda: K.normals_numpy(za, 3), repeat))]
    if K.HAVE_NUMBA:
        out = np.empty((1, count))
        run_args = (np.zeros(count), streams, K.derive_key(7, 2), 0.0, 1e-3, 1, 0,
                    np.array([0.0]), np.zeros((1, 16)), -1.0, 2.0 / 15, 16, False,
                    -1.0, 1.0, 0.5, np.array([1], dtype=np.int64), out)
        K.sde_paths_numba(*run_args)
        rows.append(("one njit path step", timeit(lambda: K.sde_paths_numba(*run_args), repeat)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--paths", type=int, default=50_000)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--chains", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"backend selected by env: {K.backend_name()} (STOVAQ_NUMBA, STOVAQ_THREADS)")
    print(f"workload: {args.paths} paths x {args.steps} steps, {args.chains} chains\n")
    groups = [
        bench_paths(args.paths, args.steps, args.repeat),
        bench_ou(args.chains, args.steps * 10, args.repeat),
        bench_normals(args.paths, args.repeat),
    ]
    for rows in groups:
        base = rows[0][1]
        for name, t in rows:
            speedup = f"  ({base / t:4.1f}x vs numpy)" if "numba" in name or "njit" in name else ""
            print(f"{name:>20}: {t * 1e3:9.2f} ms{speedup}")
        print()


if __name__ == "__main__":
    main()
