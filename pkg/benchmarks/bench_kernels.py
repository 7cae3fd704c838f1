"""Compare the compiled and pure-Python kernels.

Runs the same seeded workloads through both backends, checks that they
produce identical results, and prints timings.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from sashadow._backend import get_kernels


def mh_workload(k, steps):
    rng = np.random.Generator(np.random.PCG64(12345))
    xs = np.zeros(steps + 16)
    ys = np.zeros(steps + 16)
    n, pairs = k.mh_run(xs, ys, 0, steps, np.log(100.0), np.log(0.5), 0.1, (0.0, 1.0, 0.0, 1.0), 0.5, rng)
    return n, pairs, xs[:n].tobytes()


def shadow_workload(k, m):
    rng = np.random.Generator(np.random.PCG64(12345))
    theta = np.array([4.60, -0.69])
    acc = k.shadow_inner(
        theta, np.array([0.01, 0.01]), np.array([45.30, 17.99]), np.array([48.0, 19.0]),
        np.array([0.0, -7.0]), np.array([7.0, 0.0]), m, 0.5, False, rng,
    )
    return acc, theta.tobytes()


def sweep_workload(k, sweeps):
    """Annealing-like loop: 100 MH steps then 200 proposals per sweep."""
    rng = np.random.Generator(np.random.PCG64(7))
    xs = np.zeros(4096)
    ys = np.zeros(4096)
    n, pairs = 0, 0
    theta = np.array([4.60, -0.69])
    lower, upper = np.array([0.0, -7.0]), np.array([7.0, 0.0])
    data = np.array([45.30, 17.99])
    delta = np.array([0.01, 0.01])
    for _ in range(sweeps):
        n, dp = k.mh_run(xs, ys, n, 100, theta[0], theta[1], 0.1, (0.0, 1.0, 0.0, 1.0), 0.5, rng)
        pairs += dp
        k.shadow_inner(theta, delta, data, np.array([float(n), float(pairs)]), lower, upper, 200, 1.0, False, rng)
    return n, pairs, theta.tobytes()


WORKLOADS = [
    ("mh_run, 20k steps", mh_workload, 20_000),
    ("shadow_inner, 20k proposals", shadow_workload, 20_000),
    ("100 shadow sweeps", sweep_workload, 100),
]


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = get_kernels("python")
    try:
        cy = get_kernels("cython")
    except ImportError:
        print("compiled kernels not built; only the Python backend is available")
        cy = None
    print(f"{'workload':32s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}  identical")
    for name, fn, size in WORKLOADS:
        tp, op = timed(fn, py, size, repeat=args.repeat)
        if cy is None:
            print(f"{name:32s} {tp:11.4f}")
            continue
        tc, oc = timed(fn, cy, size, repeat=args.repeat)
        print(f"{name:32s} {tp:11.4f} {tc:11.5f} {tp / tc:8.1f}  {op == oc}")


if __name__ == "__main__":
    main()
