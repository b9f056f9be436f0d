"""Compare the numba and numpy kernel backends on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is checked for agreement before timing; the first numba call
(compilation or cache load) is excluded.
"""
import argparse
import timeit

import numpy as np

from zmharvest.kernels import implementation


def workloads(rng):
    dt = rng.normal(size=20_000) * 5 - 1j * np.abs(rng.normal(size=20_000))
    t_real = rng.normal(size=200) * 3
    weights = 1.0 / np.arange(1, 200_001)
    return {
        "gaussian_mode_sum (n=2e5)": lambda k: k.gaussian_mode_sum(0.05, 1.0, 0.25, -1.0, 200_000),
        "weighted_cos_sum (n=2e5)": lambda k: k.weighted_cos_sum(weights, 0.3),
        "wightman_mode_sum (200 pts, n=1e4)": lambda k: k.wightman_mode_sum(t_real, 2.5, 10.0, 10_000),
        "log_kernel (2e4 pts)": lambda k: k.log_kernel(dt, 2.5, 10.0),
        "derivative_kernel (2e4 pts)": lambda k: k.derivative_kernel(dt, 2.5, 10.0),
        "cos_turns (2e4 pts)": lambda k: k.cos_turns(dt.real),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    nb, npy = implementation("numba"), implementation("numpy")
    rng = np.random.default_rng(1)
    print(f"{'workload':38s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max diff':>9s}")
    for name, fn in workloads(rng).items():
        ref, fast = fn(npy), fn(nb)  # warm-up doubles as agreement check
        diff = float(np.max(np.abs(np.asarray(ref) - np.asarray(fast))))
        t_np = min(timeit.repeat(lambda: fn(npy), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: fn(nb), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:38s} {t_np:11.3f} {t_nb:11.3f} {t_np / t_nb:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
