"""Compare the compiled and numpy kernel backends.

Run: python3 benchmarks/bench_kernels.py [--points N] [--modes M] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from synturb.kernels import get_backend


def cases(n_points, n_modes, rng):
    d = 2
    k = rng.standard_normal((1, n_modes, d)) * 10
    are = rng.standard_normal((1, n_modes, d))
    aim = rng.standard_normal((1, n_modes, d))
    x = rng.standard_normal((n_points, d))
    fidx = np.zeros(n_points, dtype=np.int64)
    noise = rng.standard_normal((n_points, d))
    out = np.empty_like(x)
    dt = np.full(n_points, 1e-3)
    r_tab = np.logspace(-3, 3, 321)
    ll = 0.2 * r_tab ** 1.3
    return {
        "increment_sum": lambda m: m.increment_sum(x, fidx, k, are, aim, 1.0, out),
        "euler_step": lambda m: m.euler_step(x.copy(), fidx, k, are, aim, 1e-3, noise, 0.01),
        "limit_step (closed)": lambda m: m.limit_step(x.copy(), dt, noise, r_tab, ll, 1.65 * ll,
                                                      0.2, 1.3, 0.0, 1.65, 1, 1e-14),
        "limit_step (table)": lambda m: m.limit_step(x.copy(), dt, noise, r_tab, ll, 1.65 * ll,
                                                     0.2, 1.3, 0.0, 1.65, 0, 1e-14),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=1024)
    ap.add_argument("--modes", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    py = get_backend("python")
    try:
        cy = get_backend("cython")
    except ImportError:
        cy = None
    print(f"{args.points} points, {args.modes} modes, best of {args.repeat}")
    print(f"{'kernel':22s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in cases(args.points, args.modes, rng).items():
        n = 3
        tp = min(timeit.repeat(lambda: fn(py), number=n, repeat=args.repeat)) / n * 1e3
        if cy is None:
            print(f"{name:22s} {tp:10.3f} {'-':>10s} {'-':>8s}")
            continue
        tc = min(timeit.repeat(lambda: fn(cy), number=n, repeat=args.repeat)) / n * 1e3
        print(f"{name:22s} {tp:10.3f} {tc:10.3f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
