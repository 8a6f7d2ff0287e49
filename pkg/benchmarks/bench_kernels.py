"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from lsestop import _pykernels

try:
    from lsestop import _speedups
except ImportError:
    _speedups = None


def cases(rng):
    n = 900
    mu = rng.normal(scale=5, size=n)
    sigma = rng.exponential(size=n)
    paths = rng.normal(scale=0.3, size=(10_000, 100))
    labels = rng.integers(0, 3, size=100).astype(np.int8)
    # mostly-accurate paths so the early exit does not dominate
    paths += np.where(labels == 0, 2.0, np.where(labels == 1, -2.0, 0.0))
    half = np.full(100, 1.5)
    pred = rng.random(400) < 0.4
    fpaths = rng.normal(size=(1000, 400))
    return {
        "tri_probs (900 candidates)": lambda m: m.tri_probs(mu, sigma, 0.0, 0.8),
        "count_eps_accurate (10k x 100)": lambda m: m.count_eps_accurate(paths, labels, 0.0, half),
        "path_fscores (1k x 400)": lambda m: m.path_fscores(fpaths, pred, 0.0),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<32}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=3, repeat=args.repeat)) / 3
        if _speedups is None:
            print(f"{name:<32}{t_py * 1e3:>12.2f}{'n/a':>14}{'':>10}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_speedups), number=3, repeat=args.repeat)) / 3
        print(f"{name:<32}{t_py * 1e3:>12.2f}{t_c * 1e3:>14.2f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
