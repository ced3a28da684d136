"""Time the numba kernels against the pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]
"""

import argparse
import random
import time

from rassign import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def cases(seed):
    rng = random.Random(seed)
    weights = [rng.randint(1, 60) for _ in range(18)]
    m, n = 4, 11
    sizes = [rng.randint(1, 6) for _ in range(n)]
    allowed = [[rng.random() < 0.7 for _ in range(m)] for _ in range(n)]
    for row in allowed:
        row[rng.randrange(m)] = True
    values = [rng.randint(1, 1000) for _ in range(30)]
    kw = [rng.randint(1, 100) for _ in range(30)]
    return {
        "subset_sums (18 weights)": lambda b: _kernels.subset_sums(weights, backend=b)[-1],
        "bnb_makespan (4x11)": lambda b: _kernels.bnb_makespan(sizes, allowed, backend=b)[0],
        "knapsack_max (30 items)": lambda b: _kernels.knapsack_max(values, kw, 700, backend=b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can be timed")
    print(f"{'kernel':28s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(args.seed).items():
        t_np, r_np = best_of(lambda: fn("numpy"), args.repeat)
        if _kernels.HAVE_NUMBA:
            fn("numba")  # compile outside the timed runs
            t_nb, r_nb = best_of(lambda: fn("numba"), args.repeat)
            assert r_nb == r_np, f"{name}: backends disagree"
            print(f"{name:28s} {t_np * 1e3:12.3f} {t_nb * 1e3:12.3f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:28s} {t_np * 1e3:12.3f} {'-':>12s} {'-':>8s}")


if __name__ == "__main__":
    main()
