"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case runs both implementations on identical inputs, checks that the
results agree, and reports the best-of-N wall time.
"""
import argparse
import timeit

import numpy as np

from divkit import _fallback
from divkit import kernels

try:
    from divkit import _kernels
except ImportError:
    _kernels = None


def gd_case(n, dim, epochs):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(n, dim))
    y = (X[:, 0] + 0.5 * rng.normal(size=n) > 0).astype(np.float64)
    w0 = rng.uniform(-0.01, 0.01, dim)
    args = (X, y, w0, 0.0, 0.1, 1e-4, epochs)

    def check(a, b):
        return max(np.max(np.abs(a[0] - b[0])), abs(a[1] - b[1]))

    return f"logistic_gd n={n} dim={dim} epochs={epochs}", lambda impl: kernels.logistic_gd(*args, impl=impl), check


def adjudicate_case(n, k):
    S = np.random.default_rng(1).random((n, k))

    def check(a, b):
        return float(not all(np.array_equal(x, y) for x, y in zip(a, b)))

    return f"adjudicate_batch n={n} k={k}", lambda impl: kernels.adjudicate_batch(S, 0.1, 0.9, 0.5, impl=impl), check


def pairs_case(versions, m, n_pairs):
    rng = np.random.default_rng(2)
    F = (rng.random((versions, m)) < 0.05).astype(np.uint8)
    u, v = np.triu_indices(versions, 1)
    pick = rng.choice(len(u), n_pairs, replace=False)
    pairs = np.column_stack([u[pick], v[pick]])

    def check(a, b):
        return float(not np.array_equal(a, b))

    return f"pair_joint_counts versions={versions} m={m} pairs={n_pairs}", lambda impl: kernels.pair_joint_counts(F, pairs, impl=impl), check


CASES = [
    lambda: gd_case(200, 4, 300),
    lambda: gd_case(2000, 4, 300),
    lambda: gd_case(5000, 20, 300),
    lambda: adjudicate_case(100_000, 3),
    lambda: pairs_case(2000, 2000, 1000),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'case':<52} {'cython ms':>10} {'numpy ms':>10} {'speedup':>8} {'max diff':>9}")
    for make in CASES:
        name, fn, check = make()
        diff = check(fn(_kernels), fn(_fallback))
        t_c = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        t_n = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<52} {t_c:>10.2f} {t_n:>10.2f} {t_n / t_c:>7.2f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
