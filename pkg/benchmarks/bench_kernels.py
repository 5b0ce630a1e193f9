"""Time the compiled and numpy Matérn-5/2 backends on typical problem sizes.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Sizes mirror what the optimizer sees: ``n`` training points inside a trust
region against ``r = 100 d`` Thompson-sampling candidates.
"""

import argparse
import timeit

import numpy as np

from turbo import kernels

CASES = [
    # (label, n, r, d)
    ("d=6, n=50", 50, 600, 6),
    ("d=10, n=100", 100, 1000, 10),
    ("d=10, n=400", 400, 1000, 10),
    ("d=30, n=200", 200, 3000, 30),
]


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    names = sorted(backends)
    print(f"{'case':<14} {'operation':<18} " + " ".join(f"{b:>10}" for b in names) + "   speedup")
    for label, n, r, d in CASES:
        X = rng.random((n, d))
        C = rng.random((r, d))
        ls = rng.uniform(0.2, 1.0, d)
        W = rng.standard_normal((n, n))
        W = W + W.T
        ops = {
            "cross (n x r)": lambda impl: kernels.matern52(X, C, ls, 1.3, impl=impl),
            "symmetric (r x r)": lambda impl: kernels.matern52_symmetric(C, ls, 1.3, impl=impl),
            "lengthscale grad": lambda impl: kernels.matern52_lengthscale_grad(X, ls, 1.3, W, impl=impl),
        }
        for op, call in ops.items():
            times = {b: bench(lambda: call(backends[b]), args.repeat) for b in names}
            ref = call(backends["python"])
            for b in names:
                np.testing.assert_allclose(call(backends[b]), ref, rtol=1e-10, atol=1e-12)
            cells = " ".join(f"{1e3 * times[b]:>8.2f}ms" for b in names)
            speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
            print(f"{label:<14} {op:<18} {cells} {speed}")


if __name__ == "__main__":
    main()
