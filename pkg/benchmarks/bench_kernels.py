"""Benchmark the compiled kernels against the numpy fallback.

Runs each kernel on workloads shaped like the package's hot paths (batched
1-D Legendre transforms, sliding-window minima over product-grid slabs,
mask dilation), checks that the two backends agree bit for bit, and prints
a timing table.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import sys
import time

import numpy as np

from bipot._kernels import _fallback

try:
    from bipot._kernels import _ext
except ImportError:
    _ext = None


def timed(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(quick):
    rng = np.random.default_rng(0)
    scale = 4 if quick else 1

    n, m, rows = 401, 401, 2000 // scale
    xs = np.linspace(-2, 2, n)
    ys = np.linspace(-4, 4, m)
    slopes = np.sort(rng.uniform(-2, 2, (rows, n - 1)), axis=1)
    vals = np.concatenate([np.zeros((rows, 1)),
                           np.cumsum(slopes * (4 / (n - 1)), axis=1)], axis=1)
    yield ("lf_transform", f"{rows} rows of {n} -> {m}",
           "lf_transform", (xs, vals, ys))

    slab = rng.normal(size=(262144 // scale, 81))
    slab[rng.random(slab.shape) < 0.05] = np.inf
    yield ("sliding_min", f"{slab.shape[0]} rows of 81, w=10",
           "sliding_min", (slab, 10))

    masks = (rng.random((262144 // scale, 81)) < 0.03).astype(np.uint8)
    yield ("sliding_max_u8", f"{masks.shape[0]} rows of 81, w=10",
           "sliding_max_u8", (masks, 10))


def main(argv=None):
    args = argparse.ArgumentParser(description=__doc__)
    args.add_argument("--quick", action="store_true")
    opts = args.parse_args(argv)

    if _ext is None:
        print("compiled extension not built; showing fallback timings only")
    print(f"{'kernel':<16} {'workload':<28} {'fallback':>10} "
          f"{'ext':>10} {'speedup':>8}")
    for name, desc, fn_name, call_args in workloads(opts.quick):
        t_fb, out_fb = timed(getattr(_fallback, fn_name), *call_args)
        if _ext is None:
            print(f"{name:<16} {desc:<28} {t_fb * 1e3:>8.1f}ms {'-':>10} {'-':>8}")
            continue
        t_ex, out_ex = timed(getattr(_ext, fn_name), *call_args)
        if not np.array_equal(out_fb, out_ex):
            print(f"{name}: BACKEND MISMATCH", file=sys.stderr)
            return 1
        print(f"{name:<16} {desc:<28} {t_fb * 1e3:>8.1f}ms "
              f"{t_ex * 1e3:>8.1f}ms {t_fb / t_ex:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
