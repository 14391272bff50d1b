"""Compare the compiled and numpy FHT kernels.

    python benchmarks/bench_kernels.py [--batch 4096] [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from hadamard_dse import _kernels_py, kernels

try:
    from hadamard_dse import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _time(fn, make, repeat):
    """Best-of-``repeat`` wall time; each call gets a fresh buffer (kernels work in place)."""
    best = float("inf")
    for _ in range(repeat):
        buf = make()
        t0 = timeit.default_timer()
        fn(buf)
        best = min(best, timeit.default_timer() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--orders", type=int, nargs="+", default=[5, 7, 10])
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'kernel':<8}{'m':>4}{'numpy [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for m in args.orders:
        M = 1 << m
        real = rng.standard_normal((args.batch, M))
        fixed = rng.integers(-512, 512, (args.batch, M), dtype=np.int64)
        for name, data, py_fn, c_name in (
            ("real", real, _kernels_py.fht_real_batch, "fht_real_batch"),
            ("fixed", fixed, _kernels_py.fht_fixed_batch, "fht_fixed_batch"),
        ):
            t_py = _time(lambda b: py_fn(b, m), data.copy, args.repeat)
            if _compiled is None:
                print(f"{name:<8}{m:>4}{1e3 * t_py:>14.3f}{'n/a':>14}{'':>10}")
                continue
            c_fn = getattr(_compiled, c_name)
            t_c = _time(lambda b: c_fn(b, m), data.copy, args.repeat)
            print(f"{name:<8}{m:>4}{1e3 * t_py:>14.3f}{1e3 * t_c:>14.3f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
