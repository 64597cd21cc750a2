"""Compare the compiled scan kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py [--sizes 10000,100000,1000000]

Both backends produce bit-identical output (asserted here); the point of
the compiled path is the constant factor on the sequential scans, which
numpy cannot vectorize because of the running compensation term.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from heavytail._kernels import _pure


def _load_compiled():
    try:
        from heavytail._kernels import _core
    except ImportError:
        return None
    return _core


def _time(fn, *args, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10000,100000,1000000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    core = _load_compiled()
    if core is None:
        print("compiled backend unavailable; timing the pure path only")

    rng = np.random.default_rng(12345)
    print(f"{'kernel':12s} {'n':>9s} {'pure (s)':>10s} {'compiled':>10s} {'speedup':>8s}")
    for n in sizes:
        x = rng.standard_cauchy(n)
        y = rng.standard_normal(n) + 1.0
        cases = [
            ("kahan_sum", (x,)),
            ("kahan_cumsum", (x,)),
            ("tn_scan", (x, y, 0.5, 1.5)),
        ]
        for name, call_args in cases:
            t_pure = _time(getattr(_pure, name), *call_args)
            if core is not None:
                t_core = _time(getattr(core, name), *call_args)
                out_p = getattr(_pure, name)(*call_args)
                out_c = getattr(core, name)(*call_args)
                assert np.array_equal(np.asarray(out_p), np.asarray(out_c)), name
                print(
                    f"{name:12s} {n:9d} {t_pure:10.4f} {t_core:10.4f} "
                    f"{t_pure / t_core:7.1f}x"
                )
            else:
                print(f"{name:12s} {n:9d} {t_pure:10.4f} {'-':>10s} {'-':>8s}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
