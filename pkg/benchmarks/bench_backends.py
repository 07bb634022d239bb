"""Compare the compiled entropy/gradient kernel against the numpy fallback.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

from eofdual import _core_py

try:
    from eofdual import _core
except ImportError:
    _core = None


def bench(fn, w, repeats):
    fn(w)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(w)
    return (time.perf_counter() - t0) / repeats


def main():
    rng = np.random.default_rng(0)
    print(f"{'batch':>18} {'numpy':>12} {'compiled':>12} {'speedup':>8}")
    for k, da, db, repeats in [
        (1, 2, 2, 20000),
        (4, 2, 2, 10000),
        (16, 2, 2, 5000),
        (16, 4, 4, 2000),
        (64, 4, 4, 500),
    ]:
        w = rng.standard_normal((k, da, db)) + 1j * rng.standard_normal((k, da, db))
        t_py = bench(_core_py.entropy_and_gradient, w, repeats)
        if _core is None:
            print(f"{k}x{da}x{db:>2}: numpy {t_py*1e6:9.2f} us (no extension built)")
            continue
        t_c = bench(_core.entropy_and_gradient, w, repeats)
        v_py, g_py = _core_py.entropy_and_gradient(w)
        v_c, g_c = _core.entropy_and_gradient(w)
        assert abs(v_py - v_c) < 1e-10 and np.max(np.abs(g_py - g_c)) < 1e-10
        label = f"{k}x{da}x{db}"
        print(f"{label:>18} {t_py*1e6:10.2f}us {t_c*1e6:10.2f}us {t_py/t_c:7.1f}x")


if __name__ == "__main__":
    main()
