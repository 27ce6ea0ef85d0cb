"""Compare the numba kernel against the pure-numpy fallback on the hot path:
truncated-series products, and one full curvature-tensor evaluation.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

from finslerlab import registered_instance
from finslerlab.backend import available_backends, set_backend
from finslerlab.berwald import berwald_oracle
from finslerlab.jets import jetspace


def bench_products(space, repeats):
    rng = np.random.default_rng(0)
    a = space.constant(0.0)
    b = space.constant(0.0)
    a.c[:] = rng.normal(size=space.nmon)
    b.c[:] = rng.normal(size=space.nmon)
    out = a * b  # warm up mul table / JIT
    t0 = time.perf_counter()
    for _ in range(repeats):
        out = a * b
    dt = time.perf_counter() - t0
    return dt / repeats, out.c.sum()


def main():
    cases = [
        ("2 vars, order 5", jetspace(((2, 5),)), 20000),
        ("3+3 vars, orders 5+1", jetspace(((3, 5), (3, 1))), 2000),
        ("4+4 vars, orders 5+1", jetspace(((4, 5), (4, 1))), 500),
    ]
    inst = registered_instance("randers-navigation")
    x = np.array([0.3, -0.2, 0.1])
    y = np.array([0.7, 0.4, -0.9])
    results = {}
    for backend in available_backends():
        set_backend(backend)
        rows = []
        for label, space, repeats in cases:
            per_call, check = bench_products(space, repeats)
            rows.append((label, per_call, check))
        berwald_oracle(inst, x, y)  # warm up
        t0 = time.perf_counter()
        for _ in range(5):
            berwald_oracle(inst, x, y)
        rows.append(("berwald oracle n=3", (time.perf_counter() - t0) / 5, 0.0))
        results[backend] = rows

    labels = [r[0] for r in next(iter(results.values()))]
    backends = list(results)
    print(f"{'case':28s}" + "".join(f"{b:>14s}" for b in backends) + f"{'speedup':>10s}")
    for i, label in enumerate(labels):
        times = [results[b][i][1] for b in backends]
        ratio = times[0] / times[-1] if times[-1] > 0 else float("nan")
        print(
            f"{label:28s}"
            + "".join(f"{t * 1e6:12.2f}us" for t in times)
            + f"{ratio:9.2f}x"
        )


if __name__ == "__main__":
    main()
