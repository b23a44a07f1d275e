"""Benchmark the compiled kernels against the pure-Python fallback.

Representative workloads from the vertex pipeline: Laurent products of the
kind appearing in P * Pbar, redistribution divisions, expansion of factored
Euler-class numerators, and an end-to-end vertex series.  Run as

    python benchmarks/bench_kernels.py
"""

import random
import sys
import time


def timeit(fn, repeat=3):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def random_laurent(rng, nterms, span=3):
    out = {}
    for _ in range(nterms):
        w = tuple(rng.randint(-span, span) for _ in range(4))
        out[w] = out.get(w, 0) + rng.randint(-9, 9)
    return {w: c for w, c in out.items() if c}


def random_poly(rng, nterms, deg=6):
    out = {}
    for _ in range(nterms):
        m = tuple(rng.randint(0, deg) for _ in range(3))
        out[m] = out.get(m, 0) + rng.randint(-9, 9)
    return {m: c for m, c in out.items() if c}


def bench_backend(mod):
    rng = random.Random(1234)
    a = random_laurent(rng, 250)
    b = random_laurent(rng, 250)
    p = random_poly(rng, 400)
    forms = [(1, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 1), (2, 1, 1)] * 8
    results = {}
    results["laurent_mul 250x250"] = timeit(lambda: mod.laurent_mul(a, b))
    results["laurent_subst"] = timeit(
        lambda: mod.laurent_subst(
            a, ((-1, 0, 0, 0), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1))
        )
    )
    def linear_tower():
        q = p
        for f in forms:
            q = mod.poly_linear_mul(q, f)
        return q

    results["poly_linear_mul x40"] = timeit(linear_tower)
    results["poly_mul 400x400"] = timeit(lambda: mod.poly_mul(p, random_poly(rng, 400)))
    return results


def bench_end_to_end():
    from dt4vertex import vertexcalc
    from dt4vertex.partitions import EMPTY_PP
    from dt4vertex.vertexcalc import dt_vertex_series

    vertexcalc.clear_memo()
    e = EMPTY_PP
    return timeit(lambda: (vertexcalc.clear_memo(), dt_vertex_series(e, e, e, e, 5)), repeat=1)


def main():
    from dt4vertex import _kernels_py

    backends = {"python": _kernels_py}
    try:
        from dt4vertex import _kernels_cy

        backends["cython"] = _kernels_cy
    except ImportError:
        print("compiled kernels not built; benchmarking the pure backend only")

    rows = {name: bench_backend(mod) for name, mod in backends.items()}
    workloads = list(next(iter(rows.values())))
    width = max(len(w) for w in workloads) + 2
    header = "workload".ljust(width) + "".join(f"{n:>12}" for n in rows)
    if len(rows) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for w in workloads:
        line = w.ljust(width)
        vals = [rows[n][w] for n in rows]
        line += "".join(f"{v * 1000:>10.2f}ms" for v in vals)
        if len(vals) == 2:
            line += f"{vals[0] / vals[1]:>9.1f}x"
        print(line)

    print()
    print(f"active backend end-to-end (empty DT vertex, N=5): "
          f"{bench_end_to_end() * 1000:.0f}ms")


if __name__ == "__main__":
    sys.exit(main())
