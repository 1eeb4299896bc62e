"""Benchmark: compiled elimination kernels vs the pure-Python fallback.

Times exact RREF over Q and F_p on graph-complex differentials and on
random sparse matrices.  Run as

    python benchmarks/bench_backends.py

The active backend is controlled by GRAPHCOHOM_PURE; this script measures
both twins in-process through the module handles, so one invocation prints
the whole comparison table.
"""

import random
import time
from fractions import Fraction

from graphcohom.kernels import pure_backend
from graphcohom.kernels import _speedups_available


def graph_complex_rows():
    from graphcohom import algebra as alg
    from graphcohom.graph import builtin_graph
    from graphcohom.graph_complex import build

    out = []
    for A, G, label in [
        (alg.torus(2), builtin_graph("complete:4"), "torus2/K4 delta"),
        (alg.sphere(2), builtin_graph("complete:4"), "sphere2/K4 delta"),
    ]:
        C = build(A, G)
        for p in range(1, 3):
            M = C.delta_matrix(p)
            rows = [dict(M.row(i)) for i in range(M.rows)]
            out.append((f"{label} p={p} ({M.rows}x{M.cols})", rows, M.cols))
    return out


def random_rows(rng, nrows, ncols, density):
    rows = []
    for _ in range(nrows):
        r = {}
        for j in range(ncols):
            if rng.random() < density:
                r[j] = Fraction(rng.randint(-9, 9))
        rows.append(r)
    return rows


def time_call(fn, *args, repeat=3):
    best = None
    for _ in range(repeat):
        copies = [dict(r) for r in args[0]]
        t0 = time.perf_counter()
        fn(copies, *args[1:])
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def main():
    speedups = _speedups_available()
    pure = pure_backend()
    if speedups is None:
        print("compiled kernels not built; showing pure timings only")
    rng = random.Random(2024)
    cases = []
    for label, rows, ncols in graph_complex_rows():
        cases.append((label + " [Q]", "frac", rows, ncols))
    cases.append(("random 150x150 d=0.06 [Q]", "frac", random_rows(rng, 150, 150, 0.06), 150))
    cases.append(("random 250x250 d=0.03 [Q]", "frac", random_rows(rng, 250, 250, 0.03), 250))
    modrows = [
        {j: int(v) % 3 for j, v in r.items() if int(v) % 3}
        for r in random_rows(rng, 600, 600, 0.05)
    ]
    cases.append(("random 600x600 d=0.05 [F_3]", "mod3", modrows, 600))

    print(f"{'case':44} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for label, kind, rows, ncols in cases:
        if kind == "frac":
            t_pure = time_call(pure.rref_frac, rows, ncols)
            t_fast = time_call(speedups.rref_frac, rows, ncols) if speedups else None
        else:
            t_pure = time_call(pure.rref_mod, rows, ncols, 3)
            t_fast = time_call(speedups.rref_mod, rows, ncols, 3) if speedups else None
        if t_fast is not None:
            print(f"{label:44} {t_pure*1e3:8.1f}ms {t_fast*1e3:8.1f}ms {t_pure/t_fast:7.1f}x")
        else:
            print(f"{label:44} {t_pure*1e3:8.1f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
