"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--vectors 100000] [--repeat 3]
"""
import argparse
import random
import time

import numpy as np

from packmat import _kernels_py
from packmat.delpezzo import degree_range, wall_patterns

try:
    from packmat import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def enumeration(mod):
    for a in degree_range(8):
        mod.degree_solutions(8, a)


def batch_inputs(n, k=8, seed=0):
    rng = random.Random(seed)
    den = np.array([rng.randint(1, 60) for _ in range(n)], dtype=np.int64)
    W = np.array([sorted((rng.randint(1, int(d)) for _ in range(k)), reverse=True) for d in den], dtype=np.int64)
    C = np.array([(c.a, *c.b) for c in wall_patterns(k)], dtype=np.int64)
    return W, den, C


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--vectors", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    W, den, C = batch_inputs(args.vectors)
    out = np.empty(len(W), dtype=np.int64)
    rows = []
    mods = [("python", _kernels_py)] + ([("cython", compiled)] if compiled else [])
    for name, mod in mods:
        t_enum = best_of(lambda: enumeration(mod), args.repeat)
        t_batch = best_of(lambda: mod.first_violations(W, den, C, out), args.repeat)
        rows.append((name, t_enum, t_batch))
    print(f"{'backend':8s} {'enumerate k=8 (ms)':>20s} {'cone sweep (ms)':>18s}   ({args.vectors} vectors, k=8)")
    for name, te, tb in rows:
        print(f"{name:8s} {te * 1e3:20.2f} {tb * 1e3:18.2f}")
    if len(rows) == 2:
        print(f"speed-up {rows[0][1] / rows[1][1]:20.1f}x {rows[0][2] / rows[1][2]:17.1f}x")
    else:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
