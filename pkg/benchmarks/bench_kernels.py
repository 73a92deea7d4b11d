"""Time the compiled and numpy kernel backends on the same inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

import sfcalc
from sfcalc import _kernels
from sfcalc.calculus import default_contour, func_calc
from sfcalc.hypercomplex import basis_vector, product_tables
from sfcalc.operator import random_operator
from sfcalc.slicefun import left_series


def cases(rng):
    for n in (2, 3, 5):
        idx, sign = product_tables(n)
        a, b = rng.normal(size=2**n), rng.normal(size=2**n)
        A, B = rng.normal(size=(512, 2**n)), rng.normal(size=(512, 2**n))
        yield f"product n={n}", lambda: _kernels.geometric_product(a, b, idx, sign)
        yield f"batch512 n={n}", lambda: _kernels.geometric_product_batch(A, B, idx, sign)
        yield f"left_matrix n={n}", lambda: _kernels.left_matrix(a, idx, sign)
    T = random_operator(3, 3, 0)
    C = default_contour(T, nodes=256)
    f = left_series([basis_vector(2, 3), 1.0])
    yield "func_calc left series n=3", lambda: func_calc(f, T, C)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = sfcalc.available_backends()
    rows = {}
    for name in backends:
        sfcalc.use_backend(name)
        for label, fn in cases(np.random.default_rng(0)):
            number = 1 if label.startswith("func_calc") else 2000
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            rows.setdefault(label, {})[name] = best
    print(f"{'case':28s}" + "".join(f"{b:>14s}" for b in backends) + ("   speedup" if len(backends) == 2 else ""))
    for label, times in rows.items():
        line = f"{label:28s}" + "".join(f"{times[b] * 1e6:12.2f}us" for b in backends)
        if len(backends) == 2:
            line += f"   {times['python'] / times['cython']:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
