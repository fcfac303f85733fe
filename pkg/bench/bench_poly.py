#!/usr/bin/env python3
"""Benchmark the polynomial kernels: compiled backend vs pure Python.

Usage:  python bench/bench_poly.py [--terms N] [--pairs N] [--repeat N]
"""

import argparse
import random
import time
from fractions import Fraction as Q

from entropik import _poly_py
from entropik.atoms import ConstitPartial, ConstitSym, IndepVar, JetVar

try:
    from entropik import _poly_cy
except ImportError:
    _poly_cy = None

ATOMS = [
    IndepVar("t"), IndepVar("x"),
    JetVar("rho", (0, 0)), JetVar("rho", (0, 1)), JetVar("rho", (1, 0)),
    JetVar("u", (0, 1)), JetVar("eps", (0, 1)),
    ConstitSym("p"), ConstitSym("eta"),
    ConstitPartial("eta", (1, 0)), ConstitPartial("p", (0, 1)),
]


def rand_poly(rnd, terms):
    p = {}
    while len(p) < terms:
        picked = rnd.sample(ATOMS, rnd.randint(1, 4))
        mono = tuple(
            sorted(
                ((a, rnd.randint(1, 3)) for a in picked),
                key=lambda kv: kv[0].key,
            )
        )
        p[mono] = Q(rnd.randint(-99, 99) or 1, rnd.randint(1, 99))
    return p


def timeit(fn, pairs, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for p1, p2 in pairs:
            fn(p1, p2)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--terms", type=int, default=40)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rnd = random.Random(args.seed)
    pairs = [
        (rand_poly(rnd, args.terms), rand_poly(rnd, args.terms))
        for _ in range(args.pairs)
    ]

    ops = [
        ("p_add", lambda mod: mod.p_add),
        ("p_sub", lambda mod: mod.p_sub),
        ("p_mul", lambda mod: mod.p_mul),
        ("p_diff", lambda mod: lambda p1, p2: mod.p_diff(p1, ATOMS[2])),
        ("p_pow^2", lambda mod: lambda p1, p2: mod.p_pow(p1, 2)),
    ]

    print(f"{args.pairs} operand pairs, {args.terms} terms each, "
          f"best of {args.repeat}")
    header = f"{'op':<10}{'python':>12}"
    if _poly_cy is not None:
        header += f"{'cython':>12}{'speedup':>10}"
    print(header)
    for name, pick in ops:
        t_py = timeit(pick(_poly_py), pairs, args.repeat)
        row = f"{name:<10}{t_py * 1e3:>10.2f}ms"
        if _poly_cy is not None:
            t_cy = timeit(pick(_poly_cy), pairs, args.repeat)
            row += f"{t_cy * 1e3:>10.2f}ms{t_py / t_cy:>9.2f}x"
        print(row)
    if _poly_cy is None:
        print("compiled backend not built; showing pure Python only")


if __name__ == "__main__":
    main()
