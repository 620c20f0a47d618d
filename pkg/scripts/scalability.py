#!/usr/bin/env python3
"""Optimizer wall time on random sparse states (m = n nonzero amplitudes) against qubit count.

    python3 scripts/scalability.py [--nmin 6] [--nmax 12] [--seeds 3]
"""
import argparse
import time

import numpy as np

from qspdc.circuit import count_cnots
from qspdc.frontend import synthesize_initial
from qspdc.pipeline import optimize
from qspdc.states import StateSpec


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--nmin", type=int, default=6)
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args()
    ns, ts = [], []
    print(f"{'n':>3s} {'cnot_before':>12s} {'cnot_after':>11s} {'seconds':>9s}")
    for n in range(a.nmin, a.nmax + 1):
        before = after = 0
        total = 0.0
        for seed in range(a.seeds):
            t = StateSpec("rand-sparse", n, n, seed=seed).build()
            init = synthesize_initial(t)
            best = float("inf")
            for _ in range(a.repeat):
                t0 = time.perf_counter()
                _, rep = optimize(init, target=t)
                best = min(best, time.perf_counter() - t0)
            total += best
            before += count_cnots(init)
            after += rep.cnot_after
        ns.append(n)
        ts.append(total / a.seeds)
        print(f"{n:3d} {before / a.seeds:12.1f} {after / a.seeds:11.1f} {ts[-1]:9.4f}")
    slope = np.polyfit(np.log(ns), np.log(ts), 1)[0]
    print(f"log-log exponent: {slope:.2f}")


if __name__ == "__main__":
    main()
