"""Holonomy error of the discrete transport against the analytic one, per grid size.

For this family the Pancharatnam-gauged transport is exact: the printed errors
stay at roundoff for every grid, so no convergence order can be read off.
"""
import argparse
import time

import numpy as np

from anholonomy.circuit import anholonomic_family
from anholonomy.holonomy import holonomy_analytic, holonomy_numeric
from anholonomy.tracker import sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--steps", type=int, nargs="+", default=[64, 128, 256, 512, 1024, 2048, 4096])
    args = p.parse_args()
    print(f"{'N':>2} {'steps':>6} {'|M_num - M_an|':>16} {'ratio':>8} {'time/s':>7}")
    for n in args.qubits:
        exact = holonomy_analytic(n)
        prev = None
        for s in args.steps:
            t0 = time.perf_counter()
            err = float(np.abs(holonomy_numeric(sweep(anholonomic_family(n), s, 1)) - exact).max())
            dt = time.perf_counter() - t0
            ratio = f"{prev / err:8.2f}" if prev and err > 0 else f"{'-':>8}"
            print(f"{n:>2} {s:>6} {err:16.3e} {ratio} {dt:7.2f}")
            prev = err


if __name__ == "__main__":
    main()
