"""Condition numbers against the interface shift eps = 2^-k.

Block preconditioners should barely move while kappa(A) swings by orders of
magnitude as the cut pattern produces slivers of different size.
"""

import argparse

from nxfem.experiments import ExperimentConfig, run_table1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--exponents", default="10,12,14,16,18,20")
    ap.add_argument("--levels", default="1,2,3,4")
    args = ap.parse_args()
    levels = [int(x) for x in args.levels.split(",")]
    print(f"{'k':>3} {'level':>5} {'B_A':>8} {'B_D':>8} {'D_A':>9} {'A':>10}")
    for k in (float(x) for x in args.exponents.split(",")):
        rows = run_table1(ExperimentConfig(levels=levels, shift=2.0**-k, record_timing=False))
        for lv in levels:
            kap = {r.preconditioner: r.kappa for r in rows if r.level == lv}
            print(f"{k:>3g} {lv:>5} {kap['B_A']:>8.3f} {kap['B_D']:>8.3f} {kap['D_A']:>9.1f} {kap['I']:>10.3g}")


if __name__ == "__main__":
    main()
