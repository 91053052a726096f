"""Avalanche lower bound on (1/N) ln||Pi_N|| against the exact value, over a range of horizons.

    python scripts/avalanche_bound.py --lam 3 --kappa 0.5
"""

import argparse

from nonconv import IIDProcess, IndexSchedule, build_X_driver, partition_pipeline
from nonconv import matrix_functions as mf
from nonconv.processes import UniformSampler


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lam", type=float, default=3.0)
    p.add_argument("--width", type=float, default=0.05)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--m1", type=int, default=10)
    p.add_argument("--b-floor", type=float, default=1.01)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    drv = build_X_driver(IndexSchedule.affine([1, 2]), IIDProcess(UniformSampler(-args.width, args.width)),
                         mf.schrodinger(args.lam, ell=2))
    print(f"{'N':>7} {'blocks':>6} {'a':>9} {'b':>7} {'lower':>9} {'exact':>9}")
    for N in (1_000, 5_000, 20_000, 100_000):
        res = partition_pipeline(drv, args.kappa, args.m1, N, seed=args.seed, b_floor=args.b_floor)
        rep = res.report
        lower = f"{res.lower_bound:9.5f}" if res.applicable else f"{'n/a':>9}"
        print(f"{N:7d} {rep.l:6d} {rep.a:9.2e} {rep.b:7.3f} {lower} {res.exact:9.5f}")
        for note in res.notes:
            print("        " + note)


if __name__ == "__main__":
    main()
