"""Nonconventional versus conventional top exponents for a few drivers.

    python scripts/compare_spectra.py --n 20000 --trials 20
"""

import argparse

from nonconv import IIDProcess, IndexSchedule, MarkovProcess, theorem_comparison
from nonconv import matrix_functions as mf
from nonconv.processes import FiniteSampler, UniformSampler

CASES = {
    "schrodinger(3), +-1, (n, 2n)": (IndexSchedule.affine([1, 2]),
                                     IIDProcess(FiniteSampler([-1.0, 1.0])), mf.schrodinger(3.0, ell=2)),
    "schrodinger(1), U(-1,1), (n, 2n, 3n)": (IndexSchedule.affine([1, 2, 3]),
                                             IIDProcess(UniformSampler(-1, 1)),
                                             mf.schrodinger(1.0, ell=3)),
    "diag_exp, two-state chain, (n, 2n+1)": (IndexSchedule.affine([1, 2], [0, 1]),
                                             MarkovProcess([0.0, 1.0], [[0.9, 0.1], [0.2, 0.8]]),
                                             mf.diag_exp(2)),
}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20_000)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    print(f"{'driver':<40} {'gamma_X':>9} {'gamma_Y':>9} {'delta':>10} {'3 sigma':>9}  verdict")
    for name, (sched, proc, F) in CASES.items():
        c = theorem_comparison(sched, proc, F, args.n, args.trials, args.seed)
        print(f"{name:<40} {c.gamma_X.gammas[0]:9.5f} {c.gamma_Y.gammas[0]:9.5f} "
              f"{c.deltas[0]:+10.2e} {3 * c.combined_stderr[0]:9.2e}  {c.verdict}")


if __name__ == "__main__":
    main()
