"""Fitted tail decay rates of (1/n) ln||Pi_n|| for diag(e^a, e^-a), a uniform on {0.5, 1.5},
against the Cramer rate of the two-point law.

    python scripts/tail_rates.py --trials 200000
"""

import argparse
import math

import numpy as np
from scipy.optimize import minimize_scalar

from nonconv import IIDProcess, IndexSchedule, build_X_driver, fit_rate
from nonconv import matrix_functions as mf
from nonconv.deviations import tail_curves
from nonconv.processes import FiniteSampler


def cramer_rate(x, values=(0.5, 1.5)):
    vals = np.array(values)
    res = minimize_scalar(lambda t: -(t * x - math.log(np.mean(np.exp(t * vals)))),
                          bounds=(-50, 50), method="bounded")
    return -res.fun


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()
    drv = build_X_driver(IndexSchedule.affine([1]), IIDProcess(FiniteSampler([0.5, 1.5])), mf.diag_exp(1))
    epsilons = [0.1, 0.15, 0.2, 0.25]
    curves = tail_curves(drv, 1.0, epsilons, [10, 18, 26, 34, 42, 50], args.trials, seed=args.seed)
    print(f"{'eps':>5} {'kappa_hat':>10} {'cramer':>8} {'ratio':>6} {'cells':>6}")
    for eps, curve in zip(epsilons, curves):
        rate = fit_rate(curve)
        ref = cramer_rate(1.0 + eps)
        print(f"{eps:5.2f} {rate.kappa_hat:10.4f} {ref:8.4f} {rate.kappa_hat / ref:6.3f} "
              f"{rate.points_used:6d}")


if __name__ == "__main__":
    main()
