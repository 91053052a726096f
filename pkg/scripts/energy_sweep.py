"""Top exponent and localization length over an energy grid for V_n = xi_n + xi_2n.

    python scripts/energy_sweep.py --n 20000 --trials 8 --svg sweep.svg
"""

import argparse

import numpy as np

from nonconv import IIDProcess, IndexSchedule
from nonconv.cli import write_svg
from nonconv.processes import UniformSampler
from nonconv.schrodinger import PotentialSpec, energy_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20_000)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--width", type=float, default=1.0, help="xi uniform on [-width, width]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", default=None)
    args = p.parse_args()
    spec = PotentialSpec(IndexSchedule.affine([1, 2]), IIDProcess(UniformSampler(-args.width, args.width)))
    lambdas = np.linspace(-4.0, 4.0, 17)
    curve = energy_sweep(spec, lambdas, args.n, args.trials, args.seed)
    rows = [[lam, g, s, L] for lam, g, s, L in zip(lambdas, curve.gammas, curve.stderr, curve.loc_length)]
    print(f"{'lambda':>7} {'gamma_1':>9} {'stderr':>9} {'loc_length':>11}")
    for lam, g, s, L in rows:
        print(f"{lam:7.2f} {g:9.5f} {s:9.1e} {L:11.3f}")
    if args.svg:
        write_svg(args.svg, ["lambda", "gamma1", "stderr", "loc_length"], rows,
                  {"x": "lambda", "y": ["gamma1"], "title": "top exponent versus energy"})


if __name__ == "__main__":
    main()
