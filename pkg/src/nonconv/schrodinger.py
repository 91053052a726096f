"""Discrete Schrodinger operators with nonconventional random potentials.

The equation psi_{n+1} = (lambda - V_n) psi_n - psi_{n-1} is propagated by
the transfer matrices [[lambda - V_n, -1], [1, 0]]. V_n = combine(xi_{q_1(n)},
..., xi_{q_l(n)}).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import lyapunov_spectrum
from .drivers import build_X_driver
from .matrix_functions import schrodinger


def transfer_matrix(lam, V):
    return np.array([[lam - V, -1.0], [1.0, 0.0]])


def solve_recursion(lam, V, psi0, psi1):
    """Run the scalar recursion over V_1..V_N.

    Returns (psi_N, psi_{N+1}, log_scale): the true values are the returned
    pair times e^log_scale. The pair is rescaled by powers of two whenever it
    grows past 2^64 or shrinks below 2^-64.
    """
    prev, cur = float(psi0), float(psi1)
    expo = 0
    for v in np.asarray(V, dtype=float):
        prev, cur = cur, (lam - v) * cur - prev
        big = max(abs(prev), abs(cur))
        if big > 2.0 ** 64 or (0 < big < 2.0 ** -64):
            k = math.frexp(big)[1]
            prev, cur = math.ldexp(prev, -k), math.ldexp(cur, -k)
            expo += k
    return prev, cur, expo * math.log(2.0)


@dataclass(frozen=True)
class PotentialSpec:
    """V_n = combine(xi_{q_1(n)}, ..., xi_{q_l(n)}); combine defaults to the sum."""

    schedule: object
    process: object
    combine: object = None

    @property
    def ell(self):
        return self.schedule.ell

    def driver(self, lam):
        return build_X_driver(self.schedule, self.process,
                              schrodinger(lam, self.combine, self.schedule.ell))


@dataclass
class EnergyCurve:
    lambdas: np.ndarray
    gammas: np.ndarray
    stderr: np.ndarray
    N: int
    trials: int
    notes: list = field(default_factory=list)

    @property
    def loc_length(self):
        """1/gamma_1, infinite where gamma_1 is not resolved above 3 standard errors."""
        out = np.full(self.gammas.shape, math.inf)
        ok = self.gammas > 3 * np.nan_to_num(self.stderr)
        out[ok] = 1.0 / self.gammas[ok]
        return out


def energy_sweep(spec, lambdas, N, trials, seed=0, *, threads=None):
    """gamma_1(lambda) on a grid. All energies reuse the same xi realizations (same seed and trial ids)."""
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(np.diff(lambdas) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    g, se, notes = [], [], []
    for lam in lambdas:
        est = lyapunov_spectrum(spec.driver(lam), N, trials, seed, threads=threads)
        g.append(est.gammas[0])
        se.append(est.stderr[0])
        notes.extend(n for n in est.notes if n not in notes)
    return EnergyCurve(lambdas, np.array(g), np.array(se), int(N), int(trials), notes)
