"""Mixing diagnostics for finite-state Markov chains.

For a finite chain the uniform geometric ergodicity bound
    sup_x |E_x f(xi_n) - nu(f)| <= R e^{-rho n} sup |f|
can be checked exactly: the left side over |f| <= 1 is
max_x ||P^n(x, .) - nu||_1, computed here by matrix powers.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import NotErgodic
from .processes import MarkovCursor, iid_values


def _primitive_power(P):
    """Smallest m with P^m > 0 entrywise, or None (Wielandt bound (S-1)^2 + 1)."""
    S = P.shape[0]
    pattern = (P > 0).astype(np.int64)
    power = pattern.copy()
    for m in range(1, (S - 1) ** 2 + 2):
        if np.all(power > 0):
            return m
        power = np.minimum(power @ pattern, 1)
    return None


def stationary_distribution(P):
    """Unique invariant law nu of an irreducible aperiodic chain (nu P = nu)."""
    P = np.asarray(P, dtype=float)
    S = P.shape[0]
    if P.shape != (S, S) or np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1) > 1e-12):
        raise ValueError("P must be row stochastic")
    if _primitive_power(P) is None:
        raise NotErgodic("no power of P is strictly positive (reducible or periodic)")
    A = np.vstack([P.T - np.eye(S), np.ones((1, S))])
    rhs = np.zeros(S + 1)
    rhs[-1] = 1.0
    nu = np.linalg.lstsq(A, rhs, rcond=None)[0]
    for _ in range(3):
        nu = nu @ P
        nu = nu / nu.sum()
    return nu


@dataclass
class MixingProfile:
    """Fitted ergodicity profile: Delta(n) <= R e^{-rho n} on the table.

    ``phi_curve`` holds (n, Delta(n)) for the tabulated n. An exactly mixing
    chain (Delta(n) = 0 for n >= 1) has ``rho = inf``.
    """

    nu: np.ndarray
    rho: float
    R: float
    phi_curve: list
    rho_fit: float = float("nan")

    @property
    def exact(self):
        return math.isinf(self.rho)


EXACT_TOL = 1e-14
FLOOR = 1e-12


def ergodicity_profile(P, n_max=60):
    """Tabulate Delta(n) = max_x ||P^n(x,.) - nu||_1 and fit R e^{-rho n}.

    rho comes from least squares on ln Delta(n) over points above 1e-12
    (smaller values are rounding noise and end the table); R is then the
    smallest prefactor that dominates every tabulated point.
    """
    P = np.asarray(P, dtype=float)
    nu = stationary_distribution(P)
    Pn = np.eye(P.shape[0])
    curve = []
    for n in range(1, n_max + 1):
        Pn = Pn @ P
        delta = float(np.abs(Pn - nu[None, :]).sum(axis=1).max())
        if n == 1 and delta <= EXACT_TOL:
            return MixingProfile(nu, math.inf, 1.0, [(n, 0.0) for n in range(1, n_max + 1)], math.inf)
        if delta < FLOOR:
            break
        curve.append((n, delta))
    ns = np.array([c[0] for c in curve], dtype=float)
    logs = np.log([c[1] for c in curve])
    if len(curve) >= 2:
        slope, _ = np.polyfit(ns, logs, 1)
        rho = -float(slope)
    else:
        # only Delta(1) is resolvable: decay to the noise floor within one step
        rho = float(logs[0]) - math.log(FLOOR)
    R = float(np.max(logs + rho * ns))
    return MixingProfile(nu, rho, math.exp(R), curve, rho)


def phi_mixing_bound(profile, n):
    """Upper bound 2 R e^{-rho n} on the phi-dependence coefficient at lag n."""
    if profile.exact:
        return 0.0
    return 2.0 * profile.R * math.exp(-profile.rho * n)


@dataclass
class DecouplingResult:
    measured: float
    stderr: float
    bound: float
    p_joint: float
    p_decoupled: float
    trials: int


def _block_values(process, seed, streams, windows, cursor=None):
    """Values on each window [m_i, n_i] for every stream, as a list of arrays."""
    out = []
    for m, n in windows:
        idx = np.arange(m, n + 1, dtype=np.int64)
        if process.kind == "iid":
            out.append(iid_values(process, seed, streams, idx))
        else:
            out.append(process._vals[cursor.advance(idx)])
    return out


def decoupling_gap(process, h, windows, profile=None, trials=100_000, seed=0):
    """Monte Carlo |P{(Z_1..Z_k) in G} - P{(Z_1^(1)..Z_k^(k)) in G}| versus 4 sum phi(gaps).

    ``windows`` are index windows [m_i, n_i] (inclusive, increasing,
    disjoint); Z_i is the path on window i. ``h`` takes the list of k arrays
    (each trials x window length) and returns a boolean array over trials.
    The decoupled vector takes window i from an independent copy of the
    process started from the same initial law.
    """
    windows = [(int(m), int(n)) for m, n in windows]
    for i, (m, n) in enumerate(windows):
        if m > n or (i and m <= windows[i - 1][1]):
            raise ValueError("windows must be increasing, disjoint [m_i, n_i]")
    trial_ids = np.arange(trials, dtype=np.uint64)
    joint_streams = rng.trial_stream(trial_ids, 0)
    if process.kind == "iid":
        joint = _block_values(process, seed, joint_streams, windows)
        split = [_block_values(process, seed, rng.trial_stream(trial_ids, 1 + i), [w])[0]
                 for i, w in enumerate(windows)]
    else:
        joint = _block_values(process, seed, joint_streams, windows,
                              MarkovCursor(process, seed, joint_streams))
        split = []
        for i, w in enumerate(windows):
            streams = rng.trial_stream(trial_ids, 1 + i)
            split.append(_block_values(process, seed, streams, [w],
                                       MarkovCursor(process, seed, streams))[0])
    p1 = float(np.mean(h(joint)))
    p2 = float(np.mean(h(split)))
    stderr = math.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / trials)
    if process.kind == "iid":
        bound = 0.0
    else:
        if profile is None:
            profile = ergodicity_profile(process.transition)
        gaps = [windows[i][0] - windows[i - 1][1] for i in range(1, len(windows))]
        bound = 4.0 * sum(phi_mixing_bound(profile, g) for g in gaps)
    return DecouplingResult(abs(p1 - p2), stderr, bound, p1, p2, trials)
