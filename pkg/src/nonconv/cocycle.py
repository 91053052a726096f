"""Streaming products of matrices and Lyapunov spectrum estimation.

Two accumulators:

* :class:`CocycleState` -- orthonormal frame plus log accumulators, advanced by
  re-orthonormalizing X Q (modified Gram-Schmidt, two passes). After N steps
  L_i / N estimates gamma_i.
* :class:`RescaledProduct` -- the full product kept as 2^e * M. Rescaling uses
  powers of two, so it is exact and ln ||Pi_n|| = e ln 2 + ln ||M|| carries no
  accumulated rounding from the scale.

Trials run in lockstep batches through numba kernels; every trial only
depends on its own stream ids, so grouping and thread count never change
results.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._parallel import map_ordered
from .drivers import WedgeDriver
from .errors import SingularInput
from .linalg import as_matrix, exterior_power_batch, operator_norm

LN2 = math.log(2.0)
_E2 = math.e ** 2
_TINY = 1e-300
GROUP = 16
_CHUNK_DOUBLES = 1 << 20


@njit(cache=True, nogil=True)
def _qr_advance(mats, Q, L):
    T, m, d = mats.shape[0], mats.shape[1], mats.shape[2]
    A = np.empty((d, d))
    for t in range(T):
        for s in range(m):
            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    for k in range(d):
                        acc += mats[t, s, i, k] * Q[t, k, j]
                    A[i, j] = acc
            for j in range(d):
                for _ in range(2):
                    for i in range(j):
                        r = 0.0
                        for k in range(d):
                            r += Q[t, k, i] * A[k, j]
                        for k in range(d):
                            A[k, j] -= r * Q[t, k, i]
                nrm2 = 0.0
                for k in range(d):
                    nrm2 += A[k, j] * A[k, j]
                nrm = math.sqrt(nrm2)
                if not (nrm > _TINY) or not math.isfinite(nrm):
                    return t, s
                for k in range(d):
                    Q[t, k, j] = A[k, j] / nrm
                L[t, j] += math.log(nrm)
    return -1, -1


@njit(cache=True, nogil=True)
def _rescaled_advance(mats, M, expo):
    T, m, d = mats.shape[0], mats.shape[1], mats.shape[2]
    tmp = np.empty((d, d))
    for t in range(T):
        for s in range(m):
            f2 = 0.0
            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    for k in range(d):
                        acc += mats[t, s, i, k] * M[t, k, j]
                    tmp[i, j] = acc
                    f2 += acc * acc
            if not (f2 > 0.0) or not math.isfinite(f2):
                return t, s
            if f2 > _E2 or f2 < 1.0 / _E2:
                k2 = int(math.floor(0.5 * math.log2(f2) + 0.5))
                scale = 2.0 ** (-k2)
                for i in range(d):
                    for j in range(d):
                        tmp[i, j] *= scale
                expo[t] += k2
            for i in range(d):
                for j in range(d):
                    M[t, i, j] = tmp[i, j]
    return -1, -1


def _chunk(trials, d):
    return max(64, _CHUNK_DOUBLES // max(1, trials * d * d))


def _groups(trials, offset=0, size=GROUP):
    ids = np.arange(offset, offset + trials, dtype=np.int64)
    return [ids[i:i + size] for i in range(0, trials, size)]


@dataclass
class CocycleState:
    frame: np.ndarray
    log_diag: np.ndarray
    steps: int = 0

    @classmethod
    def fresh(cls, d):
        return cls(np.eye(d), np.zeros(d), 0)


def qr_step(state, X):
    """One re-orthonormalization step: X Q = Q' R, L_i += ln R_ii."""
    X = as_matrix(X)
    Q = state.frame.copy()[None]
    L = state.log_diag.copy()[None]
    t, _ = _qr_advance(np.ascontiguousarray(X[None, None]), Q, L)
    if t >= 0:
        raise SingularInput(f"rank-deficient step after {state.steps} steps")
    return CocycleState(Q[0], L[0], state.steps + 1)


@dataclass
class RescaledProduct:
    """Pi_n = 2^exponent * core, with ||core||_F kept in [1/e, e] by exact power-of-two rescaling."""

    core: np.ndarray
    exponent: int = 0
    steps: int = 0

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d), 0, 0)

    @property
    def log_scale(self):
        return self.exponent * LN2

    def log_norm(self):
        return self.log_scale + math.log(operator_norm(self.core))

    def matrix(self):
        return np.ldexp(self.core, self.exponent)


def rescaled_multiply(rp, X):
    """Return the product X * Pi_n as a new RescaledProduct."""
    X = as_matrix(X)
    M = rp.core.copy()[None]
    e = np.array([rp.exponent], dtype=np.int64)
    t, _ = _rescaled_advance(np.ascontiguousarray(X[None, None]), M, e)
    if t >= 0:
        raise SingularInput("product collapsed to zero or overflowed")
    return RescaledProduct(M[0], int(e[0]), rp.steps + 1)


def rescaled_product(mats, start=None):
    """Ordered product mats[-1] ... mats[0] (times ``start``) as a RescaledProduct."""
    mats = np.ascontiguousarray(mats, dtype=float)
    d = mats.shape[-1]
    start = start or RescaledProduct.identity(d)
    M = start.core.copy()[None]
    e = np.array([start.exponent], dtype=np.int64)
    if len(mats):
        t, s = _rescaled_advance(mats[None], M, e)
        if t >= 0:
            raise SingularInput(f"product collapsed at factor {s}")
    return RescaledProduct(M[0], int(e[0]), start.steps + len(mats))


@dataclass
class LyapunovEstimate:
    """Mean exponents over trials with across-trial standard errors (nats/step)."""

    gammas: np.ndarray
    stderr: np.ndarray
    N: int
    trials: int
    per_trial: np.ndarray
    notes: list = field(default_factory=list)

    @property
    def sum_gammas(self):
        return float(self.gammas.sum())

    @property
    def sum_stderr(self):
        if self.trials < 2:
            return float("nan")
        return float(self.per_trial.sum(axis=1).std(ddof=1) / math.sqrt(self.trials))


def _stderr(samples):
    if samples.shape[0] < 2:
        return np.full(samples.shape[1:], np.nan)
    return samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0])


def lyapunov_spectrum(driver, N, trials, seed=0, *, trial_offset=0, threads=None):
    """Estimate gamma_1 >= ... >= gamma_d from ``trials`` independent runs of length N."""
    if N < 1 or trials < 1:
        raise ValueError("N and trials must be >= 1")
    d = driver.dim

    def run(ids):
        stream = driver.open(seed, ids)
        Q = np.tile(np.eye(d), (len(ids), 1, 1))
        L = np.zeros((len(ids), d))
        chunk = _chunk(len(ids), d)
        done = 0
        while done < N:
            m = min(chunk, N - done)
            mats = np.ascontiguousarray(stream.take(m), dtype=float)
            t, s = _qr_advance(mats, Q, L)
            if t >= 0:
                raise SingularInput(f"trial {ids[t]}, step {done + s + 1}: rank-deficient matrix")
            done += m
        return L

    L = np.concatenate(map_ordered(run, _groups(trials, trial_offset), threads))
    per_trial = -np.sort(-L / N, axis=1)
    return LyapunovEstimate(per_trial.mean(axis=0), _stderr(per_trial), N, trials,
                            per_trial, list(driver.notes))


def sample_log_norms(driver, n, trials, seed=0, *, trial_offset=0, skip=0, threads=None):
    """ln ||X_{skip+n} ... X_{skip+1}|| for each of ``trials`` realizations."""
    d = driver.dim

    def run(ids):
        stream = driver.open(seed, ids)
        stream.skip(skip)
        M = np.tile(np.eye(d), (len(ids), 1, 1))
        e = np.zeros(len(ids), dtype=np.int64)
        chunk = _chunk(len(ids), d)
        done = 0
        while done < n:
            m = min(chunk, n - done)
            mats = np.ascontiguousarray(stream.take(m), dtype=float)
            t, s = _rescaled_advance(mats, M, e)
            if t >= 0:
                raise SingularInput(f"trial {ids[t]}, step {done + s + 1}: product collapsed")
            done += m
        return e * LN2 + np.log(np.linalg.norm(M, 2, axis=(1, 2)))

    group = max(GROUP, min(4096, _CHUNK_DOUBLES // max(1, n * d * d)))
    return np.concatenate(map_ordered(run, _groups(trials, trial_offset, group), threads))


def exterior_log_norms(stream, N, d):
    """ln ||wedge^k Pi_N|| for k = 1..d from one matrix stream (exact rescaled products)."""
    products = [RescaledProduct.identity(exterior_power_batch(np.eye(d), k).shape[0])
                for k in range(1, d + 1)]
    done = 0
    chunk = 4096
    while done < N:
        m = min(chunk, N - done)
        mats = stream.take(m)
        products = [rescaled_product(exterior_power_batch(mats, k), products[k - 1])
                    for k in range(1, d + 1)]
        done += m
    return np.array([p.log_norm() for p in products]), products


def singular_exponents_exact(driver, N, seed=0, trial=0):
    """(1/N) ln s_i(Pi_N), i = 1..d, for one realization.

    s_1 ... s_k = ||wedge^k Pi_N||, so each ln s_i is a difference of exterior
    log norms; this stays accurate when Pi_N is far too ill-conditioned for a
    direct SVD.
    """
    d = driver.dim
    logs, _ = exterior_log_norms(driver.stream(seed, trial), N, d)
    return np.diff(np.concatenate([[0.0], logs])) / N


@dataclass
class Estimate:
    value: float
    stderr: float


def wedge_exponent(driver, k, N, trials, seed=0, *, threads=None):
    """Top exponent of the k-th exterior power driver, i.e. an estimate of gamma_1 + ... + gamma_k."""
    est = lyapunov_spectrum(WedgeDriver(driver, k), N, trials, seed, threads=threads)
    return Estimate(float(est.gammas[0]), float(est.stderr[0]))
