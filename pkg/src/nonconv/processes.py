"""Scalar driving processes: i.i.d. samplers and finite-state Markov chains.

Both read their randomness from :mod:`nonconv.rng`, so the value at index j
of stream s is fixed once the seed is fixed. Markov paths are generated by
walking the chain from index 0, one counter-based uniform per transition;
several cursors over the same stream therefore see the same realization.
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import rng
from .errors import NotErgodic


class Sampler:
    """Maps counter-based uniforms to draws of a scalar law."""

    nwords = 1
    support = None  # finite support values, if any

    def transform(self, u):
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class FiniteSampler(Sampler):
    values: tuple
    probs: tuple = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = self.probs
        if probs is None:
            probs = (1.0 / len(values),) * len(values)
        probs = tuple(float(p) for p in probs)
        if len(probs) != len(values) or not values:
            raise ValueError("values and probs must be non-empty and equal length")
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("probs must be a probability vector")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_cum", np.cumsum(probs)[:-1])
        object.__setattr__(self, "_vals", np.array(values))

    @property
    def support(self):
        return self.values

    def transform(self, u):
        return self._vals[np.searchsorted(self._cum, u[..., 0], side="right")]

    def describe(self):
        return {"kind": "finite", "values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class UniformSampler(Sampler):
    low: float = 0.0
    high: float = 1.0

    def transform(self, u):
        return self.low + (self.high - self.low) * u[..., 0]

    def describe(self):
        return {"kind": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class NormalSampler(Sampler):
    mean: float = 0.0
    std: float = 1.0
    nwords = 2

    def transform(self, u):
        # Box-Muller on (0, 1] x [0, 1)
        radius = np.sqrt(-2.0 * np.log1p(-u[..., 0]))
        return self.mean + self.std * radius * np.cos(2.0 * np.pi * u[..., 1])

    def describe(self):
        return {"kind": "normal", "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class ConstantSampler(Sampler):
    value: float = 0.0

    @property
    def support(self):
        return (self.value,)

    def transform(self, u):
        return np.full(u.shape[:-1], float(self.value))

    def describe(self):
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True, eq=False)
class IIDProcess:
    """xi_1, xi_2, ... i.i.d. with the law of ``sampler``."""

    sampler: Sampler
    kind = "iid"

    def describe(self):
        return {"kind": "iid", "sampler": self.sampler.describe()}


@dataclass(frozen=True, eq=False)
class MarkovProcess:
    """Finite-state chain xi_0, xi_1, ... with values ``states``.

    ``start`` is either a state index or a probability vector for xi_0.
    """

    states: tuple
    transition: np.ndarray
    start: object = 0
    notes: list = field(default_factory=list)
    kind = "markov"

    def __post_init__(self):
        P = np.array(self.transition, dtype=float)
        states = tuple(float(s) for s in self.states)
        S = len(states)
        if P.shape != (S, S):
            raise ValueError(f"transition must be {S}x{S}")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("transition rows must be probability vectors (tolerance 1e-12)")
        if np.isscalar(self.start) or np.ndim(self.start) == 0:
            s0 = int(self.start)
            if not 0 <= s0 < S:
                raise ValueError("start state out of range")
            start = np.zeros(S)
            start[s0] = 1.0
        else:
            start = np.array(self.start, dtype=float)
            if start.shape != (S,) or np.any(start < 0) or abs(start.sum() - 1.0) > 1e-12:
                raise ValueError("start distribution must be a probability vector")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "_start_dist", start)
        object.__setattr__(self, "_cum", np.cumsum(P, axis=1))
        object.__setattr__(self, "_start_cum", np.cumsum(start))
        object.__setattr__(self, "_vals", np.array(states))

    @property
    def support(self):
        return self.states

    @property
    def start_distribution(self):
        return self._start_dist.copy()

    def is_ergodic(self):
        from .mixing import stationary_distribution
        try:
            stationary_distribution(self.transition)
        except NotErgodic:
            return False
        return True

    def describe(self):
        start = self.start if np.ndim(self.start) == 0 else list(np.asarray(self.start, float))
        return {"kind": "markov", "states": list(self.states),
                "transition": self.transition.tolist(), "start": start}


@njit(inline="always")
def _draw(cum, u):
    k = 0
    last = cum.shape[0] - 1
    while k < last and u >= cum[k]:
        k += 1
    return k


@njit(cache=True, nogil=True)
def _walk(cum, start_cum, seed, streams, indices, cur_index, cur_state, out):
    """Advance one cursor per stream through ``indices`` (increasing, >= 0)."""
    for t in range(streams.shape[0]):
        j = cur_index[t]
        s = cur_state[t]
        stream = streams[t]
        if j < 0:
            s = _draw(start_cum, rng.word_uniform(seed, stream, 0, 1))
            j = 0
        for m in range(indices.shape[0]):
            target = indices[m]
            while j < target:
                j += 1
                s = _draw(cum[s], rng.word_uniform(seed, stream, j, 0))
            out[t, m] = s
        cur_index[t] = j
        cur_state[t] = s


class MarkovCursor:
    """Streaming position of one chain realization per trial stream."""

    def __init__(self, process, seed, streams):
        self.process = process
        self.seed = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
        self.streams = np.ascontiguousarray(streams, dtype=np.uint64)
        self.reset()

    def reset(self):
        T = self.streams.shape[0]
        self.index = np.full(T, -1, dtype=np.int64)
        self.state = np.zeros(T, dtype=np.int64)

    def advance(self, indices):
        """State indices at ``indices`` (increasing, not behind the cursor)."""
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        if indices.size and (indices[0] < 0 or np.any(indices[0] < self.index)):
            raise ValueError("Markov cursor cannot move backwards")
        out = np.empty((self.streams.shape[0], indices.shape[0]), dtype=np.int64)
        _walk(self.process._cum, self.process._start_cum, self.seed, self.streams,
              indices, self.index, self.state, out)
        return out


def iid_values(process, seed, streams, indices):
    """Values xi_j, j in ``indices``, for each stream: shape (len(streams), len(indices))."""
    u = rng.uniforms(seed, streams, indices, process.sampler.nwords)
    return process.sampler.transform(u)


def sample_paths(process, indices, seed, streams):
    """Realizations (xi_j)_{j in indices} for several streams at once."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size > 1 and np.any(np.diff(indices) <= 0):
        raise ValueError("indices must be strictly increasing")
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    if process.kind == "iid":
        return iid_values(process, seed, streams, indices)
    cursor = MarkovCursor(process, seed, streams)
    return process._vals[cursor.advance(indices)]


def sample_path(process, indices, seed, stream=0):
    """One realization (xi_j)_{j in indices}; deterministic given (seed, stream)."""
    return sample_paths(process, indices, seed, [stream])[0]
