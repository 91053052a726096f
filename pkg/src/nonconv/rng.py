"""Counter-based random numbers.

Every draw is a pure function of ``(seed, stream, index)``: the Philox4x64-10
block cipher is keyed by ``(seed, stream)`` and applied to the counter
``(index, 0, 0, 0)``. No generator state is carried between calls, so a value
at index ``j`` can be produced without generating indices ``< j`` and results
do not depend on how work is split across threads.
"""

import numpy as np
from numba import njit

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

STREAMS_PER_TRIAL = 64


@njit(inline="always")
def _mulhilo(a, b):
    lo = a * b
    a_lo = a & _LO32
    a_hi = a >> _S32
    b_lo = b & _LO32
    b_hi = b >> _S32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    p3 = a_hi * b_hi
    mid = (p0 >> _S32) + (p1 & _LO32) + (p2 & _LO32)
    hi = p3 + (p1 >> _S32) + (p2 >> _S32) + (mid >> _S32)
    return hi, lo


@njit(inline="always")
def _philox(c0, c1, c2, c3, k0, k1):
    for r in range(10):
        if r > 0:
            k0 = k0 + _W0
            k1 = k1 + _W1
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


@njit(cache=True, nogil=True)
def _philox_block(counters, k0, k1):
    out = np.empty((counters.shape[0], 4), dtype=np.uint64)
    for i in range(counters.shape[0]):
        a, b, c, d = _philox(counters[i, 0], counters[i, 1], counters[i, 2],
                             counters[i, 3], k0, k1)
        out[i, 0] = a
        out[i, 1] = b
        out[i, 2] = c
        out[i, 3] = d
    return out


@njit(inline="always")
def word_uniform(seed, stream, index, word):
    """One uniform in [0, 1) from word ``word`` of the block at ``index``."""
    w = _philox(np.uint64(index), np.uint64(0), np.uint64(0), np.uint64(0),
                np.uint64(seed), np.uint64(stream))[word]
    return (w >> _S11) * _INV53


@njit(cache=True, nogil=True)
def _uniform_grid(seed, streams, indices, nwords):
    out = np.empty((streams.shape[0], indices.shape[0], nwords))
    k0 = np.uint64(seed)
    for t in range(streams.shape[0]):
        k1 = np.uint64(streams[t])
        for m in range(indices.shape[0]):
            w = _philox(np.uint64(indices[m]), np.uint64(0), np.uint64(0),
                        np.uint64(0), k0, k1)
            for j in range(nwords):
                out[t, m, j] = (w[j] >> _S11) * _INV53
    return out


def philox4x64(counters, key):
    """Raw Philox4x64-10 output blocks for an ``(n, 4)`` array of counters."""
    counters = np.ascontiguousarray(np.atleast_2d(counters), dtype=np.uint64)
    k0, k1 = (np.uint64(int(k) & 0xFFFFFFFFFFFFFFFF) for k in key)
    return _philox_block(counters, k0, k1)


def uniforms(seed, streams, indices, nwords=1):
    """Uniform draws on the grid ``streams x indices``.

    Returns an array of shape ``(len(streams), len(indices), nwords)``; entry
    ``[t, m, j]`` depends only on ``(seed, streams[t], indices[m], j)``.
    """
    streams = np.ascontiguousarray(np.atleast_1d(streams), dtype=np.uint64)
    indices = np.ascontiguousarray(np.atleast_1d(indices), dtype=np.int64)
    if nwords < 1 or nwords > 4:
        raise ValueError("nwords must be in 1..4")
    return _uniform_grid(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF), streams,
                         indices, nwords)


def trial_stream(trial, lane=0):
    """Stream id for ``lane`` of trial ``trial`` (lanes separate process copies)."""
    if not 0 <= lane < STREAMS_PER_TRIAL:
        raise ValueError("lane out of range")
    return np.asarray(trial, dtype=np.uint64) * np.uint64(STREAMS_PER_TRIAL) + np.uint64(lane)
