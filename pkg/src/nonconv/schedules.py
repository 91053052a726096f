"""Index schedules q_1 < ... < q_l and the separation check.

The nonconventional matrix X_n reads the driving sequence at the positions
q_1(n), ..., q_l(n). Products over blocks of length ~ sigma ln n behave like
independent products only when the maps stay far enough apart, which is what
:func:`check_separation` verifies.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeTooSmall

MAX_STORED_VIOLATIONS = 1000


@dataclass(frozen=True, eq=False)
class IndexSchedule:
    """An l-tuple of strictly increasing integer maps on n = 1, 2, ...

    ``kind`` is ``"affine"`` (q_i(n) = a_i n + b_i), ``"table"`` (explicit
    values for n = 1..L) or ``"custom"`` (vectorized callables).
    """

    kind: str
    ell: int
    slopes: tuple = ()
    offsets: tuple = ()
    table: np.ndarray = None
    funcs: tuple = ()
    description: dict = field(default_factory=dict)

    @classmethod
    def affine(cls, slopes, offsets=None):
        slopes = tuple(int(a) for a in slopes)
        offsets = tuple(int(b) for b in offsets) if offsets is not None else (0,) * len(slopes)
        if len(slopes) != len(offsets) or not slopes:
            raise ValueError("slopes and offsets must be non-empty and of equal length")
        if any(a < 1 for a in slopes) or any(b < 0 for b in offsets):
            raise ValueError("affine maps need integer slopes >= 1 and offsets >= 0")
        for i in range(len(slopes) - 1):
            a0, b0, a1, b1 = slopes[i], offsets[i], slopes[i + 1], offsets[i + 1]
            # q_i < q_{i+1} for every n >= 1 iff it holds at n = 1 and slopes do not decrease
            if a1 < a0 or a0 + b0 >= a1 + b1:
                raise ValueError(f"maps {i + 1} and {i + 2} are not strictly ordered for all n")
        return cls("affine", len(slopes), slopes=slopes, offsets=offsets,
                   description={"kind": "affine", "a": list(slopes), "b": list(offsets)})

    @classmethod
    def arithmetic(cls, ell):
        """q_i(n) = i n, i = 1..ell."""
        return cls.affine(range(1, ell + 1))

    @classmethod
    def from_table(cls, values):
        table = np.asarray(values, dtype=np.int64)
        if table.ndim != 2:
            raise ValueError("table must have shape (ell, L)")
        sched = cls("table", table.shape[0], table=table,
                    description={"kind": "table", "values": table.tolist()})
        sched.validate(table.shape[1])
        return sched

    @classmethod
    def custom(cls, funcs, description=None):
        funcs = tuple(funcs)
        return cls("custom", len(funcs), funcs=funcs,
                   description=description or {"kind": "custom"})

    @classmethod
    def polynomial(cls, coefficients):
        """q_i(n) = sum_k c_ik n^k with integer coefficients (lowest degree first)."""
        coeffs = [tuple(int(c) for c in row) for row in coefficients]

        def make(row):
            def q(n):
                n = np.asarray(n, dtype=np.int64)
                out = np.zeros_like(n)
                for c in reversed(row):
                    out = out * n + c
                return out
            return q

        return cls.custom([make(row) for row in coeffs],
                          description={"kind": "polynomial", "coefficients": [list(r) for r in coeffs]})

    @property
    def max_n(self):
        """Largest n the schedule can be evaluated at (None if unbounded)."""
        return self.table.shape[1] if self.kind == "table" else None

    def evaluate(self, n):
        """Values q_i(n) as an int64 array of shape (ell, len(n))."""
        n = np.atleast_1d(np.asarray(n, dtype=np.int64))
        if self.kind == "affine":
            a = np.array(self.slopes, dtype=np.int64)[:, None]
            b = np.array(self.offsets, dtype=np.int64)[:, None]
            return a * n[None, :] + b
        if self.kind == "table":
            if n.size and (n.min() < 1 or n.max() > self.table.shape[1]):
                raise RangeTooSmall(f"table covers n = 1..{self.table.shape[1]}")
            return self.table[:, n - 1]
        return np.stack([np.broadcast_to(np.asarray(f(n), dtype=np.int64), n.shape)
                         for f in self.funcs])

    def validate(self, n_max):
        """Check the ordering invariants on n = 1..n_max; raise ValueError if broken."""
        q = self.evaluate(np.arange(1, n_max + 1))
        if q[0, 0] < 1:
            raise ValueError("q_1(1) must be >= 1")
        if n_max > 1 and np.any(np.diff(q, axis=1) <= 0):
            i, n = np.argwhere(np.diff(q, axis=1) <= 0)[0]
            raise ValueError(f"q_{i + 1} is not strictly increasing at n = {n + 1}")
        if self.ell > 1 and np.any(np.diff(q, axis=0) <= 0):
            i, n = np.argwhere(np.diff(q, axis=0) <= 0)[0]
            raise ValueError(f"q_{i + 1}(n) >= q_{i + 2}(n) at n = {n + 1}")


@dataclass
class SeparationResult:
    """Outcome of :func:`check_separation`.

    ``n0`` is the least n0 such that the condition holds on n0..n_max, or
    None when it fails at n_max itself. ``violations`` lists (i, n) pairs
    (1-based map index), truncated to the first 1000; ``n_violations`` is
    the full count.
    """

    n0: int
    violations: list
    n_violations: int
    sigma: float
    n_max: int

    @property
    def ok(self):
        return self.n0 is not None

    @property
    def first_violation(self):
        return self.violations[0][1] if self.violations else None


def check_separation(schedule, sigma, n_max):
    """Check q_{i+1}(n) >= q_i(n + floor(sigma ln n)) for 1 <= n <= n_max."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = np.arange(1, n_max + 1, dtype=np.int64)
    if schedule.ell == 1:
        return SeparationResult(1, [], 0, sigma, n_max)
    shift = np.floor(sigma * np.log(n.astype(float))).astype(np.int64)
    reach = n_max + int(math.floor(sigma * math.log(n_max)))
    if schedule.max_n is not None and schedule.max_n < reach:
        raise RangeTooSmall(f"schedule must cover n <= {reach}, has {schedule.max_n}")
    here = schedule.evaluate(n)
    ahead = schedule.evaluate(n + shift)
    bad = here[1:] < ahead[:-1]  # (ell-1, n_max)
    pairs = np.argwhere(bad.T)  # rows (n-1, i-1), ordered by n
    count = len(pairs)
    violations = [(int(i) + 1, int(k) + 1) for k, i in pairs[:MAX_STORED_VIOLATIONS]]
    if count == 0:
        n0 = 1
    else:
        last = int(pairs[-1, 0]) + 1
        n0 = None if last == n_max else last + 1
    return SeparationResult(n0, violations, count, sigma, n_max)
