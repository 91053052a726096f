"""Matrix streams X_1, X_2, ... built from a schedule, a process and F.

A *driver* is an immutable description; ``driver.open(seed, trials)`` returns
a :class:`BatchStream` that yields the matrices of several independent
realizations in lockstep, shape (trials, count, d, d). ``driver.stream(seed,
trial)`` is the single-realization view.

Randomness layout: trial t of a nonconventional (X) driver reads every map
from stream lane 0 of trial t, so all q_i share one realization of xi. The
conventional (Y) driver reads map i from lane 1 + i, i.e. from l independent
copies of the process.
"""

import warnings

import numpy as np

from . import rng
from .errors import MarkovScheduleNotAffine, StreamExhausted
from .linalg import exterior_power_batch
from .processes import MarkovCursor, iid_values


class Driver:
    dim = None
    notes = ()

    def open(self, seed, trials):
        trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
        return BatchStream(self, seed, trials)

    def stream(self, seed, trial=0):
        return MatrixStream(self.open(seed, [trial]))

    # subclasses: _init_state(seed, trials) and _generate(state, n0, count)
    def _init_state(self, seed, trials):
        return None

    def _generate(self, state, n0, count):
        raise NotImplementedError


class BatchStream:
    """Lockstep streams for a batch of trials; single consumer."""

    def __init__(self, driver, seed, trials):
        self.driver = driver
        self.seed = int(seed)
        self.trials = trials
        self.reset()

    def reset(self):
        self.position = 1
        self._state = self.driver._init_state(self.seed, self.trials)

    def take(self, count):
        """Next ``count`` matrices of every trial: array (trials, count, d, d)."""
        mats = self.driver._generate(self._state, self.position, int(count))
        self.position += int(count)
        return mats

    def skip(self, count):
        chunk = 4096
        while count > 0:
            self.take(min(chunk, count))
            count -= chunk


class MatrixStream:
    """Resettable iterator over X_1, X_2, ... of one realization."""

    def __init__(self, batch):
        self._batch = batch

    @property
    def position(self):
        return self._batch.position

    @property
    def dim(self):
        return self._batch.driver.dim

    def reset(self):
        self._batch.reset()

    def take(self, count):
        return self._batch.take(count)[0]

    def __iter__(self):
        return self

    def __next__(self):
        try:
            return self.take(1)[0]
        except StreamExhausted:
            raise StopIteration from None


class CocycleDriver(Driver):
    """X_n = F(xi_{q_1(n)}, ..., xi_{q_l(n)}) (mode "X") or its decoupled twin (mode "Y")."""

    def __init__(self, schedule, process, F, mode):
        if F.ell is not None and F.ell != schedule.ell:
            raise ValueError(f"matrix function takes {F.ell} arguments, schedule has {schedule.ell}")
        if process.kind == "markov" and schedule.kind != "affine":
            raise MarkovScheduleNotAffine(
                "Markov-driven products need affine maps q_i(n) = a_i n + b_i; "
                f"got a {schedule.description.get('kind', schedule.kind)} schedule")
        self.schedule = schedule
        self.process = process
        self.F = F
        self.mode = mode
        self.dim = F.dim
        notes = []
        if process.kind == "markov" and not process.is_ergodic():
            notes.append("Markov chain is not ergodic: exponent estimates are not covered "
                         "by the limit theorems")
            warnings.warn(notes[-1], RuntimeWarning, stacklevel=3)
        self.notes = tuple(notes)

    def _lanes(self):
        if self.mode == "X":
            return [0] * self.schedule.ell
        return [1 + i for i in range(self.schedule.ell)]

    def _init_state(self, seed, trials):
        streams = [rng.trial_stream(trials, lane) for lane in self._lanes()]
        cursors = None
        if self.process.kind == "markov":
            cursors = [MarkovCursor(self.process, seed, s) for s in streams]
        return {"seed": seed, "streams": streams, "cursors": cursors}

    def _generate(self, state, n0, count):
        n = np.arange(n0, n0 + count, dtype=np.int64)
        q = self.schedule.evaluate(n)
        values = []
        for i in range(self.schedule.ell):
            if state["cursors"] is None:
                values.append(iid_values(self.process, state["seed"], state["streams"][i], q[i]))
            else:
                values.append(self.process._vals[state["cursors"][i].advance(q[i])])
        return self.F.batch(np.stack(values))


class ConstantDriver(Driver):
    """X_n = M for every n and every trial."""

    def __init__(self, M):
        self.M = np.array(M, dtype=float)
        self.dim = self.M.shape[0]

    def _init_state(self, seed, trials):
        return len(trials)

    def _generate(self, state, n0, count):
        return np.broadcast_to(self.M, (state, count) + self.M.shape).copy()


class MatrixListDriver(Driver):
    """A fixed finite sequence, identical for every trial."""

    def __init__(self, matrices):
        self.matrices = np.array(matrices, dtype=float)
        self.dim = self.matrices.shape[-1]

    def _init_state(self, seed, trials):
        return len(trials)

    def _generate(self, state, n0, count):
        end = n0 - 1 + count
        if end > len(self.matrices):
            raise StreamExhausted(f"requested X_{end}, only {len(self.matrices)} matrices")
        block = self.matrices[n0 - 1:end]
        return np.broadcast_to(block, (state,) + block.shape).copy()


class WedgeDriver(Driver):
    """The k-th exterior power of a base driver, on the base's realizations."""

    def __init__(self, base, k):
        self.base = base
        self.k = k
        self.dim = exterior_power_batch(np.eye(base.dim), k).shape[0]
        self.notes = base.notes

    def _init_state(self, seed, trials):
        return self.base._init_state(seed, trials)

    def _generate(self, state, n0, count):
        return exterior_power_batch(self.base._generate(state, n0, count), self.k)


def build_X_driver(schedule, process, F):
    """Nonconventional driver: all maps read one realization of xi."""
    return CocycleDriver(schedule, process, F, "X")


def build_Y_driver(schedule, process, F):
    """Conventional comparator: map i reads the i-th of l independent copies of xi."""
    return CocycleDriver(schedule, process, F, "Y")


def iid_matrix_driver(F, process):
    """i.i.d. matrices X_n = F(xi_{ln}, ..., xi_{ln + l - 1}) read from disjoint blocks."""
    from .schedules import IndexSchedule
    ell = F.ell or 1
    sched = IndexSchedule.affine([ell] * ell, list(range(ell)))
    return CocycleDriver(sched, process, F, "X")
