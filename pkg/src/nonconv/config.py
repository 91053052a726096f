"""Experiment configuration files (TOML).

Layout::

    kind = "compare"            # spectrum | compare | tails | avalanche | mixing | schrodinger | partition
    seed = 2024

    [driver.schedule]           # affine {a, b} | table {values} | polynomial {coefficients}
    [driver.process]            # iid {sampler = {...}} | markov {states, transition, start}
    [driver.matrix_function]    # schrodinger {lambda} | diag_exp | rotation | constant {matrix} | gaussian_sl {dim}
    [run]                       # experiment parameters, see RunParams
    [validation]                # sigma, n_max for the separation check
    [output]                    # dir, svg

Every key is checked; unknown keys and type errors are reported with their
dotted location.
"""

import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import matrix_functions as mf
from .errors import ConfigError
from .processes import (ConstantSampler, FiniteSampler, IIDProcess, MarkovProcess, NormalSampler,
                        UniformSampler)
from .schedules import IndexSchedule, check_separation

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = ("spectrum", "compare", "tails", "avalanche", "mixing", "schrodinger", "partition")
SEED_MASK = (1 << 64) - 1


@dataclass
class RunParams:
    n: int = 10_000
    trials: int = 8
    epsilons: list = field(default_factory=lambda: [0.25])
    ns: list = field(default_factory=lambda: [25, 50, 100, 200, 400])
    side: str = "upper"
    gamma_ref: float = None
    lambda_grid: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0])
    kappa: float = 1.0
    m1: int = 10
    c_gap: float = 10.0
    c_error: float = 2.0
    b_floor: float = None
    trial: int = 0
    alpha: float = None
    n_max: int = 60
    layouts: list = field(default_factory=list)
    event: str = "first_state"
    threshold: float = 0.0
    k: int = None


@dataclass
class ValidationParams:
    sigma: float = 1.0
    n_max: int = 10_000


@dataclass
class OutputParams:
    dir: str = "results"
    svg: bool = False


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    schedule: dict
    process: dict
    matrix_function: dict
    run: RunParams
    validation: ValidationParams
    output: OutputParams

    def echo(self):
        """Plain-dict form, suitable for TOML-free round trips through the manifest."""
        out = {"kind": self.kind, "seed": self.seed, "driver": {"process": self.process},
               "run": _drop_none(asdict(self.run)),
               "validation": asdict(self.validation),
               "output": asdict(self.output)}
        if self.schedule is not None:
            out["driver"]["schedule"] = self.schedule
        if self.matrix_function is not None:
            out["driver"]["matrix_function"] = self.matrix_function
        return out


def _drop_none(d):
    return {k: v for k, v in d.items() if v is not None}


# key -> (python types, required)
_SCHEDULE_KEYS = {
    "affine": {"a": (list, True), "b": (list, False)},
    "table": {"values": (list, True)},
    "polynomial": {"coefficients": (list, True)},
}
_SAMPLER_KEYS = {
    "finite": {"values": (list, True), "probs": (list, False)},
    "uniform": {"low": ((int, float), False), "high": ((int, float), False)},
    "normal": {"mean": ((int, float), False), "std": ((int, float), False)},
    "constant": {"value": ((int, float), False)},
}
_PROCESS_KEYS = {
    "iid": {"sampler": (dict, True)},
    "markov": {"states": (list, True), "transition": (list, True), "start": ((int, list), False)},
}
_MATRIX_KEYS = {
    "schrodinger": {"lambda": ((int, float), False)},
    "diag_exp": {},
    "rotation": {},
    "constant": {"matrix": (list, True)},
    "gaussian_sl": {"dim": (int, True)},
}
_RUN_TYPES = {
    "n": int, "trials": int, "epsilons": list, "ns": list, "side": str, "gamma_ref": (int, float),
    "lambda_grid": list, "kappa": (int, float), "m1": int, "c_gap": (int, float),
    "c_error": (int, float), "b_floor": (int, float), "trial": int, "alpha": (int, float),
    "n_max": int, "layouts": list, "event": str, "threshold": (int, float), "k": int,
}


class _Collector:
    def __init__(self):
        self.errors = []

    def add(self, where, msg):
        self.errors.append(f"{where}: {msg}")


def _typecheck(value, types):
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        return False
    return isinstance(value, types)


def _section(col, table, where, spec, kinds_key="kind"):
    if not isinstance(table, dict):
        col.add(where, "expected a table")
        return None
    kind = table.get(kinds_key)
    if kind not in spec:
        col.add(f"{where}.{kinds_key}", f"must be one of {sorted(spec)}, got {kind!r}")
        return None
    allowed = spec[kind]
    for key, value in table.items():
        if key == kinds_key:
            continue
        if key not in allowed:
            col.add(f"{where}.{key}", f"unknown key for kind {kind!r}")
        elif not _typecheck(value, allowed[key][0]):
            col.add(f"{where}.{key}", f"wrong type {type(value).__name__}")
    for key, (_, required) in allowed.items():
        if required and key not in table:
            col.add(f"{where}.{key}", "required key missing")
    return table


def _dataclass_section(col, cls, table, where, types=None):
    if table is None:
        return cls()
    if not isinstance(table, dict):
        col.add(where, "expected a table")
        return cls()
    names = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in table.items():
        if key not in names:
            col.add(f"{where}.{key}", "unknown key")
            continue
        expected = types[key] if types else type(getattr(cls(), key))
        if not _typecheck(value, expected):
            col.add(f"{where}.{key}", f"wrong type {type(value).__name__}")
            continue
        kwargs[key] = value
    return cls(**kwargs)


def from_dict(raw, seed_override=None):
    """Parse and shape-check a config mapping; raises ConfigError with all problems found."""
    col = _Collector()
    if not isinstance(raw, dict):
        raise ConfigError(["<root>: expected a table"])
    for key in raw:
        if key not in ("kind", "seed", "driver", "run", "validation", "output"):
            col.add(key, "unknown key")
    kind = raw.get("kind")
    if kind not in KINDS:
        col.add("kind", f"must be one of {list(KINDS)}, got {kind!r}")
    seed = raw.get("seed", 0) if seed_override is None else seed_override
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= SEED_MASK:
        col.add("seed", "must be an unsigned 64-bit integer")
    driver = raw.get("driver", {})
    if not isinstance(driver, dict):
        col.add("driver", "expected a table")
        driver = {}
    for key in driver:
        if key not in ("schedule", "process", "matrix_function"):
            col.add(f"driver.{key}", "unknown key")
    schedule = None
    if "schedule" in driver or kind != "mixing":
        schedule = _section(col, driver.get("schedule"), "driver.schedule", _SCHEDULE_KEYS)
    process = _section(col, driver.get("process"), "driver.process", _PROCESS_KEYS)
    if process is not None and process.get("kind") == "iid" and "sampler" in process:
        _section(col, process["sampler"], "driver.process.sampler", _SAMPLER_KEYS)
    matrix = driver.get("matrix_function")
    if matrix is None and kind != "schrodinger" and kind != "mixing":
        col.add("driver.matrix_function", "required section missing")
    elif matrix is not None:
        _section(col, matrix, "driver.matrix_function", _MATRIX_KEYS)
    run = _dataclass_section(col, RunParams, raw.get("run"), "run", _RUN_TYPES)
    validation = _dataclass_section(col, ValidationParams, raw.get("validation"), "validation",
                                    {"sigma": (int, float), "n_max": int})
    output = _dataclass_section(col, OutputParams, raw.get("output"), "output",
                                {"dir": str, "svg": bool})
    if col.errors:
        raise ConfigError(col.errors)
    return ExperimentConfig(kind, int(seed), schedule, process, matrix, run, validation, output)


def load(path, seed_override=None):
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError([f"{path}: {exc}"]) from None
    return from_dict(raw, seed_override)


# ---------------------------------------------------------------------------
# object construction

def build_schedule(spec):
    kind = spec["kind"]
    if kind == "affine":
        return IndexSchedule.affine(spec["a"], spec.get("b"))
    if kind == "table":
        return IndexSchedule.from_table(spec["values"])
    return IndexSchedule.polynomial(spec["coefficients"])


def build_process(spec):
    if spec["kind"] == "markov":
        return MarkovProcess(spec["states"], spec["transition"], spec.get("start", 0))
    s = spec["sampler"]
    kind = s["kind"]
    if kind == "finite":
        sampler = FiniteSampler(s["values"], s.get("probs"))
    elif kind == "uniform":
        sampler = UniformSampler(float(s.get("low", 0.0)), float(s.get("high", 1.0)))
    elif kind == "normal":
        sampler = NormalSampler(float(s.get("mean", 0.0)), float(s.get("std", 1.0)))
    else:
        sampler = ConstantSampler(float(s.get("value", 0.0)))
    return IIDProcess(sampler)


def build_matrix_function(spec, ell, lam=None):
    kind = spec["kind"] if spec else "schrodinger"
    if kind == "schrodinger":
        value = lam if lam is not None else float((spec or {}).get("lambda", 0.0))
        return mf.schrodinger(value, ell=ell)
    if kind == "diag_exp":
        return mf.diag_exp(ell)
    if kind == "rotation":
        return mf.rotation(ell)
    if kind == "constant":
        return mf.constant(spec["matrix"], ell)
    return mf.gaussian_sl(spec["dim"])


# ---------------------------------------------------------------------------
# static validation

def validate(config):
    """Diagnostics that would prevent a meaningful run; an empty list means runnable."""
    diags = []
    schedule = process = F = None
    if config.schedule is not None:
        try:
            schedule = build_schedule(config.schedule)
        except ValueError as exc:
            diags.append(f"driver.schedule: {exc}")
    try:
        process = build_process(config.process)
    except ValueError as exc:
        diags.append(f"driver.process: {exc}")
    if config.kind != "mixing" and schedule is not None:
        try:
            F = build_matrix_function(config.matrix_function, schedule.ell)
        except ValueError as exc:
            diags.append(f"driver.matrix_function: {exc}")
        if F is not None and F.ell is not None and F.ell != schedule.ell:
            diags.append(f"driver.matrix_function: takes {F.ell} arguments but the schedule "
                         f"has l = {schedule.ell} maps")
    if schedule is not None and process is not None and process.kind == "markov" \
            and schedule.kind != "affine":
        diags.append("driver.schedule: Markov-driven products require affine index maps "
                     "q_i(n) = a_i n + b_i; got a "
                     f"{schedule.description.get('kind', schedule.kind)} schedule")
    if schedule is not None:
        v = config.validation
        try:
            sep = check_separation(schedule, v.sigma, v.n_max)
            if not sep.ok:
                i, n = sep.violations[0]
                diags.append(f"driver.schedule: separation condition q_{i + 1}(n) >= "
                             f"q_{i}(n + floor({v.sigma:g} ln n)) fails up to n_max = {v.n_max}; "
                             f"first violation at n = {n}")
        except ValueError as exc:
            diags.append(f"driver.schedule: {exc}")
    diags.extend(_check_run(config, process, F))
    return diags


def _check_run(config, process, F):
    r, kind, out = config.run, config.kind, []
    if r.n < 1:
        out.append("run.n: must be >= 1")
    if r.trials < 1:
        out.append("run.trials: must be >= 1")
    if r.alpha is not None and not r.alpha > 0:
        out.append("run.alpha: moment exponent must be positive")
    if kind == "tails":
        if r.trials < 100:
            out.append("run.trials: tail estimation needs at least 100 trials")
        if not r.ns or any(not isinstance(n, int) or n < 1 for n in r.ns) or \
                any(b <= a for a, b in zip(r.ns, r.ns[1:])):
            out.append("run.ns: must be strictly increasing positive integers")
        if not r.epsilons or any(not e > 0 for e in r.epsilons):
            out.append("run.epsilons: must be positive")
        if r.side not in ("upper", "lower", "two_sided"):
            out.append("run.side: must be upper, lower or two_sided")
    if kind == "schrodinger":
        if config.matrix_function is not None and config.matrix_function["kind"] != "schrodinger":
            out.append("driver.matrix_function: the schrodinger experiment uses the schrodinger "
                       "matrix function")
        grid = np.asarray(r.lambda_grid, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            out.append("run.lambda_grid: must be strictly increasing and non-empty")
    if kind in ("avalanche", "partition"):
        if not r.kappa > 0:
            out.append("run.kappa: must be positive")
        elif r.m1 < 1 or math.floor((2.0 / r.kappa) * math.log(max(r.m1, 1))) < 1:
            out.append("run.m1: r(m1) = floor((2/kappa) ln m1) must be >= 1")
        if r.n <= r.m1:
            out.append("run.n: must exceed m1")
    if kind == "mixing":
        if process is not None and process.kind != "markov":
            out.append("driver.process: the mixing experiment needs a Markov process")
        for i, layout in enumerate(r.layouts):
            try:
                wins = [(int(m), int(n)) for m, n in layout]
            except (TypeError, ValueError):
                out.append(f"run.layouts[{i}]: expected a list of [m, n] pairs")
                continue
            if any(m > n for m, n in wins) or any(w[0] <= v[1] for v, w in zip(wins, wins[1:])) \
                    or any(m < 0 for m, _ in wins):
                out.append(f"run.layouts[{i}]: windows must be increasing and disjoint")
        if r.event not in ("first_state", "mean_above"):
            out.append("run.event: must be first_state or mean_above")
    return out
