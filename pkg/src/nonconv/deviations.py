"""Monte Carlo large-deviation tails, rate fits and the nonconventional versus
conventional spectrum comparison.

Every tail cell is estimated from fresh realizations (disjoint trial ids per
n), with binomial standard errors and a one-sided 95% Clopper-Pearson upper
bound so that empty cells still carry information.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta

from .cocycle import lyapunov_spectrum, sample_log_norms
from .drivers import WedgeDriver, build_X_driver, build_Y_driver
from .errors import InsufficientData

SIDES = ("upper", "lower", "two_sided")
CONFIDENCE = 0.95


def clopper_pearson_upper(count, trials, confidence=CONFIDENCE):
    if count >= trials:
        return 1.0
    return float(beta.ppf(confidence, count + 1, trials - count))


@dataclass
class TailPoint:
    n: int
    p_hat: float
    stderr: float
    bound: float  # one-sided Clopper-Pearson upper bound on the true probability
    count: int
    trials: int


@dataclass
class TailCurve:
    epsilon: float
    side: str
    points: list
    reference: float = float("nan")
    notes: list = field(default_factory=list)

    @property
    def ns(self):
        return np.array([p.n for p in self.points])

    @property
    def p_hat(self):
        return np.array([p.p_hat for p in self.points])

    @property
    def stderr(self):
        return np.array([p.stderr for p in self.points])


def _exceed(x, epsilon, side):
    if side == "upper":
        return x > epsilon
    if side == "lower":
        return x < -epsilon
    if side == "two_sided":
        return np.abs(x) > epsilon
    raise ValueError(f"side must be one of {SIDES}")


def _point(n, hits):
    trials = hits.size
    count = int(hits.sum())
    p = count / trials
    return TailPoint(int(n), p, math.sqrt(p * (1 - p) / trials), clopper_pearson_upper(count, trials),
                     count, trials)


def _check_ns(ns):
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
        raise ValueError("ns must be strictly increasing positive integers")
    return ns


def tails_from_samples(samples, ns, reference, epsilons, side="upper", notes=()):
    """One TailCurve per epsilon from shared samples; samples[i] holds (1/n_i) ln-norms."""
    curves = []
    for eps in epsilons:
        pts = [_point(n, _exceed(np.asarray(x) - reference, eps, side)) for n, x in zip(ns, samples)]
        curves.append(TailCurve(float(eps), side, pts, float(reference), list(notes)))
    return curves


def _normalized_samples(driver, ns, trials, seed, threads):
    samples, offset = [], 0
    for n in ns:
        samples.append(sample_log_norms(driver, n, trials, seed, trial_offset=offset,
                                        threads=threads) / n)
        offset += trials
    return samples


NOTE_PLUGIN = "reference value is a plug-in estimate; tails are measured around it"


def tail_curves(driver, gamma_ref, epsilons, ns, trials, side="upper", seed=0, *, threads=None):
    """Tail curves for several epsilons evaluated on the same realizations."""
    if trials < 100:
        raise ValueError("tail estimation needs at least 100 trials")
    ns = _check_ns(ns)
    samples = _normalized_samples(driver, ns, trials, seed, threads)
    return tails_from_samples(samples, ns, gamma_ref, epsilons, side, [NOTE_PLUGIN])


def tail_curve(driver, gamma_ref, epsilon, ns, trials, side="upper", seed=0, *, threads=None):
    """P{(1/n) ln ||Pi_n|| - gamma_ref > epsilon} (or the lower / two-sided version) for each n."""
    return tail_curves(driver, gamma_ref, [epsilon], ns, trials, side, seed, threads=threads)[0]


def wedge_tail(driver, gamma12_ref, epsilon, ns, trials, seed=0, side="upper", *, threads=None):
    """Tail of (1/n) ln ||wedge^2 Pi_n|| around gamma_1 + gamma_2."""
    return tail_curve(WedgeDriver(driver, 2), gamma12_ref, epsilon, ns, trials, side, seed,
                      threads=threads)


def gap_tail(driver, gap_rate_ref, epsilon, rs, trials, seed=0, start=1, *, threads=None):
    """P{gr(g(r)) < exp((gap_rate_ref - 2 epsilon) r)} for the block g(r) = X_{start+r-1} ... X_start."""
    if driver.dim < 2:
        raise ValueError("gap needs d >= 2")
    rs = _check_ns(rs)
    wedge = WedgeDriver(driver, 2)
    pts, offset = [], 0
    for r in rs:
        top = sample_log_norms(driver, r, trials, seed, trial_offset=offset, skip=start - 1,
                               threads=threads)
        w2 = sample_log_norms(wedge, r, trials, seed, trial_offset=offset, skip=start - 1,
                              threads=threads)
        pts.append(_point(r, (2.0 * top - w2) < (gap_rate_ref - 2.0 * epsilon) * r))
        offset += trials
    return TailCurve(float(epsilon), "lower", pts, float(gap_rate_ref), [NOTE_PLUGIN])


@dataclass
class DeviationRate:
    kappa_hat: float
    intercept: float
    fit_range: tuple
    r_squared: float
    points_used: int


def fit_rate(curve):
    """Least squares -ln p_hat = kappa n + const over the cells with p_hat > 0."""
    pts = [p for p in curve.points if p.p_hat > 0]
    if len(pts) < 3:
        raise InsufficientData(f"only {len(pts)} tail cells with p_hat > 0; need 3")
    n = np.array([p.n for p in pts], dtype=float)
    y = -np.log([p.p_hat for p in pts])
    slope, intercept = np.polyfit(n, y, 1)
    resid = y - (slope * n + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DeviationRate(float(slope), float(intercept), (int(n[0]), int(n[-1])), r2, len(pts))


@dataclass
class MomentReport:
    alpha: float
    D_hat: float
    ns: np.ndarray
    freq: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    alpha_inv: float
    D_hat_inv: float
    freq_inv: np.ndarray
    stderr_inv: np.ndarray
    bound_inv: np.ndarray
    violations: list

    @property
    def ok(self):
        return not self.violations


def _moment_table(log_norms, alpha, ns):
    D = float(np.mean(np.exp(alpha * log_norms)))
    hits = log_norms[None, :] * alpha >= 2.0 * np.log(ns)[:, None]
    freq = hits.mean(axis=1)
    se = np.sqrt(freq * (1 - freq) / log_norms.size)
    return D, freq, se, D / ns.astype(float) ** 2


def moment_tail_check(driver, alpha, n_max, trials, seed=0):
    """Compare P{ln||X_1|| >= (2/alpha) ln n} with D n^-2, D = E||X_1||^alpha, and the inverse analogue."""
    if alpha <= 0:
        raise ValueError("moment exponent alpha must be positive")
    d = driver.dim
    X1 = driver.open(seed, np.arange(trials)).take(1)[:, 0]
    s = np.linalg.svd(X1, compute_uv=False)
    ln_norm, ln_inv = np.log(s[:, 0]), -np.log(s[:, -1])
    ns = np.arange(1, n_max + 1)
    D, f, se, bd = _moment_table(ln_norm, alpha, ns)
    alpha_inv = alpha / (d - 1) if d > 1 else alpha
    Di, fi, sei, bdi = _moment_table(ln_inv, alpha_inv, ns)
    violations = [("norm", int(n)) for n, x, e, b in zip(ns, f, se, bd) if x > b + 3 * e]
    violations += [("inverse", int(n)) for n, x, e, b in zip(ns, fi, sei, bdi) if x > b + 3 * e]
    return MomentReport(alpha, D, ns, f, se, bd, alpha_inv, Di, fi, sei, bdi, violations)


def markov_block_bound(kappa, r, R, ell, n):
    """Block tail bound e^{-kappa r} + 8 R l n^-2 for Markov-driven products."""
    return math.exp(-kappa * r) + 8.0 * R * ell / n ** 2


@dataclass
class Comparison:
    gamma_X: object
    gamma_Y: object
    deltas: np.ndarray
    combined_stderr: np.ndarray
    compared: list  # 0-based exponent indices entering the verdict
    verdict: str
    warnings: list = field(default_factory=list)


def _simple_prefix(est):
    """k such that gamma_1 > ... > gamma_k is resolved at 3 standard errors (k >= 1)."""
    k = 1
    g, se = est.gammas, np.nan_to_num(est.stderr)
    while k < len(g) and g[k - 1] - g[k] > 3 * math.hypot(se[k - 1], se[k]):
        k += 1
    return k


def theorem_comparison(schedule, process, F, N, trials, seed=0, k=None, *, threads=None):
    """Nonconventional versus conventional spectrum with a 3-sigma consistency verdict."""
    X = build_X_driver(schedule, process, F)
    Y = build_Y_driver(schedule, process, F)
    gx = lyapunov_spectrum(X, N, trials, seed, threads=threads)
    gy = lyapunov_spectrum(Y, N, trials, seed, threads=threads)
    deltas = gx.gammas - gy.gammas
    comb = np.sqrt(np.nan_to_num(gx.stderr) ** 2 + np.nan_to_num(gy.stderr) ** 2)
    notes = list(gx.notes)
    d = len(deltas)
    if d > 1 and gy.gammas[0] - gy.gammas[1] < 3 * math.hypot(*np.nan_to_num(gy.stderr[:2])):
        notes.append("gamma_1 - gamma_2 is below 3 standard errors; simplicity of the top exponent "
                     "is not resolved")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    if process.kind == "iid":
        compared = list(range(d))
    else:
        k = k if k is not None else _simple_prefix(gy)
        compared = list(range(max(1, min(k - 1, d))))
    ok = all(abs(deltas[i]) <= 3 * comb[i] for i in compared)
    return Comparison(gx, gy, deltas, comb, compared, "consistent" if ok else "inconsistent", notes)
