"""Experiment runners behind the command line.

Each runner takes a validated :class:`~nonconv.config.ExperimentConfig` and
returns an :class:`Outcome`: a fixed-schema table for results.csv, a summary
mapping for summary.json and the series to draw in the optional SVG.
"""

from dataclasses import dataclass, field

import numpy as np

from . import avalanche as av
from . import deviations as dev
from .cocycle import lyapunov_spectrum, rescaled_product
from .config import build_matrix_function, build_process, build_schedule
from .drivers import build_X_driver
from .mixing import decoupling_gap, ergodicity_profile, phi_mixing_bound
from .schrodinger import PotentialSpec, energy_sweep

# column lists, also printed by `nonconv --help`
SCHEMAS = {
    "spectrum": ["index", "gamma", "stderr"],
    "compare": ["index", "gamma_x", "stderr_x", "gamma_y", "stderr_y", "delta", "combined_stderr",
                "compared"],
    "tails": ["epsilon", "n", "p_hat", "stderr", "bound"],
    "avalanche": ["block", "first", "last", "log_norm", "log_gap", "deficiency"],
    "mixing": ["n", "delta", "fit"],
    "schrodinger": ["lambda", "gamma1", "stderr", "loc_length"],
    "partition": ["i", "m", "r", "role"],
}


@dataclass
class Outcome:
    columns: list
    rows: list
    summary: dict
    plot: dict = field(default_factory=dict)  # {"x": name, "y": [names], "title": str}


def _driver(config):
    schedule = build_schedule(config.schedule)
    process = build_process(config.process)
    F = build_matrix_function(config.matrix_function, schedule.ell)
    return schedule, process, F


def run_spectrum(config, threads):
    schedule, process, F = _driver(config)
    r = config.run
    est = lyapunov_spectrum(build_X_driver(schedule, process, F), r.n, r.trials, config.seed,
                            threads=threads)
    rows = [[i + 1, g, s] for i, (g, s) in enumerate(zip(est.gammas, est.stderr))]
    summary = {"gammas": est.gammas.tolist(), "stderr": est.stderr.tolist(),
               "sum_gammas": est.sum_gammas, "N": r.n, "trials": r.trials, "notes": est.notes}
    return Outcome(SCHEMAS["spectrum"], rows, summary,
                   {"x": "index", "y": ["gamma"], "title": "Lyapunov spectrum"})


def run_compare(config, threads):
    schedule, process, F = _driver(config)
    r = config.run
    cmp = dev.theorem_comparison(schedule, process, F, r.n, r.trials, config.seed, r.k,
                                 threads=threads)
    rows = []
    for i in range(len(cmp.deltas)):
        rows.append([i + 1, cmp.gamma_X.gammas[i], cmp.gamma_X.stderr[i], cmp.gamma_Y.gammas[i],
                     cmp.gamma_Y.stderr[i], cmp.deltas[i], cmp.combined_stderr[i],
                     int(i in cmp.compared)])
    summary = {"verdict": cmp.verdict, "compared": [i + 1 for i in cmp.compared],
               "gamma_x": cmp.gamma_X.gammas.tolist(), "gamma_y": cmp.gamma_Y.gammas.tolist(),
               "deltas": cmp.deltas.tolist(), "combined_stderr": cmp.combined_stderr.tolist(),
               "N": r.n, "trials": r.trials, "notes": cmp.warnings}
    return Outcome(SCHEMAS["compare"], rows, summary,
                   {"x": "index", "y": ["gamma_x", "gamma_y"], "title": "X versus Y spectrum"})


def run_tails(config, threads):
    schedule, process, F = _driver(config)
    r = config.run
    driver = build_X_driver(schedule, process, F)
    notes = []
    ref = r.gamma_ref
    if ref is None:
        # plug-in reference on trial ids disjoint from the tail cells
        est = lyapunov_spectrum(driver, r.n, min(r.trials, 16), config.seed,
                                trial_offset=len(r.ns) * r.trials, threads=threads)
        ref = float(est.gammas[0])
        notes.append(f"gamma_ref estimated from {min(r.trials, 16)} runs of length {r.n}")
    curves = dev.tail_curves(driver, ref, r.epsilons, r.ns, r.trials, r.side, config.seed,
                             threads=threads)
    rows, fits = [], []
    for c in curves:
        rows.extend([c.epsilon, p.n, p.p_hat, p.stderr, p.bound] for p in c.points)
        try:
            fit = dev.fit_rate(c)
            fits.append({"epsilon": c.epsilon, "kappa_hat": fit.kappa_hat,
                         "intercept": fit.intercept, "r_squared": fit.r_squared,
                         "fit_range": list(fit.fit_range)})
        except dev.InsufficientData as exc:
            fits.append({"epsilon": c.epsilon, "kappa_hat": None, "reason": str(exc)})
    summary = {"gamma_ref": ref, "side": r.side, "trials": r.trials, "rates": fits,
               "notes": notes + [dev.NOTE_PLUGIN]}
    if r.alpha is not None:
        m = dev.moment_tail_check(driver, r.alpha, r.n_max, r.trials, config.seed)
        summary["moment_check"] = {"alpha": m.alpha, "D_hat": m.D_hat, "alpha_inv": m.alpha_inv,
                                   "D_hat_inv": m.D_hat_inv, "ok": m.ok,
                                   "violations": [list(v) for v in m.violations]}
    return Outcome(SCHEMAS["tails"], rows, summary,
                   {"x": "n", "y": ["p_hat"], "group": "epsilon", "logy": True,
                    "title": "tail probabilities"})


def run_avalanche(config, threads):
    schedule, process, F = _driver(config)
    r = config.run
    driver = build_X_driver(schedule, process, F)
    res = av.partition_pipeline(driver, r.kappa, r.m1, r.n, r.c_error, r.c_gap, config.seed,
                                r.trial, r.b_floor)
    suite = av.block_products(driver.stream(config.seed, r.trial), res.partition)
    defs = av.pair_deficiencies(suite.blocks).tolist() + [None]
    rows = [[j + 1, lo, hi, b.log_norm, b.log_gap, defs[j]]
            for j, (b, (lo, hi)) in enumerate(zip(suite.blocks, res.partition.block_ranges()))]
    rep = res.report
    summary = {"l": rep.l, "a": rep.a, "b": rep.b, "hyp_i_ok": rep.hyp_i_ok,
               "hyp_ii_ok": rep.hyp_ii_ok, "precondition_ok": rep.precondition_ok,
               "asserted": rep.asserted, "lhs": rep.lhs, "rhs_pairs": rep.rhs_pairs,
               "rhs_norms": rep.rhs_norms, "slack_pairs": rep.slack_pairs, "slack_norms": rep.slack_norms,
               "C": rep.C_used, "c": rep.c_used, "lower_bound": res.lower_bound,
               "exact": res.exact, "notes": res.notes}
    return Outcome(SCHEMAS["avalanche"], rows, summary,
                   {"x": "block", "y": ["log_gap"], "title": "block log-gaps"})


def _event(run, states):
    if run.event == "first_state":
        return lambda blocks: np.all([b[:, 0] == states[0] for b in blocks], axis=0)
    thr = run.threshold
    return lambda blocks: np.all([b.mean(axis=1) > thr for b in blocks], axis=0)


def run_mixing(config, threads):
    process = build_process(config.process)
    r = config.run
    prof = ergodicity_profile(process.transition, r.n_max)
    rows = [[n, delta, phi_mixing_bound(prof, n) / 2.0] for n, delta in prof.phi_curve]
    h = _event(r, process.states)
    layouts = []
    for layout in r.layouts:
        res = decoupling_gap(process, h, layout, prof, r.trials, config.seed)
        layouts.append({"windows": [list(w) for w in layout], "measured": res.measured,
                        "stderr": res.stderr, "bound": res.bound,
                        "ok": res.measured <= res.bound + 3 * res.stderr})
    summary = {"nu": prof.nu.tolist(), "rho": prof.rho, "R": prof.R,
               "layouts": layouts, "event": r.event, "trials": r.trials}
    return Outcome(SCHEMAS["mixing"], rows, summary,
                   {"x": "n", "y": ["delta", "fit"], "logy": True, "title": "total variation decay"})


def run_schrodinger(config, threads):
    schedule = build_schedule(config.schedule)
    process = build_process(config.process)
    r = config.run
    curve = energy_sweep(PotentialSpec(schedule, process), r.lambda_grid, r.n, r.trials,
                         config.seed, threads=threads)
    loc = curve.loc_length
    rows = [[lam, g, s, L] for lam, g, s, L in zip(curve.lambdas, curve.gammas, curve.stderr, loc)]
    summary = {"lambdas": curve.lambdas.tolist(), "gammas": curve.gammas.tolist(),
               "stderr": curve.stderr.tolist(), "N": r.n, "trials": r.trials,
               "notes": curve.notes}
    return Outcome(SCHEMAS["schrodinger"], rows, summary,
                   {"x": "lambda", "y": ["gamma1"], "title": "top exponent versus energy"})


def run_partition(config, threads):
    schedule, process, F = _driver(config)
    r = config.run
    part = av.build_partition(r.kappa, r.m1, r.n)
    driver = build_X_driver(schedule, process, F)
    suite = av.block_products(driver.stream(config.seed, r.trial), part)
    direct = rescaled_product(driver.stream(config.seed, r.trial).take(r.n)).log_norm()
    rebuilt = suite.reconstruct().log_norm()
    rows = []
    for i, m in enumerate(part.cut_points):
        role = "prefix" if i < part.j_N else ("block" if i < part.k_N else "suffix")
        rows.append([i + 1, m, part.r(m), role])
    k_last = part.cut_points[part.k_N]
    summary = {"kappa": part.kappa, "m1": part.start, "N": part.horizon, "j_N": part.j_N + 1,
               "k_N": part.k_N + 1, "blocks": part.block_count,
               "tail_length": part.horizon - k_last, "r_last": part.r(k_last),
               "direct_log_norm": direct, "reconstructed_log_norm": rebuilt,
               "reconstruction_error": abs(direct - rebuilt)}
    return Outcome(SCHEMAS["partition"], rows, summary,
                   {"x": "i", "y": ["m"], "title": "cut points"})


RUNNERS = {
    "spectrum": run_spectrum,
    "compare": run_compare,
    "tails": run_tails,
    "avalanche": run_avalanche,
    "mixing": run_mixing,
    "schrodinger": run_schrodinger,
    "partition": run_partition,
}


def run_experiment(config, threads=None):
    return RUNNERS[config.kind](config, threads)
