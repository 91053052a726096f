"""Command line entry point: ``nonconv run | validate | list-builtins | manifest-rerun``."""

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import THREADS_ENV
from .config import KINDS, from_dict, load, validate
from .errors import (ConfigError, DegenerateBlocks, InsufficientData, MarkovScheduleNotAffine,
                     NotErgodic, ProductOverflow, SingularInput, StreamExhausted)
from .experiments import SCHEMAS, run_experiment
from .matrix_functions import BUILTINS

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
NUMERICAL_ERRORS = (SingularInput, ProductOverflow, StreamExhausted, DegenerateBlocks,
                    InsufficientData, NotErgodic, FloatingPointError, OverflowError)


def _schema_text():
    lines = ["results.csv columns per experiment kind:"]
    lines += [f"  {kind:<12} {', '.join(cols)}" for kind, cols in SCHEMAS.items()]
    lines.append(f"Thread count: --threads or ${THREADS_ENV} (never changes results).")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# serialization

def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_svg(path, columns, rows, plot, width=640, height=400):
    """A plain line chart of the outcome's main series."""
    xi = columns.index(plot["x"])
    logy = plot.get("logy", False)
    groups = {}
    gi = columns.index(plot["group"]) if "group" in plot else None
    for name in plot["y"]:
        yi = columns.index(name)
        for row in rows:
            x, y = row[xi], row[yi]
            if y is None or x is None:
                continue
            y = float(y)
            if not math.isfinite(y) or (logy and y <= 0):
                continue
            key = f"{name} {plot['group']}={row[gi]:g}" if gi is not None else name
            groups.setdefault(key, []).append((float(x), math.log10(y) if logy else y))
    pad = 50
    pts = [p for g in groups.values() for p in g] or [(0.0, 0.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    x1, y1 = (x1 if x1 > x0 else x0 + 1), (y1 if y1 > y0 else y0 + 1)

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
           f'{plot.get("title", "")}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">'
           f'{plot["x"]}</text>',
           f'<text x="{pad - 5}" y="{height - pad:.1f}" text-anchor="end" font-size="10">{y0:.3g}</text>',
           f'<text x="{pad - 5}" y="{pad:.1f}" text-anchor="end" font-size="10">{y1:.3g}</text>',
           f'<text x="{pad}" y="{height - pad + 14}" text-anchor="middle" font-size="10">{x0:.3g}</text>',
           f'<text x="{width - pad}" y="{height - pad + 14}" text-anchor="middle" font-size="10">'
           f'{x1:.3g}</text>']
    for k, (name, g) in enumerate(groups.items()):
        color = colors[k % len(colors)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in g)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        out.append(f'<text x="{width - pad}" y="{pad + 14 * k}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{name}{" (log10)" if logy else ""}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# commands

def _report(diags):
    for d in diags:
        print(f"error: {d}", file=sys.stderr)


def execute(config, out_dir, threads=None, svg=False):
    """Validate and run ``config``; write outputs into ``out_dir``; return an exit code."""
    diags = validate(config)
    if diags:
        _report(diags)
        return EXIT_INVALID
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.time()
    try:
        outcome = run_experiment(config, threads)
    except MarkovScheduleNotAffine as exc:
        _report([str(exc)])
        return EXIT_INVALID
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    wall = time.time() - start
    write_csv(out / "results.csv", outcome.columns, outcome.rows)
    write_json(out / "summary.json", {"kind": config.kind, "seed": config.seed,
                                      "version": __version__, **outcome.summary})
    write_json(out / "manifest.json", {"config": config.echo(), "seed": config.seed,
                                       "version": __version__, "wall_time_s": wall})
    if svg or config.output.svg:
        write_svg(out / "plot.svg", outcome.columns, outcome.rows, outcome.plot)
    print(f"wrote {out / 'results.csv'} ({len(outcome.rows)} rows) in {wall:.1f} s")
    verdict = outcome.summary.get("verdict")
    if verdict:
        print(f"verdict: {verdict}")
    return EXIT_OK


def _load(args):
    try:
        return load(args.config, args.seed)
    except ConfigError as exc:
        _report(exc.diagnostics)
        return None
    except OSError as exc:
        _report([f"{args.config}: {exc.strerror}"])
        return None


def cmd_run(args):
    config = _load(args)
    if config is None:
        return EXIT_INVALID
    return execute(config, args.out or config.output.dir, args.threads, args.svg)


def cmd_validate(args):
    config = _load(args)
    if config is None:
        return EXIT_INVALID
    diags = validate(config)
    if diags:
        _report(diags)
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def cmd_list_builtins(args):
    print("matrix functions:")
    for name, text in BUILTINS.items():
        print(f"  {name:<12} {text}")
    print("samplers:  finite, uniform, normal, constant")
    print("processes: iid, markov")
    print("schedules: affine, table, polynomial")
    print("experiments: " + ", ".join(KINDS))
    return EXIT_OK


def cmd_manifest_rerun(args):
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        config = from_dict(manifest["config"], args.seed)
    except (OSError, ValueError, KeyError) as exc:
        diags = exc.diagnostics if isinstance(exc, ConfigError) else [f"{args.manifest}: {exc}"]
        _report(diags)
        return EXIT_INVALID
    return execute(config, args.out or config.output.dir, args.threads, args.svg)


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    p = argparse.ArgumentParser(
        prog="nonconv", description="Lyapunov exponents of nonconventional random matrix products.",
        epilog=_schema_text(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--seed", type=_u64, default=None, metavar="U64",
                        help="overrides the config seed")

    r = sub.add_parser("run", help="run an experiment", epilog=_schema_text(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(r)
    r.add_argument("--out", metavar="DIR")
    r.add_argument("--svg", action="store_true", help="also write plot.svg")
    r.add_argument("--threads", type=int, default=None, metavar="N")
    r.set_defaults(fn=cmd_run)

    v = sub.add_parser("validate", help="static checks only")
    common(v)
    v.set_defaults(fn=cmd_validate)

    b = sub.add_parser("list-builtins", help="list built-in components")
    b.set_defaults(fn=cmd_list_builtins)

    m = sub.add_parser("manifest-rerun", help="re-run from a manifest.json")
    m.add_argument("manifest", metavar="MANIFEST")
    common(m, config=False)
    m.add_argument("--out", metavar="DIR")
    m.add_argument("--svg", action="store_true")
    m.add_argument("--threads", type=int, default=None, metavar="N")
    m.set_defaults(fn=cmd_manifest_rerun)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
