"""Command-line front end.

    udwrate <task> --config <file> [--out <dir>] [--threads N] [--validate]

Each task writes ``<out>/<task>.csv`` (plus a PNG for the figure tasks).
CSV files start with ``#`` metadata lines (tool version, config SHA-256,
task), then a header row. Rows follow the grid order of the config, so the
same config always yields byte-identical CSV.

Exit codes: 0 success, 1 configuration error, 2 numerical failure. A JSON
summary goes to stdout on success and to stderr otherwise.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .experiment import TASKS, ConfigError, ExperimentConfig, build_worldline, parse_config

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

FIG1_X = (25.0, 50.0, 100.0)
FIG1_GRID = tuple(float(v) for v in np.linspace(1.0, 10.0, 91))
FIG2_V0 = (0.01, 0.1, 0.5, 0.99)
FIG2_GRID = tuple(float(v) for v in np.linspace(1.0, 10.0, 19))


class NumericalFailure(RuntimeError):
    """A task could not produce its output."""


def _numeric_errors():
    from .events import RateScanError
    from .rate.contour import TruncationError
    from .rate.poles import PoleFindingError
    from .rate.residue import ResidueError
    from .worldline import StripError
    return (PoleFindingError, ResidueError, TruncationError, RateScanError, StripError,
            FloatingPointError, OverflowError, ZeroDivisionError)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return ";".join(str(x) for x in v)
    return str(v)


class Table:
    """Rows plus metadata, rendered as CSV."""

    def __init__(self, header: Sequence[str], meta: dict):
        self.header = list(header)
        self.meta = dict(meta)
        self.rows: List[list] = []

    def add(self, *row):
        self.rows.append(list(row))

    def errors(self):
        if "errors" not in self.header:
            return []
        i = self.header.index("errors")
        return [r for r in self.rows if r[i]]

    def text(self):
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}={v}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.header)
        for r in self.rows:
            wr.writerow([_cell(v) for v in r])
        return buf.getvalue()


def _pool(threads):
    n = threads if threads else (os.cpu_count() or 1)
    return ThreadPoolExecutor(max_workers=max(1, int(n)))


def _err(exc):
    return f"{type(exc).__name__}: {exc}"


# -- tasks ------------------------------------------------------------------------

def _detector(cfg: ExperimentConfig):
    return cfg.detector.build(cfg.energies())


def task_spectrum(cfg, threads, validate, meta):
    from .rate.engine import spectrum
    w = build_worldline(cfg.worldline)
    tau = cfg.grid.tau[0] if cfg.grid.tau else 0.0
    det = _detector(cfg)
    sp = spectrum(w, tau, det, validate=validate)
    t = Table(["E", "P_over_alpha", "n_poles", "oracle_residual", "flags", "errors"],
              {**meta, "worldline": sp.descriptor, "tau": repr(float(tau)), "sigma": repr(det.sigma)})
    for r in sp.rows:
        t.add(r.E, r.P_over_alpha, r.n_poles_used, r.oracle_residual, r.flags, r.error)
    return t


def task_rate_vs_time(cfg, threads, validate, meta):
    from .rate.engine import spectrum
    w = build_worldline(cfg.worldline)
    det = _detector(cfg)

    def one(tau):
        try:
            return spectrum(w, tau, det, validate=validate)
        except Exception as exc:  # noqa: BLE001 - recorded per row
            return exc

    with _pool(threads) as ex:
        results = list(ex.map(one, cfg.grid.tau))
    t = Table(["tau", "E", "P_over_alpha", "n_poles", "oracle_residual", "flags", "errors"],
              {**meta, "worldline": w.descriptor(), "sigma": repr(det.sigma)})
    for tau, sp in zip(cfg.grid.tau, results):
        if isinstance(sp, Exception):
            for e in sorted(det.energy_grid):
                t.add(tau, e, math.nan, 0, None, (), _err(sp))
            continue
        for r in sp.rows:
            t.add(tau, r.E, r.P_over_alpha, r.n_poles_used, r.oracle_residual, r.flags, r.error)
    return t


def task_roots(cfg, threads, validate, meta):
    from .rate.poles import find_poles
    w = build_worldline(cfg.worldline)
    tau = cfg.grid.tau[0] if cfg.grid.tau else 0.0
    det = _detector(cfg)
    ps = find_poles(w, tau, det)
    t = Table(["w_real", "w_imag", "multiplicity"],
              {**meta, "worldline": w.descriptor(), "tau": repr(float(tau)), "sigma": repr(det.sigma),
               "search_re": f"{ps.re_min!r}..{ps.re_max!r}", "search_im": repr(ps.im_max),
               "winding_total": ps.winding_total})
    for p in ps:
        t.add(float(p.w.real), float(p.w.imag), p.multiplicity)
    return t


def task_average(cfg, threads, validate, meta):
    from .rate.averaging import AveragedKernel, period
    from .rate.engine import ResiduePlan
    w = build_worldline(cfg.worldline)
    det = _detector(cfg)
    t = Table(["E", "P_bar_over_alpha", "flags", "errors"],
              {**meta, "worldline": w.descriptor(), "sigma": repr(det.sigma), "period": repr(period(w))})
    grid = sorted(det.energy_grid)
    try:
        res = ResiduePlan(AveragedKernel(w), det).evaluate(grid)
    except _numeric_errors() as exc:
        for e in grid:
            t.add(e, math.nan, (), _err(exc))
        return t
    for r in res:
        t.add(r.energy, r.value, r.flags, "")
    return t


def task_sample(cfg, threads, validate, meta):
    from .events import Band, sample_clicks
    w = build_worldline(cfg.worldline)
    s = cfg.sample
    det = cfg.detector.build()
    train = sample_clicks(w, Band(s.band_min, s.band_max, s.band_de), s.horizon, cfg.run.seed, det)
    head = "".join(f"# {k}={v}\n" for k, v in meta.items())
    return head + train.to_csv()


def task_figure1(cfg, threads, validate, meta):
    from .rate.closed_forms import relative_correction
    xs = cfg.grid.x_values or FIG1_X
    grid = cfg.grid.energies or FIG1_GRID
    t = Table(["x", "E_over_Ta", "C"], {**meta, "x_values": ",".join(repr(x) for x in xs)})
    for x in xs:
        for b in grid:
            t.add(float(x), float(b), relative_correction(float(b), float(x)))
    return t


def task_figure2(cfg, threads, validate, meta):
    from .rate.averaging import AveragedKernel
    from .rate.config import DetectorConfig
    from .rate.engine import ResiduePlan
    from .worldline import RelHarmonic1D
    omega = cfg.grid.omega or 1.0
    v0s = cfg.grid.v0_values or FIG2_V0
    ratios = cfg.grid.energies or FIG2_GRID
    det = cfg.detector.build() if cfg.detector is not None else DetectorConfig(sigma=100.0 / omega)
    E = [r * omega for r in ratios]

    def one(v0):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return ResiduePlan(AveragedKernel(RelHarmonic1D(v0, omega)), det).evaluate(E)
        except Exception as exc:  # noqa: BLE001 - recorded per row
            return exc

    with _pool(threads) as ex:
        results = list(ex.map(one, v0s))
    t = Table(["v0", "E_over_omega", "P_over_alpha", "log10_P_over_alpha", "flags", "errors"],
              {**meta, "omega": repr(float(omega)), "sigma": repr(det.sigma)})
    for v0, res in zip(v0s, results):
        if isinstance(res, Exception):
            for r in ratios:
                t.add(v0, r, math.nan, math.nan, (), _err(res))
            continue
        for r, row in zip(ratios, res):
            p = row.value
            lg = math.log10(p) if p > 0 else math.nan
            t.add(v0, r, p, lg, row.flags, "")
    return t


TASK_FUNCS = {
    "spectrum": task_spectrum,
    "rate-vs-time": task_rate_vs_time,
    "roots": task_roots,
    "average": task_average,
    "sample": task_sample,
    "figure1": task_figure1,
    "figure2": task_figure2,
}


def _plot(task, table: Table, out: Path):
    from . import plotting
    h = table.header
    if task == "figure1":
        plotting.plot_figure1([(r[0], r[1], r[2]) for r in table.rows], out / "figure1.png")
    elif task == "figure2":
        i = h.index("P_over_alpha")
        plotting.plot_figure2([(r[0], r[1], r[i]) for r in table.rows], out / "figure2.png")


def run(cfg: ExperimentConfig, config_text: str, out_dir=None, threads=None, validate=None):
    """Execute ``cfg.task`` and write its outputs.

    Returns
    -------
    (int, dict)
        Exit status and a JSON-serialisable summary.
    """
    task = cfg.task
    out = Path(out_dir if out_dir is not None else (cfg.run.output or "."))
    threads = threads if threads is not None else cfg.run.threads
    validate = cfg.run.validate if validate is None else (validate or cfg.run.validate)
    meta = {
        "udwrate_version": __version__,
        "config_sha256": hashlib.sha256(config_text.encode("utf-8")).hexdigest(),
        "task": task,
    }
    try:
        result = TASK_FUNCS[task](cfg, threads, validate, meta)
    except _numeric_errors() as exc:
        return EXIT_NUMERIC, {"status": "numerical_failure", "task": task, "error": _err(exc)}
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{task}.csv"
    outputs = [str(path)]
    if isinstance(result, str):
        path.write_text(result, encoding="utf-8")
        return EXIT_OK, {"status": "ok", "task": task, "outputs": outputs}
    path.write_text(result.text(), encoding="utf-8")
    if task in ("figure1", "figure2"):
        _plot(task, result, out)
        outputs.append(str(out / f"{task}.png"))
    bad = result.errors()
    if bad:
        i = result.header.index("errors")
        return EXIT_NUMERIC, {"status": "numerical_failure", "task": task, "outputs": outputs,
                              "failed_points": len(bad),
                              "errors": [dict(zip(result.header[:2], map(_cell, r[:2])), error=r[i])
                                         for r in bad[:20]]}
    return EXIT_OK, {"status": "ok", "task": task, "outputs": outputs, "rows": len(result.rows)}


def main(argv: Optional[Sequence[str]] = None) -> int:
    p = argparse.ArgumentParser(prog="udwrate", description="Unruh-DeWitt detector rate sweeps.")
    p.add_argument("task", choices=TASKS)
    p.add_argument("--config", required=True, help="experiment configuration file")
    p.add_argument("--out", default=None, help="output directory (default: [run] output or '.')")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: CPU count)")
    p.add_argument("--validate", action="store_true", help="cross-check rates against direct quadrature")
    args = p.parse_args(argv)

    def fail(code, summary):
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
        return code

    if args.threads is not None and args.threads < 1:
        return fail(EXIT_CONFIG, {"status": "config_error",
                                  "violations": [{"line": None, "key": "--threads", "message": "must be >= 1"}]})
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return fail(EXIT_CONFIG, {"status": "config_error",
                                  "violations": [{"line": None, "key": "--config", "message": str(exc)}]})
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = parse_config(text, task=args.task)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except ConfigError as exc:
        return fail(EXIT_CONFIG, {"status": "config_error", "violations": [v.as_dict() for v in exc.violations]})
    try:
        code, summary = run(cfg, text, args.out, args.threads, args.validate)
    except (ValueError, TypeError) as exc:
        return fail(EXIT_CONFIG, {"status": "config_error", "error": _err(exc)})
    if code == EXIT_OK:
        print(json.dumps(summary, sort_keys=True))
        return code
    return fail(code, summary)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
