"""Experiment configuration files.

Grammar (UTF-8, line oriented)::

    # comment
    [section]
    key = value          # trailing comments allowed

Values are numbers, comma-separated number lists, or bare words.
``amplitudes`` and ``phases`` take ``;``-separated rows of three numbers.
A repeated key keeps its last value and emits a :class:`DuplicateKeyWarning`.
All violations are collected and reported together, each with its line.

Sections and keys
-----------------
``[worldline]``
    ``family`` plus the family's parameters (see :data:`FAMILIES`).
``[detector]``
    ``sigma`` (required), ``epsilon``, ``radius_factor``, ``tol``,
    ``residue_circle_radius``.
``[grid]``
    ``energies`` (list) or ``e_min``/``e_max``/``e_count``; ``e_unit``
    (``absolute``, ``T_a`` for ``a/2pi``, ``omega``); ``tau`` (list) or
    ``tau_min``/``tau_max``/``tau_count``; ``x_values``; ``v0_values``;
    ``omega``.
``[sample]``
    ``band_min``, ``band_max``, ``band_de``, ``horizon``.
``[run]``
    ``task``, ``threads``, ``output``, ``seed``, ``validate``.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

__all__ = [
    "TASKS",
    "FAMILIES",
    "ConfigError",
    "Violation",
    "DuplicateKeyWarning",
    "WorldlineSpec",
    "DetectorSpec",
    "GridSpec",
    "SampleSpec",
    "RunSpec",
    "ExperimentConfig",
    "parse_config",
    "render",
    "build_worldline",
]

TASKS = ("spectrum", "rate-vs-time", "roots", "average", "sample", "figure1", "figure2")

#: family -> (required parameters, optional parameters)
FAMILIES: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "Inertial": ((), ()),
    "UniformAcceleration": (("a",), ()),
    "Circular": (("a", "torsion"), ()),
    "Cusped": (("a",), ()),
    "RelHarmonic1D": (("v0", "omega"), ()),
    "ModulatedAcceleration": (("a0", "a1", "omega"), ()),
    "NonRelPeriodic": (("omega0", "amplitudes"), ("phases",)),
    "Rapidity1D": (("coeffs",), ()),
}
PERIODIC = ("RelHarmonic1D", "ModulatedAcceleration", "NonRelPeriodic")

_MATRIX_KEYS = ("amplitudes", "phases")
_LIST_KEYS = ("coeffs", "energies", "tau", "x_values", "v0_values")
_WORD_KEYS = ("family", "e_unit", "task", "output", "validate")
_INT_KEYS = ("e_count", "tau_count", "threads", "seed")

SECTIONS = {
    "worldline": ("family", "a", "torsion", "v0", "omega", "a0", "a1", "omega0", "amplitudes", "phases", "coeffs"),
    "detector": ("sigma", "epsilon", "radius_factor", "tol", "residue_circle_radius"),
    "grid": ("energies", "e_min", "e_max", "e_count", "e_unit", "tau", "tau_min", "tau_max", "tau_count",
             "x_values", "v0_values", "omega"),
    "sample": ("band_min", "band_max", "band_de", "horizon"),
    "run": ("task", "threads", "output", "seed", "validate"),
}


@dataclass(frozen=True)
class Violation:
    line: Optional[int]
    key: str
    message: str

    def __str__(self):
        where = f"line {self.line}" if self.line is not None else "config"
        return f"{where}: {self.key}: {self.message}"

    def as_dict(self):
        return {"line": self.line, "key": self.key, "message": self.message}


class ConfigError(ValueError):
    """One or more configuration violations."""

    def __init__(self, violations: List[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class DuplicateKeyWarning(UserWarning):
    """A key appeared twice in one section; the last value is used."""


@dataclass(frozen=True)
class WorldlineSpec:
    family: str
    params: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class DetectorSpec:
    sigma: float
    epsilon: Optional[float] = None
    radius_factor: float = 6.0
    tol: float = 1e-10
    residue_circle_radius: Optional[float] = None

    def build(self, energies=()):
        from .rate.config import DetectorConfig
        return DetectorConfig(sigma=self.sigma, epsilon=self.epsilon, radius_factor=self.radius_factor,
                              residue_circle_radius=self.residue_circle_radius, tol=self.tol,
                              energy_grid=tuple(energies))


@dataclass(frozen=True)
class GridSpec:
    energies: Tuple[float, ...] = ()
    e_unit: str = "absolute"
    tau: Tuple[float, ...] = ()
    x_values: Tuple[float, ...] = ()
    v0_values: Tuple[float, ...] = ()
    omega: Optional[float] = None


@dataclass(frozen=True)
class SampleSpec:
    band_min: float
    band_max: float
    band_de: float
    horizon: float


@dataclass(frozen=True)
class RunSpec:
    task: Optional[str] = None
    threads: Optional[int] = None
    output: Optional[str] = None
    seed: int = 0
    validate: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    worldline: Optional[WorldlineSpec] = None
    detector: Optional[DetectorSpec] = None
    grid: GridSpec = GridSpec()
    sample: Optional[SampleSpec] = None
    run: RunSpec = RunSpec()

    @property
    def task(self):
        return self.run.task

    def with_task(self, task):
        return replace(self, run=replace(self.run, task=task))

    def energies(self) -> Tuple[float, ...]:
        """Energy grid in absolute units (``e_unit`` applied)."""
        g = self.grid
        if g.e_unit == "absolute":
            scale = 1.0
        elif g.e_unit == "T_a":
            scale = float(self.worldline.params["a"]) / (2.0 * math.pi)
        else:
            scale = float(self.worldline.params.get("omega", self.worldline.params.get("omega0", 1.0)))
        return tuple(float(e) * scale for e in g.energies)


# -- parsing ---------------------------------------------------------------------

_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$|^[+-]?inf$|^nan$", re.IGNORECASE)


def _number(text):
    t = text.strip()
    if not _NUM.match(t):
        raise ValueError(f"malformed number {text.strip()!r}")
    v = float(t)
    if not math.isfinite(v):
        raise ValueError(f"non-finite number {text.strip()!r}")
    return v


def _convert(key, raw):
    if key in _MATRIX_KEYS:
        rows = [r for r in raw.split(";") if r.strip()]
        out = []
        for r in rows:
            vals = [_number(x) for x in r.replace(",", " ").split()]
            if len(vals) != 3:
                raise ValueError("each row needs three numbers")
            out.append(tuple(vals))
        if not out:
            raise ValueError("empty matrix")
        return tuple(out)
    if key in _LIST_KEYS:
        parts = [p for p in raw.split(",") if p.strip()]
        return tuple(_number(p) for p in parts)
    if key in _WORD_KEYS:
        w = raw.strip()
        if key == "validate":
            if w.lower() not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(f"expected true/false, got {w!r}")
            return w.lower() in ("true", "yes", "1")
        if not w:
            raise ValueError("empty value")
        return w
    if key in _INT_KEYS:
        v = _number(raw)
        if v != int(v):
            raise ValueError(f"expected an integer, got {raw.strip()!r}")
        return int(v)
    return _number(raw)


def _lex(text):
    """Yield ``(section, key, raw, line)`` and collect syntax violations."""
    section = None
    entries = []
    errors = []
    seen_sections = set()
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("["):
            m = re.fullmatch(r"\[\s*([A-Za-z_-]+)\s*\]", s)
            if not m:
                errors.append(Violation(no, s, "malformed section header"))
                section = None
                continue
            section = m.group(1).lower()
            if section not in SECTIONS:
                errors.append(Violation(no, section, f"unknown section; expected one of {sorted(SECTIONS)}"))
                section = "?"
            seen_sections.add(section)
            continue
        if "=" not in s:
            errors.append(Violation(no, s, "expected 'key = value'"))
            continue
        key, raw = (p.strip() for p in s.split("=", 1))
        if section is None:
            errors.append(Violation(no, key, "key outside any [section]"))
            continue
        if section == "?":
            continue
        entries.append((section, key.lower(), raw, no))
    return entries, errors


def _linspace(lo, hi, n):
    if n == 1:
        return (float(lo),)
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def parse_config(text: str, task: Optional[str] = None) -> ExperimentConfig:
    """Parse and validate a configuration.

    Parameters
    ----------
    text : str
        File contents.
    task : str, optional
        Task requested on the command line. If the file also names a task
        the two must agree. Task-specific requirements (non-empty grids,
        required sections) are checked when a task is known.

    Raises
    ------
    ConfigError
        Listing every violation with its line number.
    """
    entries, errors = _lex(text)
    values: Dict[str, Dict[str, object]] = {s: {} for s in SECTIONS}
    lines: Dict[Tuple[str, str], int] = {}
    for section, key, raw, no in entries:
        if key not in SECTIONS[section]:
            errors.append(Violation(no, key, f"unknown key in [{section}]"))
            continue
        try:
            val = _convert(key, raw)
        except ValueError as exc:
            errors.append(Violation(no, key, str(exc)))
            continue
        if key in values[section]:
            warnings.warn(f"line {no}: duplicate key {key!r} in [{section}] (line {lines[(section, key)]}); "
                          "the last value wins", DuplicateKeyWarning, stacklevel=2)
        values[section][key] = val
        lines[(section, key)] = no

    def bad(section, key, msg):
        errors.append(Violation(lines.get((section, key)), key, msg))

    def positive(section, key):
        v = values[section].get(key)
        if v is not None and not v > 0:
            bad(section, key, f"must be > 0, got {v!r}")

    # worldline
    wl = values["worldline"]
    worldline = None
    if wl:
        fam = wl.get("family")
        if fam is None:
            bad("worldline", "family", "missing required key")
        elif fam not in FAMILIES:
            bad("worldline", "family", f"unknown family {fam!r}; expected one of {sorted(FAMILIES)}")
        else:
            req, opt = FAMILIES[fam]
            for k in req:
                if k not in wl:
                    bad("worldline", k, f"missing required key for {fam}")
            for k in wl:
                if k != "family" and k not in req + opt:
                    bad("worldline", k, f"not a parameter of {fam}")
            for k in ("a", "torsion", "omega", "a0", "omega0"):
                positive("worldline", k)
            if "a1" in wl and wl["a1"] < 0:
                bad("worldline", "a1", "must be >= 0")
            if "v0" in wl and not 0 <= wl["v0"] < 1:
                bad("worldline", "v0", "must lie in [0, 1)")
            if fam == "Circular" and "a" in wl and "torsion" in wl and not wl["a"] < wl["torsion"]:
                bad("worldline", "torsion", "must exceed a")
            if "phases" in wl and "amplitudes" in wl and len(wl["phases"]) != len(wl["amplitudes"]):
                bad("worldline", "phases", "must have as many rows as amplitudes")
            worldline = WorldlineSpec(fam, {k: v for k, v in wl.items() if k != "family"})

    # detector
    det = values["detector"]
    detector = None
    if det:
        if "sigma" not in det:
            bad("detector", "sigma", "missing required key")
        for k in ("sigma", "epsilon", "radius_factor", "tol", "residue_circle_radius"):
            positive("detector", k)
        if "tol" in det and not det["tol"] < 1:
            bad("detector", "tol", "must be < 1")
        if "sigma" in det and "epsilon" in det and det["sigma"] > 0 and det["epsilon"] > 1e-3 * det["sigma"]:
            bad("detector", "epsilon", "must not exceed 1e-3 * sigma")
        if "sigma" in det:
            detector = DetectorSpec(**{k: v for k, v in det.items()})

    # grid
    g = values["grid"]
    energies = ()
    if "energies" in g and any(k in g for k in ("e_min", "e_max", "e_count")):
        bad("grid", "energies", "give either 'energies' or e_min/e_max/e_count, not both")
    elif "energies" in g:
        energies = g["energies"]
    elif any(k in g for k in ("e_min", "e_max", "e_count")):
        if all(k in g for k in ("e_min", "e_max", "e_count")):
            if g["e_count"] < 1:
                bad("grid", "e_count", "must be >= 1")
            elif g["e_max"] < g["e_min"]:
                bad("grid", "e_max", "must be >= e_min")
            else:
                energies = _linspace(g["e_min"], g["e_max"], g["e_count"])
        else:
            for k in ("e_min", "e_max", "e_count"):
                if k not in g:
                    bad("grid", k, "missing (range needs e_min, e_max and e_count)")
    for i, e in enumerate(energies):
        if not e > 0:
            bad("grid", "energies", f"energies must be > 0, got {e!r}")
            break
    e_unit = g.get("e_unit", "absolute")
    if e_unit not in ("absolute", "T_a", "omega"):
        bad("grid", "e_unit", "must be absolute, T_a or omega")
    elif worldline is not None and e_unit == "T_a" and "a" not in worldline.params:
        bad("grid", "e_unit", f"T_a needs a worldline with parameter 'a'")
    elif worldline is not None and e_unit == "omega" and not ({"omega", "omega0"} & set(worldline.params)):
        bad("grid", "e_unit", "omega needs a worldline with an omega parameter")
    taus = ()
    if "tau" in g and any(k in g for k in ("tau_min", "tau_max", "tau_count")):
        bad("grid", "tau", "give either 'tau' or tau_min/tau_max/tau_count, not both")
    elif "tau" in g:
        taus = g["tau"]
    elif any(k in g for k in ("tau_min", "tau_max", "tau_count")):
        if all(k in g for k in ("tau_min", "tau_max", "tau_count")):
            if g["tau_count"] < 1:
                bad("grid", "tau_count", "must be >= 1")
            else:
                taus = _linspace(g["tau_min"], g["tau_max"], g["tau_count"])
        else:
            for k in ("tau_min", "tau_max", "tau_count"):
                if k not in g:
                    bad("grid", k, "missing (range needs tau_min, tau_max and tau_count)")
    for k in ("x_values",):
        if any(not v > 0 for v in g.get(k, ())):
            bad("grid", k, "values must be > 0")
    if any(not 0 <= v < 1 for v in g.get("v0_values", ())):
        bad("grid", "v0_values", "values must lie in [0, 1)")
    positive("grid", "omega")
    grid = GridSpec(tuple(energies), e_unit, tuple(taus), tuple(g.get("x_values", ())),
                    tuple(g.get("v0_values", ())), g.get("omega"))

    # sample
    sm = values["sample"]
    sample = None
    if sm:
        missing = [k for k in SECTIONS["sample"] if k not in sm]
        for k in missing:
            bad("sample", k, "missing required key")
        for k in SECTIONS["sample"]:
            positive("sample", k)
        if not missing:
            if sm["band_max"] < sm["band_min"]:
                bad("sample", "band_max", "must be >= band_min")
            sample = SampleSpec(sm["band_min"], sm["band_max"], sm["band_de"], sm["horizon"])

    # run
    rn = values["run"]
    if "task" in rn and rn["task"] not in TASKS:
        bad("run", "task", f"unknown task; expected one of {list(TASKS)}")
    if "threads" in rn and rn["threads"] < 1:
        bad("run", "threads", "must be >= 1")
    if "seed" in rn and rn["seed"] < 0:
        bad("run", "seed", "must be >= 0")
    file_task = rn.get("task")
    if task is not None and task not in TASKS:
        errors.append(Violation(None, "task", f"unknown task {task!r}; expected one of {list(TASKS)}"))
    elif task is not None and file_task is not None and task != file_task:
        bad("run", "task", f"file names task {file_task!r} but {task!r} was requested")
    run = RunSpec(task if task is not None else file_task, rn.get("threads"), rn.get("output"),
                  rn.get("seed", 0), rn.get("validate", False))

    cfg = ExperimentConfig(worldline, detector, grid, sample, run)
    if run.task is not None and run.task in TASKS:
        errors.extend(_task_violations(cfg, run.task, lines))
    if errors:
        raise ConfigError(errors)
    return cfg


def _task_violations(cfg: ExperimentConfig, task, lines):
    out = []
    need_wl = task in ("spectrum", "rate-vs-time", "roots", "average", "sample")
    need_det = need_wl
    if need_wl and cfg.worldline is None:
        out.append(Violation(None, "[worldline]", f"task {task} needs a [worldline] section"))
    if need_det and cfg.detector is None:
        out.append(Violation(None, "[detector]", f"task {task} needs a [detector] section with sigma"))
    if task in ("spectrum", "rate-vs-time", "average") and not cfg.grid.energies:
        out.append(Violation(None, "energies", f"task {task} needs a non-empty energy grid"))
    if task == "rate-vs-time" and not cfg.grid.tau:
        out.append(Violation(None, "tau", "task rate-vs-time needs a non-empty tau grid"))
    if task == "average" and cfg.worldline is not None and cfg.worldline.family not in PERIODIC:
        out.append(Violation(lines.get(("worldline", "family")), "family",
                             f"task average needs a periodic family {PERIODIC}"))
    if task == "sample" and cfg.sample is None:
        out.append(Violation(None, "[sample]", "task sample needs a [sample] section"))
    if task in ("spectrum", "roots", "average", "sample") and len(cfg.grid.tau) > 1:
        out.append(Violation(lines.get(("grid", "tau")), "tau", f"task {task} takes a single tau"))
    return out


# -- rendering -------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return "; ".join(" ".join(repr(float(x)) for x in row) for row in v)
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def render(cfg: ExperimentConfig) -> str:
    """Text in the grammar accepted by :func:`parse_config`; ``parse_config(render(c)) == c``."""
    out = []
    if cfg.worldline is not None:
        out.append("[worldline]")
        out.append(f"family = {cfg.worldline.family}")
        for k, v in cfg.worldline.params.items():
            out.append(f"{k} = {_fmt(v)}")
        out.append("")
    if cfg.detector is not None:
        out.append("[detector]")
        for f in fields(DetectorSpec):
            v = getattr(cfg.detector, f.name)
            if v is not None:
                out.append(f"{f.name} = {_fmt(v)}")
        out.append("")
    g = cfg.grid
    gl = []
    if g.energies:
        gl.append(f"energies = {_fmt(g.energies)}")
    if g.e_unit != "absolute":
        gl.append(f"e_unit = {g.e_unit}")
    if g.tau:
        gl.append(f"tau = {_fmt(g.tau)}")
    if g.x_values:
        gl.append(f"x_values = {_fmt(g.x_values)}")
    if g.v0_values:
        gl.append(f"v0_values = {_fmt(g.v0_values)}")
    if g.omega is not None:
        gl.append(f"omega = {_fmt(g.omega)}")
    if gl:
        out += ["[grid]", *gl, ""]
    if cfg.sample is not None:
        out.append("[sample]")
        for f in fields(SampleSpec):
            out.append(f"{f.name} = {_fmt(getattr(cfg.sample, f.name))}")
        out.append("")
    r = cfg.run
    rl = []
    if r.task is not None:
        rl.append(f"task = {r.task}")
    if r.threads is not None:
        rl.append(f"threads = {r.threads}")
    if r.output is not None:
        rl.append(f"output = {r.output}")
    if r.seed != 0:
        rl.append(f"seed = {r.seed}")
    if r.validate:
        rl.append("validate = true")
    if rl:
        out += ["[run]", *rl, ""]
    return "\n".join(out)


# -- construction -----------------------------------------------------------------

def build_worldline(spec: WorldlineSpec):
    """Instantiate the worldline described by ``spec``."""
    from . import worldline as W
    p = spec.params
    f = spec.family
    if f == "Inertial":
        return W.Inertial()
    if f == "UniformAcceleration":
        return W.UniformAcceleration(p["a"])
    if f == "Circular":
        return W.Circular(p["a"], p["torsion"])
    if f == "Cusped":
        return W.Cusped(p["a"])
    if f == "RelHarmonic1D":
        return W.RelHarmonic1D(p["v0"], p["omega"])
    if f == "ModulatedAcceleration":
        return W.ModulatedAcceleration(p["a0"], p["a1"], p["omega"])
    if f == "NonRelPeriodic":
        return W.NonRelPeriodic(p["omega0"], np.array(p["amplitudes"]),
                                None if "phases" not in p else np.array(p["phases"]))
    if f == "Rapidity1D":
        return W.Rapidity1D.polynomial(list(p["coeffs"]))
    raise ValueError(f"unknown family {f!r}")
