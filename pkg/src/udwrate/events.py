"""Detection-event time series from a detection rate.

First-order rates are treated as the intensity of an inhomogeneous Poisson
process (no dead time, no back-action on the detector). Click times are
drawn by thinning against a constant majorant.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from .rate.config import DetectorConfig
from .rate.engine import ResiduePlan

__all__ = [
    "Band",
    "ClickTrain",
    "MajorantWarning",
    "RateScanError",
    "total_rate",
    "rate_function",
    "sample_poisson",
    "sample_clicks",
]


class RateScanError(RuntimeError):
    """The rate could not be bounded on the horizon (non-finite or negative values)."""


class MajorantWarning(RuntimeWarning):
    """The rate exceeded the thinning bound at some candidate time."""


@dataclass(frozen=True)
class Band:
    """Energy window ``[e_min, e_max]`` sampled with spacing at most ``de``."""

    e_min: float
    e_max: float
    de: float

    def __post_init__(self):
        if not (0 < self.e_min <= self.e_max) or not self.de > 0:
            raise ValueError("band needs 0 < e_min <= e_max and de > 0")

    @property
    def grid(self) -> np.ndarray:
        if self.e_max == self.e_min:
            return np.array([self.e_min])
        n = int(math.ceil((self.e_max - self.e_min) / self.de - 1e-9)) + 1
        return np.linspace(self.e_min, self.e_max, max(n, 2))


def _band(band) -> Band:
    if isinstance(band, Band):
        return band
    b = tuple(band)
    if len(b) == 2:
        return Band(b[0], b[1], (b[1] - b[0]) / 64 if b[1] > b[0] else 1.0)
    return Band(*b)


def total_rate(w, tau, band, cfg: DetectorConfig) -> float:
    """Energy-integrated rate ``int P(E, tau)/alpha dE`` over ``band`` (trapezoid rule, ``alpha = 1``)."""
    b = _band(band)
    E = b.grid
    if E.size < 2:
        return 0.0
    vals = np.array([r.value for r in ResiduePlan(w, cfg, tau).evaluate(E)])
    return float(trapezoid(vals, E))


def rate_function(w, band, cfg: DetectorConfig) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised ``tau -> total_rate(w, tau, band, cfg)``; evaluated once for stationary paths."""
    if getattr(w, "stationary", False):
        lam = total_rate(w, 0.0, band, cfg)
        return lambda tau: np.full(np.shape(tau), lam)

    def f(tau):
        tau = np.asarray(tau, dtype=float)
        return np.array([total_rate(w, float(t), band, cfg) for t in tau.ravel()]).reshape(tau.shape)

    return f


@dataclass(frozen=True, eq=False)
class ClickTrain:
    """Ordered detection times in ``[0, horizon]``.

    Attributes
    ----------
    times : ndarray
        Strictly increasing click times.
    horizon : float
    seed : int
    band : Band or None
        Energy window used to build the intensity (None for a bare rate function).
    descriptor : str
        Free-form description of the source (worldline, rate model).
    """

    times: np.ndarray
    horizon: float
    seed: int
    band: Optional[Band] = None
    descriptor: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size and (np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > self.horizon):
            raise ValueError("click times must be strictly increasing within [0, horizon]")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        return (isinstance(other, ClickTrain) and self.horizon == other.horizon and self.seed == other.seed
                and self.band == other.band and self.descriptor == other.descriptor
                and np.array_equal(self.times, other.times))

    def count(self, t0=0.0, t1=None) -> int:
        """Number of clicks in ``[t0, t1)`` (``t1`` defaults to the horizon, inclusive)."""
        t1 = self.horizon if t1 is None else t1
        if t1 >= self.horizon:
            return int(np.count_nonzero(self.times >= t0))
        return int(np.count_nonzero((self.times >= t0) & (self.times < t1)))

    # -- CSV -----------------------------------------------------------------
    def to_csv(self, path: Union[str, Path, None] = None) -> str:
        """Write ``#``-prefixed metadata, a ``tau`` header and one time per row; returns the text."""
        buf = io.StringIO()
        buf.write(f"# seed={self.seed}\n")
        buf.write(f"# horizon={self.horizon!r}\n")
        if self.band is not None:
            buf.write(f"# band={self.band.e_min!r},{self.band.e_max!r},{self.band.de!r}\n")
        buf.write(f"# source={self.descriptor}\n")
        buf.write("tau\n")
        for t in self.times:
            buf.write(f"{float(t)!r}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, source: Union[str, Path]) -> "ClickTrain":
        text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) or "\n" not in str(source) else source
        meta = {}
        times = []
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                meta[k] = v
            elif line.strip() and line.strip() != "tau":
                times.append(float(line))
        band = None
        if "band" in meta:
            band = Band(*(float(x) for x in meta["band"].split(",")))
        return cls(np.array(times), float(meta["horizon"]), int(meta["seed"]), band, meta.get("source", ""))


# -- sampling ------------------------------------------------------------------

def _scan(rate, horizon, n_scan):
    taus = np.linspace(0.0, horizon, n_scan)
    vals = np.asarray(rate(taus), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise RateScanError("rate is not finite on the horizon")
    if np.any(vals < 0):
        raise RateScanError(f"rate is negative on the horizon (min {vals.min():.3g}); not a valid intensity")
    return float(vals.max())


def sample_poisson(rate: Union[float, Callable], horizon: float, seed: int,
                   lam_max: Optional[float] = None, n_scan: int = 257, safety: float = 1.25,
                   band: Optional[Band] = None, descriptor: str = "") -> ClickTrain:
    """Inhomogeneous Poisson process on ``[0, horizon]`` by thinning.

    Parameters
    ----------
    rate : float or callable
        Constant intensity, or a vectorised function of time.
    lam_max : float, optional
        Majorant. If omitted it is ``safety`` times the maximum over an
        ``n_scan``-point scan (exact for constant rates).
    seed : int
        Seeds a PCG64 generator; the same seed gives the same train bit for bit.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if callable(rate):
        fn = rate
    else:
        if not (math.isfinite(rate) and rate >= 0):
            raise RateScanError("constant rate must be finite and non-negative")
        lam_max = float(rate) if lam_max is None else lam_max
        fn = None
    if lam_max is None:
        lam_max = safety * _scan(fn, horizon, n_scan)
    rng = np.random.Generator(np.random.PCG64(seed))
    if lam_max <= 0:
        return ClickTrain(np.zeros(0), horizon, seed, band, descriptor)
    n = rng.poisson(lam_max * horizon)
    t = np.sort(rng.uniform(0.0, horizon, n))
    if fn is None:
        keep = t
    else:
        u = rng.uniform(0.0, 1.0, n)
        lam = np.asarray(fn(t), dtype=float) if n else np.zeros(0)
        if np.any(lam > lam_max):
            warnings.warn(f"rate exceeds the thinning bound {lam_max:.4g} (max {lam.max():.4g}); "
                          "increase safety or n_scan", MajorantWarning, stacklevel=2)
        keep = t[u * lam_max < lam]
    keep = np.unique(keep)
    return ClickTrain(keep, horizon, seed, band, descriptor)


def sample_clicks(w, band, horizon, seed, cfg: DetectorConfig, n_scan: int = 33,
                  safety: float = 1.25) -> ClickTrain:
    """Detection events of a detector on worldline ``w`` with energies in ``band``.

    The intensity is :func:`total_rate`; its maximum over the horizon is
    found by an ``n_scan``-point scan (a single evaluation for stationary
    paths) and inflated by ``safety`` to serve as the thinning majorant.
    """
    b = _band(band)
    fn = rate_function(w, b, cfg)
    if getattr(w, "stationary", False):
        lam = float(fn(np.zeros(1))[0])
        if not math.isfinite(lam) or lam < 0:
            raise RateScanError(f"invalid stationary rate {lam!r}")
        return sample_poisson(lam, horizon, seed, band=b, descriptor=w.descriptor())
    lam_max = safety * _scan(fn, horizon, n_scan)
    return sample_poisson(fn, horizon, seed, lam_max=lam_max, band=b, descriptor=w.descriptor())
