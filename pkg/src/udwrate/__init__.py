"""Coarse-grained detection rates of Unruh-DeWitt detectors on arbitrary worldlines."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from . import events, rate, specfun, worldline
from .rate import DetectorConfig, rate_residue, spectrum

__all__ = ["events", "rate", "specfun", "worldline", "DetectorConfig", "rate_residue", "spectrum", "__version__"]
