"""Detector configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple


@dataclass(frozen=True)
class DetectorConfig:
    """Coarse-graining and numerical parameters of the rate engine.

    Parameters
    ----------
    sigma : float
        Coarse-graining time scale (Lorentzian half-width).
    epsilon : float, optional
        Contour offset below the real axis; defaults to ``1e-6 * sigma``.
    radius_factor : float
        Pole search radius ``R = radius_factor * sigma``.
    residue_circle_radius : float, optional
        Fixed circle radius for residues; by default ``1e-3`` times the
        distance to the nearest other singularity.
    tol : float
        Target relative accuracy.
    energy_grid : tuple of float
        Energies for spectrum sweeps.
    """

    sigma: float
    epsilon: Optional[float] = None
    radius_factor: float = 6.0
    residue_circle_radius: Optional[float] = None
    tol: float = 1e-10
    energy_grid: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 1e-6 * self.sigma)
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.epsilon > 1e-3 * self.sigma:
            raise ValueError("epsilon must not exceed 1e-3 * sigma")
        if not self.radius_factor > 0:
            raise ValueError("radius_factor must be positive")
        if self.residue_circle_radius is not None and not self.residue_circle_radius > 0:
            raise ValueError("residue_circle_radius must be positive")
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")
        grid = tuple(float(e) for e in self.energy_grid)
        if any(not e > 0 for e in grid):
            raise ValueError("energies must be positive")
        object.__setattr__(self, "energy_grid", grid)

    @property
    def radius(self):
        return self.radius_factor * self.sigma

    def coarse_graining_flags(self):
        """Per-energy flag: True where E*sigma < 10."""
        return tuple(e * self.sigma < 10.0 for e in self.energy_grid)

    def with_(self, **changes):
        kw = dict(
            sigma=self.sigma,
            epsilon=self.epsilon,
            radius_factor=self.radius_factor,
            residue_circle_radius=self.residue_circle_radius,
            tol=self.tol,
            energy_grid=self.energy_grid,
        )
        if "sigma" in changes and "epsilon" not in changes:
            kw["epsilon"] = None
        kw.update(changes)
        return DetectorConfig(**kw)
