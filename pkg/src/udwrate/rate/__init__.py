"""Detection-rate engine: pole finding, residues, line quadrature, closed forms, averaging."""

from .averaging import (
    AveragedKernel,
    PeriodWarning,
    averaged_kernel,
    averaged_sigma,
    averaged_sigma_direct,
    modulated_band_edge,
    period,
    rate_averaged,
    rate_averaged_detail,
    rate_period_average,
)
from .closed_forms import (
    SingularTermWarning,
    ValidityWarning,
    adiabatic_roots,
    leading_correction,
    leading_correction_bound,
    rate_adiabatic_corrected,
    rate_adiabatic_split,
    rate_closed_uniform,
    rate_cusped,
    rate_inertial,
    rate_modulated_correction,
    rate_planck,
    rate_uniform_asymptotic,
    relative_correction,
    sigma_adiabatic_leading,
    sigma_adiabatic_order2,
    uniform_corrections,
)
from .config import DetectorConfig
from .contour import LineIntegral, TruncationError
from .engine import (
    BoundaryTermWarning,
    CoarseGrainingWarning,
    NegativeRateWarning,
    RateResult,
    ResiduePlan,
    Spectrum,
    SpectrumRow,
    certified_depth,
    convolve_time,
    rate_quadrature_oracle,
    rate_residue,
    rate_residue_detail,
    rate_simple_poles,
    spectrum,
)
from .kernel import FunctionKernel, Kernel, WorldlineKernel
from .poles import Pole, PoleFindingError, PoleSet, find_kernel_poles, find_poles
from .residue import ResidueError, residue_at

__all__ = [name for name in dir() if not name.startswith("_")]
