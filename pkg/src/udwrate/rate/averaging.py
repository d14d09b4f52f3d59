"""Time-averaged chord functions of periodic motions and the averaged rate.

For a path that repeats with period ``T << sigma`` the rate is governed by

    Sigma_bar(y) = (1/T) int_0^T Sigma(tau, y) dtau,

which is tau-independent. Closed forms are given for the three periodic
families; :func:`averaged_sigma_direct` computes the same average by
quadrature for validation.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import special

from ..worldline import ModulatedAcceleration, NonRelPeriodic, RelHarmonic1D
from .config import DetectorConfig
from .engine import RateResult, ResiduePlan, _warn_flags
from .kernel import Kernel

__all__ = [
    "PeriodWarning",
    "period",
    "averaged_sigma",
    "averaged_sigma_direct",
    "AveragedKernel",
    "averaged_kernel",
    "rate_averaged",
    "rate_averaged_detail",
    "modulated_band_edge",
    "rate_period_average",
]

_PERIODIC = (RelHarmonic1D, NonRelPeriodic, ModulatedAcceleration)


class PeriodWarning(UserWarning):
    """The period is not small compared to the coarse-graining scale."""


def _check(w):
    if not isinstance(w, _PERIODIC):
        raise TypeError(f"time averaging supports {', '.join(c.__name__ for c in _PERIODIC)}; got {type(w).__name__}")


def period(w):
    """Period of ``Sigma(tau, y)`` in ``tau`` (the motion's fundamental period)."""
    _check(w)
    om = w.omega0 if isinstance(w, NonRelPeriodic) else w.omega
    return 2.0 * math.pi / om


# -- closed forms -----------------------------------------------------------

def _sin2(y, k):
    return np.sin(0.5 * np.multiply.outer(y, k)) ** 2


def _harmonic_parts(w: RelHarmonic1D, y):
    """``(A, Q)`` with ``Sigma_bar = A y^2 - Q``."""
    c = w.coefficients
    om = w.omega
    A = 0.25 * c[0] ** 2
    Q = 2.0 * w.v0**2 / om**2 * np.sin(0.5 * om * y) ** 2
    if c.size > 1:
        k = np.arange(1, c.size, dtype=float)
        m = float(np.max(np.abs(np.imag(y)))) if y.size else 0.0
        with np.errstate(divide="ignore"):
            keep = 2.0 * np.log(np.abs(c[1:])) + 2.0 * k * om * m > math.log(1e-30)
        K = int(np.nonzero(keep)[0].max()) + 1 if keep.any() else 0
        if K:
            k = k[:K]
            wts = c[1:K + 1] ** 2 / (2.0 * k * k * om * om)
            Q = Q - _sin2(y, 2.0 * k * om) @ wts
    return A, Q


def _nonrel_parts(w: NonRelPeriodic, y, exact=True):
    k = w.n * w.omega0
    cn2 = np.sum(w.amplitudes**2, axis=1)
    Q = _sin2(y, k) @ (2.0 * cn2)
    if not exact:
        return 1.0, Q
    g = w.gamma_coefficients
    A = float(g[0].real) ** 2
    if g.size > 1:
        m = np.arange(1, g.size, dtype=float) * w.omega0
        Q = Q - _sin2(y, m) @ (8.0 * np.abs(g[1:]) ** 2 / (m * m))
    return A, Q


def _modulated_exact(w: ModulatedAcceleration, y):
    eps = w.a1 / w.omega
    if eps == 0.0:
        return 4.0 / w.a0**2 * np.sinh(0.5 * w.a0 * y) ** 2
    m = float(np.max(np.abs(np.imag(y)))) if y.size else 0.0
    n = np.arange(-200, 201)
    I2 = (special.ive(n, eps) * math.exp(eps)) ** 2
    with np.errstate(divide="ignore"):
        keep = np.log(I2) + np.abs(n) * w.omega * m > math.log(1e-18)
    keep |= n == 0
    n, I2 = n[keep], I2[keep]
    k = w.a0 + 1j * n * w.omega
    coef = (-1.0) ** n * I2 * 4.0 / k**2
    return np.sinh(0.5 * np.multiply.outer(y, k)) ** 2 @ coef


def _modulated_leading(w: ModulatedAcceleration, y):
    eps = w.a1 / w.omega
    a0 = w.a0
    out = (1.0 + 0.5 * eps**2) * 4.0 / a0**2 * np.sinh(0.5 * a0 * y) ** 2
    for k in (a0 + 1j * w.omega, a0 - 1j * w.omega):
        out = out - 0.25 * eps**2 * 4.0 / k**2 * np.sinh(0.5 * k * y) ** 2
    return out


def averaged_sigma(w, y, exact=True):
    """Time-averaged chord function ``Sigma_bar(y)``.

    Parameters
    ----------
    w : RelHarmonic1D, NonRelPeriodic or ModulatedAcceleration
    y : complex or array
    exact : bool
        If False, return the low-order approximation: the non-relativistic
        ``y^2 - 2 sum |c_n|^2 sin^2(n omega0 y/2)`` for ``NonRelPeriodic`` and
        the ``O((a1/omega)^2)`` truncation for ``ModulatedAcceleration``.
        ``RelHarmonic1D`` has no separate approximation.

    Notes
    -----
    ``RelHarmonic1D``::

        (c0^2/4) y^2 - (2 v0^2/omega^2) sin^2(omega y/2)
            + sum_k c_k^2/(2 k^2 omega^2) sin^2(k omega y)

    with ``c_k`` the cosine coefficients of the Lorentz factor in ``2 omega tau``.
    ``NonRelPeriodic`` with Lorentz-factor Fourier coefficients ``g_m``::

        g0^2 y^2 + 8 sum_m |g_m|^2 sin^2(m w0 y/2)/(m w0)^2
            - 2 sum_n |c_n|^2 sin^2(n w0 y/2)

    ``ModulatedAcceleration`` with ``eps = a1/omega`` and ``k_n = a0 + i n omega``::

        sum_n (-1)^n I_n(eps)^2 4 sinh^2(k_n y/2) / k_n^2
    """
    _check(w)
    y = np.asarray(y, dtype=complex)
    if isinstance(w, RelHarmonic1D):
        if w.v0 > 0:
            w.check_strip(0.5 * y)
        A, Q = _harmonic_parts(w, y)
        return A * y * y - Q
    if isinstance(w, NonRelPeriodic):
        if exact:
            w.check_strip(0.5 * y)
        A, Q = _nonrel_parts(w, y, exact)
        return A * y * y - Q
    return _modulated_exact(w, y) if exact else _modulated_leading(w, y)


def averaged_sigma_direct(w, y, n_tau=None, tol=1e-13, use_positions=True):
    """``(1/T) int_0^T Sigma(tau, y) dtau`` by the periodic trapezoid rule.

    The trapezoid rule converges geometrically for periodic analytic
    integrands; ``n_tau`` is doubled from 16 until successive estimates agree
    to ``tol``. With ``use_positions`` each ``Sigma(tau, y)`` comes from
    :meth:`Worldline.sigma_direct` (numerically integrated positions), so the
    result is independent of any chord-function series.
    """
    _check(w)
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    T = period(w)
    f = w.sigma_direct if use_positions else w.sigma

    def est(n):
        taus = T * np.arange(n) / n
        return sum(np.asarray(f(t, y)) for t in taus) / n

    n = 16 if n_tau is None else int(n_tau)
    prev = est(n)
    if n_tau is not None:
        return prev
    while n < 4096:
        n *= 2
        cur = est(n)
        if np.all(np.abs(cur - prev) <= tol * np.maximum(np.abs(cur), 1e-300)):
            return cur
        prev = cur
    warnings.warn("direct time average not converged at 4096 nodes", RuntimeWarning, stacklevel=2)
    return prev


def modulated_band_edge(w: ModulatedAcceleration):
    """Estimated ``Re w`` where zeros of the averaged modulated chord function begin.

    The ``n = +-1`` terms overtake the ``n = 0`` term near
    ``ln((a0^2 + omega^2) / (a0^2 I_1(eps)^2)) / omega``.
    """
    eps = w.a1 / w.omega
    if eps == 0.0:
        return math.inf
    i1 = float(special.iv(1, eps))
    return math.log((w.a0**2 + w.omega**2) / (w.a0**2 * i1**2)) / w.omega


# -- kernels and rates -------------------------------------------------------

class AveragedKernel(Kernel):
    """Kernel ``y -> averaged_sigma(w, y)`` for the residue engine."""

    def __init__(self, w, exact=True):
        _check(w)
        self.worldline = w
        self.exact = exact
        self.descriptor = f"{w.descriptor()} averaged"
        self.line_depth = None
        if isinstance(w, RelHarmonic1D):
            self.strip_y = 2.0 * w.strip
            c = w.coefficients
            A = 0.25 * c[0] ** 2
            self.split = (A, lambda y: _harmonic_parts(w, np.asarray(y, dtype=complex))[1])
            k = np.arange(1, c.size, dtype=float)
            nz = c[1:] != 0
            self.trig = (np.concatenate([[w.omega], 2.0 * k[nz] * w.omega]),
                         np.concatenate([[2.0 * w.v0**2 / w.omega**2],
                                         -c[1:][nz] ** 2 / (2.0 * k[nz] ** 2 * w.omega**2)]))
        elif isinstance(w, NonRelPeriodic):
            self.strip_y = 2.0 * w.strip if exact else math.inf
            A = _nonrel_parts(w, np.zeros(1), exact)[0]
            self.split = (A, lambda y: _nonrel_parts(w, np.asarray(y, dtype=complex), exact)[1])
            kap = w.n * w.omega0
            q = 2.0 * np.sum(w.amplitudes**2, axis=1)
            if exact:
                g = w.gamma_coefficients
                m = np.arange(1, g.size, dtype=float) * w.omega0
                kap = np.concatenate([kap, m])
                q = np.concatenate([q, -8.0 * np.abs(g[1:]) ** 2 / (m * m)])
            self.trig = (kap, q)
        else:
            self.strip_y = math.inf
            self.split = None
            edge = modulated_band_edge(w)
            if exact and math.isfinite(edge):
                # integrate above the zero bands instead of resolving them
                self.line_depth = 0.5 * edge

    def sigma(self, y):
        return averaged_sigma(self.worldline, y, self.exact)


def averaged_kernel(w, exact=True) -> AveragedKernel:
    return AveragedKernel(w, exact)


def rate_averaged_detail(w, E, cfg: DetectorConfig, exact=True) -> RateResult:
    """Like :func:`rate_averaged`, returning diagnostics."""
    if not E > 0:
        raise ValueError("E must be positive")
    T = period(w)
    if T > 0.1 * cfg.sigma:
        warnings.warn(f"period {T:.3g} exceeds 0.1 sigma; time averaging is not justified",
                      PeriodWarning, stacklevel=2)
    res = ResiduePlan(AveragedKernel(w, exact), cfg).evaluate([E])[0]
    _warn_flags(res)
    return res


def rate_averaged(w, E, cfg: DetectorConfig, exact=True) -> float:
    """Time-averaged rate ``P_bar(E)/alpha`` of a periodic motion.

    Runs the pole search and residue (or hybrid line) evaluation on
    :func:`averaged_sigma` in place of ``Sigma(tau, .)``.
    """
    return rate_averaged_detail(w, E, cfg, exact).value


def rate_period_average(w, E, cfg: DetectorConfig, n_tau=16):
    """Period average of the instantaneous rate, ``(1/T) int_0^T P(E, tau) dtau``.

    Unlike :func:`rate_averaged`, which inserts the averaged chord function
    into the rate integral, this averages the rate itself with an
    ``n_tau``-point periodic trapezoid rule. It is far more expensive (one
    full evaluation per ``tau``) and serves as a reference for the averaged
    kernel model.
    """
    _check(w)
    T = period(w)
    E = np.atleast_1d(np.asarray(E, dtype=float))
    total = np.zeros(E.size)
    for j in range(int(n_tau)):
        res = ResiduePlan(w, cfg, tau=T * j / n_tau).evaluate(E)
        total += np.array([r.value for r in res])
    out = total / n_tau
    return float(out[0]) if out.size == 1 else out
