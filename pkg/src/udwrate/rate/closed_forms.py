"""Closed-form and perturbative spectra.

All functions return ``P/alpha`` (the detector-dependent prefactor is
factored out) in the units of their arguments.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import special

from ..specfun import g1, l_poly

__all__ = [
    "rate_inertial",
    "rate_planck",
    "rate_closed_uniform",
    "rate_uniform_asymptotic",
    "uniform_corrections",
    "leading_correction",
    "leading_correction_bound",
    "relative_correction",
    "rate_adiabatic_corrected",
    "rate_adiabatic_split",
    "sigma_adiabatic_order2",
    "sigma_adiabatic_leading",
    "adiabatic_roots",
    "rate_modulated_correction",
    "rate_cusped",
    "SingularTermWarning",
    "ValidityWarning",
]


class SingularTermWarning(RuntimeWarning):
    """``x`` is within 1e-6 of an integer, where single terms of the series diverge."""


class ValidityWarning(UserWarning):
    """Parameters lie outside the regime where a perturbative formula applies."""


def _positive(**kw):
    for k, v in kw.items():
        if not (np.isfinite(v) and v > 0):
            raise ValueError(f"{k} must be a positive finite number, got {v!r}")


def rate_inertial(E, sigma):
    """``e^{-E sigma} / (4 pi sigma)``: the coarse-grained rate of an inertial detector."""
    _positive(E=E, sigma=sigma)
    return math.exp(-E * sigma) / (4.0 * math.pi * sigma)


def rate_planck(a_tau, E):
    """Planck response ``E / (2 pi (e^{2 pi E / a} - 1))`` at temperature ``a / 2 pi``."""
    _positive(a_tau=a_tau, E=E)
    beta = 2.0 * math.pi * E / a_tau
    if beta > 700.0:
        return E * math.exp(-beta) / (2.0 * math.pi)
    return E / (2.0 * math.pi * math.expm1(beta))


def _bose_bracket(beta):
    """``(1 + z) / (1 - z)^2`` with ``z = e^{-beta}``."""
    z = math.exp(-beta)
    return (1.0 + z) / (-math.expm1(-beta)) ** 2


# -- uniform acceleration -------------------------------------------------

def _cot_gap(d):
    """``pi^2 / sin^2(pi d) - 1/d^2``, regular at ``d = 0``."""
    t = math.pi * d
    if abs(t) < 0.05:
        t2 = t * t
        return math.pi**2 * (1.0 / 3.0 + t2 * (1.0 / 15.0 + t2 * (2.0 / 189.0 + t2 * (1.0 / 675.0 + t2 * 2.0 / 10395.0))))
    return math.pi**2 / math.sin(t) ** 2 - 1.0 / (d * d)


def _phi2(u):
    """``(e^{-u} - 1 + u) / u^2``."""
    if abs(u) < 1e-3:
        return 0.5 - u / 6.0 + u * u / 24.0 - u**3 / 120.0
    return (math.expm1(-u) + u) / (u * u)


def rate_closed_uniform(a, E, sigma):
    """Coarse-grained response of a uniformly accelerated detector.

    With ``T_a = a / 2 pi``, ``x = T_a sigma``, ``beta = E / T_a`` and
    ``z = e^{-beta}``::

        P = 1/(2 pi sigma) { beta x [ (x/2)(Phi_1(z,x) - Phi_1(z,-x)) - 1 ]
                             + (x^2/2)(Phi_2(z,x) - Phi_2(z,-x))
                             + pi^2 x^2 z^x / (2 sin^2(pi x)) }

    where ``Phi_s`` is the Lerch transcendent. The individual pieces diverge
    at integer ``x``; here the differences are summed term by term and the
    term ``n = round(x)`` is combined with the last summand in closed form,
    so the result is finite for every ``x > 0``.

    Warns with :class:`SingularTermWarning` when ``x`` lies within 1e-6 of
    an integer (the value is still returned and is accurate there).
    """
    _positive(a=a, E=E, sigma=sigma)
    Ta = a / (2.0 * math.pi)
    x = Ta * sigma
    beta = E / Ta
    m = max(1, int(round(x)))
    d = x - m
    if abs(x - round(x)) < 1e-6:
        warnings.warn(f"x = {x!r} is within 1e-6 of an integer; using the paired evaluation",
                      SingularTermWarning, stacklevel=2)
    # terms beyond n_max are below 2^-60 relative
    n_max = m + int(math.ceil(45.0 / beta)) + 2
    n = np.arange(1, n_max + 1, dtype=float)
    n = n[n != m]
    zn = np.exp(-beta * n)
    den = x * x - n * n
    a1 = math.fsum(zn * 2.0 * x / den) + math.exp(-beta * m) / (m + x)
    a2 = math.fsum(zn * (-4.0 * n * x) / den**2) + math.exp(-beta * m) / (m + x) ** 2
    s = _cot_gap(d) * math.exp(-beta * d) + beta * beta * _phi2(beta * d)
    total = beta * x * (0.5 * x) * a1 + 0.5 * x * x * a2 + 0.5 * x * x * math.exp(-beta * m) * s
    return total / (2.0 * math.pi * sigma)


def uniform_corrections(beta, x, k_max=10):
    """Terms ``(L_2k(z) beta - 2k L_{2k-1}(z)) / x^{2k}`` of the large-``x`` expansion.

    The list stops at ``k_max`` (at most 10) or before the first term whose
    magnitude exceeds its predecessor (optimal truncation).
    """
    z = math.exp(-beta)
    out = []
    for k in range(1, min(int(k_max), 10) + 1):
        t = (l_poly(2 * k, z) * beta - 2 * k * l_poly(2 * k - 1, z)) / x ** (2 * k)
        if out and abs(t) > abs(out[-1]):
            break
        out.append(t)
    return out


def rate_uniform_asymptotic(a, E, sigma, k_max=10):
    """Planck term plus the first ``k_max`` inverse-``x^2`` corrections.

    Parameters
    ----------
    a, E, sigma : float
        Acceleration, energy and coarse-graining scale.
    k_max : int
        Number of correction orders; 0 returns the Planck response. The
        sum is cut earlier if its terms start growing.

    Notes
    -----
    The expansion is asymptotic in ``1/x`` with ``x = a sigma / 2 pi`` and
    requires ``E / T_a >> 1/x``; a :class:`ValidityWarning` is emitted when
    ``x < 10`` or ``E / T_a < 10 / x``.
    """
    _positive(a=a, E=E, sigma=sigma)
    Ta = a / (2.0 * math.pi)
    x = Ta * sigma
    beta = E / Ta
    if x < 10 or beta < 10.0 / x:
        warnings.warn(f"asymptotic expansion used outside x >= 10, E/T_a >= 10/x (x={x:.3g}, E/T_a={beta:.3g})",
                      ValidityWarning, stacklevel=2)
    planck = beta / math.expm1(beta) if beta < 700 else beta * math.exp(-beta)
    corr = math.fsum(uniform_corrections(beta, x, k_max)) if k_max > 0 else 0.0
    return Ta / (2.0 * math.pi) * (planck + corr)


def relative_correction(beta, x, k_max=10):
    """Size ``C`` of the correction series relative to the Planck term."""
    planck = beta / math.expm1(beta)
    return abs(math.fsum(uniform_corrections(beta, x, k_max))) / planck


def leading_correction(beta, x):
    """First-order relative correction ``[(1+z) - 2(1-z)/beta] / ((1-z)^2 x^2)``."""
    z = math.exp(-beta)
    omz = -math.expm1(-beta)
    return ((1.0 + z) - 2.0 * omz / beta) / (omz * omz * x * x)


def leading_correction_bound(beta, x):
    """``[2 - 1/beta + z (1 + 1/beta)] / ((1-z)^2 x^2)``, a conservative size estimate of the leading correction."""
    z = math.exp(-beta)
    omz = -math.expm1(-beta)
    return (2.0 - 1.0 / beta + z * (1.0 + 1.0 / beta)) / (omz * omz * x * x)


# -- slowly varying acceleration -----------------------------------------

def _check_adiabatic(a, adot):
    if abs(adot) / a**2 > 0.3:
        warnings.warn(f"|adot|/a^2 = {abs(adot) / a**2:.3g} > 0.3: adiabatic expansion unreliable",
                      ValidityWarning, stacklevel=3)


def rate_adiabatic_corrected(a_tau, adot_tau, E):
    """Planck response with the leading correction from a drifting acceleration.

    ``P = Planck(a, E) [1 + (2 pi^2 adot^2 E^2 / 3 a^6) (1 + z)/(1 - z)^2]``,
    ``z = e^{-2 pi E / a}``. Exactly the Planck value when ``adot = 0``.
    """
    _positive(a_tau=a_tau, E=E)
    _check_adiabatic(a_tau, adot_tau)
    p = rate_planck(a_tau, E)
    if adot_tau == 0:
        return p
    beta = 2.0 * math.pi * E / a_tau
    return p * (1.0 + 2.0 * math.pi**2 * adot_tau**2 * E**2 / (3.0 * a_tau**6) * _bose_bracket(beta))


def rate_adiabatic_split(a_tau, adot_tau, E):
    """Sum over the split pole pairs ``w = (2 pi n / a)(1 +- delta)``, ``delta = adot / a^2``.

    ``P = a / (8 pi^2 delta) [g1(beta (1 - delta)) - g1(beta (1 + delta))]``
    with ``beta = 2 pi E / a``; tends to the Planck response as ``delta -> 0``.
    """
    _positive(a_tau=a_tau, E=E)
    delta = adot_tau / a_tau**2
    if abs(delta) >= 1:
        raise ValueError("requires |adot| < a^2")
    beta = 2.0 * math.pi * E / a_tau
    if abs(delta) < 1e-6:
        # first two orders of the difference quotient
        p = rate_planck(a_tau, E)
        return p * (1.0 + (beta * delta) ** 2 * _bose_bracket(beta) / 6.0)
    return a_tau / (8.0 * math.pi**2 * delta) * (g1(beta * (1.0 - delta)) - g1(beta * (1.0 + delta)))


def sigma_adiabatic_leading(a_tau, adot_tau, y):
    """``(4/a^2)[sinh(ay/2) - (adot y / 2a) cosh(ay/2)][sinh(ay/2) + (adot y / 2a) cosh(ay/2)]``."""
    y = np.asarray(y, dtype=complex)
    s = np.sinh(0.5 * a_tau * y)
    c = np.cosh(0.5 * a_tau * y)
    k = adot_tau * y / (2.0 * a_tau) * c
    return 4.0 / a_tau**2 * (s - k) * (s + k)


def sigma_adiabatic_order2(a_tau, adot_tau, y):
    """Chord function for ``b(tau + s) = b + a s + adot s^2 / 2``.

    The exact double integral is a product of erfi and erf differences with
    prefactor ``pi / (2 adot)``. It is evaluated through the Dawson function
    and ``erfcx`` so that the factors ``e^{+-u^2}``, with ``u^2 ~ a^2/(2 adot)``,
    cancel analytically. Where that cancellation still loses more than half
    the digits (``|a y|`` very small) the leading-order product form is used.
    """
    y = np.asarray(y, dtype=complex)
    if a_tau <= 0:
        raise ValueError("a_tau must be positive")
    if adot_tau == 0:
        return 4.0 / a_tau**2 * np.sinh(0.5 * a_tau * y) ** 2
    ad = abs(adot_tau)  # Sigma depends on |adot| only
    r = math.sqrt(0.5 * ad)
    up = r * (a_tau / ad + 0.5 * y)
    um = r * (a_tau / ad - 0.5 * y)
    with np.errstate(all="ignore"):
        dp, dm = special.dawsn(up), special.dawsn(um)
        xp, xm = special.erfcx(up), special.erfcx(um)
        e = np.exp(a_tau * y)
        terms = (dp * xm * e, -dp * xp, -dm * xm, dm * xp / e)
        val = sum(terms)
        size = sum(np.abs(t) for t in terms)
        out = math.pi / (2.0 * ad) * (2.0 / math.sqrt(math.pi)) * val
    bad = ~np.isfinite(out) | (size > 1e7 * np.abs(val))
    if np.any(bad):
        out = np.where(bad, sigma_adiabatic_leading(a_tau, ad, y), out)
    return out[()] if out.ndim == 0 else out


def adiabatic_roots(a_tau, adot_tau, n_max):
    """Zeros ``w`` of the leading-order chord function at ``y = -i w``, ``n = 1..n_max``.

    They solve ``tan(a w / 2) = +- adot w / (2 a)``; each is Newton-polished
    from ``(2 pi n / a)(1 +- adot / a^2)``. Returns an array of shape
    ``(n_max, 2)`` with columns for the ``+`` and ``-`` branches.
    """
    _positive(a_tau=a_tau)
    a = a_tau
    delta = adot_tau / a**2
    out = np.empty((int(n_max), 2))
    for i, n in enumerate(range(1, int(n_max) + 1)):
        for j, sgn in enumerate((1.0, -1.0)):
            # f(w) = sin(aw/2) - sgn kappa w cos(aw/2), kappa = adot / 2a
            kappa = sgn * adot_tau / (2.0 * a)
            w = 2.0 * math.pi * n / a * (1.0 + sgn * delta)
            for _ in range(60):
                s, c = math.sin(0.5 * a * w), math.cos(0.5 * a * w)
                f = s - kappa * w * c
                df = 0.5 * a * c - kappa * c + kappa * w * 0.5 * a * s
                step = f / df
                w -= step
                if abs(step) <= 1e-15 * abs(w):
                    break
            out[i, j] = w
    return out


# -- oscillating acceleration ---------------------------------------------

def rate_modulated_correction(a0, a1, omega, E):
    """Planck response at ``a0`` with the correction from a fast modulation ``a1 sin(omega tau)``.

    ``P = Planck(a0, E) [1 + (4 pi^2 a1^2 E^2 / 3 a0^2 omega^2)(1 + z)/(1 - z)^2]``,
    ``z = e^{-2 pi E / a0}``. Intended for ``a1 << a0``, ``a1 << omega``
    and ``omega >> a0``; a :class:`ValidityWarning` is raised otherwise.
    """
    _positive(a0=a0, omega=omega, E=E)
    if a1 < 0:
        raise ValueError("a1 must be non-negative")
    p = rate_planck(a0, E)
    if a1 == 0:
        return p
    if a1 > 0.1 * a0 or a1 > 0.1 * omega or omega < 10.0 * a0:
        warnings.warn("modulation formula needs a1 << a0, a1 << omega, omega >> a0",
                      ValidityWarning, stacklevel=2)
    beta = 2.0 * math.pi * E / a0
    return p * (1.0 + 4.0 * math.pi**2 * a1**2 * E**2 / (3.0 * a0**2 * omega**2) * _bose_bracket(beta))


# -- cusped motion --------------------------------------------------------

def rate_cusped(a, E, sigma):
    """Exact rate for ``Sigma = y^2 (1 + a^2 y^2 / 12)``.

    ``P = a / (8 sqrt3 pi (1 - 12/(sigma a)^2)) [e^{-2 sqrt3 E / a} - (24 sqrt3 / (sigma a)^3) e^{-sigma E}]``.
    The two poles merge at ``sigma a = 2 sqrt3``; there the limit is taken.
    """
    _positive(a=a, E=E, sigma=sigma)
    s = sigma * a
    r3 = math.sqrt(3.0)

    def f(s):
        sg = s / a
        return a / (8.0 * r3 * math.pi * (1.0 - 12.0 / s**2)) * (
            math.exp(-2.0 * r3 * E / a) - 24.0 * r3 / s**3 * math.exp(-sg * E))

    if abs(s - 2.0 * r3) < 1e-5:
        # removable singularity where the two poles merge; symmetric average
        h = 1e-4 * s
        return 0.5 * (f(s + h) + f(s - h))
    return f(s)
