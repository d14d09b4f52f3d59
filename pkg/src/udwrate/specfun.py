"""Special functions: Lerch transcendent, L_n polynomials, complex erf, g1, oscillator Fourier coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

__all__ = [
    "LerchResult",
    "lerch_phi",
    "l_poly",
    "lerch_phi_asym",
    "erf_complex",
    "erfi_complex",
    "g1",
    "harmonic_coeffs",
    "harmonic_coeffs_series",
    "harmonic_coeffs_alt_series",
]


@dataclass(frozen=True)
class LerchResult:
    value: float
    terms_used: int
    truncation_bound: float


def lerch_phi(z, s, x, tol=None):
    """Lerch transcendent ``Phi_s(z, x) = sum_{n>=0} z^n / (n + x)^s`` by direct summation.

    Parameters
    ----------
    z : float
        In ``[0, 1)``.
    s : float
        Positive order.
    x : float
        Positive shift.
    tol : float, optional
        Absolute accuracy target. Defaults to one ulp of the running sum.

    Returns
    -------
    LerchResult
        ``truncation_bound`` bounds the dropped tail by
        ``z^N / ((N + x)^s (1 - z))``.
    """
    if not 0.0 <= z < 1.0:
        raise ValueError("lerch_phi requires 0 <= z < 1")
    if not x > 0.0:
        raise ValueError("lerch_phi requires x > 0")
    if not s > 0.0:
        raise ValueError("lerch_phi requires s > 0")
    if z == 0.0:
        return LerchResult(x ** (-s), 1, 0.0)
    total = 0.0
    n0 = 0
    block = 256
    logz = math.log(z)
    while True:
        n = np.arange(n0, n0 + block, dtype=float)
        terms = np.exp(n * logz - s * np.log(n + x))
        total += math.fsum(terms)
        n0 += block
        bound = math.exp(n0 * logz - s * math.log(n0 + x)) / (1.0 - z)
        target = tol if tol is not None else abs(total) * 2.0**-53
        if bound <= target:
            return LerchResult(total, n0, bound)


@lru_cache(maxsize=None)
def _eulerian_row(n):
    # A(n, k), k = 0..n-1
    row = [1]
    for m in range(2, n + 1):
        new = [0] * m
        for k in range(m):
            left = (k + 1) * row[k] if k < len(row) else 0
            right = (m - k) * row[k - 1] if k >= 1 else 0
            new[k] = left + right
        row = new
    return tuple(row)


def l_poly(n, z):
    """``L_n(z)`` with ``L_0 = 1/(1-z)`` and ``L_n = z d/dz L_{n-1}``.

    Evaluated as ``z A_n(z) / (1-z)^{n+1}`` with Eulerian-number numerators,
    which avoids the cancellation of the expansion in powers of ``1/(1-z)``.
    """
    if n < 0 or n > 20:
        raise ValueError("l_poly supports 0 <= n <= 20")
    if not 0.0 <= z < 1.0:
        raise ValueError("l_poly requires 0 <= z < 1")
    if n == 0:
        return 1.0 / (1.0 - z)
    num = np.polynomial.polynomial.polyval(z, np.array(_eulerian_row(n), dtype=float))
    return z * num / (1.0 - z) ** (n + 1)


def lerch_phi_asym(z, s, x, k_max=20):
    """Large-``x`` expansion of ``Phi_s(z, x)`` for ``s`` in {1, 2}.

    The series is summed up to ``k_max`` or until its terms stop decreasing
    (optimal truncation). Reliable when ``x (1 - z)`` is large.
    """
    if s not in (1, 2):
        raise ValueError("asymptotic expansion implemented for s = 1, 2")
    k_max = min(int(k_max), 20)
    total = 1.0 / ((1.0 - z) * x**s)
    prev = math.inf
    for n in range(1, k_max + 1):
        coef = 1.0 if s == 1 else float(n + 1)
        term = (-1) ** n * coef * l_poly(n, z) / x ** (n + s)
        if abs(term) > abs(prev):
            break
        total += term
        prev = term
        if term == 0.0:
            break
    return total


def _checked(val, u, name):
    val = np.asarray(val)
    if not np.all(np.isfinite(val)):
        raise OverflowError(f"{name} overflows at u = {u}; use the asymptotic branch")
    return val[()] if val.ndim == 0 else val


def erf_complex(u):
    """Complex error function; raises OverflowError when the result is not representable."""
    u = np.asarray(u, dtype=complex)
    return _checked(special.erf(u), u, "erf")


def erfi_complex(u):
    """Imaginary error function ``erfi(u) = -i erf(iu)``."""
    u = np.asarray(u, dtype=complex)
    return _checked(special.erfi(u), u, "erfi")


def g1(x):
    """``g1(x) = sum_{n>=1} e^{-n x}/n = -ln(1 - e^{-x})``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("g1 requires x > 0")
    out = -np.log1p(-np.exp(-x))
    return float(out) if out.ndim == 0 else out


def harmonic_coeffs(v0, k_max, n_nodes=None):
    """Cosine coefficients of ``sqrt(1 + v0^2 cos^2 theta)``.

    Returns ``c[0..k_max]`` with
    ``sqrt(1 + v0^2 cos^2 theta) = c0/2 + sum_k c_k cos(2 k theta)``,
    from the periodic trapezoid rule (an FFT), which is spectrally
    accurate because the integrand is analytic in ``|Im theta| < asinh(1/v0)``.
    """
    if not 0.0 <= v0 < 1.0:
        raise ValueError("harmonic_coeffs requires 0 <= v0 < 1")
    k_max = int(k_max)
    if n_nodes is None:
        decay = 2.0 * math.asinh(1.0 / v0) if v0 > 0 else math.inf
        need = 8 * (k_max + 1)
        if math.isfinite(decay):
            need = max(need, 4 * int(math.ceil(40.0 / decay)) + 16)
        n_nodes = 1 << max(6, (need - 1).bit_length())
    theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    f = np.sqrt(1.0 + (v0 * np.cos(theta)) ** 2)
    F = np.fft.rfft(f).real / n_nodes
    c = np.zeros(k_max + 1)
    c[0] = 2.0 * F[0]
    for k in range(1, k_max + 1):
        if 2 * k < F.size:
            c[k] = 2.0 * F[2 * k]
    return c


def harmonic_coeffs_series(v0, k_max, n_terms=200):
    """Series form of :func:`harmonic_coeffs` with full relative accuracy.

    Writing ``1 + v0^2 cos^2 theta = A (1 + q cos 2theta)`` with
    ``A = 1 + v0^2/2`` and ``q = v0^2 / (2 + v0^2) < 1/3``,

    ``c_k = sqrt(A) sum_{n>=k, n-k even} binom(1/2, n) q^n 2^{1-n} binom(n, (n-k)/2)``.

    For ``k >= 1`` all terms share one sign, so even very small
    coefficients are obtained to machine precision.
    """
    if not 0.0 <= v0 < 1.0:
        raise ValueError("harmonic_coeffs_series requires 0 <= v0 < 1")
    return _coeffs_series_cached(float(v0), int(k_max), int(n_terms)).copy()


@lru_cache(maxsize=64)
def _coeffs_series_cached(v0, k_max, n_terms):
    A = 1.0 + 0.5 * v0 * v0
    q = 0.5 * v0 * v0 / A
    out = np.zeros(k_max + 1)
    if q == 0.0:
        out[0] = 2.0
        return out
    k = np.arange(k_max + 1, dtype=float)[:, None]
    j = np.arange(n_terms, dtype=float)[None, :]
    n = k + 2.0 * j
    lg = special.gammaln
    # |binom(1/2, n)| = Gamma(n - 1/2) / (2 sqrt(pi) n!)
    log_b = np.where(n > 0, lg(np.maximum(n - 0.5, 0.5)) - lg(n + 1) - math.log(2.0 * math.sqrt(math.pi)), 0.0)
    sign = np.where(n > 0, -((-1.0) ** n), 1.0)
    logmag = log_b + n * math.log(q) + (1.0 - n) * math.log(2.0) + lg(n + 1) - lg(j + 1) - lg(n - j + 1)
    terms = sign * np.exp(logmag)
    # smallest terms first for a little extra accuracy
    out[:] = math.sqrt(A) * np.sum(terms[:, ::-1], axis=1)
    return out


def harmonic_coeffs_alt_series(v0, k_max, n_terms=200):
    """Alternative closed series
    ``2 sum_{n>=k} (-1)^{n-1} (2n-1)!! / ((n-k)! (n+k)! n!) (v0^2/8)^n``.

    Kept for comparison only: it tends to ``c_0 = -2`` as ``v0 -> 0``
    and does not reproduce the Fourier coefficients.
    """
    out = np.zeros(k_max + 1)
    lg = special.gammaln
    for k in range(k_max + 1):
        total = 0.0
        for n in range(k, k + n_terms):
            # (2n-1)!! = (2n)! / (2^n n!)
            mag = math.exp(lg(2 * n + 1) - n * math.log(2.0) - 2 * lg(n + 1)
                           - lg(n - k + 1) - lg(n + k + 1))
            term = (-1) ** (n - 1) * mag * (v0**2 / 8.0) ** n
            total += term
            if n > k + 2 and abs(term) < 1e-18 * max(abs(total), 1e-300):
                break
        out[k] = 2.0 * total
    return out
