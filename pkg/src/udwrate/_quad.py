"""Low-level quadrature helpers shared across modules."""

import math
import warnings
from functools import lru_cache

import numpy as np


class QuadratureWarning(RuntimeWarning):
    """Quadrature did not reach the requested tolerance."""


@lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def segment_integral(f, a, b, tol=1e-12, order=16, max_order=512):
    """Integrate an analytic ``f`` along straight complex segments.

    Parameters
    ----------
    f : callable
        Vectorised complex function.
    a, b : array_like
        Segment endpoints (broadcast together).
    tol : float
        Relative tolerance between successive Gauss-Legendre orders.
        The scale is ``max(|I|, int |f||ds|)``.
    order, max_order : int
        Starting and maximal number of nodes; the order doubles each pass.

    Returns
    -------
    ndarray
        Integral values with the broadcast shape of ``a`` and ``b``.

    Warns
    -----
    QuadratureWarning
        When ``max_order`` is reached without convergence; the achieved
        relative error estimate is included in the message.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    shape = a.shape
    a = a.ravel()
    b = b.ravel()
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)

    def estimate(idx, n):
        x, w = gauss_legendre(n)
        s = mid[idx, None] + half[idx, None] * x
        fs = f(s)
        val = half[idx] * (fs @ w)
        scale = np.abs(half[idx]) * (np.abs(fs) @ w)
        return val, scale

    out = np.empty(a.shape, dtype=complex)
    idx = np.arange(a.size)
    prev, _ = estimate(idx, order)
    n = order
    while idx.size:
        n *= 2
        cur, scale = estimate(idx, n)
        err = np.abs(cur - prev)
        ok = err <= tol * np.maximum(np.abs(cur), scale) + 1e-300
        out[idx[ok]] = cur[ok]
        if n >= max_order and not ok.all():
            bad = ~ok
            rel = float(np.max(err[bad] / np.maximum(np.maximum(np.abs(cur[bad]), scale[bad]), 1e-300)))
            warnings.warn(
                f"segment quadrature unconverged at order {n}; relative error estimate {rel:.2e}",
                QuadratureWarning,
                stacklevel=2,
            )
            out[idx[bad]] = cur[bad]
            break
        idx = idx[~ok]
        prev = cur[~ok]
    return out.reshape(shape)


def cauchy_derivatives(f, z0, kmax, r, n=64):
    """Taylor derivatives ``f^(k)(z0)`` for ``k = 0..kmax`` from a circle of radius ``r``.

    ``f`` maps an array of complex points to an array whose last axis is
    the point axis (scalar or vector valued). Returns an array with the
    derivative order as the first axis.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    nodes = z0 + r * np.exp(1j * theta)
    vals = np.asarray(f(nodes), dtype=complex)
    coeffs = np.fft.fft(vals, axis=-1) / n
    out = []
    for k in range(kmax + 1):
        out.append(coeffs[..., k] * math.factorial(k) / r**k)
    return np.array(out)
