"""Panel quadrature of the coarse-grained rate integral along horizontal lines.

The integrand is ``F(y) = g(y) e^{-iEy} / Sigma(y)`` with the Lorentzian
``g(y) = 1 / ((y/sigma)^2 + 1)``; results are returned already multiplied by
``-1/(4 pi^2)`` so they add directly to rates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .._quad import QuadratureWarning, gauss_legendre

ORDER = 24
CHUNK = 100_000
MAX_NODES = 40_000_000


class TruncationError(RuntimeError):
    """The tail of the line integral could not be bounded below tolerance."""


def lorentzian(y, sigma):
    y = np.asarray(y, dtype=complex)
    return 1.0 / ((y / sigma) ** 2 + 1.0)


@dataclass(frozen=True)
class LineInfo:
    depth: float
    half_length: float
    panel_width: float
    nodes: int
    arc_radius: float
    error_estimate: np.ndarray
    tail_estimate: np.ndarray


def _panel_nodes(edges, order):
    x, w = gauss_legendre(order)
    a, b = edges[:-1], edges[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


class LineIntegral:
    """``-(1/4 pi^2) int F(y) dy`` along ``Im y = -depth``.

    Parameters
    ----------
    kernel : Kernel
        Supplies ``sigma(y)`` and optionally ``split = (A, Q)``.
    sigma : float
        Lorentzian width; ``depth`` must stay below it.
    depth : float
        Distance of the line below the real axis.
    tol : float
        Relative target, measured against ``|offset + result|``.
    arc_radius : float, optional
        When given, the segment ``|Re y| < arc_radius`` is replaced by a
        lower half circle of that radius centred at ``-i depth``.

    Notes
    -----
    When the kernel provides ``Sigma = A y^2 - Q`` the ``1/(A y^2)`` part is
    integrated in closed form, which contributes ``e^{-E sigma}/(4 pi sigma A)``,
    and only the faster-decaying remainder is sampled. If ``Q`` is moreover a
    trigonometric sum ``sum q_j sin^2(kappa_j y/2)`` (kernel attribute
    ``trig = (kappa, q)``), the next term ``Q/(A^2 y^4)`` is integrated by
    residues as well and the sampled remainder falls off like ``y^-8``.
    """

    def __init__(self, kernel, sigma, depth, tol=1e-10, arc_radius=None, panel_hint=None):
        if not 0 < depth < sigma and arc_radius is None:
            raise ValueError("line depth must lie in (0, sigma)")
        if arc_radius is not None and not 0 < arc_radius < sigma:
            raise ValueError("arc radius must lie in (0, sigma)")
        self.kernel = kernel
        self.sigma = float(sigma)
        self.depth = float(depth)
        self.tol = float(tol)
        self.arc_radius = arc_radius
        self.panel_hint = panel_hint if panel_hint is not None else getattr(kernel, "panel_hint", None)
        split = getattr(kernel, "split", None)
        self.A = None if split is None else float(split[0])
        trig = getattr(kernel, "trig", None)
        self.trig = None if trig is None or self.A is None else (
            np.asarray(trig[0], dtype=float), np.asarray(trig[1], dtype=float))

    # -- integrand pieces ----------------------------------------------------
    def _weight(self, y):
        """``g(y) / Sigma(y)`` minus the parts integrated in closed form."""
        with np.errstate(over="ignore", invalid="ignore"):
            s = self.kernel.sigma(y)
            g = lorentzian(y, self.sigma)
            if self.A is None:
                out = g / s
            elif self.trig is None:
                out = g * self.kernel.split[1](y) / (self.A * y * y * s)
            else:
                q = self.kernel.split[1](y)
                y2 = y * y
                out = g * q * q / (self.A**2 * y2 * y2 * s)
        # Sigma overflows only where it is astronomically large, i.e. F is negligible
        return np.where(np.isfinite(s), out, 0.0)

    def _j4(self, lam):
        """``int g(y) e^{-i lam y} / y^4 dy`` along the line, by residues."""
        s = self.sigma
        lam = np.asarray(lam, dtype=float)
        out = math.pi * np.exp(-np.abs(lam) * s) / s**3
        neg = lam < 0
        return np.where(neg, out - math.pi * lam**3 / 3.0 - 2.0 * math.pi * lam / s**2, out)

    def analytic_part(self, energies):
        if self.A is None:
            return np.zeros(len(energies))
        E = np.asarray(energies, dtype=float)
        out = np.exp(-E * self.sigma) / (4.0 * math.pi * self.sigma * self.A)
        if self.trig is not None:
            # Q = sum q sin^2(kappa y / 2) = sum q (2 - e^{i kappa y} - e^{-i kappa y}) / 4
            kap, q = self.trig
            Ek = E[:, None]
            terms = 0.5 * self._j4(Ek) - 0.25 * (self._j4(Ek - kap) + self._j4(Ek + kap))
            out = out - (terms @ q) / (4.0 * math.pi**2 * self.A**2)
        return out

    # -- geometry ------------------------------------------------------------
    def _nodes(self, Y, width):
        h = self.depth
        r = self.arc_radius
        x0 = 0.0 if r is None else r
        n = max(1, int(math.ceil((Y - x0) / width)))
        edges = np.linspace(x0, Y, n + 1)
        xr, wr = _panel_nodes(edges, ORDER)
        if r is None:
            xs = np.concatenate([-xr[::-1], xr])
            ws = np.concatenate([wr[::-1], wr])
            return xs - 1j * h, ws.astype(complex)
        xs = np.concatenate([-xr[::-1], xr]) - 1j * h
        ws = np.concatenate([wr[::-1], wr]).astype(complex)
        m = max(8, int(math.ceil(math.pi * r / width)))
        th, wt = _panel_nodes(np.linspace(math.pi, 2.0 * math.pi, m + 1), ORDER)
        ya = -1j * h + r * np.exp(1j * th)
        wa = 1j * r * np.exp(1j * th) * wt
        return np.concatenate([xs, ya]), np.concatenate([ws, wa])

    def _sum(self, y, wts, E):
        total = np.zeros(E.size, dtype=complex)
        l1 = np.zeros(E.size)
        for i in range(0, y.size, CHUNK):
            yy = y[i:i + CHUNK]
            f = self._weight(yy) * wts[i:i + CHUNK]
            ph = np.exp(-1j * np.multiply.outer(yy, E))
            total += f @ ph
            l1 += np.abs(f) @ np.abs(ph)
        return total, l1

    def _tail(self, Y, E):
        ys = np.array([1.0, 1.013, 1.031, 1.067]) * Y
        y = np.concatenate([ys, -ys]) - 1j * self.depth
        f = np.max(np.abs(self._weight(y)))
        # |F| decays at least like y^-4 beyond Y
        return f * np.exp(-E * self.depth) * Y / 3.0 * 2.0 / (4.0 * math.pi**2)

    # -- driver --------------------------------------------------------------
    def __call__(self, energies, offset=None):
        """Contributions to ``P/alpha`` for each energy, including the analytic part.

        ``offset`` (same length as ``energies``) is the part of the rate
        computed elsewhere (residues); it sets the relative-accuracy scale.
        Returns ``(values, info)``.
        """
        E = np.atleast_1d(np.asarray(energies, dtype=float))
        if E.size == 0:
            return np.zeros(0, dtype=complex), None
        base = self.analytic_part(E) + (0.0 if offset is None else np.asarray(offset))
        Emax = float(np.max(E))
        # two wavelengths per 24-point panel; features near the origin sit
        # at distance ``depth`` (or the arc radius) from the line
        near = self.depth if self.arc_radius is None else self.arc_radius
        width = min(4.0 * math.pi / Emax, self.sigma / 8.0, near)
        if self.panel_hint:
            width = min(width, self.panel_hint)
        # half-length from the tail estimate; rough scale first from a coarse pass
        Y = 8.0 * self.sigma
        y, w = self._nodes(Y, width)
        coarse, l1 = self._sum(y, w, E)
        scale = np.abs(base - coarse / (4.0 * math.pi**2))
        scale = np.maximum(scale, 1e-300)
        # a tail below the round-off floor of the sum cannot matter
        target = np.maximum(0.1 * self.tol * scale, 1e-16 * l1 / (4.0 * math.pi**2))
        for _ in range(40):
            if np.all(self._tail(Y, E) <= target):
                break
            Y *= 2.0
        else:
            raise TruncationError(f"tail of the line integral not bounded at |Re y| = {Y:.3g}")
        y, w = self._nodes(Y, width)
        prev, _ = self._sum(y, w, E)
        err = np.full(E.size, np.inf)
        cur = prev
        while True:
            width *= 0.5
            y, w = self._nodes(Y, width)
            if 2 * y.size > MAX_NODES:
                warnings.warn(
                    f"line quadrature stopped at {y.size} nodes; error estimate "
                    f"{float(np.max(err / scale)):.2e} relative", QuadratureWarning, stacklevel=2)
                break
            cur, l1 = self._sum(y, w, E)
            err = np.abs(cur - prev) / (4.0 * math.pi**2)
            val = base - cur / (4.0 * math.pi**2)
            scale = np.maximum(np.abs(val), 1e-300)
            floor = 1e-15 * l1 / (4.0 * math.pi**2)
            if np.all(err <= np.maximum(0.1 * self.tol * scale, floor)):
                if np.any(err > 0.1 * self.tol * scale):
                    warnings.warn(
                        f"line quadrature limited by round-off: relative error up to "
                        f"{float(np.max(floor / scale)):.2e}", QuadratureWarning, stacklevel=2)
                break
            prev = cur
        values = self.analytic_part(E) - cur / (4.0 * math.pi**2)
        info = LineInfo(self.depth, Y, width, y.size, self.arc_radius or 0.0, err, self._tail(Y, E))
        return values, info


def rouche_disk_free(kernel, r, n=256):
    """True when ``|Sigma(y)/y^2 - 1| < 1/2`` on ``|y| = r``, so ``Sigma`` has no zeros in ``0 < |y| < r``."""
    th = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    y = r * np.exp(1j * th)
    with np.errstate(all="ignore"):
        v = kernel.sigma(y) / (y * y)
    return bool(np.all(np.isfinite(v)) and np.max(np.abs(v - 1.0)) < 0.5)
