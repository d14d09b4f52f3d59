"""Zeros of Sigma(-i w) in the right half w-plane.

Zeros are isolated by recursive rectangle subdivision with winding
numbers from the argument principle, then polished by Newton's method
(modified Newton ``m f/f'`` for an ``m``-fold zero).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .kernel import Kernel, WorldlineKernel

SPLIT = 0.47
MAX_DEPTH = 64
MAX_EDGE_POINTS = 400_000


class PoleFindingError(RuntimeError):
    """Subdivision exhausted or winding count inconsistent with polished zeros."""


class _EdgeZero(Exception):
    pass


@dataclass(frozen=True)
class Pole:
    w: complex
    multiplicity: int


@dataclass(frozen=True)
class PoleSet:
    """Zeros ``w`` of ``Sigma(-i w)`` in ``re_min < Re w < re_max``, ``|Im w| < im_max``."""

    poles: Tuple[Pole, ...]
    search_radius: float
    winding_total: int
    re_min: float = 0.0
    re_max: float = 0.0
    im_max: float = 0.0
    capped: bool = False

    def __len__(self):
        return len(self.poles)

    def __iter__(self):
        return iter(self.poles)

    @property
    def locations(self):
        return np.array([p.w for p in self.poles], dtype=complex)

    @property
    def multiplicities(self):
        return np.array([p.multiplicity for p in self.poles], dtype=int)


class _Finder:
    def __init__(self, h, scale):
        self.h = h
        self.scale = scale
        self.cache = {}

    # -- argument principle ----------------------------------------------
    def _sample(self, p, q, t):
        """Values and ``|h'/h| |q - p|`` at parameters ``t`` on the edge p -> q."""
        d = 1e-7 * max(abs(q - p), 1.0)
        u = (q - p) / abs(q - p)
        z = p + (q - p) * t
        v = self.h(np.concatenate([z, z + d * u, z - d * u]))
        if not np.all(np.isfinite(v)):
            raise OverflowError("non-finite Sigma on search boundary")
        n = t.size
        f, fp, fm = v[:n], v[n:2 * n], v[2 * n:]
        with np.errstate(all="ignore"):
            rate = np.abs((fp - fm) / (2.0 * d * f)) * abs(q - p)
        return f, rate

    def edge_phase(self, p, q):
        key = (p, q)
        if key in self.cache:
            return self.cache[key]
        if (q, p) in self.cache:
            return -self.cache[(q, p)]
        length = abs(q - p)
        t = np.linspace(0.0, 1.0, 33)
        vals, rate = self._sample(p, q, t)
        while True:
            if np.min(np.abs(vals)) == 0.0 or not np.all(np.isfinite(rate)):
                raise _EdgeZero()
            ratio = vals[1:] / vals[:-1]
            dphi = np.angle(ratio)
            dt = np.diff(t)
            # |h/h'| estimates the distance to the nearest zero; keeping steps
            # below it rules out whole turns slipping between samples
            bad = ((np.abs(dphi) > 0.6)
                   | (np.abs(np.log(np.abs(ratio))) > 1.0)
                   | (np.maximum(np.abs(rate[1:]), np.abs(rate[:-1])) * dt > 0.6))
            if not bad.any():
                break
            if t.size > MAX_EDGE_POINTS:
                raise PoleFindingError("edge sampling budget exhausted")
            idx = np.nonzero(bad)[0]
            if np.min(dt[idx]) * length < 1e-13 * max(self.scale, abs(p)):
                raise _EdgeZero()
            tm = 0.5 * (t[idx] + t[idx + 1])
            vm, rm = self._sample(p, q, tm)
            t = np.insert(t, idx + 1, tm)
            vals = np.insert(vals, idx + 1, vm)
            rate = np.insert(rate, idx + 1, rm)
        total = float(np.sum(dphi))
        self.cache[key] = total
        return total

    def winding(self, x0, x1, y0, y1):
        c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        total = sum(self.edge_phase(c[i], c[(i + 1) % 4]) for i in range(4))
        n = total / (2.0 * math.pi)
        m = int(round(n))
        if abs(n - m) > 0.05:
            raise PoleFindingError(f"non-integer winding {n:.4f} on cell {c}")
        return m

    # -- polishing -------------------------------------------------------
    def dh(self, w, d):
        f = self.h(np.array([w + d, w - d, w + 1j * d, w - 1j * d]))
        return (f[0] - f[1] - 1j * (f[2] - f[3])) / (4.0 * d)

    def newton(self, w, m, box):
        x0, x1, y0, y1 = box
        for _ in range(80):
            d = 1e-4 * max(abs(w), self.scale * 1e-3, 1e-6)
            f = complex(self.h(np.array([w]))[0])
            if f == 0:
                return w
            df = self.dh(w, d)
            if df == 0 or not np.isfinite(df):
                return None
            step = m * f / df
            w = w - step
            if not (x0 - 0.05 * (x1 - x0) <= w.real <= x1 + 0.05 * (x1 - x0)
                    and y0 - 0.05 * (y1 - y0) <= w.imag <= y1 + 0.05 * (y1 - y0)):
                return None
            if abs(step) <= 1e-14 * max(abs(w), 1e-300):
                return w
        return w if abs(step) <= 1e-9 * abs(w) else None

    def circle_winding(self, w, r, n=64):
        theta = 2.0 * np.pi * np.arange(n + 1) / n
        vals = self.h(w + r * np.exp(1j * theta))
        dphi = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(dphi)) > 1.0:
            return self.circle_winding(w, r, 4 * n) if n < 4096 else None
        return int(round(float(np.sum(dphi)) / (2.0 * math.pi)))

    # -- subdivision -----------------------------------------------------
    def solve(self, box, count, depth, out):
        x0, x1, y0, y1 = box
        if count == 0:
            return
        if depth > MAX_DEPTH:
            raise PoleFindingError(f"subdivision depth exhausted on cell {box} with {count} zeros")
        diam = math.hypot(x1 - x0, y1 - y0)
        centre = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
        small = diam < 0.25 * max(abs(centre), 1e-12) or diam < 1e-3 * self.scale
        if count == 1 or small:
            w = self.newton(centre, count, box)
            if w is not None and x0 <= w.real <= x1 and y0 <= w.imag <= y1:
                if count == 1:
                    out.append(Pole(w, 1))
                    return
                rho = max(1e-4 * diam, 1e-9 * abs(w))
                if self.circle_winding(w, rho) == count:
                    out.append(Pole(w, count))
                    return
        # split the longer side away from the midpoint
        for frac in (SPLIT, 1.0 - SPLIT, 0.41, 0.59, 0.37):
            try:
                if (x1 - x0) >= (y1 - y0):
                    xm = x0 + frac * (x1 - x0)
                    parts = [(x0, xm, y0, y1), (xm, x1, y0, y1)]
                else:
                    ym = y0 + frac * (y1 - y0)
                    parts = [(x0, x1, y0, ym), (x0, x1, ym, y1)]
                counts = [self.winding(*p) for p in parts]
                break
            except _EdgeZero:
                continue
        else:
            raise PoleFindingError(f"zero on every trial split of cell {box}")
        if sum(counts) != count:
            raise PoleFindingError(f"winding mismatch in cell {box}: {count} != {counts}")
        for p, c in zip(parts, counts):
            self.solve(p, c, depth + 1, out)


def _finite_extent(h, re_min, re_max, im_max):
    """Shrink the rectangle until Sigma is finite on its boundary.

    A non-finite left edge means ``|Im w|`` is too large; otherwise a
    non-finite right edge means ``Re w`` is.
    """
    capped = False
    for _ in range(400):
        xs = np.linspace(re_min, re_max, 257)
        ys = np.linspace(-im_max, im_max, 513)
        with np.errstate(all="ignore"):
            left = np.all(np.isfinite(h(re_min + 1j * ys)))
            right = np.all(np.isfinite(h(re_max + 1j * ys)))
            horiz = np.all(np.isfinite(h(np.concatenate([xs - 1j * im_max, xs + 1j * im_max]))))
        if left and right and horiz:
            return re_max, im_max, capped
        capped = True
        if left and not right:
            re_max = re_min + 0.8 * (re_max - re_min)
        else:
            im_max *= 0.8
    raise PoleFindingError("could not find a finite search region")


def find_kernel_poles(kernel: Kernel, re_min, re_max, im_max, scale=None) -> PoleSet:
    """Zeros of ``kernel.sigma(-i w)`` in ``re_min < Re w < re_max``, ``|Im w| < im_max``."""
    scale = scale if scale is not None else max(re_max, im_max)
    with np.errstate(all="ignore"):
        re_max, im_max, capped = _finite_extent(kernel.h, re_min, re_max, im_max)
    finder = _Finder(kernel.h, scale)
    with np.errstate(all="ignore"):
        # an outer edge through a zero is pulled in slightly (the inner edge is fixed)
        for attempt in range(4):
            box = (re_min, re_max, -im_max, im_max)
            try:
                total = finder.winding(*box)
                break
            except _EdgeZero:
                re_max = re_min + (1.0 - 1e-3) * (re_max - re_min)
                im_max *= 1.0 - 1e-3
        else:
            raise PoleFindingError("zero on the search boundary; change radius_factor or epsilon")
        out: List[Pole] = []
        finder.solve(box, total, 0, out)
    if sum(p.multiplicity for p in out) != total:
        raise PoleFindingError("polished zeros do not match the winding total")
    out.sort(key=lambda p: (abs(p.w), p.w.imag))
    return PoleSet(tuple(out), search_radius=max(re_max, im_max), winding_total=total,
                   re_min=re_min, re_max=re_max, im_max=im_max, capped=capped)


def find_poles(w, tau, cfg) -> PoleSet:
    """Zeros of ``Sigma(tau, -i w)`` with ``epsilon < Re w < R`` and ``|Im w| < R``.

    For families with a finite analyticity strip the search stops at
    ``Re w = 2 * strip``.
    """
    kernel = w if isinstance(w, Kernel) else WorldlineKernel(w, tau)
    R = cfg.radius
    re_max = min(R, 0.98 * kernel.strip_y)
    return find_kernel_poles(kernel, cfg.epsilon, re_max, R, scale=cfg.sigma)
