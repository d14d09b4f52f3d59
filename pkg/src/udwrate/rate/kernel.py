"""Chord-function kernels consumed by the rate engine."""

from __future__ import annotations

import math

import numpy as np


class Kernel:
    """A function ``Sigma(y)`` analytic for ``|Im y| <= strip_y``.

    ``split``, when not None, returns ``(A, Q)`` with ``Sigma(y) = A y^2 - Q(y)``
    and ``Q`` bounded on the strip; the engine then subtracts the ``A y^2``
    part analytically to accelerate the line integral. ``trig``, when not
    None, is ``(kappa, q)`` with ``Q(y) = sum q sin^2(kappa y / 2)``.
    """

    strip_y = math.inf
    split = None
    trig = None
    descriptor = "kernel"

    def sigma(self, y):
        raise NotImplementedError

    def h(self, w):
        """``Sigma(-i w) / (-w^2)``, regular and equal to 1 at ``w = 0``."""
        w = np.asarray(w, dtype=complex)
        return self.sigma(-1j * w) / (-(w * w))


class WorldlineKernel(Kernel):
    def __init__(self, worldline, tau):
        self.worldline = worldline
        self.tau = float(tau)
        self.strip_y = 2.0 * worldline.strip
        self.descriptor = f"{worldline.descriptor()} tau={self.tau:g}"
        split = getattr(worldline, "chord_split", None)
        coef = getattr(worldline, "asymptotic_coefficient", None)
        if split is not None:
            self.split = split(self.tau)
            trig = getattr(worldline, "chord_trig", None)
            if trig is not None:
                self.trig = trig(self.tau)
        elif coef is not None:
            A = coef()
            self.split = (A, lambda y: A * y * y - self.sigma(y))

    def sigma(self, y):
        return self.worldline.sigma(self.tau, y)


class FunctionKernel(Kernel):
    """Wrap a plain callable ``Sigma(y)``."""

    def __init__(self, fn, strip_y=math.inf, descriptor="function", split=None):
        self._fn = fn
        self.strip_y = strip_y
        self.descriptor = descriptor
        self.split = split

    def sigma(self, y):
        return self._fn(np.asarray(y, dtype=complex))
