"""Timelike worldlines in Minkowski space and the proper-distance function.

Conventions: c = 1, metric signature (+, -, -, -), proper time ``tau``.
Every family evaluates its position for complex ``tau`` inside a strip
``|Im tau| <= strip`` so that the chord function

    Sigma(tau, y) = <dX, dX>,  dX = X(tau + y/2) - X(tau - y/2)

can be continued into the complex ``y`` plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from scipy import special

from ._quad import cauchy_derivatives, segment_integral
from .specfun import harmonic_coeffs_series

__all__ = [
    "StripError",
    "FourVector",
    "KinematicInvariants",
    "Worldline",
    "Inertial",
    "UniformAcceleration",
    "Rapidity1D",
    "RelHarmonic1D",
    "ModulatedAcceleration",
    "NonRelPeriodic",
    "Circular",
    "Cusped",
    "Generic",
    "position",
    "velocity",
    "sigma",
    "sigma_direct",
    "invariants",
    "minkowski",
]

SEGMENT_TOL = 1e-12


class StripError(ValueError):
    """Complex proper time outside the analyticity strip of a family."""


def minkowski(u, v):
    """Inner product with signature (+,-,-,-) over the first axis."""
    u = np.asarray(u)
    v = np.asarray(v)
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]


@dataclass(frozen=True)
class FourVector:
    t: complex
    x: complex
    y: complex
    z: complex

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr)
        vals = []
        for c in arr:
            c = complex(c)
            vals.append(c.real if c.imag == 0.0 else c)
        return cls(*vals)

    def as_array(self):
        return np.array([self.t, self.x, self.y, self.z])

    def dot(self, other):
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z

    def norm2(self):
        return self.dot(self)


@dataclass(frozen=True)
class KinematicInvariants:
    """Proper acceleration, torsion and hypertorsion (all inverse time)."""

    a: float
    torsion: float
    hypertorsion: float

    @property
    def omega(self):
        """Rotation frequency sqrt(torsion^2 - a^2) of the matching circular orbit, or None."""
        d = self.torsion**2 - self.a**2
        return math.sqrt(d) if d > 0 else None


class Worldline:
    """Base class. Subclasses implement ``_position`` and optionally faster pieces."""

    family = "Worldline"
    strip = math.inf
    #: Families with an analytic chord function.
    has_closed_sigma = False
    #: True when Sigma(tau, y) does not depend on tau.
    stationary = False

    # -- public API ---------------------------------------------------------
    def params(self):
        return {}

    def descriptor(self):
        inner = ", ".join(f"{k}={v:g}" if isinstance(v, (int, float)) else f"{k}={v}"
                          for k, v in self.params().items())
        return f"{self.family}({inner})"

    def __repr__(self):
        return self.descriptor()

    def check_strip(self, tau):
        im = np.max(np.abs(np.imag(tau))) if np.size(tau) else 0.0
        if im > self.strip:
            raise StripError(
                f"|Im tau| = {im:.6g} exceeds the analyticity strip {self.strip:.6g} of {self.family}"
            )

    def position(self, tau):
        """X^mu(tau) as an array of shape (4,) + shape(tau)."""
        self.check_strip(tau)
        return self._position(np.asarray(tau))

    def velocity(self, tau):
        return self._velocity(np.asarray(tau))

    def sigma(self, tau, y):
        y = np.asarray(y, dtype=complex)
        self.check_strip(0.5 * y)
        if self.has_closed_sigma:
            return self._sigma(tau, y)
        return self._sigma_numeric(tau, y)

    def sigma_direct(self, tau, y):
        """Chord function from positions, without any closed form."""
        y = np.asarray(y, dtype=complex)
        self.check_strip(0.5 * y)
        dx = self._position(tau + 0.5 * y) - self._position(tau - 0.5 * y)
        return minkowski(dx, dx)

    def derivatives(self, tau):
        """(X', X'', X''', X'''') at real ``tau``, each of shape (4,)."""
        raise NotImplementedError

    def invariants(self, tau, rel_tol=1e-8):
        d1, d2, d3, d4 = (np.real(np.asarray(d, dtype=complex)) for d in self.derivatives(tau))
        a2 = -float(minkowski(d2, d2))
        a = math.sqrt(a2) if a2 > 0 else 0.0
        scale = max(1.0, float(np.max(np.abs(d2))), float(np.max(np.abs(d3))))
        if a <= rel_tol * scale:
            return KinematicInvariants(a, 0.0, 0.0)
        adot = -float(minkowski(d2, d3)) / a
        num = a**4 - adot**2 - float(minkowski(d3, d3))
        num_scale = max(a**4, adot**2, abs(float(minkowski(d3, d3))))
        if num <= rel_tol * num_scale:
            return KinematicInvariants(a, 0.0, 0.0)
        torsion = math.sqrt(num) / a
        det = float(np.linalg.det(np.array([d1, d2, d3, d4])))
        upsilon = det / (a**3 * torsion**2)
        det_scale = float(np.prod([np.linalg.norm(v) for v in (d1, d2, d3, d4)]))
        if abs(det) <= rel_tol * det_scale:
            upsilon = 0.0
        return KinematicInvariants(a, torsion, upsilon)

    # -- defaults -----------------------------------------------------------
    def _velocity(self, tau):
        return np.real_if_close(self.derivatives(float(tau))[0])

    def _sigma_numeric(self, tau, y):
        return self.sigma_direct(tau, y)


class Inertial(Worldline):
    family = "Inertial"
    stationary = True
    has_closed_sigma = True

    def _position(self, tau):
        z = np.zeros_like(tau, dtype=np.result_type(tau, float))
        return np.array([tau + z, z, z, z])

    def _velocity(self, tau):
        return np.array([1.0, 0.0, 0.0, 0.0])

    def _sigma(self, tau, y):
        return y * y

    def chord_split(self, tau):
        return 1.0, lambda y: np.zeros_like(np.asarray(y, dtype=complex))

    def derivatives(self, tau):
        z = np.zeros(4)
        return (np.array([1.0, 0.0, 0.0, 0.0]), z, z, z)


class UniformAcceleration(Worldline):
    family = "UniformAcceleration"
    stationary = True
    has_closed_sigma = True

    def __init__(self, a):
        if not a > 0:
            raise ValueError("acceleration must be positive")
        self.a = float(a)

    def params(self):
        return {"a": self.a}

    def _position(self, tau):
        a = self.a
        z = np.zeros_like(tau, dtype=np.result_type(tau, float))
        return np.array([np.sinh(a * tau) / a, (np.cosh(a * tau) - 1.0) / a, z, z])

    def _velocity(self, tau):
        a = self.a
        return np.array([math.cosh(a * tau), math.sinh(a * tau), 0.0, 0.0])

    def _sigma(self, tau, y):
        s = np.sinh(0.5 * self.a * y)
        return 4.0 * s * s / self.a**2

    def derivatives(self, tau):
        a = self.a
        ch, sh = math.cosh(a * tau), math.sinh(a * tau)
        return (
            np.array([ch, sh, 0.0, 0.0]),
            a * np.array([sh, ch, 0.0, 0.0]),
            a**2 * np.array([ch, sh, 0.0, 0.0]),
            a**3 * np.array([sh, ch, 0.0, 0.0]),
        )


class Rapidity1D(Worldline):
    """Motion along x with rapidity ``b(tau)``; velocity (cosh b, sinh b, 0, 0).

    ``b`` must be analytic in the declared strip and accept complex arrays.
    Position is X(0) = 0 plus the integral of the velocity.
    """

    family = "Rapidity1D"

    def __init__(self, b: Callable, strip=math.inf, name="b", coeffs=None):
        self._b = b
        self.strip = float(strip)
        self.name = name
        self.coeffs = None if coeffs is None else tuple(float(c) for c in coeffs)

    @classmethod
    def polynomial(cls, coeffs):
        """``b(tau) = sum_k coeffs[k] tau^k``."""
        c = np.asarray(coeffs, dtype=float)
        return cls(lambda t: np.polynomial.polynomial.polyval(t, c), coeffs=c, name="poly")

    def params(self):
        if self.coeffs is not None:
            return {"b_coeffs": "[" + " ".join(f"{c:g}" for c in self.coeffs) + "]"}
        return {"b": self.name}

    def b(self, tau):
        return self._b(tau)

    def exp_b(self, tau, sign):
        return np.exp(sign * self._b(tau))

    def _deriv_radius(self, tau):
        return min(0.25, 0.4 * self.strip)

    def b_derivs(self, tau):
        """(b, b', b'', b''') at real tau."""
        if self.coeffs is not None:
            c = np.array(self.coeffs)
            out = []
            for _ in range(4):
                out.append(float(np.polynomial.polynomial.polyval(tau, c)) if c.size else 0.0)
                c = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.array([])
            return tuple(out)
        d = cauchy_derivatives(lambda z: self._b(z), tau, 3, self._deriv_radius(tau))
        return tuple(float(np.real(v)) for v in d)

    def _position(self, tau):
        tau = np.asarray(tau, dtype=complex)
        ep = segment_integral(lambda s: self.exp_b(s, 1), 0.0, tau, tol=SEGMENT_TOL)
        em = segment_integral(lambda s: self.exp_b(s, -1), 0.0, tau, tol=SEGMENT_TOL)
        z = np.zeros_like(tau)
        return np.array([0.5 * (ep + em), 0.5 * (ep - em), z, z])

    def _velocity(self, tau):
        b = float(np.real(self._b(complex(tau))))
        return np.array([math.cosh(b), math.sinh(b), 0.0, 0.0])

    def _sigma_numeric(self, tau, y):
        lo = tau - 0.5 * y
        hi = tau + 0.5 * y
        ip = segment_integral(lambda s: self.exp_b(s, 1), lo, hi, tol=SEGMENT_TOL)
        im = segment_integral(lambda s: self.exp_b(s, -1), lo, hi, tol=SEGMENT_TOL)
        return ip * im

    def derivatives(self, tau):
        b, b1, b2, b3 = self.b_derivs(tau)
        ch, sh = math.cosh(b), math.sinh(b)
        u = np.array([ch, sh, 0.0, 0.0])
        v = np.array([sh, ch, 0.0, 0.0])
        return (u, b1 * v, b2 * v + b1**2 * u, b3 * v + 3 * b1 * b2 * u + b1**3 * v)


class RelHarmonic1D(Rapidity1D):
    """Relativistic harmonic oscillation X^1 = x0 sin(omega tau), x0 = v0/omega.

    The rapidity obeys sinh b = v0 cos(omega tau); the worldline is analytic
    for ``|Im tau| < asinh(1/v0)/omega``. The chord function uses the
    cosine series of the Lorentz factor, so it needs no quadrature.
    """

    family = "RelHarmonic1D"
    has_closed_sigma = True

    def __init__(self, v0, omega):
        if not 0.0 <= v0 < 1.0:
            raise ValueError("v0 must lie in [0, 1)")
        if not omega > 0:
            raise ValueError("omega must be positive")
        self.v0 = float(v0)
        self.omega = float(omega)
        self.coeffs = None
        self.name = "harmonic"
        self._c = None
        self.strip = math.asinh(1.0 / self.v0) / self.omega if self.v0 > 0 else math.inf

    @property
    def x0(self):
        return self.v0 / self.omega

    def params(self):
        return {"v0": self.v0, "omega": self.omega}

    def _b(self, tau):
        return np.arcsinh(self.v0 * np.cos(self.omega * tau))

    def exp_b(self, tau, sign):
        c = self.v0 * np.cos(self.omega * tau)
        return np.sqrt(1.0 + c * c) + sign * c

    def _deriv_radius(self, tau):
        return min(0.25 / self.omega, 0.4 * self.strip)

    def _position(self, tau):
        tau = np.asarray(tau, dtype=complex)
        t = segment_integral(lambda s: np.sqrt(1.0 + (self.v0 * np.cos(self.omega * s)) ** 2),
                             0.0, tau, tol=SEGMENT_TOL)
        z = np.zeros_like(tau)
        return np.array([t, self.x0 * np.sin(self.omega * tau), z, z])

    def _velocity(self, tau):
        c = self.v0 * math.cos(self.omega * tau)
        return np.array([math.sqrt(1.0 + c * c), c, 0.0, 0.0])

    @property
    def coefficients(self):
        """Cosine coefficients ``c_k`` of ``sqrt(1 + v0^2 cos^2)`` to full relative accuracy."""
        if self._c is None:
            self._c = harmonic_coeffs_series(self.v0, 4000) if self.v0 > 0 else np.array([2.0])
            self._c.flags.writeable = False
        return self._c

    def asymptotic_coefficient(self):
        """``A`` with ``Sigma(tau, y) ~ A y^2`` for large real ``y``: the squared mean Lorentz factor."""
        return 0.25 * self.coefficients[0] ** 2

    def _sigma(self, tau, y):
        c = self.coefficients
        w = self.omega
        dt = 0.5 * c[0] * y
        if c.size > 1:
            m = float(np.max(np.abs(np.imag(y)))) if y.size else 0.0
            k = np.arange(1, c.size, dtype=float)
            with np.errstate(divide="ignore"):
                keep = np.log(np.abs(c[1:])) + k * w * m > math.log(1e-18 * max(c[0], 1.0))
            K = int(np.nonzero(keep)[0].max()) + 1 if keep.any() else 0
            k = k[:K]
            amp = c[1:K + 1] * np.cos(2.0 * k * w * tau) / (k * w)
            flat = y.ravel()
            acc = np.zeros(flat.shape, dtype=complex)
            step = max(1, 2_000_000 // max(K, 1))
            for i in range(0, flat.size, step):
                acc[i:i + step] = np.sin(np.outer(flat[i:i + step], k * w)) @ amp
            dt = dt + acc.reshape(y.shape)
        dx = 2.0 * self.x0 * math.cos(w * tau) * np.sin(0.5 * w * y)
        return dt * dt - dx * dx


class ModulatedAcceleration(Rapidity1D):
    """Rapidity b = a0 tau + (a1/omega) sin(omega tau); acceleration a0 + a1 cos(omega tau)."""

    family = "ModulatedAcceleration"
    has_closed_sigma = True

    def __init__(self, a0, a1, omega):
        if not a0 > 0 or not omega > 0 or a1 < 0:
            raise ValueError("require a0 > 0, omega > 0, a1 >= 0")
        self.a0, self.a1, self.omega = float(a0), float(a1), float(omega)
        self.coeffs = None
        self.name = "modulated"
        self.strip = math.inf

    def params(self):
        return {"a0": self.a0, "a1": self.a1, "omega": self.omega}

    def _bessel_terms(self, m):
        """Orders ``n`` and weights ``I_n(eps)`` needed for ``|Im s| <= m``."""
        eps = self.a1 / self.omega
        n = np.arange(-200, 201)
        if eps == 0.0:
            return np.array([0]), np.array([1.0])
        I = special.ive(n, eps) * math.exp(eps)
        with np.errstate(divide="ignore"):
            keep = np.log(np.abs(I)) + np.abs(n) * self.omega * m > math.log(1e-18)
        keep |= n == 0
        return n[keep], I[keep]

    def _sigma(self, tau, y):
        # e^{+-b(s)} = e^{+-a0 s} sum_n I_n(+-eps) (-i)^n e^{i n omega s}
        m = float(np.max(np.abs(np.imag(y)))) if y.size else 0.0
        n, I = self._bessel_terms(0.5 * m + abs(np.imag(tau)))
        ph = (-1j) ** n
        out = []
        for sgn in (1.0, -1.0):
            k = sgn * self.a0 + 1j * n * self.omega
            coef = I * (sgn ** n) * ph * np.exp(k * tau)
            seg = 2.0 * np.sinh(0.5 * np.multiply.outer(y, k)) / k
            out.append(seg @ coef)
        return out[0] * out[1]

    def _b(self, tau):
        return self.a0 * tau + (self.a1 / self.omega) * np.sin(self.omega * tau)

    def b_derivs(self, tau):
        a0, a1, om = self.a0, self.a1, self.omega
        return (
            a0 * tau + (a1 / om) * math.sin(om * tau),
            a0 + a1 * math.cos(om * tau),
            -a1 * om * math.sin(om * tau),
            -a1 * om**2 * math.cos(om * tau),
        )


class NonRelPeriodic(Worldline):
    """Periodic spatial motion X^i = sum_n c_n^i cos(n omega0 tau + phi_n^i).

    ``amplitudes`` and ``phases`` have shape (N, 3) for modes n = 1..N.
    X^0 is fixed by unit normalisation, dX^0/dtau = sqrt(1 + |dX/dtau|^2),
    so the path is exactly timelike; the non-relativistic regime is
    ``n omega0 |c_n| << 1``.
    """

    family = "NonRelPeriodic"

    def __init__(self, omega0, amplitudes, phases=None):
        c = np.atleast_2d(np.asarray(amplitudes, dtype=float))
        if c.shape[1] != 3:
            raise ValueError("amplitudes must have shape (N, 3)")
        p = np.zeros_like(c) if phases is None else np.atleast_2d(np.asarray(phases, dtype=float))
        if p.shape != c.shape:
            raise ValueError("phases must match amplitudes")
        if not omega0 > 0:
            raise ValueError("omega0 must be positive")
        self.omega0 = float(omega0)
        self.amplitudes = c
        self.phases = p
        self.n = np.arange(1, c.shape[0] + 1, dtype=float)
        self._g = None
        if self._speed_bound(0.0) >= 1.0:
            raise ValueError("path is not timelike-analytic: sum n omega0 |c_n| must be < 1")
        self.strip = self._find_strip()

    def params(self):
        return {"omega0": self.omega0, "modes": self.amplitudes.shape[0]}

    def _speed_bound(self, r):
        k = self.n[:, None] * self.omega0
        per_axis = np.sum(k * np.abs(self.amplitudes) * np.cosh(k * r), axis=0)
        return float(np.sum(per_axis**2))

    def _find_strip(self):
        # largest R with |dX/dtau . dX/dtau| <= 0.9 on the strip, so the root stays analytic
        lo, hi = 0.0, 1.0 / self.omega0
        while self._speed_bound(hi) < 0.9:
            hi *= 2.0
            if hi > 1e6:
                return math.inf
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self._speed_bound(mid) < 0.9:
                lo = mid
            else:
                hi = mid
        return lo

    def _spatial(self, tau, order=0):
        tau = np.asarray(tau)
        k = self.n * self.omega0
        arg = k[:, None] * tau.ravel()[None, :]
        out = []
        for i in range(3):
            ph = arg + self.phases[:, i][:, None]
            amp = self.amplitudes[:, i][:, None] * (k[:, None] ** order)
            # d^m/dtau^m cos(x) = cos(x + m pi/2)
            out.append(np.sum(amp * np.cos(ph + order * np.pi / 2), axis=0).reshape(tau.shape))
        return np.array(out)

    def _gamma(self, tau):
        v = self._spatial(tau, 1)
        return np.sqrt(1.0 + np.sum(v * v, axis=0))

    def _position(self, tau):
        tau = np.asarray(tau, dtype=complex)
        t = segment_integral(self._gamma, 0.0, tau, tol=SEGMENT_TOL)
        return np.concatenate([t[None], self._spatial(tau, 0)])

    def _velocity(self, tau):
        v = np.real(self._spatial(np.asarray(float(tau)), 1))
        return np.concatenate([[math.sqrt(1.0 + float(np.sum(v * v)))], v])

    @property
    def gamma_coefficients(self):
        """Fourier coefficients ``g_m`` (m >= 0) of the Lorentz factor,
        ``gamma(s) = sum_m g_m e^{i m omega0 s}`` with ``g_{-m} = conj(g_m)``.

        The FFT runs on the line ``Im s = -strip``, where ``e^{-i m omega0 s}``
        is damped by ``e^{-m omega0 strip}``; this gives every coefficient to
        full relative accuracy instead of an absolute floor.
        """
        if self._g is None:
            c = self.strip
            n = 256
            while True:
                s = 2.0 * np.pi / self.omega0 * np.arange(n) / n
                F = np.fft.fft(self._gamma(s - 1j * c)) / n
                F = F[: n // 2]
                # the shifted coefficients decay geometrically down to round-off
                tail = np.abs(F[n // 4:])
                if np.max(tail) < 1e-14 * abs(F[0]) or n >= 1 << 16:
                    break
                n *= 2
            m = np.arange(F.size)
            keep = np.abs(F) > 1e-15 * abs(F[0])
            K = int(np.nonzero(keep)[0].max()) + 1
            self._g = F[:K] * np.exp(-m[:K] * self.omega0 * c)
            self._g[0] = self._g[0].real
            self._G = F[:K]
        return self._g

    def asymptotic_coefficient(self):
        """Square of the mean Lorentz factor."""
        return float(self.gamma_coefficients[0].real) ** 2

    def _time_chord(self, tau, y):
        g = self.gamma_coefficients
        out = g[0].real * y
        if g.size > 1:
            m = np.arange(1, g.size, dtype=float)
            k = m * self.omega0
            amp = 2.0 * (g[1:] * np.exp(1j * k * tau) + np.conj(g[1:]) * np.exp(-1j * k * tau)) / k
            flat = y.ravel()
            acc = np.zeros(flat.shape, dtype=complex)
            step = max(1, 2_000_000 // m.size)
            for i in range(0, flat.size, step):
                acc[i:i + step] = np.sin(0.5 * np.outer(flat[i:i + step], k)) @ amp
            out = out + acc.reshape(y.shape)
        return out

    def _sigma_numeric(self, tau, y):
        lo = tau - 0.5 * y
        hi = tau + 0.5 * y
        dt = self._time_chord(tau, y)
        dx = self._spatial(hi, 0) - self._spatial(lo, 0)
        return dt * dt - np.sum(dx * dx, axis=0)

    def derivatives(self, tau):
        r = min(0.25 / (self.omega0 * self.n[-1]), 0.4 * self.strip)
        g = cauchy_derivatives(self._gamma, tau, 3, r)
        g = np.real(g)
        out = []
        for m in range(1, 5):
            sp = np.real(self._spatial(np.asarray(float(tau)), m))
            out.append(np.concatenate([[g[m - 1]], sp]))
        return tuple(out)


class Circular(Worldline):
    """Uniform circular motion with proper acceleration ``a`` and torsion ``torsion``.

    X = ((T/w) tau, (a/w^2) cos w tau, (a/w^2) sin w tau, 0), w = sqrt(T^2 - a^2).
    """

    family = "Circular"
    stationary = True
    has_closed_sigma = True

    def __init__(self, a, torsion):
        if not 0 < abs(a) < abs(torsion):
            raise ValueError("circular motion requires 0 < |a| < |torsion|")
        self.a = abs(float(a))
        self.torsion = abs(float(torsion))
        self.omega = math.sqrt(self.torsion**2 - self.a**2)

    def params(self):
        return {"a": self.a, "torsion": self.torsion}

    def _position(self, tau):
        a, T, w = self.a, self.torsion, self.omega
        z = np.zeros_like(tau, dtype=np.result_type(tau, float))
        return np.array([(T / w) * tau, (a / w**2) * np.cos(w * tau),
                         (a / w**2) * np.sin(w * tau), z])

    def _sigma(self, tau, y):
        a, T, w = self.a, self.torsion, self.omega
        s = np.sin(0.5 * w * y)
        return (T / w) ** 2 * y * y - 4.0 * a**2 / w**4 * s * s

    def chord_split(self, tau):
        """``Sigma = A y^2 - Q`` with bounded ``Q``."""
        a, T, w = self.a, self.torsion, self.omega
        return (T / w) ** 2, lambda y: 4.0 * a**2 / w**4 * np.sin(0.5 * w * np.asarray(y, dtype=complex)) ** 2

    def chord_trig(self, tau):
        """``Q`` of :meth:`chord_split` as ``(kappa, q)`` with ``Q = sum q sin^2(kappa y/2)``."""
        return np.array([self.omega]), np.array([4.0 * self.a**2 / self.omega**4])

    def derivatives(self, tau):
        a, T, w = self.a, self.torsion, self.omega
        c, s = math.cos(w * tau), math.sin(w * tau)
        return (
            np.array([T / w, -(a / w) * s, (a / w) * c, 0.0]),
            np.array([0.0, -a * c, -a * s, 0.0]),
            np.array([0.0, a * w * s, -a * w * c, 0.0]),
            np.array([0.0, a * w**2 * c, a * w**2 * s, 0.0]),
        )


class Cusped(Worldline):
    """X = (tau + a^2 tau^3/6, a tau^2/2, a^2 tau^3/6, 0)."""

    family = "Cusped"
    stationary = True
    has_closed_sigma = True

    def __init__(self, a):
        if not a > 0:
            raise ValueError("a must be positive")
        self.a = float(a)

    def params(self):
        return {"a": self.a}

    def _position(self, tau):
        a = self.a
        z = np.zeros_like(tau, dtype=np.result_type(tau, float))
        return np.array([tau + a**2 * tau**3 / 6, a * tau**2 / 2, a**2 * tau**3 / 6, z])

    def _sigma(self, tau, y):
        return y * y * (1.0 + self.a**2 * y * y / 12.0)

    def derivatives(self, tau):
        a = self.a
        return (
            np.array([1 + a**2 * tau**2 / 2, a * tau, a**2 * tau**2 / 2, 0.0]),
            np.array([a**2 * tau, a, a**2 * tau, 0.0]),
            np.array([a**2, 0.0, a**2, 0.0]),
            np.zeros(4),
        )


class Generic(Worldline):
    """User-supplied analytic position function ``X(tau) -> (4, ...)``.

    ``tau`` must be proper time. Kinematic invariants use central finite
    differences with step ``eps**(1/5) * max(1, |tau|)``.
    """

    family = "Generic"

    def __init__(self, position_fn: Callable, strip=math.inf, name="generic"):
        self._fn = position_fn
        self.strip = float(strip)
        self.name = name

    def params(self):
        return {"name": self.name}

    def _position(self, tau):
        return np.asarray(self._fn(tau))

    def _velocity(self, tau):
        r = min(0.25, 0.4 * self.strip)
        d = cauchy_derivatives(lambda z: np.asarray(self._fn(z)), float(tau), 1, r)
        return np.real(d[1])

    def derivatives(self, tau):
        h = np.finfo(float).eps ** 0.2 * max(1.0, abs(tau))
        f = [np.real(np.asarray(self._fn(tau + k * h), dtype=complex)) for k in (-2, -1, 0, 1, 2)]
        fm2, fm1, f0, fp1, fp2 = f
        d1 = (fp1 - fm1) / (2 * h)
        d2 = (fp1 - 2 * f0 + fm1) / h**2
        d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h**3)
        d4 = (fp2 - 4 * fp1 + 6 * f0 - 4 * fm1 + fm2) / h**4
        return (d1, d2, d3, d4)


# -- functional interface ------------------------------------------------------

def position(w: Worldline, tau) -> FourVector:
    return FourVector.from_array(w.position(tau))


def velocity(w: Worldline, tau) -> FourVector:
    return FourVector.from_array(w.velocity(tau))


def sigma(w: Worldline, tau, y):
    return w.sigma(tau, y)


def sigma_direct(w: Worldline, tau, y):
    return w.sigma_direct(tau, y)


def invariants(w: Worldline, tau=0.0) -> KinematicInvariants:
    return w.invariants(tau)
