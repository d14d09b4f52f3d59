import math
import warnings

import numpy as np
import pytest

from udwrate.rate import (
    DetectorConfig,
    PeriodWarning,
    averaged_sigma,
    averaged_sigma_direct,
    period,
    rate_averaged,
    rate_inertial,
    rate_period_average,
)
from udwrate.worldline import (
    Circular,
    ModulatedAcceleration,
    NonRelPeriodic,
    RelHarmonic1D,
    UniformAcceleration,
)


def random_y(n, seed, scale=2.0, depth=0.3):
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, n) - 1j * rng.uniform(0.0, depth, n)


def test_period():
    assert period(RelHarmonic1D(0.5, 2.0)) == pytest.approx(math.pi)
    assert period(NonRelPeriodic(4.0, [[0.1, 0.0, 0.0]], [[0.0, 0.0, 0.0]])) == pytest.approx(math.pi / 2)
    with pytest.raises(TypeError):
        period(UniformAcceleration(1.0))


class TestAveragedSigma:
    def test_slow_harmonic_is_inertial(self):
        y = random_y(6, 1)
        assert np.allclose(averaged_sigma(RelHarmonic1D(1e-8, 1.0), y), y * y, rtol=1e-14, atol=0)

    def test_one_axis_oscillation(self):
        # x(t) = x0 cos(omega t): the non-relativistic average is y^2 - 2 x0^2 sin^2(omega y / 2)
        x0, om = 0.01, 3.0
        w = NonRelPeriodic(om, [[x0, 0.0, 0.0]], [[0.0, 0.0, 0.0]])
        y = random_y(5, 2)
        lead = averaged_sigma(w, y, exact=False)
        assert np.allclose(lead, y * y - 2 * x0**2 * np.sin(om * y / 2) ** 2, rtol=1e-14, atol=0)
        # the Lorentz factor corrects the average at relative order v^2
        assert np.allclose(averaged_sigma(w, y), lead, rtol=(x0 * om) ** 2, atol=0)

    def test_circle_matches_circular_family(self):
        R, om = 0.3, 1.5
        w = NonRelPeriodic(om, [[R, R, 0.0]], [[0.0, -math.pi / 2, 0.0]])
        gamma = math.sqrt(1 + (R * om) ** 2)
        c = Circular(R * om**2, gamma * om)
        y = random_y(8, 3)
        assert np.allclose(averaged_sigma(w, y), c.sigma(0.0, y), rtol=1e-10, atol=0)

    @pytest.mark.parametrize("w", [
        RelHarmonic1D(0.5, 1.0),
        RelHarmonic1D(0.9, 2.0),
        NonRelPeriodic(1.0, [[0.1, 0.05, 0.0], [0.0, 0.02, 0.01]], [[0.0, 0.3, 0.0], [0.1, 0.0, 0.2]]),
        ModulatedAcceleration(1.0, 0.3, 5.0),
    ], ids=["harmonic05", "harmonic09", "nonrel", "modulated"])
    def test_matches_direct_time_average(self, w):
        y = random_y(10, 4, depth=0.2)
        a = averaged_sigma(w, y)
        b = averaged_sigma_direct(w, y)
        assert np.max(np.abs(a - b) / np.abs(b)) <= 1e-8

    def test_modulated_leading_order(self):
        w = ModulatedAcceleration(1.0, 0.01, 10.0)
        y = random_y(6, 5)
        a, b = averaged_sigma(w, y), averaged_sigma(w, y, exact=False)
        assert np.max(np.abs(a - b) / np.abs(a)) < 1e-7

    def test_modulated_without_modulation(self):
        y = random_y(4, 6)
        s = averaged_sigma(ModulatedAcceleration(1.0, 0.0, 10.0), y)
        assert np.allclose(s, 4 * np.sinh(y / 2) ** 2, rtol=1e-14)

    def test_even(self):
        w = RelHarmonic1D(0.7, 1.3)
        y = random_y(6, 7)
        assert np.allclose(averaged_sigma(w, y), averaged_sigma(w, -y), rtol=1e-13)


class TestAveragedRate:
    def test_static_limit_is_inertial(self):
        cfg = DetectorConfig(sigma=100.0)
        for E in (0.1, 0.3):
            assert rate_averaged(RelHarmonic1D(0.0, 1.0), E, cfg) == pytest.approx(rate_inertial(E, 100.0), rel=1e-10)

    def test_period_warning(self):
        with pytest.warns(PeriodWarning):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rate_averaged(RelHarmonic1D(0.1, 1.0), 1.0, DetectorConfig(sigma=20.0))

    def test_energy_must_be_positive(self):
        with pytest.raises(ValueError):
            rate_averaged(RelHarmonic1D(0.1, 1.0), -1.0, DetectorConfig(sigma=100.0))

    def test_period_average_of_rate_is_positive(self):
        w = RelHarmonic1D(0.5, 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            vals = rate_period_average(w, [1.0, 2.0], DetectorConfig(sigma=20.0, tol=1e-6), n_tau=8)
        assert np.all(vals > 0)
        assert vals[0] > vals[1]
