import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udwrate.rate import (
    SingularTermWarning,
    ValidityWarning,
    adiabatic_roots,
    leading_correction,
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
)

BOSE = (1 + math.exp(-2 * math.pi)) / (1 - math.exp(-2 * math.pi)) ** 2


class TestPlanck:
    def test_value(self):
        assert rate_planck(2 * math.pi, 1.0) == pytest.approx(1 / (2 * math.pi * (math.e - 1)), rel=1e-15)
        assert rate_planck(2 * math.pi, 1.0) == pytest.approx(0.0926, abs=5e-5)

    def test_exponential_tail(self):
        assert rate_planck(1.0, 200.0) == pytest.approx(200 / (2 * math.pi) * math.exp(-400 * math.pi), rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.01, 100.0), st.floats(0.01, 100.0), st.floats(0.1, 10.0))
    def test_homogeneity(self, a, E, lam):
        assert rate_planck(lam * a, lam * E) == pytest.approx(lam * rate_planck(a, E), rel=1e-12)

    def test_inertial(self):
        assert rate_inertial(1.0, 1.0) == pytest.approx(math.exp(-1) / (4 * math.pi), rel=1e-15)
        with pytest.raises(ValueError):
            rate_inertial(-1.0, 1.0)


class TestUniform:
    def test_near_planck_at_large_x(self):
        p = rate_closed_uniform(2 * math.pi, 1.0, 100.0)
        assert abs(p / rate_planck(2 * math.pi, 1.0) - 1) <= 2e-4

    def test_tends_to_planck(self):
        sigmas = (100.3, 1000.3, 10000.3)
        devs = [abs(rate_closed_uniform(1.0, 1.0, s) / rate_planck(1.0, 1.0) - 1) for s in sigmas]
        assert devs[0] > devs[1] > devs[2]
        x = sigmas[2] / (2 * math.pi)
        assert devs[2] == pytest.approx(abs(leading_correction(2 * math.pi, x)), rel=1e-3)

    def test_integer_x_is_finite_and_continuous(self):
        a = 2 * math.pi
        with pytest.warns(SingularTermWarning):
            mid = rate_closed_uniform(a, 1.3, 30.0)
        lo = rate_closed_uniform(a, 1.3, 30.0 - 1e-5)
        hi = rate_closed_uniform(a, 1.3, 30.0 + 1e-5)
        assert math.isfinite(mid)
        assert abs(mid - 0.5 * (lo + hi)) < 1e-9 * mid

    def test_asymptotic_k0_is_planck(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            for E in (0.3, 1.0, 4.0):
                assert rate_uniform_asymptotic(1.0, E, 700.0, k_max=0) == pytest.approx(rate_planck(1.0, E), rel=1e-14)

    def test_asymptotic_matches_closed_form(self):
        a = 2 * math.pi
        for beta in np.linspace(1.0, 20.0, 20):
            ref = rate_closed_uniform(a, beta, 100.0)
            assert rate_uniform_asymptotic(a, beta, 100.0) == pytest.approx(ref, rel=1e-6)

    def test_validity_warning(self):
        with pytest.warns(ValidityWarning):
            rate_uniform_asymptotic(2 * math.pi, 1.0, 5.0)

    def test_correction_scaling(self):
        ratio = relative_correction(3.0, 25.0) / relative_correction(3.0, 50.0)
        assert ratio == pytest.approx(4.0, rel=0.2)

    def test_leading_correction_matches_series_head(self):
        for beta in (1.0, 3.0, 10.0):
            assert relative_correction(beta, 1e3, k_max=1) == pytest.approx(abs(leading_correction(beta, 1e3)), rel=1e-10)


class TestAdiabatic:
    def test_zero_drift_is_planck(self):
        for a, E in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1)]:
            assert rate_adiabatic_corrected(a, 0.0, E) == rate_planck(a, E)

    def test_bracket_example(self):
        bracket = rate_adiabatic_corrected(1.0, 0.01, 1.0) / rate_planck(1.0, 1.0) - 1
        assert bracket == pytest.approx(2 * math.pi**2 * 1e-4 / 3 * BOSE, rel=1e-12)
        # the bracket evaluates to 6.617e-4, so 6.63e-4 is only good to 0.2%
        assert bracket == pytest.approx(6.63e-4, rel=5e-3)

    def test_split_reduces_to_bracket(self):
        # g1 difference quotient at first order reproduces the bracket; the remainder is O(delta^4)
        for adot in (1e-2, 3e-3, 1e-3):
            s = rate_adiabatic_split(1.0, adot, 1.0)
            c = rate_adiabatic_corrected(1.0, adot, 1.0)
            assert abs(s / c - 1) < 50 * adot**4 * (2 * math.pi) ** 4

    def test_split_tends_to_planck(self):
        for d in (1e-3, 1e-5, 1e-7):
            assert rate_adiabatic_split(1.0, d, 2.0) == pytest.approx(rate_planck(1.0, 2.0), rel=2 * d)

    def test_warns_when_drift_is_fast(self):
        with pytest.warns(ValidityWarning):
            rate_adiabatic_corrected(1.0, 0.5, 1.0)

    def test_order2_without_drift(self):
        y = np.array([0.3, 1.0 - 0.5j, -2.0j])
        assert np.allclose(sigma_adiabatic_order2(1.0, 0.0, y), 4 * np.sinh(y / 2) ** 2, rtol=1e-15)

    def test_order2_vs_leading(self):
        y = -0.5j
        a = sigma_adiabatic_order2(1.0, 0.01, y)
        b = sigma_adiabatic_leading(1.0, 0.01, y)
        assert abs(a - b) / abs(b) <= 1e-4

    def test_order2_is_even_in_drift(self):
        y = np.array([0.7 - 0.2j, 3.0 - 1.0j])
        assert np.allclose(sigma_adiabatic_order2(1.0, 0.02, y), sigma_adiabatic_order2(1.0, -0.02, y), rtol=1e-13)

    def test_roots_near_split_prediction(self):
        w = adiabatic_roots(1.0, 0.01, 2)
        for n in (1, 2):
            pred = 2 * math.pi * n * np.array([1.01, 0.99])
            assert np.allclose(w[n - 1], pred, rtol=1e-3)
            for root in w[n - 1]:
                assert abs(sigma_adiabatic_leading(1.0, 0.01, -1j * root)) < 1e-12


class TestModulated:
    def test_no_modulation(self):
        assert rate_modulated_correction(1.0, 0.0, 20.0, 1.0) == rate_planck(1.0, 1.0)

    def test_bracket_example(self):
        bracket = rate_modulated_correction(1.0, 0.05, 20.0, 1.0) / rate_planck(1.0, 1.0) - 1
        assert bracket == pytest.approx(4 * math.pi**2 * 0.05**2 / 1200 * BOSE, rel=1e-12)
        assert bracket == pytest.approx(8.3e-5, abs=5e-7)

    def test_warns_outside_regime(self):
        with pytest.warns(ValidityWarning):
            rate_modulated_correction(1.0, 0.5, 2.0, 1.0)


class TestCusped:
    def test_example(self):
        expected = 1 / (8 * math.sqrt(3) * math.pi * (1 - 12e-4)) * (
            math.exp(-4 * math.sqrt(3)) - 24 * math.sqrt(3) / 1e6 * math.exp(-200))
        assert rate_cusped(1.0, 2.0, 100.0) == pytest.approx(expected, rel=1e-14)
        assert rate_cusped(1.0, 2.0, 100.0) == pytest.approx(2.25e-5, abs=5e-8)

    def test_large_sigma_limit(self):
        asym = math.exp(-2 * math.sqrt(3) * 2.0) / (8 * math.sqrt(3) * math.pi)
        d = [abs(rate_cusped(1.0, 2.0, s) / asym - 1) for s in (50.0, 100.0, 1000.0)]
        assert d[0] / d[1] == pytest.approx(4.0, rel=1e-2)
        assert d[2] < 2e-5

    def test_merged_poles(self):
        s0 = 2 * math.sqrt(3)
        mid = rate_cusped(1.0, 1.0, s0)
        assert mid == pytest.approx(0.5 * (rate_cusped(1.0, 1.0, s0 - 1e-4) + rate_cusped(1.0, 1.0, s0 + 1e-4)), rel=1e-6)
