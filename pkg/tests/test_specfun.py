import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from udwrate.specfun import (
    erf_complex,
    erfi_complex,
    g1,
    harmonic_coeffs,
    harmonic_coeffs_alt_series,
    harmonic_coeffs_series,
    l_poly,
    lerch_phi,
    lerch_phi_asym,
)


class TestLerch:
    def test_z_zero_is_single_term(self):
        assert lerch_phi(0.0, 2, 2.0).value == 0.25

    def test_log_identity(self):
        assert lerch_phi(0.5, 1, 1.0).value == pytest.approx(2 * math.log(2), rel=1e-14)

    def test_against_mpmath(self):
        for z, s, x in [(0.3, 1, 2.5), (0.9, 2, 0.7), (math.exp(-5), 2, 15.9)]:
            ref = float(mpmath.lerchphi(z, s, x))
            assert lerch_phi(z, s, x).value == pytest.approx(ref, rel=1e-14)

    def test_truncation_bound_is_rigorous(self):
        z, s, x = 0.95, 1, 3.0
        r = lerch_phi(z, s, x, tol=1e-6)
        exact = float(mpmath.lerchphi(z, s, x))
        assert abs(r.value - exact) <= r.truncation_bound * (1 + 1e-9)
        assert r.truncation_bound <= 1e-6

    def test_asymptotic_agrees_with_series_at_moderate_x(self):
        z = math.exp(-5)
        assert lerch_phi_asym(z, 1, 15.9) == pytest.approx(lerch_phi(z, 1, 15.9).value, rel=1e-8)

    @pytest.mark.parametrize("s", [1, 2])
    def test_asymptotic_at_x50(self, s):
        assert lerch_phi_asym(0.5, s, 50.0) == pytest.approx(lerch_phi(0.5, s, 50.0).value, rel=1e-10)

    def test_asymptotic_z_zero(self):
        assert lerch_phi_asym(0.0, 1, 37.0) == pytest.approx(1 / 37.0, rel=1e-15)

    @pytest.mark.parametrize("bad", [(1.0, 1, 1.0), (-0.1, 1, 1.0), (0.5, 1, 0.0), (0.5, 0, 1.0)])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            lerch_phi(*bad)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 0.95), st.sampled_from([1, 2]), st.floats(0.1, 50.0), st.floats(0.01, 5.0))
    def test_decreasing_in_x(self, z, s, x, dx):
        assert lerch_phi(z, s, x + dx).value < lerch_phi(z, s, x).value

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 0.9), st.sampled_from([1, 2]), st.floats(25.0, 200.0))
    def test_asymptotic_series_agreement(self, z, s, x):
        assert lerch_phi_asym(z, s, x) == pytest.approx(lerch_phi(z, s, x).value, rel=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 0.9), st.sampled_from([1, 2]), st.floats(25.0, 200.0))
    def test_asymptotic_series_agreement_where_resolvable(self, z, s, x):
        # the optimally truncated remainder is about exp(-x ln(1/z))
        if z > 0:
            x = max(x, 25.0 / -math.log(z))
        assert lerch_phi_asym(z, s, x) == pytest.approx(lerch_phi(z, s, x).value, rel=1e-8)


class TestLPoly:
    def test_examples(self):
        assert l_poly(0, 0.5) == 2.0
        assert l_poly(1, 0.5) == pytest.approx(2.0)
        assert l_poly(1, 0.0) == 0.0

    def test_recursion_against_mpmath(self):
        z = mpmath.mpf("0.37")
        f = lambda t: 1 / (1 - t)  # noqa: E731
        for n in range(1, 9):
            g = f
            f = (lambda g: lambda t: t * mpmath.diff(g, t))(g)
            assert l_poly(n, float(z)) == pytest.approx(float(f(z)), rel=1e-10)

    def test_closed_form_sum(self):
        # L_n(z) = sum_k k^n z^k
        z = 0.6
        k = np.arange(1, 400)
        for n in (2, 5, 10):
            assert l_poly(n, z) == pytest.approx(float(np.sum(k.astype(float) ** n * z**k)), rel=1e-12)


class TestErf:
    def test_values(self):
        assert erf_complex(0) == 0
        ref = 2 / math.sqrt(math.pi) * integrate.quad(lambda t: math.exp(-t * t), 0, 1, epsabs=1e-15)[0]
        assert erf_complex(1.0).real == pytest.approx(ref, rel=1e-14)
        assert ref == pytest.approx(0.8427007929497149, rel=1e-15)

    def test_erfi_identity(self):
        assert erfi_complex(1j) == pytest.approx(1j * erf_complex(1.0), rel=1e-15)
        u = 0.7 - 1.3j
        assert erfi_complex(u) == pytest.approx(-1j * erf_complex(1j * u), rel=1e-14)

    def test_overflow_signalled(self):
        with pytest.raises(OverflowError):
            erfi_complex(40.0)

    @settings(max_examples=50, deadline=None)
    @given(st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False))
    def test_symmetries(self, u):
        assert erf_complex(-u) == pytest.approx(-erf_complex(u), rel=1e-12, abs=1e-300)
        assert erf_complex(np.conj(u)) == pytest.approx(np.conj(erf_complex(u)), rel=1e-12, abs=1e-300)


class TestG1:
    def test_values(self):
        assert g1(1.0) == pytest.approx(0.45867514538708193, rel=1e-14)
        assert abs(g1(20.0) - 2.0611536203e-9) < 1e-15

    def test_series(self):
        n = np.arange(1, 1001)
        assert g1(0.5) == pytest.approx(math.fsum(np.exp(-n * 0.5) / n), abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.1, 30.0))
    def test_series_within_tail_bound(self, x):
        n = np.arange(1, 10_001)
        partial = math.fsum(np.exp(-n * x) / n)
        tail = math.exp(-10_001 * x) / (10_001 * (1 - math.exp(-x)))
        assert abs(g1(x) - partial) <= tail + 4e-16 * g1(x)

    def test_domain(self):
        with pytest.raises(ValueError):
            g1(0.0)


class TestHarmonicCoeffs:
    def test_small_v0(self):
        c = harmonic_coeffs(1e-8, 5)
        assert c[0] == pytest.approx(2.0, rel=1e-14)
        assert np.all(np.abs(c[1:]) < 1e-15)

    def test_mean_at_half(self):
        mean = integrate.quad(lambda t: math.sqrt(1 + 0.25 * math.cos(t) ** 2), 0, 2 * math.pi,
                              epsabs=0, epsrel=1e-13, limit=200)[0] / (2 * math.pi)
        c = harmonic_coeffs(0.5, 10)
        assert c[0] / 2 == pytest.approx(mean, rel=1e-13)
        assert c[0] / 2 == pytest.approx(1.0598, abs=1e-4)

    def test_parseval(self):
        c = harmonic_coeffs(0.5, 40)
        assert c[0] ** 2 / 4 + np.sum(c[1:] ** 2) / 2 == pytest.approx(1.125, abs=1e-10)

    def test_fft_matches_series(self):
        for v0 in (0.1, 0.5, 0.9):
            a, b = harmonic_coeffs(v0, 12), harmonic_coeffs_series(v0, 12)
            assert np.allclose(a, b, rtol=0, atol=1e-15)

    def test_geometric_decay(self):
        c = np.abs(harmonic_coeffs_series(0.7, 20))
        assert np.all(np.diff(np.log(c[1:])) < 0)
        ratios = c[2:] / c[1:-1]
        assert ratios.max() < 0.2

    def test_alt_series_has_wrong_zero_order_limit(self):
        assert harmonic_coeffs_alt_series(1e-6, 0)[0] == pytest.approx(-2.0, rel=1e-6)

    def test_domain(self):
        with pytest.raises(ValueError):
            harmonic_coeffs(1.0, 3)
