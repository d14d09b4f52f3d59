import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udwrate.rate import DetectorConfig
from udwrate.rate.kernel import FunctionKernel
from udwrate.rate.poles import PoleFindingError, find_kernel_poles, find_poles
from udwrate.rate.residue import ResidueError, residue_at
from udwrate.worldline import Circular, Cusped, Inertial, UniformAcceleration


class TestResidueAt:
    def test_simple_pole(self):
        assert residue_at(lambda y: 1 / y, 0.0, 0.1) == pytest.approx(1.0, abs=1e-14)

    def test_double_pole_without_residue(self):
        assert abs(residue_at(lambda y: 1 / y**2, 0.0, 0.1)) < 1e-14

    def test_double_pole_with_residue(self):
        assert residue_at(lambda y: np.exp(y) / y**2, 0.0, 0.1) == pytest.approx(1.0, abs=1e-13)

    def test_cluster_sum(self):
        f = lambda y: 1 / ((y - 0.01) * (y + 0.01)) + 3 / (y - 0.02)  # noqa: E731
        assert residue_at(f, 0.0, 0.1) == pytest.approx(3.0, abs=1e-12)

    def test_unconverged(self):
        # essential singularity right next to the circle
        with pytest.raises(ResidueError):
            residue_at(lambda y: np.exp(1 / (y - 0.1001)), 0.0, 0.1, max_nodes=256)

    @settings(max_examples=30, deadline=None)
    @given(st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
           st.integers(1, 4))
    def test_polynomial_over_power(self, c, y0, m):
        # Res (y - y0)^-m (1 + c (y - y0))^m = binom(m, m-1) c^{m-1}
        f = lambda y: (1 + c * (y - y0)) ** m / (y - y0) ** m  # noqa: E731
        expected = math.comb(m, m - 1) * c ** (m - 1)
        assert residue_at(f, y0, 0.3) == pytest.approx(expected, rel=1e-10, abs=1e-11)


class TestFindPoles:
    def test_uniform_double_zeros(self):
        ps = find_poles(UniformAcceleration(1.0), 0.0, DetectorConfig(sigma=50.0, radius_factor=1.0))
        w = ps.locations
        assert len(ps) == 7
        assert np.allclose(np.sort(w.real), 2 * math.pi * np.arange(1, 8), rtol=0, atol=1e-9)
        assert np.all(np.abs(w.imag) < 1e-9)
        assert np.all(ps.multiplicities == 2)
        assert ps.winding_total == 14

    def test_inertial_has_none(self):
        ps = find_poles(Inertial(), 0.0, DetectorConfig(sigma=5.0))
        assert len(ps) == 0 and ps.winding_total == 0

    def test_cusped(self):
        ps = find_poles(Cusped(1.0), 0.0, DetectorConfig(sigma=3.0, radius_factor=2.0))
        assert len(ps) == 1
        assert ps.poles[0].w == pytest.approx(2 * math.sqrt(3), abs=1e-10)
        assert ps.poles[0].multiplicity == 1

    def test_cusped_scales_with_acceleration(self):
        ps = find_poles(Cusped(2.0), 0.0, DetectorConfig(sigma=3.0, radius_factor=2.0))
        assert [p.w.real for p in ps] == pytest.approx([math.sqrt(3)], abs=1e-10)

    def test_circular_zeros_are_conjugate_pairs(self):
        ps = find_poles(Circular(1.0, 2.0), 0.0, DetectorConfig(sigma=10.0, radius_factor=2.0))
        w = ps.locations
        assert len(w) > 0
        for z in w:
            assert np.min(np.abs(w - np.conj(z))) < 1e-8
            assert abs(Circular(1.0, 2.0).sigma(0.0, np.array([-1j * z]))[0]) < 1e-8 * abs(z) ** 2

    def test_zero_on_boundary_is_retried(self):
        # R = 6 sigma = 1200 pi lands exactly on the double zero at 2 pi * 600
        ps = find_poles(UniformAcceleration(1.0), 0.0, DetectorConfig(sigma=200 * math.pi, radius_factor=6.0))
        assert len(ps) == 599
        assert ps.re_max < 1200 * math.pi

    def test_function_kernel(self):
        k = FunctionKernel(lambda y: y**2 * (1 + (y / 3) ** 2), descriptor="quartic")
        ps = find_kernel_poles(k, 1e-6, 10.0, 10.0)
        assert [(p.w, p.multiplicity) for p in ps] == [(pytest.approx(3.0, abs=1e-12), 1)]

    def test_winding_mismatch_is_reported(self):
        # a pole inside the box spoils the zero count
        k = FunctionKernel(lambda y: y**2 / (y + 2j), descriptor="pole")
        with pytest.raises(PoleFindingError):
            find_kernel_poles(k, 1e-6, 5.0, 5.0)
