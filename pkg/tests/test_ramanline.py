import math

import numpy as np
import pytest

from hcfconv.datasets import hydrogen_q1_transition
from hcfconv.errors import DomainError
from hcfconv.ramanline import (
    RamanTransition,
    detuning_scan,
    line_center,
    linewidth,
    susceptibility,
    susceptibility_peak,
    susceptibility_peak_array,
)


@pytest.fixture(scope="module")
def h2line():
    return hydrogen_q1_transition()


def make_line(a=300e6, b=50e6, shift=-3e6, amplitude=1.0):
    return RamanTransition(linewidth_a=a, linewidth_b=b, shift_coefficient=shift,
                           amplitude=amplitude)


class TestLinewidth:
    def test_minimum_at_sqrt_a_over_b(self):
        line = make_line(a=300e6, b=50e6)
        p_star = math.sqrt(300e6 / 50e6)
        grid = np.linspace(0.2, 12.0, 2000)
        widths = [linewidth(line, p) for p in grid]
        assert grid[int(np.argmin(widths))] == pytest.approx(p_star, abs=0.02)
        assert linewidth(line, p_star) <= min(
            linewidth(line, 0.9 * p_star), linewidth(line, 1.1 * p_star)
        )

    def test_pure_collisional_is_linear(self):
        line = make_line(a=0.0, b=50e6)
        assert linewidth(line, 4.0) / linewidth(line, 2.0) == 2.0

    def test_default_coefficients_minimum_in_few_bar_region(self, h2line):
        # Bischel-Dyer style coefficients put the width minimum near
        # sqrt(a/b), a few bar for hydrogen.
        p_min = math.sqrt(h2line.linewidth_a / h2line.linewidth_b)
        assert 1.0 < p_min < 5.0
        # and the width there is a few hundred MHz
        assert 1e8 < linewidth(h2line, p_min) < 1e9

    def test_zero_pressure_rejected(self, h2line):
        with pytest.raises(DomainError):
            linewidth(h2line, 0.0)


class TestLineCenter:
    def test_zero_pressure_is_nominal_shift(self, h2line):
        assert line_center(h2line, 0.0) == h2line.shift_frequency

    def test_zero_coefficient_is_pressure_independent(self):
        line = make_line(shift=0.0)
        assert line_center(line, 30.0) == line_center(line, 0.0)

    def test_shift_is_linear(self, h2line):
        base = line_center(h2line, 0.0)
        assert line_center(h2line, 14.0) - base == pytest.approx(
            2 * (line_center(h2line, 7.0) - base), rel=1e-12
        )


class TestSusceptibility:
    def test_peak_at_shifted_center(self, h2line):
        p = 8.0
        delta0 = h2line.shift_coefficient * p
        grid = delta0 + np.linspace(-2e9, 2e9, 4001)
        mag2 = np.abs(susceptibility(h2line, grid, p)) ** 2
        assert grid[int(np.argmax(mag2))] == pytest.approx(delta0, abs=1.1e6)

    def test_fwhm_equals_linewidth(self, h2line):
        # half maximum falls exactly at delta0 +- Gamma/2
        p = 5.0
        gamma = linewidth(h2line, p)
        delta0 = h2line.shift_coefficient * p
        peak = abs(susceptibility(h2line, delta0, p)) ** 2
        for sign in (-1.0, +1.0):
            half = abs(susceptibility(h2line, delta0 + sign * gamma / 2, p)) ** 2
            assert half == pytest.approx(peak / 2, rel=1e-12)

    def test_far_detuning_inverse_scaling(self, h2line):
        p = 5.0
        gamma = linewidth(h2line, p)
        delta0 = h2line.shift_coefficient * p
        m100 = abs(susceptibility(h2line, delta0 + 100 * gamma, p))
        m200 = abs(susceptibility(h2line, delta0 + 200 * gamma, p))
        assert m100 / m200 == pytest.approx(2.0, rel=0.01)

    def test_peak_magnitude_helper(self, h2line):
        p = 3.0
        delta0 = h2line.shift_coefficient * p
        assert susceptibility_peak(h2line, p) == pytest.approx(
            abs(susceptibility(h2line, delta0, p)), rel=1e-12
        )

    def test_peak_array_matches_scalar_and_flags_nonpositive(self, h2line):
        p = np.array([0.0, 2.0, 10.0])
        arr = susceptibility_peak_array(h2line, p)
        assert math.isnan(arr[0])
        assert arr[1] == pytest.approx(susceptibility_peak(h2line, 2.0), rel=1e-12)
        assert arr[2] == pytest.approx(susceptibility_peak(h2line, 10.0), rel=1e-12)

    def test_kramers_kronig_sign_structure(self, h2line):
        p = 6.0
        delta0 = h2line.shift_coefficient * p
        grid = delta0 + np.linspace(-5e9, 5e9, 2001)
        chi = susceptibility(h2line, grid, p)
        assert np.all(chi.imag < 0)
        # real part antisymmetric about the shifted center
        assert np.max(np.abs(chi.real + chi.real[::-1])) < 1e-12 * np.max(np.abs(chi.real))

    def test_continuity_in_pressure_and_detuning(self, h2line):
        base = susceptibility(h2line, 1e8, 5.0)
        assert abs(susceptibility(h2line, 1e8 + 1.0, 5.0) - base) < 1e-6 * abs(base)
        assert abs(susceptibility(h2line, 1e8, 5.0 + 1e-6) - base) < 1e-5 * abs(base)

    def test_zero_pressure_rejected(self, h2line):
        with pytest.raises(DomainError):
            susceptibility(h2line, 0.0, 0.0)


class TestDetuningScan:
    class _Cfg:
        def __init__(self, raman, pressure):
            self.raman = raman

            class _Gas:
                pass

            self.gas = _Gas()
            self.gas.pressure = pressure

    def test_symmetric_about_shifted_center(self, h2line):
        p = 5.0
        delta0 = h2line.shift_coefficient * p
        width = 3e9
        scan = detuning_scan(self._Cfg(h2line, p), delta0 - width, delta0 + width, 2001)
        assert np.max(np.abs(scan.conversion - scan.conversion[::-1])) < 1e-9

    def test_fwhm_within_grid_resolution(self, h2line):
        p = 5.0
        gamma = linewidth(h2line, p)
        scan = detuning_scan(self._Cfg(h2line, p), -3e9, 3e9, 6001)
        step = scan.detunings[1] - scan.detunings[0]
        assert scan.fwhm() == pytest.approx(gamma, abs=2 * step)

    def test_peak_at_shifted_center_not_nominal(self, h2line):
        assert h2line.shift_coefficient != 0.0
        p = 20.0
        scan = detuning_scan(self._Cfg(h2line, p), -2e9, 2e9, 8001)
        step = scan.detunings[1] - scan.detunings[0]
        assert scan.peak_detuning() == pytest.approx(
            h2line.shift_coefficient * p, abs=2 * step
        )
        assert abs(scan.peak_detuning()) > 10 * step

    def test_amplitude_rescaling_leaves_normalized_profile(self, h2line):
        import dataclasses

        doubled = dataclasses.replace(h2line, amplitude=2 * h2line.amplitude)
        a = detuning_scan(self._Cfg(h2line, 5.0), -1e9, 1e9, 501)
        b = detuning_scan(self._Cfg(doubled, 5.0), -1e9, 1e9, 501)
        assert np.array_equal(a.conversion, b.conversion)

    def test_bad_range_rejected(self, h2line):
        with pytest.raises(DomainError):
            detuning_scan(self._Cfg(h2line, 5.0), 1e9, -1e9, 100)


class TestValidation:
    def test_negative_linewidth_coefficients_rejected(self):
        with pytest.raises(DomainError):
            RamanTransition(linewidth_a=-1.0, linewidth_b=1.0, shift_coefficient=0.0)

    def test_nonpositive_shift_rejected(self):
        with pytest.raises(DomainError):
            RamanTransition(linewidth_a=1.0, linewidth_b=1.0, shift_coefficient=0.0,
                            shift_frequency=0.0)

    def test_default_nominal_shift(self):
        line = make_line()
        assert line.shift_frequency == 125e12
