"""Complex third-order response of a single vibrational Raman line.

The line is modeled as a complex Lorentzian in the two-photon detuning,
with a pressure-dependent width Gamma(p) = a/p + b*p (Dicke narrowing at
low pressure, collisional broadening at high pressure) and a linearly
pressure-shifted center. The response amplitude carries an explicit factor
of pressure for the number-density scaling of the coherent process.

Coefficient values are configuration data with documented provenance
(see the packaged dataset files); this module only fixes the functional
forms. Frequencies are in Hz throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class RamanTransition:
    """One vibrational transition of the filling gas.

    linewidth_a is the Dicke (diffusion) coefficient in Hz*bar, linewidth_b
    the collisional-broadening coefficient in Hz/bar, shift_coefficient the
    collisional line shift in Hz/bar. ``amplitude`` sets the susceptibility
    scale in arbitrary units.
    """

    linewidth_a: float
    linewidth_b: float
    shift_coefficient: float
    shift_frequency: float = 125e12
    amplitude: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.shift_frequency <= 0:
            raise DomainError("shift_frequency must be > 0")
        if self.linewidth_a < 0 or self.linewidth_b < 0:
            raise DomainError("linewidth coefficients must be >= 0")


def linewidth(transition: RamanTransition, pressure: float) -> float:
    """FWHM Gamma(p) = a/p + b*p in Hz; diverges as p -> 0."""
    if pressure <= 0:
        raise DomainError("linewidth model needs pressure > 0 (diffusion term diverges)")
    return transition.linewidth_a / pressure + transition.linewidth_b * pressure


def line_center(transition: RamanTransition, pressure: float) -> float:
    """Pressure-shifted line center in Hz."""
    if pressure < 0:
        raise DomainError("pressure must be >= 0")
    return transition.shift_frequency + transition.shift_coefficient * pressure


def center_shift(transition: RamanTransition, pressure: float) -> float:
    """Collisional shift of the line center relative to the nominal value."""
    if pressure < 0:
        raise DomainError("pressure must be >= 0")
    return transition.shift_coefficient * pressure


def susceptibility(transition: RamanTransition, detuning, pressure: float):
    """Complex chi3 at a two-photon detuning from the nominal shift (Hz).

    chi3(delta) = amplitude * p / (delta - delta0(p) + i Gamma(p)/2), with
    delta0 the collisional shift. Accepts a scalar or array detuning.
    """
    gamma = linewidth(transition, pressure)
    delta0 = center_shift(transition, pressure)
    return (
        transition.amplitude
        * pressure
        / (np.asarray(detuning, dtype=float) - delta0 + 0.5j * gamma)
    )


def susceptibility_peak(transition: RamanTransition, pressure: float) -> float:
    """|chi3| on resonance, i.e. amplitude * p / (Gamma(p)/2)."""
    return transition.amplitude * pressure / (0.5 * linewidth(transition, pressure))


def susceptibility_peak_array(transition: RamanTransition, pressures: np.ndarray):
    """Vectorized |chi3| on resonance; NaN wherever pressure <= 0."""
    p = np.asarray(pressures, dtype=float)
    out = np.full(p.shape, np.nan)
    ok = p > 0
    gamma = transition.linewidth_a / p[ok] + transition.linewidth_b * p[ok]
    out[ok] = transition.amplitude * p[ok] / (0.5 * gamma)
    return out


@dataclass(frozen=True)
class DetuningScan:
    """Normalized conversion profile versus two-photon detuning."""

    detunings: np.ndarray        # Hz, relative to the nominal shift
    conversion: np.ndarray       # peak-normalized
    pressure: float

    def peak_detuning(self) -> float:
        return float(self.detunings[int(np.argmax(self.conversion))])

    def fwhm(self) -> float:
        """Full width at half maximum from linear interpolation of crossings."""
        y = self.conversion
        x = self.detunings
        half = 0.5 * np.nanmax(y)
        above = y >= half
        if not above.any():
            raise DomainError("profile never reaches half maximum")
        idx = np.where(above)[0]
        i0, i1 = idx[0], idx[-1]
        left = x[i0]
        if i0 > 0:
            f = (half - y[i0 - 1]) / (y[i0] - y[i0 - 1])
            left = x[i0 - 1] + f * (x[i0] - x[i0 - 1])
        right = x[i1]
        if i1 < len(x) - 1:
            f = (half - y[i1]) / (y[i1 + 1] - y[i1])
            right = x[i1] + f * (x[i1 + 1] - x[i1])
        return float(right - left)


def detuning_scan(config, detuning_min: float, detuning_max: float, steps: int) -> DetuningScan:
    """Scan the two-photon detuning at the configured pressure.

    ``config`` is a conversion setup exposing ``raman`` and ``gas``; every
    factor of the conversion-rate law other than chi3 is independent of the
    detuning, so the peak-normalized profile is that of |chi3|^2.
    """
    if steps < 2 or not detuning_max > detuning_min:
        raise DomainError("need detuning_max > detuning_min and steps >= 2")
    transition = config.raman
    pressure = config.gas.pressure
    grid = np.linspace(detuning_min, detuning_max, steps)
    profile = np.abs(susceptibility(transition, grid, pressure)) ** 2
    profile /= profile.max()
    return DetuningScan(detunings=grid, conversion=profile, pressure=pressure)
