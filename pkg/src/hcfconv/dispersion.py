"""Refractive-index models for gas-filled anti-resonant capillary fibers.

Three index models feed the phase-matching calculation:

* fused silica (capillary walls), three-term Sellmeier after
  I. H. Malitson, J. Opt. Soc. Am. 55, 1205 (1965), valid 200 nm - 4 um;
* the filling gas, a two-term refractivity fit at dataset reference
  conditions, scaled with density (Lorentz-Lorenz linearization);
* the guided core mode, a Marcatili-style capillary term with an optional
  wall-resonance correction in the spirit of the tube-fiber models of
  Zeisberger and co-workers.

Wall resonances (wavelengths where the capillary wall acts as a
Fabry-Perot and guidance collapses) follow lambda_m = (2 t / m) *
sqrt(n_glass^2 - 1), solved self-consistently. Mode-index and loss
evaluations refuse to operate inside a configurable exclusion band around
each resonance, where the analytic models diverge.

All functions are pure; everything here is safe to call concurrently.
Lengths are in meters, pressures in bar, temperatures in kelvin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    ModeCutoffError,
    NumericalError,
    ResonanceProximityError,
)

# Malitson (1965) fused-silica Sellmeier coefficients; wavelength in um.
_SILICA_B = (0.6961663, 0.4079426, 0.8974794)
_SILICA_C_UM2 = (0.0684043**2, 0.1162414**2, 9.896161**2)
SILICA_WAVELENGTH_RANGE = (200e-9, 4e-6)

# Default half-width of the exclusion band around each wall resonance.
DEFAULT_RESONANCE_BAND = 5e-9

_RESONANCE_SOLVE_TOL = 1e-10  # 0.1 nm
_RESONANCE_MAX_ITER = 100


@dataclass(frozen=True)
class FiberGeometry:
    """Single-ring capillary fiber geometry. Lengths in meters."""

    core_radius: float
    wall_thickness: float
    capillary_count: int
    length: float

    def __post_init__(self):
        if self.core_radius <= 0 or self.wall_thickness <= 0 or self.length <= 0:
            raise DomainError("fiber dimensions must be strictly positive")
        if self.capillary_count < 3:
            raise DomainError("need at least 3 capillaries around the core")
        if not self.wall_thickness < self.core_radius / 10:
            raise DomainError(
                "wall thickness must be small against the core radius "
                f"(got t={self.wall_thickness:g} m, R={self.core_radius:g} m)"
            )


@dataclass(frozen=True)
class GasState:
    """Thermodynamic state of the filling gas.

    ``virial_coefficients`` are the optional (b1, b2, ...) of a pressure
    expansion Z = 1 + b1*p + b2*p**2 + ... with p in bar; empty means
    ideal gas. Density enters only through ``density_ratio``.
    """

    pressure: float
    temperature: float = 295.0
    species: str = "hydrogen"
    virial_coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if self.pressure < 0:
            raise DomainError("pressure must be >= 0")
        if self.temperature <= 0:
            raise DomainError("temperature must be > 0")

    def compressibility(self, pressure=None):
        """Z(p) of the configured compressibility model (1 for ideal gas)."""
        p = self.pressure if pressure is None else pressure
        z = 1.0
        for k, b in enumerate(self.virial_coefficients, start=1):
            z = z + b * p**k
        return z

    def density_ratio(self, reference_pressure, reference_temperature, pressure=None):
        """Number density relative to the given reference conditions."""
        p = self.pressure if pressure is None else pressure
        ideal = (p / reference_pressure) * (reference_temperature / self.temperature)
        if not self.virial_coefficients:
            return ideal
        return ideal / self.compressibility(p)


@dataclass(frozen=True)
class GasDispersionData:
    """Named refractivity dataset for one gas species.

    The refractivity (n - 1) at the dataset reference conditions follows a
    two-term fit b1/(c1 - s^2) + b2/(c2 - s^2) with s = 1/(wavelength in um),
    the form used by Peck-style fits of light gases. Coefficients are
    configuration data loaded from a versioned file, never hard-coded; see
    :mod:`hcfconv.datasets`.
    """

    name: str
    version: str
    species: str
    reference_pressure: float      # bar
    reference_temperature: float   # K
    wavelength_min: float          # m
    wavelength_max: float          # m
    b1: float
    c1: float
    b2: float
    c2: float

    def refractivity(self, wavelength):
        """(n - 1) at reference conditions; wavelength in m (scalar or array)."""
        self._check_range(wavelength)
        s2 = (1e-6 / wavelength) ** 2
        return self.b1 / (self.c1 - s2) + self.b2 / (self.c2 - s2)

    def _check_range(self, wavelength):
        lo, hi = self.wavelength_min, self.wavelength_max
        if np.any(np.asarray(wavelength) < lo) or np.any(np.asarray(wavelength) > hi):
            raise DomainError(
                f"wavelength outside dataset '{self.name}' range "
                f"[{lo * 1e9:.0f}, {hi * 1e9:.0f}] nm"
            )


@dataclass(frozen=True)
class ModeSpec:
    """Guided core mode; u is the Bessel root setting the index deficit."""

    mode_label: str = "HE11"
    u: float = 2.405

    def __post_init__(self):
        if self.u <= 0:
            raise DomainError("mode parameter u must be > 0")


HE11 = ModeSpec()


def silica_index(wavelength):
    """Fused-silica refractive index (Malitson Sellmeier), wavelength in m."""
    lo, hi = SILICA_WAVELENGTH_RANGE
    if not lo < wavelength < hi:
        raise DomainError(
            f"silica Sellmeier valid only for {lo * 1e9:.0f} nm < wavelength "
            f"< {hi * 1e6:.0f} um (got {wavelength * 1e9:.1f} nm)"
        )
    x = (wavelength * 1e6) ** 2
    acc = 1.0
    for b, c in zip(_SILICA_B, _SILICA_C_UM2):
        acc += b * x / (x - c)
    return math.sqrt(acc)


def gas_refractivity(gas: GasState, data: GasDispersionData, wavelength):
    """(n - 1) of the gas at its actual state; exactly linear in density."""
    if gas.species != data.species:
        raise ConfigError(
            f"gas species '{gas.species}' does not match dataset "
            f"'{data.name}' ({data.species})"
        )
    scale = gas.density_ratio(data.reference_pressure, data.reference_temperature)
    return data.refractivity(wavelength) * scale


def gas_index(gas: GasState, data: GasDispersionData, wavelength):
    """Refractive index of the gas; exactly 1.0 at zero pressure."""
    return 1.0 + gas_refractivity(gas, data, wavelength)


@lru_cache(maxsize=256)
def _solve_resonance(wall_thickness: float, order: int) -> float:
    """Fixed-point solve of lambda = (2t/m) sqrt(n_glass(lambda)^2 - 1)."""
    lam = 2.0 * wall_thickness / order * 1.06  # seed near typical silica values
    for _ in range(_RESONANCE_MAX_ITER):
        new = 2.0 * wall_thickness / order * math.sqrt(silica_index(lam) ** 2 - 1.0)
        if abs(new - lam) < _RESONANCE_SOLVE_TOL:
            return new
        lam = new
    raise NumericalError(
        f"resonance order {order} did not converge after "
        f"{_RESONANCE_MAX_ITER} iterations (t={wall_thickness:g} m)"
    )


def resonance_wavelengths(geometry: FiberGeometry, max_order: int) -> list[float]:
    """Wall-resonance wavelengths for orders m = 1..max_order, in meters.

    Raises DomainError if an order falls below the silica Sellmeier range
    (deep-UV resonances cannot be located with this index model).
    """
    if max_order < 1:
        raise DomainError("max_order must be >= 1")
    return [_solve_resonance(geometry.wall_thickness, m) for m in range(1, max_order + 1)]


def nearest_resonance(geometry: FiberGeometry, wavelength: float):
    """(order, resonance wavelength, distance) of the closest wall resonance.

    Returns None when every resonance of the structure lies below the
    silica model range (very thin walls), i.e. nothing is nearby.
    """
    t = geometry.wall_thickness
    # lambda_m * m stays within ~[2t*1.03, 2t*1.19] for silica, so this
    # order bound safely covers every resonance at or above `wavelength`.
    m_max = max(1, math.ceil(2.4 * t / wavelength) + 1)
    best = None
    for m in range(1, m_max + 1):
        try:
            lam_m = _solve_resonance(t, m)
        except DomainError:
            break  # deeper orders lie below the silica model range
        dist = abs(lam_m - wavelength)
        if best is None or dist < best[2]:
            best = (m, lam_m, dist)
    return best


def _require_off_resonance(geometry, wavelength, band):
    found = nearest_resonance(geometry, wavelength)
    if found is None:
        return None
    m, lam_m, dist = found
    if dist < band:
        raise ResonanceProximityError(
            f"wavelength {wavelength * 1e9:.2f} nm within {band * 1e9:.1f} nm of "
            f"wall resonance m={m} at {lam_m * 1e9:.2f} nm"
        )
    return found


def _wall_phase(wavelength, wall_thickness):
    """Transverse phase accumulated across the capillary wall."""
    ng = silica_index(wavelength)
    return 2.0 * math.pi * wall_thickness / wavelength * math.sqrt(ng**2 - 1.0), ng


def effective_index(
    geometry: FiberGeometry,
    gas: GasState,
    data: GasDispersionData,
    wavelength: float,
    mode: ModeSpec = HE11,
    *,
    wall_correction: bool = False,
    resonance_band: float = DEFAULT_RESONANCE_BAND,
) -> float:
    """Effective index of the core mode at one wavelength.

    The base term is the capillary (Marcatili) expression
    n1 * sqrt(1 - (u lambda / (2 pi R n1))^2) with n1 the gas index. With
    ``wall_correction=True`` an analytic resonance term proportional to
    cot(wall phase) is added; it diverges toward each resonance, which is
    why evaluation is refused inside the exclusion band (and wherever the
    corrected value would reach the gas index itself).
    """
    _require_off_resonance(geometry, wavelength, resonance_band)
    n1 = gas_index(gas, data, wavelength)
    base = _base_effective_index(n1, geometry.core_radius, wavelength, mode)
    if not wall_correction:
        return float(base)
    phi, ng = _wall_phase(wavelength, geometry.wall_thickness)
    eps = (ng / n1) ** 2
    sigma = (eps + 1.0) / (2.0 * math.sqrt(eps - 1.0))
    corr = (
        mode.u**2
        * wavelength**3
        * sigma
        / (8.0 * math.pi**3 * geometry.core_radius**3 * n1)
        / math.tan(phi)
    )
    neff = base - corr
    if neff >= n1:
        raise ResonanceProximityError(
            "wall-resonance correction pushes the mode index above the gas "
            f"index at {wavelength * 1e9:.2f} nm; the analytic model is not "
            "trustworthy this close to a resonance"
        )
    return float(neff)


def _base_effective_index(n1, core_radius, wavelength, mode):
    """Capillary-model index; n1 may be a scalar or an ndarray."""
    arg = mode.u * np.asarray(wavelength) / (2.0 * math.pi * core_radius * n1)
    if np.any(arg >= 1.0):
        raise ModeCutoffError(
            f"wavelength {np.max(wavelength) * 1e9:.1f} nm beyond guidance "
            f"cutoff for core radius {core_radius * 1e6:.2f} um"
        )
    return n1 * np.sqrt(1.0 - arg**2)


def leakage_loss_estimate(
    geometry: FiberGeometry,
    wavelength: float,
    mode: ModeSpec = HE11,
    *,
    resonance_band: float = DEFAULT_RESONANCE_BAND,
) -> float:
    """Relative leakage-loss figure in dB/m.

    Combines the capillary-model power loss (scaling as lambda^2 / R^3,
    Marcatili-Schmeltzer HE modes) with a 1/sin^2(wall phase) enhancement
    that grows toward each wall resonance. Useful for comparing operating
    points of one fiber; no absolute calibration against a full vectorial
    solver is claimed.
    """
    _require_off_resonance(geometry, wavelength, resonance_band)
    phi, ng = _wall_phase(wavelength, geometry.wall_thickness)
    nu2 = ng**2
    alpha_field = (
        (mode.u / (2.0 * math.pi)) ** 2
        * wavelength**2
        / geometry.core_radius**3
        * (nu2 + 1.0)
        / (2.0 * math.sqrt(nu2 - 1.0))
    )
    enhancement = 1.0 / math.sin(phi) ** 2
    # power attenuation 2*alpha in Np/m -> dB/m
    return 2.0 * alpha_field * enhancement * (10.0 / math.log(10.0))
