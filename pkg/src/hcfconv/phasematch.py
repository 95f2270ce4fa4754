"""Four-wave phase matching and pressure-dependent conversion efficiency.

The conversion rate of the Stokes-seeded four-wave mixing process follows

    rate ~ |chi3_peak(p)|^2 * L^2 * sinc^2(mismatch(p) * L / 2)
           * P_pump * P_stokes * P_probe

with the signed mismatch

    mismatch = -beta_pump + beta_stokes + beta_probe - beta_signal

built from the mode propagation constants beta = (2 pi / lambda) * n_eff.
Raising the gas pressure raises the gas contribution to every beta and
tunes the mismatch through zero, which produces the oscillatory pressure
dependence and a global efficiency peak at the phase-matching pressure.

For a pressure profile p(z) along the fiber the sinc^2 factor generalizes
to the coherence factor |(1/L) integral exp(i phi(z)) dz|^2 with
phi(z) = integral_0^z mismatch(p(z')) dz', which reduces exactly to
sinc^2 for a uniform profile.

Pressures are in bar, lengths in meters, powers in watts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from ._util import canonical_hash, format_float
from .constants import C_VACUUM
from .dispersion import (
    DEFAULT_RESONANCE_BAND,
    HE11,
    FiberGeometry,
    GasDispersionData,
    GasState,
    ModeSpec,
    _base_effective_index,
    _require_off_resonance,
    effective_index,
    gas_refractivity,
)
from .errors import ConfigWarning, DomainError, HcfconvError, NumericalError
from .polarization import JonesVector
from .ramanline import RamanTransition, susceptibility_peak, susceptibility_peak_array

_ROLES = ("pump", "stokes", "probe", "signal")

# Below this |x| the sinc series is used instead of sin(x)/x.
_SINC_SERIES_CUTOFF = 1e-4


def sinc(x):
    """sin(x)/x with sinc(0) = 1; series expansion for small |x|."""
    arr = np.asarray(x, dtype=float)
    small = np.abs(arr) < _SINC_SERIES_CUTOFF
    out = np.empty_like(arr)
    xs = arr[small]
    out[small] = 1.0 - xs**2 / 6.0 + xs**4 / 120.0
    xl = arr[~small]
    out[~small] = np.sin(xl) / xl
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OpticalField:
    """One of the four fields taking part in the mixing process.

    Only the wavelength is stored; the frequency is always derived from it
    with the exact vacuum speed of light, so the two can never disagree.
    """

    role: str
    wavelength: float                     # m
    power: float = 0.0                    # W
    polarization: JonesVector = JonesVector(1, 0)

    def __post_init__(self):
        if self.role not in _ROLES:
            raise DomainError(f"unknown field role '{self.role}'")
        if self.wavelength <= 0:
            raise DomainError("wavelength must be > 0")
        if self.power < 0:
            raise DomainError("power must be >= 0")

    @property
    def frequency(self) -> float:
        return C_VACUUM / self.wavelength


def signal_wavelength(pump_wl: float, stokes_wl: float, probe_wl: float) -> float:
    """Energy-conserving signal wavelength for the Stokes-shifted output.

    nu_signal = nu_probe - (nu_pump - nu_stokes); all wavelengths in m.
    """
    beat = C_VACUUM / pump_wl - C_VACUUM / stokes_wl
    if beat <= 0:
        raise DomainError("pump frequency must exceed the Stokes frequency")
    nu_signal = C_VACUUM / probe_wl - beat
    if nu_signal <= 0:
        raise DomainError("probe frequency must exceed the pump-Stokes beat")
    return C_VACUUM / nu_signal


@dataclass(frozen=True)
class ConversionConfig:
    """Complete description of one conversion setup.

    The signal wavelength is always recomputed from energy conservation;
    a signal field passed in only contributes its power and polarization.
    A pump-Stokes beat note further than ``beat_window`` (Hz) from the
    Raman shift raises a ConfigWarning rather than an error, since the
    nominal wavelengths of a setup are labels while the lasers are tuned
    onto the line.
    """

    pump: OpticalField
    stokes: OpticalField
    probe: OpticalField
    fiber: FiberGeometry
    gas: GasState
    dispersion_data: GasDispersionData
    raman: RamanTransition
    signal: OpticalField | None = None
    chi3_amplitude: float = 1.0
    mode: ModeSpec = HE11
    beat_window: float = 50e9
    resonance_band: float = DEFAULT_RESONANCE_BAND

    def __post_init__(self):
        for field_, role in ((self.pump, "pump"), (self.stokes, "stokes"), (self.probe, "probe")):
            if field_.role != role:
                raise DomainError(f"field in '{role}' slot has role '{field_.role}'")
        lam_signal = signal_wavelength(
            self.pump.wavelength, self.stokes.wavelength, self.probe.wavelength
        )
        signal = self.signal
        if signal is None:
            signal = OpticalField("signal", lam_signal)
        else:
            if signal.role != "signal":
                raise DomainError(f"field in 'signal' slot has role '{signal.role}'")
            signal = replace(signal, wavelength=lam_signal)
        object.__setattr__(self, "signal", signal)
        beat = self.pump.frequency - self.stokes.frequency
        if abs(beat - self.raman.shift_frequency) > self.beat_window:
            warnings.warn(
                f"pump-Stokes beat note {beat / 1e12:.4f} THz is "
                f"{abs(beat - self.raman.shift_frequency) / 1e9:.1f} GHz from the "
                f"Raman shift {self.raman.shift_frequency / 1e12:.4f} THz "
                f"(window {self.beat_window / 1e9:.1f} GHz)",
                ConfigWarning,
                stacklevel=3,
            )

    def fields(self):
        return (self.pump, self.stokes, self.probe, self.signal)

    def at_pressure(self, pressure: float) -> "ConversionConfig":
        """Same setup with the gas at a different pressure."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConfigWarning)
            return replace(self, gas=replace(self.gas, pressure=pressure))

    def config_hash(self) -> str:
        return canonical_hash(self)


def propagation_constant(
    field: OpticalField,
    geometry: FiberGeometry,
    gas: GasState,
    data: GasDispersionData,
    mode: ModeSpec = HE11,
    *,
    resonance_band: float = DEFAULT_RESONANCE_BAND,
) -> float:
    """beta = (2 pi / lambda) * n_eff for one field, in rad/m."""
    neff = effective_index(
        geometry, gas, data, field.wavelength, mode, resonance_band=resonance_band
    )
    return 2.0 * math.pi / field.wavelength * neff


def mismatch_from_betas(beta_pump, beta_stokes, beta_probe, beta_signal):
    """Signed combination -beta_pump + beta_stokes + beta_probe - beta_signal."""
    return -beta_pump + beta_stokes + beta_probe - beta_signal


def _mismatch_array(config: ConversionConfig, pressures) -> np.ndarray:
    """Vectorized phase mismatch over a pressure array (resonances and the
    guidance cutoff do not move with pressure, so they are checked once per
    field; failures are labeled with the offending field role)."""
    p = np.asarray(pressures, dtype=float)
    data = config.dispersion_data
    total = np.zeros(p.shape)
    signs = {"pump": -1.0, "stokes": +1.0, "probe": +1.0, "signal": -1.0}
    for field_ in config.fields():
        lam = field_.wavelength
        try:
            _require_off_resonance(config.fiber, lam, config.resonance_band)
            gas_refractivity(config.gas, data, lam)  # species/range validation
            scale = config.gas.density_ratio(
                data.reference_pressure, data.reference_temperature, p
            )
            n1 = 1.0 + data.refractivity(lam) * scale
            neff = _base_effective_index(n1, config.fiber.core_radius, lam, config.mode)
        except HcfconvError as exc:
            raise type(exc)(f"{field_.role} field: {exc}") from exc
        total = total + signs[field_.role] * (2.0 * math.pi / lam) * neff
    return total


def phase_mismatch(config: ConversionConfig, pressure: float) -> float:
    """Signed four-field phase mismatch at one pressure, rad/m."""
    return float(_mismatch_array(config, np.asarray(pressure, dtype=float)))


def conversion_efficiency(config: ConversionConfig, pressure: float) -> float:
    """Relative conversion rate at one pressure, arbitrary units.

    |chi3 on resonance|^2 * L^2 * sinc^2(mismatch L / 2) * product of the
    three input powers. Only ratios of these values are meaningful.
    """
    mism = phase_mismatch(config, pressure)
    x = 0.5 * mism * config.fiber.length
    peak = config.chi3_amplitude * susceptibility_peak(config.raman, pressure)
    return (
        peak**2
        * config.fiber.length**2
        * sinc(x) ** 2
        * config.pump.power
        * config.stokes.power
        * config.probe.power
    )


@dataclass(frozen=True)
class PressureProfile:
    """Pressure along the fiber: uniform, linear, or sampled."""

    kind: str
    fiber_length: float
    p_in: float = 0.0
    p_out: float = 0.0
    samples_z: tuple[float, ...] = ()
    samples_p: tuple[float, ...] = ()

    def __post_init__(self):
        if self.fiber_length <= 0:
            raise DomainError("fiber_length must be > 0")
        if self.kind not in ("uniform", "linear", "sampled"):
            raise DomainError(f"unknown profile kind '{self.kind}'")
        if self.kind == "sampled":
            z = np.asarray(self.samples_z)
            p = np.asarray(self.samples_p)
            if len(z) != len(p) or len(z) < 2:
                raise DomainError("sampled profile needs matching z and p lists (>= 2 points)")
            if not (np.all(np.diff(z) > 0) and z[0] == 0.0 and z[-1] == self.fiber_length):
                raise DomainError("sample positions must increase strictly from 0 to fiber_length")
            if np.any(p < 0):
                raise DomainError("pressures must be >= 0")
        elif self.p_in < 0 or self.p_out < 0:
            raise DomainError("pressures must be >= 0")

    @classmethod
    def uniform(cls, pressure: float, fiber_length: float):
        return cls("uniform", fiber_length, p_in=pressure, p_out=pressure)

    @classmethod
    def linear(cls, p_in: float, p_out: float, fiber_length: float):
        return cls("linear", fiber_length, p_in=p_in, p_out=p_out)

    @classmethod
    def sampled(cls, positions, pressures):
        z = tuple(float(v) for v in positions)
        p = tuple(float(v) for v in pressures)
        return cls("sampled", z[-1] if z else 0.0, samples_z=z, samples_p=p)

    def pressure_at(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "uniform":
            return np.full(z.shape, self.p_in)
        if self.kind == "linear":
            return self.p_in + (self.p_out - self.p_in) * z / self.fiber_length
        return np.interp(z, self.samples_z, self.samples_p)

    def mean_pressure(self) -> float:
        if self.kind == "sampled":
            return float(np.trapz(self.samples_p, self.samples_z) / self.fiber_length)
        return 0.5 * (self.p_in + self.p_out)


def _cumulative_simpson(y: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral of uniform samples, locally quadratic (Simpson-like).

    Interval [x_{j-1}, x_j] integrates the parabola through the three
    nearest samples; exact for constants and quadratics.
    """
    out = np.zeros(len(y), dtype=y.dtype if np.iscomplexobj(y) else float)
    if len(y) < 3:
        if len(y) == 2:
            out[1] = 0.5 * dx * (y[0] + y[1])
        return out
    seg = np.empty(len(y) - 1, dtype=out.dtype)
    seg[0] = dx / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
    seg[1:] = dx / 12.0 * (-y[:-2] + 8.0 * y[1:-1] + 5.0 * y[2:])
    out[1:] = np.cumsum(seg)
    return out


def _composite_simpson(y: np.ndarray, dx: float):
    """Composite Simpson rule; len(y) must be odd (even interval count)."""
    return dx / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2]))


def coherence_factor(
    config: ConversionConfig,
    profile: PressureProfile,
    rtol: float = 1e-9,
) -> float:
    """|(1/L) integral exp(i phi(z)) dz|^2 for a pressure profile.

    phi(z) is the accumulated mismatch phase. Evaluated by composite
    Simpson quadrature with grid doubling until two refinements agree to
    ``rtol`` (relative, with a small absolute floor); for a uniform
    profile the result equals sinc^2(mismatch * L / 2).
    """
    length = profile.fiber_length
    n = 128
    prev = None
    delta = math.inf
    while n <= (1 << 21):
        z = np.linspace(0.0, length, n + 1)
        mism = _mismatch_array(config, profile.pressure_at(z))
        phi = _cumulative_simpson(mism, z[1] - z[0])
        integral = _composite_simpson(np.exp(1j * phi), z[1] - z[0]) / length
        factor = float(abs(integral) ** 2)
        if prev is not None:
            # convergence is judged on the returned squared magnitude, with
            # a small absolute floor against the roundoff of the long sums
            delta = abs(factor - prev)
            if delta <= max(rtol * factor, 1e-13):
                return factor
        prev = factor
        n *= 2
    raise NumericalError(
        f"coherence integral did not converge to rtol={rtol:g} "
        f"(reached {n // 2} intervals, last refinement changed {delta:.3g})"
    )


@dataclass
class SweepResult:
    """Model curves on a pressure grid.

    ``efficiency`` is peak-normalized over the valid points; invalid grid
    points (e.g. zero pressure, where the Raman linewidth model diverges)
    hold NaN. ``peak_raw`` restores absolute (arbitrary-unit) values via
    efficiency * peak_raw.
    """

    pressures: np.ndarray
    phase_mismatch: np.ndarray
    efficiency: np.ndarray
    peak_raw: float
    peak_pressure: float
    config_hash: str
    gradient_out_ratio: float | None = None

    @property
    def n_invalid(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.efficiency)))

    def data_lines(self) -> list[str]:
        rows = []
        for p, dbeta, eff in zip(self.pressures, self.phase_mismatch, self.efficiency):
            rows.append("\t".join(format_float(v) for v in (p, dbeta, eff)))
        return rows

    def write_tsv(self, path, generated: str | None = None):
        header = [
            "# hcfconv pressure sweep",
            f"# config_hash: {self.config_hash}",
            f"# gradient_out_ratio: {self.gradient_out_ratio if self.gradient_out_ratio is not None else 'none'}",
            f"# invalid_points: {self.n_invalid}",
            f"# peak_raw: {format_float(self.peak_raw)}",
            f"# peak_pressure_bar: {format_float(self.peak_pressure)}",
            "# columns: pressure_bar\tdelta_beta_rad_per_m\tefficiency_rel",
        ]
        if generated is not None:
            header.insert(1, f"# generated: {generated}")
        with open(path, "w") as fh:
            fh.write("\n".join(header + self.data_lines()) + "\n")

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "gradient_out_ratio": self.gradient_out_ratio,
            "invalid_points": self.n_invalid,
            "peak_raw": self.peak_raw,
            "peak_pressure_bar": self.peak_pressure,
            "pressure_bar": [float(v) for v in self.pressures],
            "delta_beta_rad_per_m": [float(v) for v in self.phase_mismatch],
            "efficiency_rel": [None if not np.isfinite(v) else float(v) for v in self.efficiency],
        }


def pressure_sweep(
    config: ConversionConfig,
    p_min: float,
    p_max: float,
    steps: int,
    gradient_out_ratio: float | None = None,
    rtol: float = 1e-9,
) -> SweepResult:
    """Evaluate the conversion model on a uniform pressure grid.

    With ``gradient_out_ratio`` set, each grid pressure is taken as the
    inlet of a linear profile ending at ratio * inlet, the sinc^2 factor
    is replaced by the profile coherence factor, and the susceptibility is
    evaluated at the column-mean pressure.

    Grid points where the model is undefined are marked invalid (NaN), not
    fatal. Results are deterministic and written in grid order.
    """
    if not (0 <= p_min < p_max) or steps < 2:
        raise DomainError("need 0 <= p_min < p_max and steps >= 2")
    pressures = np.linspace(p_min, p_max, steps)
    mism = _mismatch_array(config, pressures)
    length = config.fiber.length
    if gradient_out_ratio is None:
        coherence = sinc(0.5 * mism * length) ** 2
        chi_pressures = pressures
    else:
        if gradient_out_ratio < 0:
            raise DomainError("gradient_out_ratio must be >= 0")
        coherence = np.empty_like(pressures)
        for i, p in enumerate(pressures):
            profile = PressureProfile.linear(p, gradient_out_ratio * p, length)
            coherence[i] = coherence_factor(config, profile, rtol=rtol)
        chi_pressures = pressures * (1.0 + gradient_out_ratio) / 2.0
    peak_chi = config.chi3_amplitude * susceptibility_peak_array(config.raman, chi_pressures)
    powers = config.pump.power * config.stokes.power * config.probe.power
    raw = peak_chi**2 * length**2 * coherence * powers
    if not np.isfinite(raw).any():
        raise NumericalError("every grid point of the sweep is invalid")
    imax = int(np.nanargmax(raw))
    peak_raw = float(raw[imax])
    efficiency = raw / peak_raw if peak_raw > 0 else raw
    return SweepResult(
        pressures=pressures,
        phase_mismatch=mism,
        efficiency=efficiency,
        peak_raw=peak_raw,
        peak_pressure=float(pressures[imax]),
        config_hash=config.config_hash(),
        gradient_out_ratio=gradient_out_ratio,
    )


def find_efficiency_maxima(result: SweepResult, min_height_rel: float = 1e-4):
    """Interior local maxima of a sweep as (pressure, normalized efficiency).

    Peaks below ``min_height_rel`` of the global maximum are dropped; this
    suppresses the sub-1e-4 micro-lobes that the pressure-dependent
    linewidth envelope imprints below a few bar, which are not maxima of
    the phase-matching oscillation itself.
    """
    eff = np.where(np.isfinite(result.efficiency), result.efficiency, -np.inf)
    maxima = []
    for i in range(1, len(eff) - 1):
        if eff[i] < min_height_rel:
            continue
        if eff[i] >= eff[i - 1] and eff[i] >= eff[i + 1] and (
            eff[i] > eff[i - 1] or eff[i] > eff[i + 1]
        ):
            maxima.append((float(result.pressures[i]), float(eff[i])))
    return maxima


def _safe_efficiency(config, pressure):
    try:
        return conversion_efficiency(config, pressure)
    except HcfconvError:
        return -math.inf


def maximize_on_grid(func, lo: float, hi: float, grid_points: int = 2000, tol: float = 0.01):
    """Deterministic grid search plus golden-section refinement.

    The coarse argmax takes the first (lowest-argument) occurrence; the
    refined point replaces it only if strictly better, so a flat function
    returns the lowest argument.
    """
    if not lo < hi:
        raise DomainError("need lo < hi")
    grid = np.linspace(lo, hi, grid_points)
    values = np.array([func(x) for x in grid])
    if not np.isfinite(values).any():
        raise NumericalError("no valid point in the search range")
    i = int(np.argmax(values))
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, grid_points - 1)])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    while b - a > tol:
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        if func(c) >= func(d):
            b = d
        else:
            a = c
    candidate = 0.5 * (a + b)
    f_candidate = func(candidate)
    if f_candidate > values[i]:
        return candidate, float(f_candidate)
    return float(grid[i]), float(values[i])


def optimize_pressure(
    config: ConversionConfig,
    p_min: float,
    p_max: float,
    grid_points: int = 2000,
    tol: float = 0.01,
) -> tuple[float, float]:
    """Pressure of maximal conversion efficiency in [p_min, p_max].

    Returns (pressure in bar, efficiency in the arbitrary units of
    :func:`conversion_efficiency`). Ties break toward lower pressure.
    """
    if p_min < 0:
        raise DomainError("p_min must be >= 0")
    return maximize_on_grid(
        lambda p: _safe_efficiency(config, p), p_min, p_max, grid_points, tol
    )
