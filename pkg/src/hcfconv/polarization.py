"""Jones-vector states, PBS projections, and sine fits of projection scans.

The fit model for an angle-resolved projection measurement is

    rate(theta) = offset + amplitude * sin(2 k theta + phase)

with k = 1 for a polarizer/polarization-angle scan (180 deg period) and
k = 2 for a half-wave-plate scan (90 deg period). Fits are solved by
linear least squares on (offset, a sin, b cos), which is convex and needs
no starting guess; amplitude and phase follow from (a, b).

Fidelity conventions: state fidelity is |<expected|observed>|^2; the
fringe-visibility mapping F = (1 + V) / 2 is the projection-fidelity
convention and is reported alongside the raw visibility, never instead
of it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataParseError, DomainError

_PROJECTION_COLUMNS = ("angle_deg", "counts_v", "counts_h", "exposure_s")


@dataclass(frozen=True)
class JonesVector:
    """Normalized two-component polarization state (H, V amplitudes)."""

    h: complex
    v: complex

    def __post_init__(self):
        norm = math.sqrt(abs(self.h) ** 2 + abs(self.v) ** 2)
        if norm == 0.0:
            raise DomainError("zero Jones vector has no polarization state")
        object.__setattr__(self, "h", complex(self.h) / norm)
        object.__setattr__(self, "v", complex(self.v) / norm)

    @classmethod
    def horizontal(cls):
        return cls(1, 0)

    @classmethod
    def vertical(cls):
        return cls(0, 1)

    @classmethod
    def diagonal(cls):
        return cls(1, 1)

    @classmethod
    def antidiagonal(cls):
        return cls(1, -1)

    @classmethod
    def circular_left(cls):
        return cls(1, 1j)

    @classmethod
    def circular_right(cls):
        return cls(1, -1j)

    @classmethod
    def linear(cls, angle_deg: float):
        a = math.radians(angle_deg)
        return cls(math.cos(a), math.sin(a))

    @classmethod
    def from_name(cls, name: str):
        """Parse 'H', 'V', 'D', 'A', 'L', 'R' or 'linear:<angle in deg>'."""
        key = name.strip()
        table = {
            "H": cls.horizontal,
            "V": cls.vertical,
            "D": cls.diagonal,
            "A": cls.antidiagonal,
            "L": cls.circular_left,
            "R": cls.circular_right,
        }
        if key.upper() in table:
            return table[key.upper()]()
        if key.lower().startswith("linear:"):
            return cls.linear(float(key.split(":", 1)[1]))
        raise DomainError(f"unknown polarization state '{name}'")


def pbs_project(state: JonesVector) -> tuple[float, float]:
    """Power fractions (H, V) behind a polarizing beamsplitter."""
    return abs(state.h) ** 2, abs(state.v) ** 2


def fidelity(expected: JonesVector, observed: JonesVector) -> float:
    """|<expected|observed>|^2; invariant under global phase of either state."""
    overlap = expected.h.conjugate() * observed.h + expected.v.conjugate() * observed.v
    return abs(overlap) ** 2


def fidelity_from_visibility(visibility: float) -> float:
    """Projection fidelity F = (1 + V) / 2 of a fringe visibility."""
    if not 0.0 <= visibility <= 1.0:
        raise DomainError("visibility must lie in [0, 1]")
    return 0.5 * (1.0 + visibility)


@dataclass(frozen=True)
class ProjectionDataset:
    """Angle-resolved counts behind the two PBS ports.

    Background rates (counts/s per detector) are subtracted, with a floor
    at zero, before any fit.
    """

    angles_deg: np.ndarray
    counts_v: np.ndarray
    counts_h: np.ndarray
    exposures: np.ndarray
    background_v: float = 0.0
    background_h: float = 0.0

    def __post_init__(self):
        n = len(self.angles_deg)
        if not (len(self.counts_v) == len(self.counts_h) == len(self.exposures) == n):
            raise DomainError("projection dataset columns must have equal length")
        if np.any(self.counts_v < 0) or np.any(self.counts_h < 0):
            raise DomainError("counts must be >= 0")
        if np.any(self.exposures <= 0):
            raise DomainError("exposures must be > 0")
        if np.any((self.angles_deg < 0) | (self.angles_deg >= 360)):
            raise DomainError("angles must lie in [0, 360) degrees")

    def rates(self, detector: str) -> np.ndarray:
        """Background-corrected count rates for detector 'V' or 'H'."""
        if detector == "V":
            counts, bg = self.counts_v, self.background_v
        elif detector == "H":
            counts, bg = self.counts_h, self.background_h
        else:
            raise DomainError("detector must be 'V' or 'H'")
        return np.maximum(counts / self.exposures - bg, 0.0)

    @classmethod
    def from_file(cls, path, background_v: float = 0.0, background_h: float = 0.0):
        """Read delimited text with header angle_deg, counts_v, counts_h, exposure_s."""
        rows = _read_delimited(path, _PROJECTION_COLUMNS)
        if not rows:
            warnings.warn(f"projection file {path} holds no data rows")
        cols = {name: np.array([r[i] for r in rows]) for i, name in enumerate(_PROJECTION_COLUMNS)}
        return cls(
            angles_deg=cols["angle_deg"],
            counts_v=cols["counts_v"],
            counts_h=cols["counts_h"],
            exposures=cols["exposure_s"],
            background_v=background_v,
            background_h=background_h,
        )


def _read_delimited(path, columns):
    """Parse a comma- or whitespace-delimited numeric table with a header."""
    with open(path, newline="") as fh:
        text = fh.read()
    lines = [
        (i + 1, ln.strip())
        for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        return []
    delim = "," if "," in lines[0][1] else None
    header = [tok.strip() for tok in (lines[0][1].split(delim) if delim else lines[0][1].split())]
    missing = [c for c in columns if c not in header]
    if missing:
        raise DataParseError(f"{path}: missing columns {missing}; found {header}")
    index = [header.index(c) for c in columns]
    rows = []
    bad = []
    for lineno, ln in lines[1:]:
        toks = [t.strip() for t in (ln.split(delim) if delim else ln.split())]
        try:
            rows.append(tuple(float(toks[i]) for i in index))
        except (ValueError, IndexError):
            bad.append(lineno)
    if bad:
        raise DataParseError(f"{path}: malformed rows at lines {bad}")
    return rows


@dataclass(frozen=True)
class SineFit:
    """Least-squares parameters of one detector's projection fringe."""

    offset: float
    amplitude: float
    phase: float
    offset_err: float
    amplitude_err: float
    phase_err: float
    visibility: float
    visibility_err: float
    harmonic: int
    residual_norm: float
    negative_offset: bool = False

    def fidelity(self) -> float:
        return fidelity_from_visibility(self.visibility)


def fit_sine(angles_deg, rates, harmonic: int = 1) -> SineFit:
    """Fit rate(theta) = offset + amplitude*sin(2k theta + phase).

    Linearizes to offset + a sin(2k theta) + b cos(2k theta) and recovers
    amplitude = hypot(a, b), phase = atan2(b, a). Standard errors come
    from the residual variance and the delta method.
    """
    if harmonic not in (1, 2):
        raise DomainError("harmonic k must be 1 or 2")
    theta = np.radians(np.asarray(angles_deg, dtype=float))
    y = np.asarray(rates, dtype=float)
    if len(np.unique(np.asarray(angles_deg))) < 4:
        raise DomainError("need at least 4 distinct angles for a sine fit")
    x = 2.0 * harmonic * theta
    design = np.column_stack([np.ones_like(x), np.sin(x), np.cos(x)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise DomainError("angles do not determine the sine fit (rank-deficient)")
    offset, a, b = (float(v) for v in coef)
    resid = y - design @ coef
    rss = float(resid @ resid)
    dof = len(y) - 3
    sigma2 = rss / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(design.T @ design)

    amplitude = math.hypot(a, b)
    if amplitude > 0:
        phase = math.atan2(b, a)
        ja = np.array([a / amplitude, b / amplitude])
        jp = np.array([-b, a]) / amplitude**2
        amp_var = float(ja @ cov[1:, 1:] @ ja)
        ph_var = float(jp @ cov[1:, 1:] @ jp)
    else:
        phase = 0.0
        amp_var = float(0.5 * (cov[1, 1] + cov[2, 2]))
        ph_var = math.pi**2

    negative_offset = offset < 0
    if negative_offset:
        warnings.warn("sine fit produced a negative offset; visibility clamped to 0")
    if offset > 0:
        visibility = min(max(amplitude / offset, 0.0), 1.0)
        vis_var = (visibility**2) * (
            (amp_var / amplitude**2 if amplitude > 0 else 0.0)
            + cov[0, 0] / offset**2
        )
    else:
        visibility, vis_var = 0.0, 0.0
    return SineFit(
        offset=offset,
        amplitude=amplitude,
        phase=phase,
        offset_err=math.sqrt(max(cov[0, 0], 0.0)),
        amplitude_err=math.sqrt(max(amp_var, 0.0)),
        phase_err=math.sqrt(max(ph_var, 0.0)),
        visibility=visibility,
        visibility_err=math.sqrt(max(vis_var, 0.0)),
        harmonic=harmonic,
        residual_norm=math.sqrt(rss),
        negative_offset=negative_offset,
    )


@dataclass(frozen=True)
class ProjectionFit:
    """Sine fits of both PBS ports of one projection scan."""

    v: SineFit
    h: SineFit
    harmonic: int

    def phase_difference(self) -> float:
        """V-H phase difference wrapped to [0, 2 pi)."""
        return (self.v.phase - self.h.phase) % (2.0 * math.pi)


def fit_projection_dataset(dataset: ProjectionDataset, harmonic: int = 1) -> ProjectionFit:
    """Background-correct and sine-fit both detectors of a dataset."""
    return ProjectionFit(
        v=fit_sine(dataset.angles_deg, dataset.rates("V"), harmonic),
        h=fit_sine(dataset.angles_deg, dataset.rates("H"), harmonic),
        harmonic=harmonic,
    )
