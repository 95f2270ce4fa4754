"""Exception hierarchy shared by all modules.

The command-line front end maps each branch of this hierarchy to a distinct
process exit code, so library code should raise the most specific class
that applies.
"""


class HcfconvError(Exception):
    """Base class for all package errors."""


class ConfigError(HcfconvError):
    """Invalid or unresolvable configuration (files, datasets, run setup)."""


class DataParseError(HcfconvError):
    """A data file (counts, projections) could not be parsed."""


class NumericalError(HcfconvError):
    """An iteration or quadrature failed to converge."""


class DomainError(HcfconvError, ValueError):
    """Input outside the validity domain of a model or operation."""


class ResonanceProximityError(DomainError):
    """Wavelength too close to a capillary wall resonance."""


class ModeCutoffError(DomainError):
    """Wavelength beyond the guidance cutoff of the core mode."""


class SaturationError(DomainError):
    """Measured count rate at or beyond detector dead-time saturation."""


class ConfigWarning(UserWarning):
    """Non-fatal configuration issue (e.g. beat note off the Raman line)."""
