"""Simulation and analysis toolkit for continuous-wave four-wave-mixing
frequency conversion in gas-filled anti-resonant hollow-core fibers."""

from .detection import (
    CountRecord,
    DetectionChain,
    NoiseModel,
    chain_efficiency,
    dead_time_correct,
    expected_signal_rate,
    fit_model_scale,
    load_counts,
    observed_rate,
    spontaneous_efficiency,
)
from .dispersion import (
    FiberGeometry,
    GasDispersionData,
    GasState,
    ModeSpec,
    effective_index,
    gas_index,
    leakage_loss_estimate,
    resonance_wavelengths,
    silica_index,
)
from .errors import (
    ConfigError,
    ConfigWarning,
    DataParseError,
    DomainError,
    HcfconvError,
    ModeCutoffError,
    NumericalError,
    ResonanceProximityError,
    SaturationError,
)
from .phasematch import (
    ConversionConfig,
    OpticalField,
    PressureProfile,
    SweepResult,
    coherence_factor,
    conversion_efficiency,
    find_efficiency_maxima,
    optimize_pressure,
    phase_mismatch,
    pressure_sweep,
    propagation_constant,
    signal_wavelength,
)
from .polarization import (
    JonesVector,
    ProjectionDataset,
    fidelity,
    fidelity_from_visibility,
    fit_projection_dataset,
    fit_sine,
    pbs_project,
)
from .ramanline import (
    RamanTransition,
    detuning_scan,
    line_center,
    linewidth,
    susceptibility,
    susceptibility_peak,
)

__version__ = "0.1.0"
