"""Run configuration: one human-readable file describing a whole setup.

A run configuration file is INI with sections [run], [fiber], [gas],
[raman], [fields], and [detection] (see the packaged ``reference`` config
for a template). Dataset references are resolved through
:mod:`hcfconv.datasets`, so the hash of a run configuration covers the
resolved coefficient values, not just the dataset names.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources

from ._util import canonical_hash
from .datasets import load_gas_dispersion, load_raman_transition
from .detection import DetectionChain
from .dispersion import FiberGeometry, GasState
from .errors import ConfigError, DomainError
from .phasematch import ConversionConfig, OpticalField
from .polarization import JonesVector

PACKAGED_CONFIGS = {
    "reference": "reference_run.ini",
}

_VALID_FORMATS = ("tsv", "json")


@dataclass(frozen=True)
class RunConfig:
    """Everything a command-line run needs, resolved and validated."""

    name: str
    conversion: ConversionConfig
    chain: DetectionChain
    output_formats: tuple[str, ...] = ("tsv",)

    def config_hash(self) -> str:
        return canonical_hash(self)


def _getfloat(section, key, scale=1.0, default=None):
    if key not in section:
        if default is not None:
            return default
        raise ConfigError(f"[{section.name}] is missing '{key}'")
    try:
        return section.getfloat(key) * scale
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key}: {exc}") from exc


def _field(section, role, default_power_w=0.0):
    wavelength = _getfloat(section, f"{role}_wavelength_nm", 1e-9)
    power = _getfloat(section, f"{role}_power_mw", 1e-3, default=default_power_w)
    pol_name = section.get(f"{role}_polarization", "H")
    return OpticalField(
        role=role,
        wavelength=wavelength,
        power=power,
        polarization=JonesVector.from_name(pol_name),
    )


def load_run_config(name_or_path) -> RunConfig:
    """Load a run configuration by packaged name or filesystem path."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    key = str(name_or_path)
    if key in PACKAGED_CONFIGS:
        text = resources.files("hcfconv.data").joinpath(PACKAGED_CONFIGS[key]).read_text()
        parser.read_string(text, source=key)
    else:
        try:
            with open(name_or_path) as fh:
                parser.read_file(fh, source=key)
        except OSError as exc:
            raise ConfigError(f"cannot read run config '{key}': {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"run config '{key}' is not valid INI: {exc}") from exc

    for section in ("fiber", "gas", "fields"):
        if section not in parser:
            raise ConfigError(f"run config '{key}' lacks the [{section}] section")

    fiber_sec = parser["fiber"]
    gas_sec = parser["gas"]
    fields_sec = parser["fields"]
    raman_sec = parser["raman"] if "raman" in parser else {}
    run_sec = parser["run"] if "run" in parser else {}

    try:
        fiber = FiberGeometry(
            core_radius=_getfloat(fiber_sec, "core_radius_um", 1e-6),
            wall_thickness=_getfloat(fiber_sec, "wall_thickness_nm", 1e-9),
            capillary_count=fiber_sec.getint("capillary_count", fallback=3),
            length=_getfloat(fiber_sec, "length_cm", 1e-2),
        )
        virial = ()
        if "virial_coefficients_per_bar" in gas_sec:
            virial = tuple(
                float(tok) for tok in gas_sec["virial_coefficients_per_bar"].split(",")
            )
        gas = GasState(
            pressure=_getfloat(gas_sec, "pressure_bar"),
            temperature=_getfloat(gas_sec, "temperature_k", default=295.0),
            species=gas_sec.get("species", "hydrogen"),
            virial_coefficients=virial,
        )
        dispersion_data = load_gas_dispersion(
            gas_sec.get("dispersion_dataset", "h2-peck-huang-1977")
        )
        raman = load_raman_transition(
            raman_sec.get("transition_dataset", "h2-q1-1") if raman_sec else "h2-q1-1"
        )
        conversion = ConversionConfig(
            pump=_field(fields_sec, "pump"),
            stokes=_field(fields_sec, "stokes"),
            probe=_field(fields_sec, "probe"),
            fiber=fiber,
            gas=gas,
            dispersion_data=dispersion_data,
            raman=raman,
            chi3_amplitude=_getfloat(run_sec, "chi3_amplitude", default=1.0)
            if run_sec else 1.0,
        )
        chain_kwargs = {}
        if "detection" in parser:
            det = parser["detection"]
            for ini_key, attr, scale in (
                ("quantum_efficiency", "quantum_efficiency", 1.0),
                ("dead_time_us", "dead_time", 1e-6),
                ("bandpass_transmission", "bandpass_transmission", 1.0),
                ("edge_filter_transmission", "edge_filter_transmission", 1.0),
                ("fiber_coupling", "fiber_coupling", 1.0),
            ):
                if ini_key in det:
                    chain_kwargs[attr] = _getfloat(det, ini_key, scale)
        chain = DetectionChain(**chain_kwargs)
    except DomainError as exc:
        raise ConfigError(f"run config '{key}': {exc}") from exc

    formats = tuple(
        tok.strip()
        for tok in (run_sec.get("output_formats", "tsv") if run_sec else "tsv").split(",")
        if tok.strip()
    )
    bad = [f for f in formats if f not in _VALID_FORMATS]
    if bad:
        raise ConfigError(f"unknown output formats {bad}; valid: {_VALID_FORMATS}")

    return RunConfig(
        name=(run_sec.get("name", key) if run_sec else key),
        conversion=conversion,
        chain=chain,
        output_formats=formats,
    )
