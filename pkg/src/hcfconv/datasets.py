"""Loading of named, versioned coefficient datasets.

Datasets are human-readable key/value files (INI). Each file carries a
``[dataset]`` section with mandatory ``kind``, ``name`` and ``version``
keys; gas-dispersion datasets additionally require their reference
conditions. A handful of datasets ship with the package and are resolved
by name; anything else is treated as a filesystem path.
"""

from __future__ import annotations

import configparser
from importlib import resources

import numpy as np

from .dispersion import GasDispersionData
from .errors import ConfigError
from .ramanline import RamanTransition

PACKAGED_DATASETS = {
    "h2-peck-huang-1977": "h2_peck_huang_1977.ini",
    "h2-q1-1": "h2_q1_raman.ini",
}


def _read_dataset_file(name_or_path) -> configparser.SectionProxy:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    key = str(name_or_path)
    if key in PACKAGED_DATASETS:
        text = (
            resources.files("hcfconv.data")
            .joinpath(PACKAGED_DATASETS[key])
            .read_text()
        )
        parser.read_string(text, source=key)
    else:
        try:
            with open(name_or_path) as fh:
                parser.read_file(fh, source=key)
        except OSError as exc:
            raise ConfigError(f"cannot read dataset '{key}': {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"dataset '{key}' is not valid INI: {exc}") from exc
    if "dataset" not in parser:
        raise ConfigError(f"dataset '{key}' lacks a [dataset] section")
    return parser["dataset"]


def _require(section, *keys):
    missing = [k for k in keys if k not in section]
    if missing:
        raise ConfigError(
            f"dataset '{section.get('name', '?')}' is missing mandatory keys {missing}"
        )


def load_gas_dispersion(name_or_path) -> GasDispersionData:
    """Load and validate a gas refractivity dataset."""
    sec = _read_dataset_file(name_or_path)
    _require(sec, "kind", "name", "version")
    if sec["kind"] != "gas_dispersion":
        raise ConfigError(f"dataset '{sec['name']}' has kind '{sec['kind']}', "
                          "expected gas_dispersion")
    _require(
        sec,
        "species",
        "reference_pressure_bar", "reference_temperature_k",
        "wavelength_min_nm", "wavelength_max_nm",
        "b1", "c1", "b2", "c2",
    )
    data = GasDispersionData(
        name=sec["name"],
        version=sec["version"],
        species=sec["species"],
        reference_pressure=sec.getfloat("reference_pressure_bar"),
        reference_temperature=sec.getfloat("reference_temperature_k"),
        wavelength_min=sec.getfloat("wavelength_min_nm") * 1e-9,
        wavelength_max=sec.getfloat("wavelength_max_nm") * 1e-9,
        b1=sec.getfloat("b1"),
        c1=sec.getfloat("c1"),
        b2=sec.getfloat("b2"),
        c2=sec.getfloat("c2"),
    )
    grid = np.linspace(data.wavelength_min, data.wavelength_max, 64)
    refr = data.refractivity(grid)
    if not np.all(np.isfinite(refr)) or np.any(refr <= 0):
        raise ConfigError(
            f"dataset '{data.name}' refractivity is not positive and finite "
            "over its declared wavelength range"
        )
    return data


def load_raman_transition(name_or_path) -> RamanTransition:
    """Load a Raman transition dataset."""
    sec = _read_dataset_file(name_or_path)
    _require(sec, "kind", "name", "version")
    if sec["kind"] != "raman_transition":
        raise ConfigError(f"dataset '{sec['name']}' has kind '{sec['kind']}', "
                          "expected raman_transition")
    _require(
        sec,
        "shift_thz",
        "linewidth_a_mhz_bar", "linewidth_b_mhz_per_bar", "shift_mhz_per_bar",
    )
    return RamanTransition(
        linewidth_a=sec.getfloat("linewidth_a_mhz_bar") * 1e6,
        linewidth_b=sec.getfloat("linewidth_b_mhz_per_bar") * 1e6,
        shift_coefficient=sec.getfloat("shift_mhz_per_bar") * 1e6,
        shift_frequency=sec.getfloat("shift_thz") * 1e12,
        amplitude=sec.getfloat("amplitude", fallback=1.0),
        name=sec["name"],
    )


def hydrogen_dispersion() -> GasDispersionData:
    """The packaged hydrogen refractivity dataset."""
    return load_gas_dispersion("h2-peck-huang-1977")


def hydrogen_q1_transition() -> RamanTransition:
    """The packaged hydrogen Q1(1) transition dataset."""
    return load_raman_transition("h2-q1-1")
