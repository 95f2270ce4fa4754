import numpy as np
import pytest

from hcfconv.config import load_run_config
from hcfconv.datasets import (
    hydrogen_dispersion,
    hydrogen_q1_transition,
    load_gas_dispersion,
    load_raman_transition,
)
from hcfconv.errors import ConfigError

GOOD_GAS_INI = """
[dataset]
kind = gas_dispersion
name = test-gas
version = 3
species = hydrogen
reference_pressure_bar = 1.0
reference_temperature_k = 273.15
wavelength_min_nm = 400
wavelength_max_nm = 2000
b1 = 0.0148956
c1 = 180.7
b2 = 0.0049037
c2 = 92.0
"""


class TestGasDatasets:
    def test_packaged_hydrogen_dataset(self):
        data = hydrogen_dispersion()
        assert data.name == "h2-peck-huang-1977"
        assert data.species == "hydrogen"
        assert data.reference_temperature == 273.15
        assert data.version == "1"
        # positive refractivity across the declared range
        grid = np.linspace(data.wavelength_min, data.wavelength_max, 200)
        assert np.all(data.refractivity(grid) > 0)

    def test_path_loading(self, tmp_path):
        path = tmp_path / "gas.ini"
        path.write_text(GOOD_GAS_INI)
        data = load_gas_dispersion(path)
        assert data.name == "test-gas"
        assert data.version == "3"

    def test_missing_mandatory_key(self, tmp_path):
        path = tmp_path / "gas.ini"
        path.write_text(GOOD_GAS_INI.replace("reference_pressure_bar = 1.0\n", ""))
        with pytest.raises(ConfigError, match="reference_pressure_bar"):
            load_gas_dispersion(path)

    def test_missing_version_rejected(self, tmp_path):
        path = tmp_path / "gas.ini"
        path.write_text(GOOD_GAS_INI.replace("version = 3\n", ""))
        with pytest.raises(ConfigError, match="version"):
            load_gas_dispersion(path)

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "gas.ini"
        path.write_text(GOOD_GAS_INI.replace("kind = gas_dispersion", "kind = raman_transition"))
        with pytest.raises(ConfigError, match="kind"):
            load_gas_dispersion(path)

    def test_unresolvable_name(self):
        with pytest.raises(ConfigError):
            load_gas_dispersion("no-such-dataset")

    def test_negative_refractivity_rejected(self, tmp_path):
        path = tmp_path / "gas.ini"
        path.write_text(GOOD_GAS_INI.replace("b1 = 0.0148956", "b1 = -0.5"))
        with pytest.raises(ConfigError, match="positive"):
            load_gas_dispersion(path)


class TestRamanDatasets:
    def test_packaged_transition(self):
        line = hydrogen_q1_transition()
        assert line.shift_frequency == 125e12
        assert line.linewidth_a > 0 and line.linewidth_b > 0
        assert line.name == "h2-q1-1"

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "raman.ini"
        path.write_text(GOOD_GAS_INI)
        with pytest.raises(ConfigError, match="kind"):
            load_raman_transition(path)


class TestRunConfig:
    def test_reference_values(self, reference_run):
        conv = reference_run.conversion
        assert conv.fiber.core_radius == pytest.approx(13.2e-6)
        assert conv.fiber.wall_thickness == pytest.approx(360e-9)
        assert conv.fiber.capillary_count == 5
        assert conv.fiber.length == pytest.approx(0.27)
        assert conv.gas.pressure == 5.0
        assert conv.pump.wavelength == pytest.approx(938e-9)
        assert conv.pump.power == pytest.approx(0.05)
        assert conv.stokes.wavelength == pytest.approx(1538e-9)
        assert conv.probe.wavelength == pytest.approx(863e-9)
        assert conv.signal.wavelength == pytest.approx(1346.17e-9, abs=0.01e-9)
        assert reference_run.chain.quantum_efficiency == 0.125
        assert reference_run.chain.dead_time == pytest.approx(1e-6)
        assert reference_run.output_formats == ("tsv",)

    def test_hash_stability_and_sensitivity(self, tmp_path, reference_run):
        from importlib import resources

        text = resources.files("hcfconv.data").joinpath("reference_run.ini").read_text()
        same = tmp_path / "copy.ini"
        same.write_text(text)
        assert load_run_config(same).config_hash() == reference_run.config_hash()
        changed = tmp_path / "changed.ini"
        changed.write_text(text.replace("pressure_bar = 5.0", "pressure_bar = 7.0"))
        assert load_run_config(changed).config_hash() != reference_run.config_hash()

    def test_missing_section_rejected(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[fiber]\ncore_radius_um = 13.2\n")
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_missing_file_rejected(self):
        with pytest.raises(ConfigError):
            load_run_config("/nonexistent/run.ini")

    def test_invalid_physical_value_is_config_error(self, tmp_path):
        from importlib import resources

        text = resources.files("hcfconv.data").joinpath("reference_run.ini").read_text()
        path = tmp_path / "bad.ini"
        path.write_text(text.replace("core_radius_um = 13.2", "core_radius_um = -1"))
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_unknown_output_format_rejected(self, tmp_path):
        from importlib import resources

        text = resources.files("hcfconv.data").joinpath("reference_run.ini").read_text()
        path = tmp_path / "bad.ini"
        path.write_text(text.replace("output_formats = tsv", "output_formats = parquet"))
        with pytest.raises(ConfigError, match="parquet"):
            load_run_config(path)
