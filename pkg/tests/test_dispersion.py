import math

import pytest
from scipy.optimize import brentq

from hcfconv.datasets import hydrogen_dispersion
from hcfconv.dispersion import (
    HE11,
    FiberGeometry,
    GasState,
    ModeSpec,
    effective_index,
    gas_index,
    gas_refractivity,
    leakage_loss_estimate,
    nearest_resonance,
    resonance_wavelengths,
    silica_index,
)
from hcfconv.errors import (
    ConfigError,
    DomainError,
    ModeCutoffError,
    ResonanceProximityError,
)

OPERATING_NM = (863.0, 938.0, 1346.2, 1538.0)


def oracle_silica(lam_um):
    """Independent Malitson (1965) evaluation, written out explicitly."""
    x = lam_um * lam_um
    n2 = (
        1.0
        + 0.6961663 * x / (x - 0.0684043**2)
        + 0.4079426 * x / (x - 0.1162414**2)
        + 0.8974794 * x / (x - 9.896161**2)
    )
    return math.sqrt(n2)


def oracle_resonance(t_nm, m):
    """Root of lambda - (2t/m) sqrt(n(lambda)^2 - 1) via bracketing."""
    f = lambda lam_nm: lam_nm - (2.0 * t_nm / m) * math.sqrt(
        oracle_silica(lam_nm * 1e-3) ** 2 - 1.0
    )
    return brentq(f, 210.0, 3000.0)


@pytest.fixture(scope="module")
def geometry():
    return FiberGeometry(core_radius=13.2e-6, wall_thickness=360e-9,
                         capillary_count=5, length=0.27)


@pytest.fixture(scope="module")
def h2data():
    return hydrogen_dispersion()


class TestSilicaIndex:
    def test_against_independent_oracle(self):
        for lam_um in (0.25, 0.5876, 1.06, 1.55, 3.0):
            assert silica_index(lam_um * 1e-6) == pytest.approx(
                oracle_silica(lam_um), rel=1e-14
            )

    def test_helium_d_line_value(self):
        assert silica_index(587.6e-9) == pytest.approx(1.4585, abs=1e-4)

    def test_near_ir_value(self):
        assert silica_index(1060e-9) == pytest.approx(1.4497, abs=1e-4)

    def test_deterministic(self):
        assert silica_index(902.3e-9) == silica_index(902.3e-9)

    @pytest.mark.parametrize("lam", [100e-9, 200e-9, 4e-6, 10e-6])
    def test_out_of_range_rejected(self, lam):
        with pytest.raises(DomainError):
            silica_index(lam)


class TestGasIndex:
    def test_vacuum_is_exactly_one(self, h2data):
        gas = GasState(pressure=0.0, temperature=273.0)
        assert gas_index(gas, h2data, 633e-9) == 1.0

    def test_matches_published_refractivity(self, h2data):
        # Hydrogen refractivity at 633 nm, 0 C, 1 atm is 1.384e-4
        # (Peck and Huang 1977 tables).
        gas = GasState(pressure=1.01325, temperature=273.15)
        assert gas_refractivity(gas, h2data, 633e-9) == pytest.approx(1.384e-4, abs=5e-7)
        assert gas_index(gas, h2data, 633e-9) == pytest.approx(1 + 1.4e-4, abs=5e-6)

    def test_doubling_density_doubles_refractivity_exactly(self, h2data):
        for p in (0.7, 3.0, 55.0, 140.0):
            gas1 = GasState(pressure=p, temperature=295.0)
            gas2 = GasState(pressure=2 * p, temperature=295.0)
            r1 = gas_refractivity(gas1, h2data, 938e-9)
            r2 = gas_refractivity(gas2, h2data, 938e-9)
            assert r2 / r1 == 2.0

    def test_virial_correction_reduces_density(self, h2data):
        ideal = GasState(pressure=200.0, temperature=295.0)
        real = GasState(pressure=200.0, temperature=295.0,
                        virial_coefficients=(6e-4,))
        assert gas_refractivity(real, h2data, 938e-9) < gas_refractivity(
            ideal, h2data, 938e-9
        )
        assert real.compressibility() == pytest.approx(1.12)

    def test_species_mismatch_rejected(self, h2data):
        gas = GasState(pressure=1.0, species="deuterium")
        with pytest.raises(ConfigError):
            gas_index(gas, h2data, 633e-9)

    def test_wavelength_outside_dataset_rejected(self, h2data):
        gas = GasState(pressure=1.0)
        with pytest.raises(DomainError):
            gas_index(gas, h2data, 350e-9)

    def test_state_validation(self):
        with pytest.raises(DomainError):
            GasState(pressure=-1.0)
        with pytest.raises(DomainError):
            GasState(pressure=1.0, temperature=0.0)


class TestResonances:
    def test_first_order_matches_bracketing_oracle(self, geometry):
        lam1 = resonance_wavelengths(geometry, 1)[0]
        assert lam1 * 1e9 == pytest.approx(oracle_resonance(360.0, 1), abs=0.2)
        assert 700e-9 < lam1 < 800e-9

    def test_higher_orders_match_oracle(self, geometry):
        lams = resonance_wavelengths(geometry, 3)
        for m, lam in enumerate(lams, start=1):
            assert lam * 1e9 == pytest.approx(oracle_resonance(360.0, m), abs=0.2)
        assert lams[0] > lams[1] > lams[2]

    def test_operating_wavelengths_clear_by_20nm(self, geometry):
        lams = resonance_wavelengths(geometry, 3)
        for op_nm in OPERATING_NM:
            for lam in lams:
                assert abs(lam * 1e9 - op_nm) > 20.0

    def test_self_consistency_relation_is_exact(self, geometry):
        # m * lambda_m equals 2 t sqrt(n(lambda_m)^2 - 1) by construction;
        # the residual is bounded by the 0.1 nm fixed-point tolerance.
        t = geometry.wall_thickness
        for m, lam in enumerate(resonance_wavelengths(geometry, 3), start=1):
            rhs = 2 * t * math.sqrt(silica_index(lam) ** 2 - 1.0)
            assert m * lam == pytest.approx(rhs, abs=m * 1.1e-10)

    def test_product_variation_tracks_index_dispersion(self, geometry):
        # m * lambda_m varies only through n(lambda_m); for silica between
        # ~760 and ~270 nm that is a ~6 percent effect.
        lams = resonance_wavelengths(geometry, 3)
        products = [m * lam for m, lam in enumerate(lams, start=1)]
        spread = (max(products) - min(products)) / min(products)
        assert spread < 0.10

    def test_doubling_thickness_roughly_doubles_wavelengths(self, geometry):
        thick = FiberGeometry(core_radius=13.2e-6, wall_thickness=720e-9,
                              capillary_count=5, length=0.27)
        lam_t = resonance_wavelengths(geometry, 1)[0]
        lam_2t = resonance_wavelengths(thick, 1)[0]
        assert lam_2t / lam_t == pytest.approx(2.0, rel=0.05)

    def test_bad_order_rejected(self, geometry):
        with pytest.raises(DomainError):
            resonance_wavelengths(geometry, 0)

    def test_thin_wall_resonances_below_model_range(self):
        thin = FiberGeometry(core_radius=1e-6, wall_thickness=80e-9,
                             capillary_count=3, length=0.1)
        assert nearest_resonance(thin, 1e-6) is None


class TestEffectiveIndex:
    def test_wide_core_limit_reaches_gas_index(self, h2data):
        wide = FiberGeometry(core_radius=1.0, wall_thickness=360e-9,
                             capillary_count=5, length=0.27)
        vac = GasState(pressure=0.0)
        assert abs(effective_index(wide, vac, h2data, 863e-9) - 1.0) < 1e-12

    def test_reference_value_at_863nm(self, geometry, h2data):
        vac = GasState(pressure=0.0)
        neff = effective_index(geometry, vac, h2data, 863e-9)
        expected = math.sqrt(1.0 - (2.405 * 863e-9 / (2 * math.pi * 13.2e-6)) ** 2)
        assert neff == pytest.approx(expected, rel=1e-14)
        assert neff == pytest.approx(0.999687, abs=1e-6)

    def test_vacuum_index_decreases_with_wavelength(self, geometry, h2data):
        vac = GasState(pressure=0.0)
        n_900 = effective_index(geometry, vac, h2data, 900e-9)
        n_1500 = effective_index(geometry, vac, h2data, 1500e-9)
        assert n_900 > n_1500

    def test_always_below_gas_index(self, geometry, h2data):
        for p in (0.0, 5.0, 120.0, 300.0):
            gas = GasState(pressure=p, temperature=295.0)
            for lam in (500e-9, 863e-9, 938e-9, 1346e-9, 1538e-9):
                neff = effective_index(geometry, gas, h2data, lam)
                n1 = gas_index(gas, h2data, lam)
                assert neff < n1 <= silica_index(lam)

    def test_resonance_band_rejected(self, geometry, h2data):
        lam1 = resonance_wavelengths(geometry, 1)[0]
        vac = GasState(pressure=0.0)
        with pytest.raises(ResonanceProximityError):
            effective_index(geometry, vac, h2data, lam1 + 3e-9)
        # a tighter band allows the same wavelength
        neff = effective_index(
            geometry, vac, h2data, lam1 + 3e-9, resonance_band=1e-9
        )
        assert 0.99 < neff < 1.0

    def test_cutoff_error_for_tiny_core(self, h2data):
        tiny = FiberGeometry(core_radius=0.5e-6, wall_thickness=40e-9,
                             capillary_count=3, length=0.1)
        vac = GasState(pressure=0.0)
        with pytest.raises(ModeCutoffError):
            effective_index(tiny, vac, h2data, 1.9e-6)

    def test_wall_correction_changes_value_and_stays_below_gas(self, geometry, h2data):
        vac = GasState(pressure=0.0)
        lam1 = resonance_wavelengths(geometry, 1)[0]
        for lam in (lam1 + 30e-9, lam1 + 103e-9, 938e-9, 1538e-9):
            base = effective_index(geometry, vac, h2data, lam)
            corr = effective_index(geometry, vac, h2data, lam, wall_correction=True)
            assert corr != base
            assert corr < 1.0

    def test_wall_correction_grows_toward_resonance(self, geometry, h2data):
        vac = GasState(pressure=0.0)
        lam1 = resonance_wavelengths(geometry, 1)[0]

        def correction(lam):
            base = effective_index(geometry, vac, h2data, lam)
            corr = effective_index(geometry, vac, h2data, lam, wall_correction=True)
            return abs(corr - base)

        assert correction(lam1 + 15e-9) > correction(lam1 + 100e-9)

    def test_deterministic(self, geometry, h2data):
        gas = GasState(pressure=17.3, temperature=301.0)
        a = effective_index(geometry, gas, h2data, 1123e-9)
        b = effective_index(geometry, gas, h2data, 1123e-9)
        assert a == b


class TestLeakageLoss:
    def test_positive_everywhere(self, geometry):
        for lam in (500e-9, 863e-9, 938e-9, 1346e-9, 1538e-9, 2.5e-6):
            assert leakage_loss_estimate(geometry, lam) > 0

    def test_resonance_enhancement(self, geometry):
        lam1 = resonance_wavelengths(geometry, 1)[0]
        assert leakage_loss_estimate(geometry, lam1 + 10e-9) > leakage_loss_estimate(
            geometry, lam1 + 100e-9
        )

    def test_doubling_radius_cuts_loss_eightfold(self, geometry):
        big = FiberGeometry(core_radius=2 * geometry.core_radius,
                            wall_thickness=geometry.wall_thickness,
                            capillary_count=5, length=0.27)
        ratio = leakage_loss_estimate(geometry, 938e-9) / leakage_loss_estimate(big, 938e-9)
        assert ratio == pytest.approx(8.0, rel=1e-12)

    def test_on_resonance_rejected(self, geometry):
        lam1 = resonance_wavelengths(geometry, 1)[0]
        with pytest.raises(ResonanceProximityError):
            leakage_loss_estimate(geometry, lam1 + 1e-9)


class TestGeometryAndMode:
    def test_geometry_validation(self):
        with pytest.raises(DomainError):
            FiberGeometry(core_radius=-1e-6, wall_thickness=360e-9,
                          capillary_count=5, length=0.27)
        with pytest.raises(DomainError):
            FiberGeometry(core_radius=13.2e-6, wall_thickness=360e-9,
                          capillary_count=2, length=0.27)
        with pytest.raises(DomainError):
            # wall must stay below a tenth of the core radius
            FiberGeometry(core_radius=3e-6, wall_thickness=360e-9,
                          capillary_count=5, length=0.27)

    def test_mode_validation(self):
        with pytest.raises(DomainError):
            ModeSpec(u=0.0)
        assert HE11.u == 2.405
