import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from decobolt.quantities import (
    AMU,
    HBAR,
    K_B,
    BodySpec,
    body_mass,
    de_broglie_wavelength,
    thermal_photon_wavelength,
    thermal_velocity,
    thermal_wavevector,
)


def test_codata_values():
    assert HBAR == 1.054571817e-34
    assert K_B == 1.380649e-23
    assert AMU == pytest.approx(1.66053906660e-27, rel=1e-9)


def test_sphere_mass_and_override():
    body = BodySpec(radius=1e-5, mass_density=1e4)
    assert body_mass(body) == pytest.approx(4 / 3 * math.pi * 1e-15 * 1e4)
    assert BodySpec(1e-9, 1e4, mass=720 * AMU).total_mass == 720 * AMU


@pytest.mark.parametrize("kwargs", [
    dict(radius=0.0, mass_density=1.0),
    dict(radius=1.0, mass_density=-1.0),
    dict(radius=1.0, mass_density=1.0, mass=0.0),
    dict(radius=1.0, mass_density=1.0, internal_temperature=-3.0),
])
def test_body_validation(kwargs):
    with pytest.raises(ValueError):
        BodySpec(**kwargs)


def test_thermal_velocity_errors_and_zero_temperature():
    assert thermal_velocity(1e-25, 0.0) == 0.0
    with pytest.raises(ValueError):
        thermal_velocity(0.0, 1.0)
    with pytest.raises(ValueError):
        thermal_velocity(1e-25, -1.0)


def test_de_broglie_at_rest_is_rejected():
    with pytest.raises(ValueError, match="diverges"):
        de_broglie_wavelength(1e-25, 0.0)


@given(st.floats(1e-3, 1e4))
def test_photon_wavelength_is_inverse_in_temperature(T):
    assert thermal_photon_wavelength(T) * T == pytest.approx(thermal_photon_wavelength(1.0), rel=1e-12)
    assert thermal_wavevector(T) * thermal_photon_wavelength(T) == pytest.approx(2 * math.pi)


@given(st.floats(1e-27, 1e-15), st.floats(1e-2, 1e3))
def test_thermal_speed_scaling(m, T):
    assert thermal_velocity(4 * m, T) == pytest.approx(0.5 * thermal_velocity(m, T), rel=1e-12)
