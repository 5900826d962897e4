"""Worked numbers for each module, checked against independent closed forms."""

import math

import numpy as np
import pytest
from scipy.special import zeta

from decobolt import channels as ch
from decobolt.experiments import DUST
from decobolt.kernel import build_kernel, coherence_factor, coherence_length, coherence_report
from decobolt.quantities import (
    AMU,
    HBAR,
    BodySpec,
    body_mass,
    de_broglie_wavelength,
    thermal_photon_wavelength,
    thermal_velocity,
    thermal_wavevector,
)
from decobolt.spectra import SpectralDensity, bose_integral, mean_k, mean_square_k, normalize


# -- quantities ---------------------------------------------------------------------

def test_quantity_values():
    assert body_mass(BodySpec(1.0, 1.0)) == pytest.approx(4.18879, rel=1e-6)
    assert 720 * AMU == pytest.approx(1.1956e-24, rel=1e-4)
    assert thermal_velocity(1e-25, 1.0) == pytest.approx(18.75, abs=5e-3)
    assert thermal_velocity(1e-25, 4.0) == pytest.approx(2 * thermal_velocity(1e-25, 1.0), rel=1e-15)
    assert de_broglie_wavelength(2 * math.pi * HBAR, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert de_broglie_wavelength(1.1956e-24, 100.0) == pytest.approx(5.54e-12, rel=1e-3)
    assert thermal_photon_wavelength(3.0) == pytest.approx(4.80e-3, rel=1e-3)
    assert thermal_photon_wavelength(300.0) == pytest.approx(4.80e-5, rel=1e-3)


def test_explicit_mass_ignores_density():
    assert body_mass(BodySpec(1e-9, 1.0, mass=1e-24)) == body_mass(BodySpec(1e-9, 1e6, mass=1e-24))
    masses = [body_mass(BodySpec(a, 1e3)) for a in (1e-9, 2e-9, 3e-9)]
    assert masses[1] / masses[0] == pytest.approx(8.0) and masses[2] / masses[0] == pytest.approx(27.0)


# -- spectra ------------------------------------------------------------------------

def test_spectra_values():
    d = normalize(lambda k: -k**2 * math.exp(-k) / math.expm1(-k) if k > 0 else 0.0, rate=2.0)
    assert 1 / d.shape.norm == pytest.approx(1 / (2 * zeta(3)), rel=1e-8)
    assert mean_square_k(SpectralDensity.line(5.0, 1.0)) == 25.0
    assert mean_k(SpectralDensity.line(5.0, 0.0)) == 5.0
    assert bose_integral(2) == pytest.approx(2.404114, abs=1e-6)
    assert bose_integral(6) == pytest.approx(726.011, abs=1e-3)
    assert bose_integral(3) == pytest.approx(math.pi**4 / 15, rel=1e-12)
    k300 = mean_k(SpectralDensity.planck(2, 300.0, 1.0))
    assert k300 == pytest.approx(3.2174 * thermal_wavevector(300.0), rel=1e-4)
    assert k300 == pytest.approx(4.215e5, rel=1e-3)
    assert 2 * math.pi / k300 == pytest.approx(1.49e-5, rel=5e-3)


def test_mixture_moment_is_linear():
    a, b = SpectralDensity.planck(2, 3.0, 1.0), SpectralDensity.planck(6, 1.0, 3.0)
    mixed = ch.mix([a, b])
    expected = 0.25 * mean_square_k(a) + 0.75 * mean_square_k(b)
    assert mean_square_k(mixed) == pytest.approx(expected, rel=1e-10)


def test_function_shape_substitution_invariance():
    kT = thermal_wavevector(2.0)
    raw = lambda k: -(k / kT) ** 2 * math.exp(-k / kT) / math.expm1(-k / kT) if k > 0 else 0.0  # noqa: E731
    moments = [mean_square_k(normalize(raw, 1.0, scale=s * kT)) for s in (0.3, 1.0, 4.0)]
    assert moments == pytest.approx([mean_square_k(SpectralDensity.planck(2, 2.0, 1.0))] * 3, rel=1e-8)


# -- channels -----------------------------------------------------------------------

def test_channel_values():
    assert ch.blackbody_rate(1.0, 1.0) == pytest.approx(1.911e16, rel=1e-3)
    assert ch.decoherence_time(1e-3, 3.0) == pytest.approx(1.9e-12, rel=0.02)
    assert ch.decoherence_time(2e-3, 3.0) == pytest.approx(ch.decoherence_time(1e-3, 3.0) / 4)
    assert ch.blackbody_rate(1.0, 2.0) == pytest.approx(8 * ch.blackbody_rate(1.0, 1.0))
    assert ch.rayleigh_cross_section(0.0, 1.0) == 0.0
    assert ch.rayleigh_cross_section(1.0, 1.0) == pytest.approx(10.472, rel=1e-4)
    assert ch.rayleigh_rate(1e-5, 2.0) == pytest.approx(128 * ch.rayleigh_rate(1e-5, 1.0))
    assert ch.gas_rate(1e-5, 2e9, 1e-25, 1.0) == pytest.approx(2 * ch.gas_rate(1e-5, 1e9, 1e-25, 1.0))
    assert ch.gas_rate(1e-5, 1e9, 1e-25, 4.0) == pytest.approx(2 * ch.gas_rate(1e-5, 1e9, 1e-25, 1.0))
    assert ch.gas_line_wavevector(1e-25, 1.0) == pytest.approx(1.78e10, rel=2e-3)
    ray = ch.channel_spectrum(ch.ChannelSpec("rayleigh", temperature=1.0, radius=1e-5))
    assert mean_square_k(ray) / thermal_wavevector(1.0) ** 2 == pytest.approx(56 * zeta(9) / zeta(7), rel=1e-9)


def test_composition():
    two = ch.mix([SpectralDensity.line(1.0, 2.0), SpectralDensity.line(3.0, 2.0)])
    assert two.shape.weights == pytest.approx((0.5, 0.5))
    assert mean_square_k(two) == pytest.approx(5.0)
    gas = ch.ChannelSpec("gas", temperature=1.0, radius=DUST["radius"], number_density=DUST["number_density"],
                         particle_mass=DUST["gas_mass"])
    ray = ch.ChannelSpec("rayleigh", temperature=1.0, radius=DUST["radius"])
    total = ch.compose([gas, ray])
    assert total.rate == pytest.approx(ch.channel_rate(gas) + ch.channel_rate(ray), rel=1e-15)
    reversed_total = ch.compose([ray, gas])
    assert mean_square_k(reversed_total) == pytest.approx(mean_square_k(total), rel=1e-12)


# -- kernel -------------------------------------------------------------------------

def test_kernel_values():
    k0, rate = 2.0e6, 3.0
    line = build_kernel(SpectralDensity.line(k0, rate))
    assert line(math.pi / k0) == pytest.approx(rate)
    assert line(100 * math.pi / k0) == pytest.approx(rate, rel=1e-14)
    planck = build_kernel(SpectralDensity.planck(2, 1.0, rate))
    assert planck(100 * planck.mean_wavelength) == pytest.approx(rate, rel=0.02)
    assert build_kernel(SpectralDensity.line(k0, 0.0))(1e-3) == 0.0


def test_kernel_upper_bound():
    k_min, rate = 1e5, 2.0
    kern = build_kernel(SpectralDensity.lines([k_min, 3 * k_min, 7 * k_min], [1, 1, 1], rate))
    r = np.geomspace(1e-3, 1e3, 200) / k_min
    assert np.all(kern.tabulate(r) <= rate * (1 + 1 / (k_min * r)) + 1e-12)


def test_mixture_kernel_is_rate_weighted_sum():
    a, b = SpectralDensity.planck(2, 3.0, 1.5), SpectralDensity.line(4e3, 0.5)
    mixed = build_kernel(ch.mix([a, b]))
    r = np.geomspace(1e-6, 1e-1, 15)
    np.testing.assert_allclose(mixed.tabulate(r), build_kernel(a).tabulate(r) + build_kernel(b).tabulate(r),
                               rtol=1e-10)


def test_coherence_values():
    assert coherence_factor(5.0, 0.0) == 1.0
    assert coherence_factor(1e-2, 1.0) == pytest.approx(0.990, abs=5e-4)
    lam = 7e-6
    assert coherence_length(lam, 1.0, 1.0) == pytest.approx(lam / (2 * math.pi))
    assert coherence_length(lam, 4.0, 1.0) == pytest.approx(coherence_length(lam, 1.0, 1.0) / 2)


def test_coherence_length_conventions():
    # tiny t N keeps l_coh well inside the quadratic regime
    kern = build_kernel(SpectralDensity.planck(2, 1.0, 1.0))
    t = 1e4
    rep = coherence_report(kern, t)
    assert kern.quadratic_law_coefficient * rep.coherence_length**2 * t == pytest.approx(1.0, rel=1e-12)
    assert kern(rep.coherence_length) * t == pytest.approx(1 / 6, rel=1e-3)
    assert kern(rep.coherence_length_exact) * t == pytest.approx(1.0, rel=1e-3)


# -- experiments --------------------------------------------------------------------

def test_feasibility_bounds():
    from decobolt.experiments import max_de_broglie, max_radius
    m = 720 * AMU
    assert max_de_broglie(m, 900.0) == pytest.approx(3.407e-12, rel=1e-3)
    assert max_de_broglie(m, 900.0) == pytest.approx(de_broglie_wavelength(m, thermal_velocity(m, 900.0)), rel=1e-12)
    assert max_de_broglie(m, 3600.0) == pytest.approx(max_de_broglie(m, 900.0) / 2, rel=1e-14)
    assert max_radius(1e-5, 1e4, 1.0) == pytest.approx(1.52e-8, rel=0.01)
    assert max_radius(1e-5, 1e4, 32.0) == pytest.approx(max_radius(1e-5, 1e4, 1.0) / 2, rel=1e-14)


def test_dust_scenario_rates():
    from decobolt.experiments import run_dust_scenario
    res = run_dust_scenario()
    rates = {c.name: c.rate for c in res.channels}
    assert rates["gas"] == pytest.approx(11.8, abs=0.05)
    assert rates["rayleigh"] == pytest.approx(0.35, abs=0.005)
    assert res.budget == pytest.approx(sum(c.budget for c in res.channels if c.included), rel=1e-15)
    assert res.coherence_factor == pytest.approx(math.exp(-res.budget), rel=1e-15)


def test_fullerene_scenario_values():
    from decobolt.experiments import run_fullerene_scenario
    res = run_fullerene_scenario(with_pattern=False)
    assert res.budget == pytest.approx(3.51, rel=1e-12)
    assert res.coherence_factor == pytest.approx(0.0298, abs=1e-4)
    assert res.coherence_length == pytest.approx(0.851e-6, rel=1e-3)
    assert res.coherence_length > 100e-9
    rows = {c.name: c for c in res.channels}
    emission = rows["emission"].rate
    # Rayleigh scales as a^6 T^7 from the dust value; many orders below emission
    expected = ch.rayleigh_rate(1e-5, 1.0) * (0.5e-9 / 1e-5) ** 6 * 300.0**7
    assert rows["rayleigh"].rate == pytest.approx(expected, rel=1e-12)
    assert rows["rayleigh"].rate < 1e-12 * emission
    assert not rows["rayleigh"].included and not rows["absorption"].included
