import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decobolt.channels import maxwell_gas_shape
from decobolt.kernel import (
    build_kernel,
    coherence_factor,
    coherence_length,
    coherence_report,
    one_minus_sinc,
    saturation_rate,
)
from decobolt.quantities import thermal_wavevector
from decobolt.spectra import SpectralDensity


def planck_fraction_oracle(p, u):
    """1 - <sinc(k r)> for nu ~ k^p/(e^{k/kT} - 1), via the Hurwitz zeta function."""
    mpmath.mp.dps = 30
    u = mpmath.mpf(u)
    hz = mpmath.zeta(p, 1 - 1j * u)
    return float(1 - mpmath.gamma(p) * mpmath.im(hz) / (u * mpmath.gamma(p + 1) * mpmath.zeta(p + 1)))


@pytest.mark.parametrize("power", [2, 6])
@pytest.mark.parametrize("u", [1e-3, 0.05, 0.7, 3.0, 40.0, 1e3, 1e5])
def test_planck_kernel_against_hurwitz_zeta(power, u):
    T = 2.0
    kern = build_kernel(SpectralDensity.planck(power, T, 1.0))
    r = u / thermal_wavevector(T)
    assert kern(r) == pytest.approx(planck_fraction_oracle(power, u), rel=1e-9)


def test_one_minus_sinc_series_branch_is_accurate():
    mpmath.mp.dps = 40

    def exact(u):
        return [float(1 - mpmath.sin(mpmath.mpf(x)) / mpmath.mpf(x)) for x in u]

    series = np.array([1e-8, 1e-4, 0.1, 0.19])
    np.testing.assert_allclose(one_minus_sinc(series), exact(series), rtol=1e-14)
    # the direct branch loses about eps / u^2 just above the switch-over
    direct = np.array([0.21, 2.0, 50.0])
    np.testing.assert_allclose(one_minus_sinc(direct), exact(direct), rtol=5e-14)


@given(st.floats(1e-4, 1e4))
@settings(max_examples=40, deadline=None)
def test_kernel_bounds(r_scaled):
    kern = build_kernel(SpectralDensity.planck(2, 1.0, 5.0))
    g = kern(r_scaled / kern.mean_k)
    assert 0.0 <= g <= 5.0 * 1.2173


def test_saturation_for_smooth_families():
    for density in (SpectralDensity.planck(2, 1.0, 4.0), SpectralDensity(4.0, maxwell_gas_shape(1e-25, 1.0))):
        kern = build_kernel(density)
        assert saturation_rate(kern) == 4.0
        assert kern(1e3 / kern.mean_k) / kern.rate == pytest.approx(1.0, abs=0.05)


def test_small_r_coefficients_are_consistent():
    kern = build_kernel(SpectralDensity.line(3.0, 2.0))
    assert kern.small_r_coefficient == pytest.approx(3.0)
    assert kern.quadratic_law_coefficient == pytest.approx(18.0)
    assert kern.curvature_at_zero == pytest.approx(6.0)
    assert kern(0.0) == 0.0
    with pytest.raises(ValueError):
        kern(-1.0)


def test_cached_kernel_matches_direct():
    kern = build_kernel(SpectralDensity.planck(2, 10.0, 1.0))
    s = 1.0 / kern.mean_k
    cached = kern.cached(1e-2 * s, 1e2 * s, 400)
    r = np.geomspace(1e-3 * s, 3e2 * s, 57)
    np.testing.assert_allclose(cached(r), kern.tabulate(r), rtol=1e-4)


def test_coherence_metrics():
    assert coherence_factor(3.5, 1.0) == pytest.approx(math.exp(-3.5))
    assert coherence_length(10e-6, 1.0, 3.5) == pytest.approx(10e-6 / (2 * math.pi * math.sqrt(3.5)))
    with pytest.raises(ValueError):
        coherence_factor(1.0, -1.0)
    with pytest.raises(ValueError):
        coherence_length(1e-6, 0.0, 1.0)


def test_coherence_report_fields():
    kern = build_kernel(SpectralDensity.line(2 * math.pi / 10e-6, 3.5))
    rep = coherence_report(kern, 1.0)
    assert rep.coherence_factor == pytest.approx(0.0302, abs=1e-4)
    assert rep.coherence_length_exact == pytest.approx(math.sqrt(6) * rep.coherence_length)
    assert set(rep.as_dict()) >= {"coherence_factor", "coherence_length", "rate", "time"}
    quiet = coherence_report(build_kernel(SpectralDensity.line(1.0, 0.0)), 1.0)
    assert quiet.coherence_factor == 1.0 and math.isinf(quiet.coherence_length)


def test_kernel_csv(tmp_path):
    kern = build_kernel(SpectralDensity.line(1e6, 2.0))
    r = np.geomspace(1e-9, 1e-3, 7)
    path = tmp_path / "k.csv"
    kern.to_csv(path, r)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,gamma,gamma_small_r,rate"
    assert len(lines) == 8
    assert path.read_text() == kern.csv_text(r)
