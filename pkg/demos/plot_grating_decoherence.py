"""
Fringes of a hot molecule behind a grating
==========================================

A 720 amu molecule at 900 K passes a four-slit grating with 100 nm
period. Thermal emission of ~10 um photons is its main source of
decoherence. Because the photon wavelength is far above the grating
period, the fringes survive even though several photons are emitted.
"""

# %%
import math

from decobolt import BodySpec, GridSpec, GratingSpec, SpectralDensity, build_kernel, grating_pattern
from decobolt.experiments import run_fullerene_scenario
from decobolt.quantities import AMU

result = run_fullerene_scenario()
print(result.to_text())

# %%
# Now switch to a much shorter photon wavelength (0.2 um) at the same
# emission budget, and watch the visibility fall as the flight time grows.
body = BodySpec(0.5e-9, 1e4, mass=720 * AMU)
grid = GridSpec(3.2e-6, 512, 1e-7)
for flight in (2e-7, 5e-7, 1e-6):
    kern = build_kernel(SpectralDensity.line(2 * math.pi / 0.2e-6, 3.5 / 1e-6))
    pat = grating_pattern(body, GratingSpec(50e-9, 100e-9, 4, flight_time=flight), kern, grid)
    print(f"flight {flight * 1e6:4.1f} us: visibility {pat.visibility:.4f} -> {pat.visibility_decohered:.4f}")

result.pattern.to_csv("fullerene_pattern.csv")
