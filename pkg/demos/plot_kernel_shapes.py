"""
Shape of the decoherence kernel
===============================

The kernel gamma(r) rises quadratically for separations well below the
mean environmental wavelength and saturates at the total collision rate
above it. We compare three spectra with equal rates.
"""

# %%
import numpy as np

from decobolt import SpectralDensity, build_kernel, channels as ch
from decobolt.report import svg_plot

T = 1.0
families = {
    "photons (k^2 Planck)": SpectralDensity.planck(2, T, 1.0),
    "Rayleigh (k^6 Planck)": SpectralDensity.planck(6, T, 1.0),
    "Maxwell gas": SpectralDensity(1.0, ch.maxwell_gas_shape(1e-25, T)),
}

# %%
# Scale every kernel by its own rms wavevector so the curves overlay.
u = np.geomspace(1e-2, 1e2, 81)
curves = {}
for name, density in families.items():
    kern = build_kernel(density)
    r = u / kern.mean_k
    curves[name] = kern.tabulate(r) / kern.rate
    print(f"{name:24s} kbar = {kern.mean_k:10.4g} 1/m   gamma(1e-2/kbar)/N = {curves[name][0]:.4e}"
          f"   (u^2/6 = {u[0] ** 2 / 6:.4e})")

# %%
# The gas kernel oscillates slightly past saturation because its spectrum
# is narrow; the thermal photon spectra are broad and approach 1 smoothly.
svg = svg_plot([("k^2 Planck", u, curves["photons (k^2 Planck)"]), ("Maxwell gas", u, curves["Maxwell gas"])],
               xlabel="r kbar", ylabel="gamma / N", title="decoherence kernel", logx=True, logy=True)
with open("kernel_shapes.svg", "w") as fh:
    fh.write(svg)
