"""
Collision rates of a small sphere
=================================

How fast does the environment learn where a sphere is? Each scattering
channel contributes a total collision rate. Here we tabulate the thermal
photon channels and a dilute gas for a 10 um grain over a range of
temperatures, then plot them on log axes.
"""

# %%
import numpy as np

from decobolt import channels as ch
from decobolt.report import svg_plot

radius = 1e-5  # m
temperatures = np.geomspace(0.5, 300.0, 40)

# %%
# Black-body absorption grows as R^2 T^3 while Rayleigh scattering of
# long-wavelength photons grows as a^6 T^7, so the two cross somewhere
# below room temperature for a grain this size. Near 300 K the thermal
# wavelength (~50 um) is no longer large compared with a, so the Rayleigh
# numbers at the hot end of this table are outside the law's validity.
absorption = np.array([ch.blackbody_rate(radius, T) for T in temperatures])
rayleigh = np.array([ch.rayleigh_rate(radius, T) for T in temperatures])
crossing = temperatures[np.argmin(np.abs(np.log(absorption / rayleigh)))]
print(f"absorption and Rayleigh rates cross near T = {crossing:.3g} K")

# %%
# A gas of heavy molecules at density 1e9 m^-3 only scales as sqrt(T).
gas = np.array([ch.gas_rate(radius, 1e9, 1e-25, T) for T in temperatures])
for T, a, r, g in zip(temperatures[::13], absorption[::13], rayleigh[::13], gas[::13]):
    print(f"T = {T:8.3g} K   absorption {a:10.3e}   rayleigh {r:10.3e}   gas {g:10.3e}  [1/s]")

# %%
# Decoherence time of a 1 m body at 1 K, a number worth remembering.
print(f"tau(R = 1 m, T = 1 K) = {ch.decoherence_time(1.0, 1.0):.3e} s")

svg = svg_plot([("absorption", temperatures, absorption), ("rayleigh", temperatures, rayleigh)],
               xlabel="T [K]", ylabel="rate [1/s]", title="thermal photon channels, a = 10 um",
               logx=True, logy=True)
with open("channel_rates.svg", "w") as fh:
    fh.write(svg)
