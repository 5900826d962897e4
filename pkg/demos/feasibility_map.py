"""
How large can an interfering body be?
=====================================

Requiring that the de Broglie wavelength at thermal speed be resolvable
against a grating of size ~ a / delta puts an upper bound on the radius.
The bound depends only weakly on temperature (T^-1/5) and more strongly
on the acceptable ratio delta (delta^-2/5).
"""

# %%
import numpy as np

from decobolt import BodySpec, feasibility, max_radius

for delta in (1e-5, 1e-4, 1e-2, 1.0):
    row = "  ".join(f"{max_radius(delta, 1e4, T):9.3e}" for T in (0.01, 1.0, 300.0))
    print(f"delta = {delta:7.0e}   a_max at 0.01 K, 1 K, 300 K: {row} m")

# %%
# A 10 um grain at 1 K is three orders of magnitude too large; a
# fullerene-sized sphere at 900 K sits comfortably inside the bound.
for radius, T in ((1e-5, 1.0), (0.5e-9, 900.0)):
    rep = feasibility(BodySpec(radius, 1e4), T, 1e-5)
    print(f"a = {radius:.1e} m, T = {T:g} K: {rep.verdict} (a_max = {rep.radius_max:.3e} m)")

radii = np.geomspace(1e-10, 1e-6, 9)
print([bool(feasibility(BodySpec(a, 1e4), 1.0, 1e-5).feasible) for a in radii])
