"""Physical constants and elementary derived quantities.

All values are SI. The constant set is fixed (CODATA 2018) so that every
derived number in the package is reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 constants in SI units."""

    hbar: float = 1.054571817e-34  # J s
    k_B: float = 1.380649e-23  # J/K
    c: float = 2.99792458e8  # m/s
    amu: float = 1.66053907e-27  # kg


CONSTANTS = PhysicalConstants()
HBAR = CONSTANTS.hbar
K_B = CONSTANTS.k_B
C = CONSTANTS.c
AMU = CONSTANTS.amu


@dataclass(frozen=True)
class BodySpec:
    """A homogeneous spherical body.

    Parameters
    ----------
    radius : float
        Radius in m.
    mass_density : float
        Density in kg/m^3. Ignored for the mass when ``mass`` is given.
    internal_temperature : float, optional
        Temperature of the body itself in K (used for thermal emission).
    mass : float, optional
        Explicit mass in kg; overrides the density-derived mass.
    """

    radius: float
    mass_density: float
    internal_temperature: Optional[float] = None
    mass: Optional[float] = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius!r}")
        if not self.mass_density > 0:
            raise ValueError(f"mass_density must be positive, got {self.mass_density!r}")
        if self.mass is not None and not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        if self.internal_temperature is not None and self.internal_temperature < 0:
            raise ValueError("internal_temperature must be non-negative")

    @property
    def total_mass(self) -> float:
        return body_mass(self)


def body_mass(body: BodySpec) -> float:
    """Explicit mass if set, else the mass of a uniform sphere."""
    if body.mass is not None:
        return body.mass
    return 4.0 / 3.0 * math.pi * body.radius**3 * body.mass_density


def thermal_velocity(mass: float, temperature: float) -> float:
    """Mean Maxwell-Boltzmann speed sqrt(8 k_B T / (pi m))."""
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass!r}")
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature!r}")
    return math.sqrt(8.0 * K_B * temperature / (math.pi * mass))


def de_broglie_wavelength(mass: float, speed: float) -> float:
    """2 pi hbar / (M V)."""
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass!r}")
    if not speed > 0:
        raise ValueError(f"speed must be positive (wavelength diverges at rest), got {speed!r}")
    return 2.0 * math.pi * HBAR / (mass * speed)


def thermal_wavevector(temperature: float) -> float:
    """k_B T / (hbar c), the natural photon wavevector scale at ``temperature``."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature!r}")
    return K_B * temperature / (HBAR * C)


def thermal_photon_wavelength(temperature: float) -> float:
    """2 pi hbar c / (k_B T)."""
    return 2.0 * math.pi / thermal_wavevector(temperature)
