"""Decoherence channels: collision rates and spectra for each environment process."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .quantities import HBAR, K_B, C, thermal_velocity, thermal_wavevector
from .spectra import (
    LineShape,
    MixtureShape,
    PlanckShape,
    QuadratureConfig,
    SpectralDensity,
    SpectrumError,
    TabulatedShape,
    bose_integral,
    default_quadrature,
)

KINDS = ("blackbody_absorption", "thermal_emission", "rayleigh", "gas", "custom")
GAS_MODELS = ("line", "maxwell")


@lru_cache(maxsize=None)
def _bose(n: int, config: QuadratureConfig) -> float:
    return bose_integral(n, config)


def _require_positive(**values):
    for name, value in values.items():
        if not (value is not None and value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


def blackbody_rate(radius: float, temperature: float, config: QuadratureConfig | None = None) -> float:
    """Rate of thermal photons entering a black sphere.

    (1/4)(4 pi R^2 c)(1/pi^2) * integral k^2 dk / (exp(hbar c k / k_B T) - 1)
    """
    _require_positive(radius=radius, temperature=temperature)
    k_t = thermal_wavevector(temperature)
    flux_area = 0.25 * 4.0 * math.pi * radius**2 * C
    return flux_area / math.pi**2 * k_t**3 * _bose(2, config or default_quadrature())


def decoherence_time(radius: float, temperature: float, config: QuadratureConfig | None = None) -> float:
    return 1.0 / blackbody_rate(radius, temperature, config)


def rayleigh_cross_section(k, radius: float):
    """(10 pi / 3) k^4 a^6."""
    _require_positive(radius=radius)
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("wavevector must be non-negative")
    out = 10.0 * math.pi / 3.0 * k**4 * radius**6
    return out if out.ndim else float(out)


def rayleigh_rate(radius: float, temperature: float, config: QuadratureConfig | None = None) -> float:
    """Rayleigh scattering rate of thermal photons off a small sphere."""
    _require_positive(radius=radius, temperature=temperature)
    k_t = thermal_wavevector(temperature)
    prefactor = 0.5 * (10.0 * math.pi / 3.0) * radius**6 * C / math.pi**2
    return prefactor * k_t**7 * _bose(6, config or default_quadrature())


def gas_rate(radius: float, number_density: float, particle_mass: float, temperature: float) -> float:
    """4 sqrt(2 pi) a^2 n0 sqrt(k_B T / m)."""
    _require_positive(radius=radius, number_density=number_density,
                      particle_mass=particle_mass, temperature=temperature)
    return 4.0 * math.sqrt(2.0 * math.pi) * radius**2 * number_density * math.sqrt(K_B * temperature / particle_mass)


def gas_line_wavevector(particle_mass: float, temperature: float) -> float:
    """Mean momentum transfer m v_th / hbar."""
    return particle_mass * thermal_velocity(particle_mass, temperature) / HBAR


def maxwell_gas_shape(particle_mass: float, temperature: float, points: int = 1025) -> TabulatedShape:
    """Momentum transfer k = m v / hbar with v drawn from the Maxwell speed law."""
    v_p = math.sqrt(2.0 * K_B * temperature / particle_mass)  # most probable speed
    v = np.linspace(0.0, 8.0 * v_p, points)
    density = v**2 * np.exp(-(v / v_p) ** 2)
    return TabulatedShape(particle_mass * v / HBAR, density)


@dataclass(frozen=True)
class ChannelSpec:
    """One decoherence channel.

    Required fields by ``kind``:

    * ``blackbody_absorption``, ``thermal_emission``, ``rayleigh``: temperature, radius
    * ``gas``: number_density, particle_mass, temperature, radius (``gas_model`` optional)
    * ``custom``: spectrum (its rate is the channel rate)
    """

    kind: str
    temperature: Optional[float] = None
    radius: Optional[float] = None
    number_density: Optional[float] = None
    particle_mass: Optional[float] = None
    gas_model: str = "line"
    spectrum: Optional[SpectralDensity] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "custom":
            if self.spectrum is None:
                raise ValueError("custom channel needs a spectrum")
            return
        _require_positive(temperature=self.temperature, radius=self.radius)
        if self.kind == "gas":
            _require_positive(number_density=self.number_density, particle_mass=self.particle_mass)
            if self.gas_model not in GAS_MODELS:
                raise ValueError(f"gas_model must be one of {GAS_MODELS}")

    @property
    def name(self) -> str:
        return self.label or self.kind


@dataclass(frozen=True)
class Environment:
    channels: Tuple[ChannelSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))

    def __iter__(self):
        return iter(self.channels)

    def __len__(self):
        return len(self.channels)


def channel_rate(spec: ChannelSpec, config: QuadratureConfig | None = None) -> float:
    if spec.kind in ("blackbody_absorption", "thermal_emission"):
        return blackbody_rate(spec.radius, spec.temperature, config)
    if spec.kind == "rayleigh":
        return rayleigh_rate(spec.radius, spec.temperature, config)
    if spec.kind == "gas":
        return gas_rate(spec.radius, spec.number_density, spec.particle_mass, spec.temperature)
    return spec.spectrum.rate


def channel_spectrum(spec: ChannelSpec, config: QuadratureConfig | None = None) -> SpectralDensity:
    """(rate, nu) pair for one channel."""
    if spec.kind == "custom":
        return spec.spectrum
    rate = channel_rate(spec, config)
    if spec.kind in ("blackbody_absorption", "thermal_emission"):
        shape = PlanckShape(2, spec.temperature)
    elif spec.kind == "rayleigh":
        shape = PlanckShape(6, spec.temperature)
    elif spec.gas_model == "line":
        shape = LineShape((gas_line_wavevector(spec.particle_mass, spec.temperature),), (1.0,))
    else:
        shape = maxwell_gas_shape(spec.particle_mass, spec.temperature)
    return SpectralDensity(rate, shape)


def mix(densities: Sequence[SpectralDensity]) -> SpectralDensity:
    """Rate-weighted mixture of independent collision processes.

    Nested mixtures are flattened so that grouping does not matter.
    """
    densities = list(densities)
    if not densities:
        raise ValueError("cannot compose an empty environment")
    if len(densities) == 1:
        return densities[0]
    total = math.fsum(d.rate for d in densities)
    if not total > 0:
        raise SpectrumError("composed environment has zero total rate")
    weights, components = [], []
    for d in densities:
        w = d.rate / total
        if isinstance(d.shape, MixtureShape):
            weights.extend(w * cw for cw in d.shape.weights)
            components.extend(d.shape.components)
        else:
            weights.append(w)
            components.append(d.shape)
    return SpectralDensity(total, MixtureShape(tuple(weights), tuple(components)))


def compose(env: Iterable[ChannelSpec], config: QuadratureConfig | None = None) -> SpectralDensity:
    """Total rate and mixture density of all channels in ``env``."""
    specs = list(env)
    if not specs:
        raise ValueError("cannot compose an empty environment")
    return mix([channel_spectrum(s, config) for s in specs])
