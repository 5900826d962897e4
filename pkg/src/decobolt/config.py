"""Scenario configuration files (TOML) with unit-suffixed numbers.

Example::

    [body]
    radius = "10 um"
    mass_density = 1e4            # kg/m^3

    [[channel]]
    kind = "gas"
    temperature = "1 K"
    number_density = 1e9          # 1/m^3
    particle_mass = 1e-25         # kg

    [[channel]]
    kind = "custom"
    rate = "7 Hz"
    spectrum = "line"
    wavevector = 1e6              # 1/m

    [experiment]
    time = "1 ms"

A channel without ``radius`` inherits the body radius. Plain numbers are SI;
strings are ``"<number> <unit>"``.
"""

from __future__ import annotations

import re
from decimal import Decimal
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .channels import ChannelSpec
from .evolution import GridSpec, PotentialSpec
from .experiments import GratingSpec
from .quantities import AMU, BodySpec
from .spectra import SpectralDensity, load_tabulated_csv


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


UNITS: Dict[str, Dict[str, float]] = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "μm": 1e-6, "nm": 1e-9, "pm": 1e-12},
    "temperature": {"K": 1.0, "mK": 1e-3},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "μs": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "mass": {"kg": 1.0, "g": 1e-3, "amu": AMU, "u": AMU},
    "rate": {"1/s": 1.0, "Hz": 1.0, "kHz": 1e3, "MHz": 1e6},
    "wavevector": {"1/m": 1.0, "1/um": 1e6, "1/nm": 1e9},
    "density": {"kg/m^3": 1.0, "g/cm^3": 1e3},
    "number_density": {"1/m^3": 1.0, "1/cm^3": 1e6},
    "angular_frequency": {"rad/s": 1.0, "1/s": 1.0},
    "momentum": {"kg*m/s": 1.0},
    "dimensionless": {},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(value: Any, dimension: str, where: str) -> float:
    """Convert a number or ``"<number> <unit>"`` string to SI."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a number or quantity string, got {type(value).__name__}")
    m = _QUANTITY.match(value)
    if not m:
        raise ConfigError(f"{where}: cannot parse quantity {value!r}")
    number, unit = m.group(1), m.group(2)
    if not unit:
        return float(number)
    table = UNITS[dimension]
    if unit not in table:
        allowed = ", ".join(table) or "none"
        raise ConfigError(f"{where}: unit {unit!r} is not a {dimension} unit (allowed: {allowed})")
    # decimal product so that "10 um" gives exactly 1e-05
    return float(Decimal(number) * Decimal(repr(table[unit])))


class _Section:
    """Typed, consume-once view over a TOML table; leftovers are unknown keys."""

    def __init__(self, table: Any, where: str):
        if not isinstance(table, dict):
            raise ConfigError(f"{where}: expected a table")
        self.table = dict(table)
        self.where = where

    def _path(self, key):
        return f"{self.where}.{key}" if self.where else key

    def quantity(self, key, dimension, default=None, required=False):
        if key not in self.table:
            if required:
                raise ConfigError(f"{self._path(key)}: required field missing")
            return default
        return parse_quantity(self.table.pop(key), dimension, self._path(key))

    def integer(self, key, default=None, required=False):
        if key not in self.table:
            if required:
                raise ConfigError(f"{self._path(key)}: required field missing")
            return default
        v = self.table.pop(key)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{self._path(key)}: expected an integer")
        return v

    def string(self, key, default=None, required=False, choices=None):
        if key not in self.table:
            if required:
                raise ConfigError(f"{self._path(key)}: required field missing")
            return default
        v = self.table.pop(key)
        if not isinstance(v, str):
            raise ConfigError(f"{self._path(key)}: expected a string")
        if choices and v not in choices:
            raise ConfigError(f"{self._path(key)}: {v!r} is not one of {', '.join(choices)}")
        return v

    def boolean(self, key, default=None):
        if key not in self.table:
            return default
        v = self.table.pop(key)
        if not isinstance(v, bool):
            raise ConfigError(f"{self._path(key)}: expected true or false")
        return v

    def section(self, key, required=False) -> Optional["_Section"]:
        if key not in self.table:
            if required:
                raise ConfigError(f"{self._path(key)}: required section missing")
            return None
        return _Section(self.table.pop(key), self._path(key))

    def done(self):
        if self.table:
            keys = ", ".join(sorted(self.table))
            raise ConfigError(f"{self.where or 'top level'}: unknown key(s) {keys}")


@dataclass
class StateConfig:
    center: float = 0.0
    width: Optional[float] = None
    momentum: float = 0.0


@dataclass
class ExperimentConfig:
    time: Optional[float] = None
    temperature: Optional[float] = None
    delta: Optional[float] = None
    grid: Optional[GridSpec] = None
    grating: Optional[GratingSpec] = None
    state: StateConfig = field(default_factory=StateConfig)
    potential: PotentialSpec = field(default_factory=PotentialSpec.free)
    kinetic: bool = True


@dataclass
class OutputConfig:
    trajectory: Optional[Path] = None
    snapshot: Optional[Path] = None
    stride: int = 1


@dataclass
class ScenarioConfig:
    body: BodySpec
    environment: List[ChannelSpec]
    experiment: ExperimentConfig
    outputs: OutputConfig
    source: Optional[Path] = None


def _parse_body(sec: _Section) -> BodySpec:
    body = BodySpec(
        radius=sec.quantity("radius", "length", required=True),
        mass_density=sec.quantity("mass_density", "density", required=True),
        internal_temperature=sec.quantity("internal_temperature", "temperature"),
        mass=sec.quantity("mass", "mass"),
    )
    sec.done()
    return body


def _parse_custom_spectrum(sec: _Section, rate: float, base: Path) -> SpectralDensity:
    form = sec.string("spectrum", required=True, choices=("line", "planck", "tabulated"))
    if form == "line":
        return SpectralDensity.line(sec.quantity("wavevector", "wavevector", required=True), rate)
    if form == "planck":
        power = sec.integer("power", required=True)
        return SpectralDensity.planck(power, sec.quantity("temperature", "temperature", required=True), rate)
    path = Path(sec.string("file", required=True))
    return load_tabulated_csv(path if path.is_absolute() else base / path, rate)


def _parse_channel(sec: _Section, body: BodySpec, base: Path) -> ChannelSpec:
    kind = sec.string("kind", required=True,
                      choices=("blackbody_absorption", "thermal_emission", "rayleigh", "gas", "custom"))
    label = sec.string("label")
    if kind == "custom":
        rate = sec.quantity("rate", "rate", required=True)
        spectrum = _parse_custom_spectrum(sec, rate, base)
        spec = ChannelSpec("custom", spectrum=spectrum, label=label)
    else:
        radius = sec.quantity("radius", "length", default=body.radius)
        default_t = body.internal_temperature if kind == "thermal_emission" else None
        temperature = sec.quantity("temperature", "temperature", default=default_t, required=default_t is None)
        extra = {}
        if kind == "gas":
            extra = dict(
                number_density=sec.quantity("number_density", "number_density", required=True),
                particle_mass=sec.quantity("particle_mass", "mass", required=True),
                gas_model=sec.string("gas_model", default="line", choices=("line", "maxwell")),
            )
        spec = ChannelSpec(kind, temperature=temperature, radius=radius, label=label, **extra)
    sec.done()
    return spec


def _parse_experiment(sec: Optional[_Section]) -> ExperimentConfig:
    exp = ExperimentConfig()
    if sec is None:
        return exp
    exp.time = sec.quantity("time", "time")
    exp.temperature = sec.quantity("temperature", "temperature")
    exp.delta = sec.quantity("delta", "dimensionless")
    exp.kinetic = sec.boolean("kinetic", default=True)
    g = sec.section("grid")
    if g is not None:
        exp.grid = GridSpec(
            extent=g.quantity("extent", "length", required=True),
            points=g.integer("points", required=True),
            dt=g.quantity("dt", "time", required=True),
        )
        g.done()
    gr = sec.section("grating")
    if gr is not None:
        exp.grating = GratingSpec(
            slit_width=gr.quantity("slit_width", "length", required=True),
            period=gr.quantity("period", "length", required=True),
            slits=gr.integer("slits", default=2),
            flight_time=gr.quantity("flight_time", "time", default=0.0),
        )
        gr.done()
    st = sec.section("state")
    if st is not None:
        exp.state = StateConfig(
            center=st.quantity("center", "length", default=0.0),
            width=st.quantity("width", "length"),
            momentum=st.quantity("momentum", "momentum", default=0.0),
        )
        st.done()
    pot = sec.section("potential")
    if pot is not None:
        kind = pot.string("kind", default="free", choices=("free", "harmonic"))
        omega = pot.quantity("omega", "angular_frequency", required=kind == "harmonic")
        exp.potential = PotentialSpec(kind, omega=omega)
        pot.done()
    sec.done()
    return exp


def _parse_outputs(sec: Optional[_Section], base: Path) -> OutputConfig:
    out = OutputConfig()
    if sec is None:
        return out
    for key in ("trajectory", "snapshot"):
        value = sec.string(key)
        if value is not None:
            p = Path(value)
            setattr(out, key, p if p.is_absolute() else base / p)
    out.stride = sec.integer("stride", default=1)
    if out.stride < 1:
        raise ConfigError("outputs.stride: must be >= 1")
    sec.done()
    return out


def _addressed(where, fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(data: dict, base: Path = Path(".")) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from an already-decoded TOML tree."""
    top = _Section(data, "")
    try:
        body = _addressed("body", _parse_body, top.section("body", required=True))
        raw_channels = top.table.pop("channel", [])
        if not isinstance(raw_channels, list):
            raise ConfigError("channel: expected an array of tables ([[channel]])")
        environment = [_addressed(f"channel[{i}]", _parse_channel, _Section(c, f"channel[{i}]"), body, base)
                       for i, c in enumerate(raw_channels)]
        experiment = _addressed("experiment", _parse_experiment, top.section("experiment"))
        outputs = _parse_outputs(top.section("outputs"), base)
        top.done()
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    return ScenarioConfig(body, environment, experiment, outputs)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = parse_config(data, path.parent)
    cfg.source = path
    return cfg
