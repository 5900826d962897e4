"""Collision spectral densities nu(k) and their moments.

A :class:`SpectralDensity` couples a total collision rate with a normalized
shape over the momentum-transfer magnitude k (in 1/m).  Four shape families
are supported:

* :class:`PlanckShape` -- nu proportional to k^p / (exp(hbar c k / k_B T) - 1)
* :class:`LineShape` -- a finite set of delta lines with weights
* :class:`TabulatedShape` -- a sampled density integrated with the trapezoid rule
* :class:`FunctionShape` -- an arbitrary non-negative callable, normalized numerically

:class:`MixtureShape` is produced when channels are composed.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special

from .quantities import thermal_wavevector

TOL_ENV_VAR = "DECOBOLT_QUAD_TOL"


class QuadratureError(RuntimeError):
    """Raised when a numerical integral fails to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual estimate {residual:.3e})")
        self.residual = residual


class SpectrumError(ValueError):
    """Raised for densities that cannot be normalized."""


@dataclass(frozen=True)
class QuadratureConfig:
    rtol: float = 1e-10
    atol: float = 1e-14
    limit: int = 500

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.limit < 1:
            raise ValueError("limit must be at least 1")


def default_quadrature() -> QuadratureConfig:
    """Default config; the relative tolerance honours ``DECOBOLT_QUAD_TOL``."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw:
        return QuadratureConfig(rtol=float(raw))
    return QuadratureConfig()


def _quad(func, a, b, config: QuadratureConfig, **kwargs) -> float:
    value, err = integrate.quad(func, a, b, epsabs=config.atol, epsrel=config.rtol,
                                limit=config.limit, full_output=0, **kwargs)
    if not np.isfinite(value) or err > max(config.atol, config.rtol * abs(value)) * 100:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge", err)
    return value


# -- Bose-Einstein integrals ---------------------------------------------------------

def _bose_integrand(x, p):
    return x**p / np.expm1(x)


def bose_tail_bound(p: float, x: float) -> float:
    """Upper bound on the integral of x^p/(e^x - 1) from ``x`` to infinity."""
    return special.gammaincc(p + 1, x) * special.gamma(p + 1) / -math.expm1(-x)


def bose_cutoff(p: float, atol: float, start: float = 50.0) -> float:
    """Smallest cutoff (>= ``start``, doubling) beyond which the tail is below ``atol``."""
    x = start
    while bose_tail_bound(p, x) > atol:
        x *= 2.0
    return x


def bose_moment(p: float, config: QuadratureConfig | None = None) -> float:
    """Integral of x^p/(e^x - 1) over [0, inf) for real p > 0.

    The range is split at x = 1; the upper piece stops where the exponential
    tail drops below the absolute tolerance.
    """
    if not p > 0:
        raise ValueError(f"Bose moment diverges for p = {p}")
    config = config or default_quadrature()
    x_max = bose_cutoff(p, config.atol)
    head = _quad(_bose_integrand, 0.0, 1.0, config, args=(p,))
    body = _quad(_bose_integrand, 1.0, x_max, config, args=(p,), points=[p] if 1 < p < x_max else None)
    return head + body


def bose_integral(n: int, config: QuadratureConfig | None = None) -> float:
    """Integral of x^n/(e^x - 1) over [0, inf) for integer n >= 2.

    Equals Gamma(n+1) zeta(n+1).

    >>> round(bose_integral(3), 5)
    6.49394
    """
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    return bose_moment(float(n), config)


# -- shapes --------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanckShape:
    """nu(k) proportional to k^power / (exp(k / k_T) - 1) with k_T = k_B T / (hbar c)."""

    power: int
    temperature: float
    norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.power < 2:
            raise ValueError("Planck power must be >= 2")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature!r}")
        object.__setattr__(self, "norm", bose_integral(self.power))

    @property
    def scale(self) -> float:
        return thermal_wavevector(self.temperature)

    def pdf(self, k):
        x = np.asarray(k, dtype=float) / self.scale
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(x > 0, x**self.power / np.expm1(np.where(x > 0, x, 1.0)), 0.0)
        return out / (self.norm * self.scale)

    def moment(self, order: float, config: QuadratureConfig | None = None) -> float:
        return self.scale**order * bose_moment(self.power + order, config) / self.norm


@dataclass(frozen=True)
class LineShape:
    """Discrete lines at ``wavevectors`` with probabilities ``weights``."""

    wavevectors: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        k = np.asarray(self.wavevectors, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if k.ndim != 1 or k.shape != w.shape or k.size == 0:
            raise SpectrumError("line wavevectors and weights must be equal-length, non-empty")
        if np.any(k < 0) or np.any(w < 0):
            raise SpectrumError("line wavevectors and weights must be non-negative")
        total = w.sum()
        if not total > 0:
            raise SpectrumError("line weights sum to zero")
        object.__setattr__(self, "wavevectors", tuple(float(x) for x in k))
        object.__setattr__(self, "weights", tuple(float(x) for x in w / total))

    def pdf(self, k):
        raise SpectrumError("a line spectrum has no pointwise density")

    def moment(self, order: float, config=None) -> float:
        k = np.asarray(self.wavevectors)
        return float(np.dot(self.weights, k**order))


@dataclass(frozen=True, eq=False)
class TabulatedShape:
    """Density sampled on an increasing grid; zero outside it."""

    k: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        k = np.array(self.k, dtype=float)
        d = np.array(self.density, dtype=float)
        if k.ndim != 1 or k.shape != d.shape or k.size < 2:
            raise SpectrumError("tabulated grid and density must be 1-D, equal length, >= 2 points")
        if np.any(np.diff(k) <= 0) or k[0] < 0:
            raise SpectrumError("tabulated k grid must be non-negative and strictly increasing")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise SpectrumError("tabulated density must be finite and non-negative")
        mass = np.trapezoid(d, k)
        if not mass > 0:
            raise SpectrumError("tabulated density has zero mass")
        k.setflags(write=False)
        d = d / mass
        d.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "density", d)

    def pdf(self, k):
        return np.interp(k, self.k, self.density, left=0.0, right=0.0)

    def moment(self, order: float, config=None) -> float:
        return float(np.trapezoid(self.k**order * self.density, self.k))


@dataclass(frozen=True, eq=False)
class FunctionShape:
    """A user-supplied density, normalized by quadrature over [0, inf).

    ``scale`` is a characteristic wavevector; integrals are split at k = scale.
    """

    func: Callable[[float], float]
    scale: float = 1.0
    norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "norm", self._raw_moment(0.0))
        if not (np.isfinite(self.norm) and self.norm > 0):
            raise SpectrumError("density has zero or non-finite mass")

    def _raw_moment(self, order: float, config: QuadratureConfig | None = None) -> float:
        config = config or default_quadrature()
        s = self.scale

        def f(x):
            try:
                v = float(self.func(x * s))
            except ArithmeticError as exc:
                raise SpectrumError(f"density cannot be evaluated at k = {x * s!r}: {exc}") from exc
            if v < 0:
                raise SpectrumError(f"density is negative at k = {x * s!r}")
            return v * x**order

        try:
            head = _quad(f, 0.0, 1.0, config)
            tail = _quad(f, 1.0, np.inf, config)
        except QuadratureError as exc:
            raise SpectrumError(f"density is not integrable: {exc}") from exc
        return s ** (order + 1) * (head + tail)

    def pdf(self, k):
        return np.vectorize(lambda q: float(self.func(q)))(np.asarray(k, dtype=float)) / self.norm

    def moment(self, order: float, config: QuadratureConfig | None = None) -> float:
        value = self._raw_moment(order, config) / self.norm
        if not np.isfinite(value):
            raise QuadratureError(f"moment of order {order} diverges")
        return value


@dataclass(frozen=True)
class MixtureShape:
    """Convex combination of shapes."""

    weights: Tuple[float, ...]
    components: Tuple["Shape", ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.components) or len(w) == 0:
            raise SpectrumError("mixture needs one weight per component")
        if np.any(w < 0) or not w.sum() > 0:
            raise SpectrumError("mixture weights must be non-negative with positive sum")
        object.__setattr__(self, "weights", tuple(float(x) for x in w / w.sum()))

    def pdf(self, k):
        return sum(w * c.pdf(k) for w, c in zip(self.weights, self.components))

    def moment(self, order: float, config=None) -> float:
        return math.fsum(w * c.moment(order, config) for w, c in zip(self.weights, self.components))


Shape = Union[PlanckShape, LineShape, TabulatedShape, FunctionShape, MixtureShape]


@dataclass(frozen=True)
class SpectralDensity:
    """A total collision rate (1/s) together with a normalized shape."""

    rate: float
    shape: Shape

    def __post_init__(self):
        if not (self.rate >= 0 and np.isfinite(self.rate)):
            raise ValueError(f"collision rate must be finite and non-negative, got {self.rate!r}")

    @classmethod
    def planck(cls, power: int, temperature: float, rate: float) -> "SpectralDensity":
        return cls(rate, PlanckShape(power, temperature))

    @classmethod
    def line(cls, k0: float, rate: float) -> "SpectralDensity":
        return cls(rate, LineShape((k0,), (1.0,)))

    @classmethod
    def lines(cls, wavevectors: Sequence[float], weights: Sequence[float], rate: float) -> "SpectralDensity":
        return cls(rate, LineShape(tuple(wavevectors), tuple(weights)))

    @classmethod
    def tabulated(cls, k, density, rate: float) -> "SpectralDensity":
        return cls(rate, TabulatedShape(np.asarray(k), np.asarray(density)))

    def pdf(self, k):
        return self.shape.pdf(k)

    def with_rate(self, rate: float) -> "SpectralDensity":
        return SpectralDensity(rate, self.shape)


def normalize(raw_density: Callable[[float], float], rate: float, scale: float = 1.0) -> SpectralDensity:
    """Turn a non-negative, integrable function of k into a normalized density.

    >>> s = normalize(lambda k: -k**2 * math.exp(-k) / math.expm1(-k) if k > 0 else 0.0, rate=3.0)
    >>> round(1 / s.shape.norm, 5)
    0.41595
    """
    return SpectralDensity(rate, FunctionShape(raw_density, scale))


def mean_square_k(density: Union[SpectralDensity, Shape], config: QuadratureConfig | None = None) -> float:
    """Second moment of nu(k), in 1/m^2."""
    shape = density.shape if isinstance(density, SpectralDensity) else density
    return shape.moment(2.0, config)


def mean_k(density: Union[SpectralDensity, Shape], config: QuadratureConfig | None = None) -> float:
    """Root-mean-square wavevector; the mean wavelength is 2 pi over this."""
    return math.sqrt(mean_square_k(density, config))


def load_tabulated_csv(path: Union[str, os.PathLike], rate: float) -> SpectralDensity:
    """Read a two-column CSV (k [1/m], density) with a mandatory header row."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SpectrumError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r and any(c.strip() for c in r)]
    try:
        [float(c) for c in header]
    except ValueError:
        pass
    else:
        raise SpectrumError(f"{path}: header row required")
    if len(header) != 2:
        raise SpectrumError(f"{path}: expected 2 columns, header has {len(header)}")
    k, d = [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 2:
            raise SpectrumError(f"{path}:{lineno}: expected 2 columns")
        try:
            k.append(float(row[0]))
            d.append(float(row[1]))
        except ValueError as exc:
            raise SpectrumError(f"{path}:{lineno}: {exc}") from None
    return SpectralDensity.tabulated(k, d, rate)
