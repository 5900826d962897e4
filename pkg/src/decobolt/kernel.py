"""Decoherence kernel gamma(r) and coherence metrics.

For a collision density with total rate N and normalized shape nu(k),

    gamma(r) = N * integral_0^inf nu(k) (1 - sin(k r) / (k r)) dk

is the decay rate of the off-diagonal element rho(x|y) with r = |x - y|.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Union

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .spectra import (
    FunctionShape,
    LineShape,
    MixtureShape,
    PlanckShape,
    QuadratureConfig,
    QuadratureError,
    SpectralDensity,
    TabulatedShape,
    bose_cutoff,
    default_quadrature,
    mean_square_k,
)

_SERIES_CUTOFF = 0.2
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
# panels per vectorized chunk; bounds memory at ~20 * _CHUNK floats
_CHUNK = 50_000
# above this many panels the Planck integral switches to a Fourier-weighted rule
_MAX_PANELS = 2_000_000


def one_minus_sinc(u):
    """1 - sin(u)/u without cancellation for small |u|."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SERIES_CUTOFF
    u2 = np.where(small, u * u, 0.0)
    # Horner form of u^2/3! - u^4/5! + u^6/7! - u^8/9! + u^10/11!
    series = u2 * (1 / 6 - u2 * (1 / 120 - u2 * (1 / 5040 - u2 * (1 / 362880 - u2 / 39916800))))
    safe = np.where(small, 1.0, u)
    direct = 1.0 - np.sin(safe) / safe
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


@singledispatch
def dephasing_fraction(shape, r: float, config: QuadratureConfig) -> float:
    """Integral of nu(k) (1 - sinc(k r)) dk, i.e. gamma(r) / N."""
    raise TypeError(f"no kernel rule for shape {type(shape).__name__}")


@dephasing_fraction.register
def _(shape: LineShape, r, config):
    k = np.asarray(shape.wavevectors)
    return float(np.dot(shape.weights, one_minus_sinc(k * r)))


@dephasing_fraction.register
def _(shape: MixtureShape, r, config):
    return math.fsum(w * dephasing_fraction(c, r, config) for w, c in zip(shape.weights, shape.components))


@dephasing_fraction.register
def _(shape: TabulatedShape, r, config):
    return float(np.trapezoid(shape.density * one_minus_sinc(shape.k * r), shape.k))


@dephasing_fraction.register
def _(shape: PlanckShape, r, config):
    u = shape.scale * r
    if u == 0:
        return 0.0
    p = shape.power
    x_max = bose_cutoff(p, config.atol)
    width = min(0.5, math.pi / u)
    n_panels = math.ceil(x_max / width)
    if n_panels > _MAX_PANELS:
        # 1 - (1/u) int x^(p-1)/(e^x - 1) sin(u x) dx, smooth amplitude, Fourier weight
        value, err = integrate.quad(lambda x: x ** (p - 1) / math.expm1(x) if x > 0 else float(p == 1),
                                    0.0, np.inf, weight="sin", wvar=u, limlst=200)
        if not np.isfinite(value):
            raise QuadratureError(f"Planck kernel failed at r = {r!r}", err)
        return 1.0 - value / (u * shape.norm)
    total = 0.0
    for start in range(0, n_panels, _CHUNK):
        stop = min(start + _CHUNK, n_panels)
        lo = np.arange(start, stop)[:, None] * width
        x = lo + 0.5 * width * (_GL_NODES[None, :] + 1.0)
        f = x**p / np.expm1(x) * one_minus_sinc(u * x)
        total += 0.5 * width * float(np.sum(f @ _GL_WEIGHTS))
    return total / shape.norm


@dephasing_fraction.register
def _(shape: FunctionShape, r, config):
    if r == 0:
        return 0.0
    # work in x = k / scale so the integrand is O(1) whatever the units
    s = shape.scale
    u = s * r
    pdf = lambda x: s * float(shape.func(x * s)) / shape.norm  # noqa: E731

    def quad(f, a, b, **kw):
        value, err = integrate.quad(f, a, b, epsabs=config.atol, epsrel=config.rtol, limit=config.limit, **kw)
        if not np.isfinite(value):
            raise QuadratureError(f"kernel quadrature failed at r = {r!r}", err)
        return value

    if u < 1.0:
        # 1 - sinc(xu) ~ (xu)^2 / 6; divide it out so atol does not swamp small r
        m = u * u / 6.0
        f = lambda x: pdf(x) * float(one_minus_sinc(x * u)) / m  # noqa: E731
        return m * (quad(f, 0.0, 1.0) + quad(f, 1.0, np.inf))
    head = quad(lambda x: pdf(x) * float(one_minus_sinc(x * u)), 0.0, 1.0)
    tail_mass = quad(pdf, 1.0, np.inf)
    tail_sinc = quad(lambda x: pdf(x) / (x * u), 1.0, np.inf, weight="sin", wvar=u)
    return head + tail_mass - tail_sinc


@dataclass(frozen=True)
class CoherenceReport:
    """Coherence metrics after an elapsed time ``time``.

    ``coherence_length`` uses the quadratic law gamma ~ N kbar^2 r^2;
    ``coherence_length_exact`` uses the exact Taylor constant N kbar^2 r^2 / 6
    and is therefore sqrt(6) times larger.
    """

    coherence_factor: float
    coherence_length: float
    coherence_length_exact: float
    rate: float
    time: float
    mean_wavelength: float

    def as_dict(self) -> dict:
        return {
            "coherence_factor": self.coherence_factor,
            "coherence_length": self.coherence_length,
            "coherence_length_exact": self.coherence_length_exact,
            "rate": self.rate,
            "time": self.time,
            "mean_wavelength": self.mean_wavelength,
        }


@dataclass(frozen=True, eq=False)
class DecoherenceKernel:
    """gamma(r) for a fixed spectral density. Immutable; evaluations are pure."""

    source: SpectralDensity
    config: QuadratureConfig = field(default_factory=default_quadrature)
    mean_square_k: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mean_square_k", mean_square_k(self.source, self.config))
        if not np.isfinite(self.mean_square_k):
            raise QuadratureError("spectral density has no finite second moment")

    @property
    def rate(self) -> float:
        return self.source.rate

    @property
    def mean_k(self) -> float:
        return math.sqrt(self.mean_square_k)

    @property
    def mean_wavelength(self) -> float:
        return 2.0 * math.pi / self.mean_k

    @property
    def small_r_coefficient(self) -> float:
        """Exact limit of gamma(r) / r^2 as r -> 0, N kbar^2 / 6."""
        return self.rate * self.mean_square_k / 6.0

    @property
    def quadratic_law_coefficient(self) -> float:
        """Coefficient of the order-of-magnitude law gamma ~ N kbar^2 r^2."""
        return self.rate * self.mean_square_k

    @property
    def curvature_at_zero(self) -> float:
        """gamma''(0) = N kbar^2 / 3."""
        return self.rate * self.mean_square_k / 3.0

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise ValueError("separation must be non-negative")
        if self.rate == 0:
            out = np.zeros_like(r_arr)
        else:
            flat = [self.rate * dephasing_fraction(self.source.shape, float(x), self.config)
                    for x in r_arr.ravel()]
            out = np.asarray(flat).reshape(r_arr.shape)
        return out if out.ndim else float(out)

    def tabulate(self, r) -> np.ndarray:
        return np.atleast_1d(self(np.asarray(r, dtype=float)))

    def cached(self, r_min: float, r_max: float, points: int = 400) -> "CachedKernel":
        return CachedKernel.build(self, r_min, r_max, points)

    def csv_text(self, r) -> str:
        r = np.asarray(r, dtype=float)
        return kernel_csv_text(r, self.tabulate(r), self.small_r_coefficient * r**2, self.rate)

    def to_csv(self, path, r) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text(r))


@dataclass(frozen=True, eq=False)
class CachedKernel:
    """Log-spaced tabulation of a kernel with shape-preserving interpolation.

    Below ``r_min`` the exact quadratic law is used; above ``r_max`` the
    underlying kernel is evaluated directly.
    """

    kernel: DecoherenceKernel
    log_r: np.ndarray
    interp: PchipInterpolator

    @classmethod
    def build(cls, kernel: DecoherenceKernel, r_min: float, r_max: float, points: int = 400):
        if not 0 < r_min < r_max:
            raise ValueError("need 0 < r_min < r_max")
        r = np.geomspace(r_min, r_max, points)
        gamma = kernel.tabulate(r)
        return cls(kernel, np.log(r), PchipInterpolator(np.log(r), gamma))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = math.exp(self.log_r[0]), math.exp(self.log_r[-1])
        out = np.empty_like(r)
        below = r < lo
        above = r > hi
        mid = ~(below | above)
        out[below] = self.kernel.small_r_coefficient * r[below] ** 2
        out[mid] = self.interp(np.log(r[mid]))
        if np.any(above):
            out[above] = self.kernel.tabulate(r[above])
        return out


def build_kernel(density: SpectralDensity, config: QuadratureConfig | None = None) -> DecoherenceKernel:
    return DecoherenceKernel(density, config or default_quadrature())


def saturation_rate(kernel: DecoherenceKernel) -> float:
    """Large-separation limit of gamma, equal to the total collision rate."""
    return kernel.rate


def coherence_factor(rate: float, time: float) -> float:
    """exp(-t N): surviving fraction of long-range coherence."""
    if time < 0:
        raise ValueError(f"time must be non-negative, got {time!r}")
    if rate < 0:
        raise ValueError(f"rate must be non-negative, got {rate!r}")
    return math.exp(-time * rate)


def coherence_length(mean_wavelength: float, time: float, rate: float) -> float:
    """lambda_bar / (2 pi sqrt(t N))."""
    if not mean_wavelength > 0:
        raise ValueError("mean wavelength must be positive")
    budget = time * rate
    if not budget > 0:
        raise ValueError("coherence length is infinite for t*N = 0")
    return mean_wavelength / (2.0 * math.pi * math.sqrt(budget))


def coherence_report(kernel: DecoherenceKernel, time: float) -> CoherenceReport:
    if not time > 0:
        raise ValueError("elapsed time must be positive")
    lam = kernel.mean_wavelength if kernel.mean_square_k > 0 else math.inf
    if kernel.rate == 0:
        l_coh = math.inf
    else:
        l_coh = coherence_length(lam, time, kernel.rate)
    return CoherenceReport(
        coherence_factor=coherence_factor(kernel.rate, time),
        coherence_length=l_coh,
        coherence_length_exact=math.sqrt(6.0) * l_coh,
        rate=kernel.rate,
        time=time,
        mean_wavelength=lam,
    )


def kernel_csv_text(r, gamma, gamma_small_r, rate) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "gamma", "gamma_small_r", "rate"])
    for row in zip(r, gamma, gamma_small_r):
        writer.writerow([repr(float(v)) for v in row] + [repr(float(rate))])
    return buf.getvalue()


def write_kernel_csv(path, r, gamma, gamma_small_r, rate) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(kernel_csv_text(r, gamma, gamma_small_r, rate))


KernelLike = Union[DecoherenceKernel, CachedKernel]
