"""Position-basis density-matrix propagation on a periodic 1-D grid.

The master equation

    d rho / dt = -(i/hbar) [P^2/2M + V(X), rho] - gamma(|x - y|) rho(x|y)

is integrated with symmetric (Strang) splitting: half a kinetic step applied
exactly in the momentum representation of both indices, a full step of the
position-diagonal pieces (potential phase and decoherence multiplier), and
another half kinetic step.
"""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .quantities import HBAR

GUARD_FRACTION = 0.125  # per side; 25% of the grid in total
GUARD_TOLERANCE = 1e-6


class EvolutionError(RuntimeError):
    """Numerical failure during propagation (NaN, overflow, invariant breach)."""


class GuardBandError(EvolutionError):
    """Probability leaked into the periodic guard band."""


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid of ``points`` cells spanning ``extent`` metres, centred on 0."""

    extent: float
    points: int
    dt: float

    def __post_init__(self):
        if not self.extent > 0:
            raise ValueError("grid extent must be positive")
        if self.points < 16 or self.points & (self.points - 1):
            raise ValueError(f"points must be a power of two >= 16, got {self.points}")
        if not self.dt > 0:
            raise ValueError("time step must be positive")

    @property
    def dx(self) -> float:
        return self.extent / self.points

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.extent + self.dx * np.arange(self.points)

    @property
    def p(self) -> np.ndarray:
        """Momentum of each FFT bin (kg m/s), in FFT order."""
        return 2.0 * math.pi * HBAR * np.fft.fftfreq(self.points, d=self.dx)

    @property
    def p_max(self) -> float:
        return math.pi * HBAR / self.dx

    @property
    def dp(self) -> float:
        return 2.0 * math.pi * HBAR / self.extent

    @property
    def guard_mask(self) -> np.ndarray:
        n = int(round(GUARD_FRACTION * self.points))
        mask = np.zeros(self.points, dtype=bool)
        mask[:n] = True
        mask[self.points - n:] = True
        return mask


@dataclass(frozen=True)
class PotentialSpec:
    """External potential: ``free``, ``harmonic`` (angular frequency ``omega``) or ``tabulated``."""

    kind: str = "free"
    omega: Optional[float] = None
    values: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("free", "harmonic", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "harmonic" and not (self.omega and self.omega > 0):
            raise ValueError("harmonic potential needs omega > 0")
        if self.kind == "tabulated" and self.values is None:
            raise ValueError("tabulated potential needs values")

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def harmonic(cls, omega: float):
        return cls("harmonic", omega=omega)

    @classmethod
    def tabulated(cls, values):
        return cls("tabulated", values=np.asarray(values, dtype=float))

    def on_grid(self, grid: GridSpec, mass: float) -> np.ndarray:
        if self.kind == "free":
            return np.zeros(grid.points)
        if self.kind == "harmonic":
            return 0.5 * mass * self.omega**2 * grid.x**2
        values = np.asarray(self.values, dtype=float)
        if values.shape != (grid.points,):
            raise ValueError(f"tabulated potential has shape {values.shape}, grid needs ({grid.points},)")
        return values


@dataclass(eq=False)
class DensityMatrix:
    """rho(x_i | x_j) on ``grid``, normalized so that sum_i rho_ii dx = 1."""

    matrix: np.ndarray
    grid: GridSpec
    mass: float
    time: float = 0.0

    def __post_init__(self):
        n = self.grid.points
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match grid ({n}, {n})")
        if not self.mass > 0:
            raise ValueError("mass must be positive")

    def copy(self) -> "DensityMatrix":
        return replace(self, matrix=self.matrix.copy())

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)) * self.grid.dx)

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T))) * self.grid.dx

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the (dimensionless) matrix rho_ij dx. O(N^3)."""
        herm = 0.5 * (self.matrix + self.matrix.conj().T) * self.grid.dx
        return float(np.linalg.eigvalsh(herm)[0])

    def momentum_matrix(self) -> np.ndarray:
        """rho in the momentum basis (FFT order), same normalization convention."""
        return np.fft.ifft(np.fft.fft(self.matrix, axis=0, norm="ortho"), axis=1, norm="ortho")

    def position_distribution(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)) * self.grid.dx

    def momentum_distribution(self) -> np.ndarray:
        """Probability per momentum bin, FFT order."""
        return np.real(np.diag(self.momentum_matrix())) * self.grid.dx

    def guard_mass(self) -> float:
        return float(np.sum(self.position_distribution()[self.grid.guard_mask]))


def pure_state(psi: np.ndarray, grid: GridSpec, mass: float, time: float = 0.0) -> DensityMatrix:
    """|psi><psi| with psi renormalized on the grid."""
    psi = np.asarray(psi, dtype=complex)
    norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
    if not norm > 0:
        raise ValueError("wavefunction vanishes on the grid")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, psi.conj()), grid, mass, time)


def init_gaussian(grid: GridSpec, mass: float, center: float, width: float, momentum: float = 0.0) -> DensityMatrix:
    """Minimal-uncertainty Gaussian with Var(X) = width^2."""
    if width < 4 * grid.dx:
        raise ValueError(f"width {width:.3e} m is unresolved; need >= 4 dx = {4 * grid.dx:.3e} m")
    k_width = 1.0 / (2.0 * width)
    if abs(momentum) / HBAR + 4.0 * k_width >= math.pi / grid.dx:
        raise ValueError("wavepacket momentum content exceeds the grid cutoff")
    x = grid.x
    inner = 0.5 * grid.extent * (1.0 - 2.0 * GUARD_FRACTION)
    if abs(center) + 6.0 * width > inner:
        raise ValueError("wavepacket is not supported well inside the grid (guard band overlap)")
    psi = np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * momentum * (x - center) / HBAR)
    return pure_state(psi, grid, mass)


KernelArg = Union[None, Callable[[np.ndarray], np.ndarray]]


def separation_rates(kernel: KernelArg, grid: GridSpec) -> np.ndarray:
    """gamma evaluated at the N distinct grid separations m dx, m = 0..N-1."""
    if kernel is None:
        return np.zeros(grid.points)
    gamma = np.asarray(kernel(np.arange(grid.points) * grid.dx), dtype=float)
    if gamma.shape != (grid.points,) or not np.all(np.isfinite(gamma)):
        raise EvolutionError("kernel returned non-finite or mis-shaped values")
    return gamma


def dephasing_multiplier(gamma_sep: np.ndarray, dt: float) -> np.ndarray:
    n = gamma_sep.size
    idx = np.arange(n)
    return np.exp(-gamma_sep[np.abs(idx[:, None] - idx[None, :])] * dt)


class SplitStepPropagator:
    """One Strang step, with all multipliers precomputed for a fixed ``dt``.

    ``kinetic=False`` drops the kinetic term (the infinite-mass limit); the
    step is then the exact position-diagonal map.
    """

    def __init__(self, grid: GridSpec, mass: float, kernel: KernelArg = None,
                 potential: Optional[PotentialSpec] = None, dt: Optional[float] = None,
                 kinetic: bool = True, check_guard: bool = True, gamma_sep: Optional[np.ndarray] = None):
        self.grid = grid
        self.mass = mass
        self.dt = grid.dt if dt is None else dt
        if self.dt < 0:
            raise ValueError("time step must be non-negative")
        self.kinetic = kinetic
        self.check_guard = check_guard
        potential = potential or PotentialSpec.free()
        self.gamma_sep = separation_rates(kernel, grid) if gamma_sep is None else gamma_sep
        v = potential.on_grid(grid, mass)
        phase = np.exp(-1j * v * self.dt / HBAR)
        self._position = np.outer(phase, phase.conj()) * dephasing_multiplier(self.gamma_sep, self.dt)
        half = np.exp(-1j * grid.p**2 * self.dt / (4.0 * mass * HBAR))
        self._half_kinetic = np.outer(half, half.conj())

    def _kinetic(self, m: np.ndarray) -> np.ndarray:
        mp = np.fft.ifft(np.fft.fft(m, axis=0, norm="ortho"), axis=1, norm="ortho")
        mp *= self._half_kinetic
        return np.fft.fft(np.fft.ifft(mp, axis=0, norm="ortho"), axis=1, norm="ortho")

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        if self.dt == 0:
            return rho.copy()
        m = rho.matrix
        if self.kinetic:
            m = self._kinetic(m)
        m = m * self._position
        if self.kinetic:
            m = self._kinetic(m)
        out = DensityMatrix(m, rho.grid, rho.mass, rho.time + self.dt)
        self._audit(out)
        return out

    def _audit(self, rho: DensityMatrix) -> None:
        if not np.all(np.isfinite(rho.matrix)):
            raise EvolutionError(f"non-finite density matrix at t = {rho.time:.6e} s")
        if self.check_guard:
            leaked = rho.guard_mass()
            if leaked > GUARD_TOLERANCE:
                raise GuardBandError(
                    f"guard-band probability {leaked:.3e} exceeds {GUARD_TOLERANCE:.0e} at t = {rho.time:.6e} s; "
                    "enlarge the grid or shorten the run")


def step(rho: DensityMatrix, kernel: KernelArg = None, potential: Optional[PotentialSpec] = None,
         dt: float = 0.0, kinetic: bool = True) -> DensityMatrix:
    """Advance ``rho`` by one symmetric split step of length ``dt``."""
    return SplitStepPropagator(rho.grid, rho.mass, kernel, potential, dt, kinetic)(rho)


def momentum_shift(rho: DensityMatrix, k: float) -> DensityMatrix:
    """exp(-i k X) rho exp(i k X): translates the momentum distribution by -hbar k."""
    if k == 0:
        return rho.copy()
    obs = observables(rho)
    reach = abs(obs.mean_p - HBAR * k) + 6.0 * math.sqrt(obs.var_p)
    if reach >= rho.grid.p_max:
        raise ValueError(f"shift by k = {k:.3e} 1/m moves the state past the momentum cutoff")
    phase = np.exp(-1j * k * rho.grid.x)
    return DensityMatrix(rho.matrix * np.outer(phase, phase.conj()), rho.grid, rho.mass, rho.time)


@dataclass(frozen=True)
class Observables:
    position_distribution: np.ndarray
    momentum_distribution: np.ndarray  # FFT order, matches GridSpec.p
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    purity: float
    coherence_profile: np.ndarray  # index m <-> separation m dx

    @property
    def mean_p2(self) -> float:
        return self.var_p + self.mean_p**2


def coherence_profile(rho: DensityMatrix) -> np.ndarray:
    """C(m dx) = mean over i of |rho(x_{i+m} | x_i)|."""
    a = np.abs(rho.matrix)
    n = a.shape[0]
    return np.array([np.mean(np.diagonal(a, offset=-m)) for m in range(n)])


def observables(rho: DensityMatrix) -> Observables:
    grid = rho.grid
    px = rho.position_distribution()
    pp = rho.momentum_distribution()
    px_n = px / px.sum()
    pp_n = pp / pp.sum()
    x, p = grid.x, grid.p
    mean_x = float(np.dot(px_n, x))
    mean_p = float(np.dot(pp_n, p))
    return Observables(
        position_distribution=px_n,
        momentum_distribution=pp_n,
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=float(np.dot(px_n, (x - mean_x) ** 2)),
        var_p=float(np.dot(pp_n, (p - mean_p) ** 2)),
        purity=float(np.sum(np.abs(rho.matrix) ** 2)) * grid.dx**2,
        coherence_profile=coherence_profile(rho),
    )


@dataclass
class Trajectory:
    time: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    purity: np.ndarray
    final: DensityMatrix

    COLUMNS = ("t", "mean_x", "mean_p", "var_x", "var_p", "purity")

    def rows(self):
        return zip(self.time, self.mean_x, self.mean_p, self.var_x, self.var_p, self.purity)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for row in self.rows():
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def evolve(rho: DensityMatrix, kernel: KernelArg = None, potential: Optional[PotentialSpec] = None,
           total_time: float = 0.0, dt: Optional[float] = None, stride: int = 1,
           kinetic: bool = True, check_guard: bool = True) -> Trajectory:
    """Repeated split steps from ``rho.time`` for ``total_time``, sampling every ``stride`` steps."""
    dt = rho.grid.dt if dt is None else dt
    if not dt > 0:
        raise ValueError("time step must be positive")
    n_steps = round(total_time / dt)
    if total_time < 0 or not math.isclose(n_steps * dt, total_time, rel_tol=1e-9, abs_tol=1e-300):
        raise ValueError(f"total time {total_time!r} is not a whole number of steps of {dt!r}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    prop = SplitStepPropagator(rho.grid, rho.mass, kernel, potential, dt, kinetic, check_guard)
    samples = []

    def sample(state):
        o = observables(state)
        samples.append((state.time, o.mean_x, o.mean_p, o.var_x, o.var_p, o.purity))

    state = rho
    sample(state)
    for i in range(1, n_steps + 1):
        state = prop(state)
        if i % stride == 0 or i == n_steps:
            sample(state)
    cols = np.array(samples).T
    return Trajectory(*cols, final=state)


# -- snapshots: int64 N, float64 dx, then N*N complex128 row-major, all little-endian --

_HEADER = struct.Struct("<qd")


def write_snapshot(path, rho: DensityMatrix) -> None:
    n = rho.grid.points
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(n, rho.grid.dx))
        fh.write(np.ascontiguousarray(rho.matrix, dtype="<c16").tobytes())


def read_snapshot(path):
    """Return ``(matrix, dx)`` from a snapshot file."""
    with open(path, "rb") as fh:
        n, dx = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n * n:
        raise ValueError(f"snapshot holds {data.size} values, header says {n}x{n}")
    return data.reshape(n, n).astype(complex), dx
