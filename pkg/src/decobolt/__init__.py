"""Collisional decoherence of a massive body's centre of mass.

The environment is described by one or more scattering channels, each
contributing a total collision rate and a normalized wavevector spectrum.
From the composed spectrum the package builds the position-space kernel
``gamma(r)``, propagates density matrices under the resulting master
equation, and evaluates interference feasibility bounds.
"""

from .channels import (
    ChannelSpec,
    Environment,
    blackbody_rate,
    channel_rate,
    channel_spectrum,
    compose,
    decoherence_time,
    gas_rate,
    mix,
    rayleigh_rate,
)
from .evolution import (
    DensityMatrix,
    EvolutionError,
    GridSpec,
    GuardBandError,
    PotentialSpec,
    SplitStepPropagator,
    evolve,
    init_gaussian,
    momentum_shift,
    observables,
    step,
)
from .experiments import (
    ConfigurationError,
    GratingSpec,
    feasibility,
    grating_pattern,
    max_de_broglie,
    max_radius,
    run_dust_scenario,
    run_fullerene_scenario,
)
from .kernel import (
    DecoherenceKernel,
    build_kernel,
    coherence_factor,
    coherence_length,
    coherence_report,
)
from .quantities import AMU, C, HBAR, K_B, BodySpec
from .spectra import QuadratureConfig, QuadratureError, SpectralDensity, SpectrumError

__version__ = "0.1.0"
