"""Optical-cavity emulation of a PT-symmetric quantum harmonic oscillator.

Submodules
----------
oscillator
    Closed-form packet dynamics and the displaced Mehler propagator.
canonical
    RK4 integration of the mean/covariance (canonical) equations.
cavity
    ABCD round-trip matrices, Collins propagation and the round-trip map.
diagnostics
    Centroid observables, harmonic fits, eigenmodes, tilt and Petermann factor.
config, runner, cli
    JSON configuration, named scenarios and the command-line front end.
quadrature
    Brute-force kernel sums used as independent references.
"""
from .canonical import CovarianceState, Trajectory, init_from_packet, integrate
from .cavity import (
    ABCDMatrix,
    CavityConfig,
    Excitation,
    GainProfile,
    Grid,
    TransverseField,
    collins_propagate,
    derive_oscillator_params,
    evolve,
    round_trip,
)
from .config import ExperimentSpec, load_config
from .errors import (
    AliasingWarning,
    ConfigError,
    ConvergenceError,
    NumericalError,
    PTCavityError,
    SingularTimeError,
    UnstableCavityError,
)
from .oscillator import (
    HBAR,
    GaussianPacket,
    OscillatorParams,
    center_of_mass_closed_form,
    fundamental_mode,
    mehler_kernel,
    propagate_packet,
)
from .runner import run_experiment

__version__ = "0.1.0"
