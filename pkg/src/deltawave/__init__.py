"""Jump-corrected spectral collocation and time-symmetric integrators for
1+1 wave equations with moving delta-function sources."""

__version__ = "0.1.0"

from .spectral_grid import SpectralGrid, chebyshev_nodes
from .collocation import SpatialJumps, disc_derivative, interpolate
from .quadrature import quadrature_experiment
from .chart import ParticleMotion, coefficient_set, worldline
from .jumps import jump_state, time_jumps
from .exact import ExactSolution
from .solver import WaveConfig, WaveSolver, convergence_study

__all__ = [
    "SpectralGrid",
    "chebyshev_nodes",
    "SpatialJumps",
    "disc_derivative",
    "interpolate",
    "quadrature_experiment",
    "ParticleMotion",
    "coefficient_set",
    "worldline",
    "jump_state",
    "time_jumps",
    "ExactSolution",
    "WaveConfig",
    "WaveSolver",
    "convergence_study",
]
