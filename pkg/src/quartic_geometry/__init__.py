"""Quantum and classical parameter-space geometry of the quartic oscillator.

The Hamiltonian is ``H = p^2/2 + k q^2/2 + lam q^4/24`` with unit mass.
"""
from .errors import (
    ConvergenceError,
    DomainError,
    GridError,
    PairingError,
    QuarticGeometryError,
    SeriesOrderError,
    SignAlignmentError,
)
from .fock import BasisSpec, SpectralResult, bimodality_scan, build_hamiltonian, eigensolve, ground_density, solve
from .geometry import MetricField, ParamGrid, find_extrema, scalar_curvature
from .model import FixedPoint, FixedPointKind, SystemParams, barrier_height, fixed_points, potential
from .orbit import (
    action_of_energy,
    classical_metric,
    cmt_numeric,
    energy_of_action,
    omega_of_action,
    orbit_fourier,
    turning_points,
)
from .qmt import MetricValue, qmt_provost_fd, qmt_sum, quantum_metric, transition_elements
from .tables import eval_cmt_series, eval_curvature_series, eval_qmt_series, fit_f_alpha, perturbative_groundstate

__version__ = "0.1.0"
