"""Quantum metric tensor of the ground state in ``(k, lambda)`` coordinates.

The deformation operators are ``O1 = dH/dk = q^2/2`` and
``O2 = dH/dlam = q^4/24``. The metric follows from the sum over states

    g_ij = sum_m <0|O_i|m><m|O_j|0> / (E_m - E_0)^2

or, independently, from finite differences of the ground state itself.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, SignAlignmentError
from .fock import BasisSpec, SpectralResult, build_hamiltonian, default_basis_frequency, diagonalize, \
    eigensolve
from .model import SystemParams

DEFAULT_M = 60


@dataclass(frozen=True)
class MetricValue:
    """Symmetric 2x2 metric stored by its three independent components."""

    g11: float
    g12: float
    g22: float

    @property
    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g12

    def as_array(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.g11, self.g12, self.g22)

    def is_psd(self, tol: float = 1e-12) -> bool:
        return self.g11 >= -tol and self.g22 >= -tol and self.det >= -tol

    def scaled(self, factor: float) -> "MetricValue":
        return MetricValue(self.g11 * factor, self.g12 * factor, self.g22 * factor)


@dataclass(frozen=True)
class TransitionData:
    """Matrix elements ``B_i[m] = <0|O_i|m>`` and gaps for ``m = 1..M``.

    Index 0 of every array corresponds to ``m = 1``.
    """

    B1: np.ndarray
    B2: np.ndarray
    gaps: np.ndarray
    parity: np.ndarray

    def __post_init__(self):
        if np.any(self.gaps <= 0):
            raise DomainError("transition gaps must be strictly positive")

    @property
    def M(self) -> int:
        return len(self.gaps)


def transition_elements(spectral: SpectralResult, M: int = DEFAULT_M) -> TransitionData:
    """Ground-to-excited matrix elements of ``q^2/2`` and ``q^4/24``."""
    if spectral.n_converged <= M:
        raise ConvergenceError(f"need more than {M} converged states, have {spectral.n_converged}")
    ops = spectral.operators
    v0 = spectral.vectors[:, 0]
    vm = spectral.vectors[:, 1:M + 1]
    b1 = (v0 @ ops.q2 @ vm) / 2.0
    b2 = (v0 @ ops.q4 @ vm) / 24.0
    gaps = spectral.energies[1:M + 1] - spectral.energies[0]
    return TransitionData(b1, b2, gaps, spectral.parity[1:M + 1].copy())


@dataclass(frozen=True)
class QMTResult:
    metric: MetricValue
    terms: np.ndarray
    tail: float

    @property
    def g(self) -> MetricValue:
        return self.metric


def qmt_sum(td: TransitionData) -> QMTResult:
    """Sum over states.

    Returns
    -------
    QMTResult
        ``terms`` has shape ``(M, 3)`` with the per-state contributions
        ``G^(m)`` to ``(g11, g12, g22)``; ``tail`` is the largest ratio of the
        last nonzero term to the running total over the three components.
    """
    inv = 1.0 / td.gaps**2
    terms = np.column_stack([td.B1 * td.B1 * inv, td.B1 * td.B2 * inv, td.B2 * td.B2 * inv])
    total = terms.sum(axis=0)
    tail = 0.0
    for c in range(3):
        nz = np.flatnonzero(np.abs(terms[:, c]) > 0)
        if nz.size and total[c] != 0:
            tail = max(tail, abs(terms[nz[-1], c] / total[c]))
    return QMTResult(MetricValue(*map(float, total)), terms, float(tail))


def quantum_metric(params: SystemParams, size: int = 250, M: int = DEFAULT_M,
                   omega_b: float | None = None, tolerance: float = 1e-9) -> QMTResult:
    """Solve the spectrum and return the sum-over-states metric."""
    basis = BasisSpec(size, omega_b if omega_b is not None else default_basis_frequency(params))
    spec = eigensolve(None, basis, params, tolerance=tolerance, n_required=M + 1)
    return qmt_sum(transition_elements(spec, M))


def _ground_state(params: SystemParams, basis: BasisSpec) -> np.ndarray:
    e, v, _ = diagonalize(build_hamiltonian(basis, params))
    return v[:, 0]


def qmt_provost_fd(params: SystemParams, basis: BasisSpec | None = None, delta: float = 1e-4,
                   min_overlap: float = 0.9) -> MetricValue:
    """Metric from central differences of the ground state.

    ``g_ij = Re<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>`` with the
    stencil states aligned in sign to the central one. The basis is held
    fixed across the stencil so that all vectors live in the same space.
    The step in ``lambda`` is capped at half of ``lambda``.
    """
    if basis is None:
        basis = BasisSpec.default(params)
    psi = _ground_state(params, basis)
    dl = min(delta, 0.5 * params.lam)

    def aligned(p: SystemParams) -> np.ndarray:
        v = _ground_state(p, basis)
        ov = float(v @ psi)
        if abs(ov) < min_overlap:
            raise SignAlignmentError(f"ground-state overlap {ov:.3f} across the stencil")
        return v if ov > 0 else -v

    d_k = (aligned(params.with_(k=params.k + delta)) - aligned(params.with_(k=params.k - delta))) / (2 * delta)
    d_l = (aligned(params.with_(lam=params.lam + dl)) - aligned(params.with_(lam=params.lam - dl))) / (2 * dl)

    def g(a, b):
        return float(a @ b - (a @ psi) * (psi @ b))

    return MetricValue(g(d_k, d_k), g(d_k, d_l), g(d_l, d_l))
