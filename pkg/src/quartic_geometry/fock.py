"""Truncated Fock-basis Hamiltonian, parity-split eigensolver and density.

Operators are represented on the harmonic-oscillator basis of frequency
``omega_b``. Products such as ``q^4`` are formed in a basis padded by
``PAD`` levels and truncated afterwards, so every retained element is the
exact matrix element rather than a product of truncated matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from .errors import ConvergenceError, DomainError
from .model import SystemParams, well_position

PAD = 8
CONVERGENCE_STEP = 50
MAX_BASIS = 1000


def variational_frequency(params: SystemParams) -> float:
    """Positive root of ``w^3 - k w - lam hbar / 4``.

    This is the width-optimal Gaussian for the quartic oscillator; the cubic
    always has exactly one positive root for ``lam > 0``.
    """
    roots = np.roots([1.0, 0.0, -params.k, -params.lam * params.hbar / 4.0])
    real = roots[np.abs(roots.imag) < 1e-9 * np.abs(roots).max()].real
    return float(real[real > 0].max())


def default_basis_frequency(params: SystemParams) -> float:
    """Basis frequency used when none is given.

    The variational root for ``k >= 0``. For ``k < 0`` the well frequency
    ``sqrt(-2k)``, unless the variational root is larger; near ``k = 0`` the
    well frequency vanishes and a basis built on it converges very slowly.
    """
    if params.k >= 0:
        return variational_frequency(params)
    return max(math.sqrt(-2.0 * params.k), variational_frequency(params))


@dataclass(frozen=True)
class BasisSpec:
    """Truncation size ``N`` and oscillator frequency of the Fock basis."""

    size: int
    omega_b: float

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 8:
            raise DomainError(f"basis size must be an integer >= 8, got {self.size}")
        if not self.omega_b > 0:
            raise DomainError(f"basis frequency must be positive, got {self.omega_b}")

    @classmethod
    def default(cls, params: SystemParams, size: int = 250) -> "BasisSpec":
        return cls(size, default_basis_frequency(params))

    def resized(self, size: int) -> "BasisSpec":
        return BasisSpec(size, self.omega_b)


@dataclass(frozen=True)
class Operators:
    q: np.ndarray
    q2: np.ndarray
    q4: np.ndarray
    p2: np.ndarray


def build_operators(basis: BasisSpec, params: SystemParams) -> Operators:
    """Matrices of ``q``, ``q^2``, ``q^4`` and ``p^2`` in the truncated basis."""
    n_pad = basis.size + PAD
    a = np.diag(np.sqrt(np.arange(1, n_pad, dtype=float)), 1)
    q = math.sqrt(params.hbar / (2.0 * basis.omega_b)) * (a + a.T)
    d = a - a.T
    q2 = q @ q
    q4 = q2 @ q2
    p2 = -(params.hbar * basis.omega_b / 2.0) * (d @ d)
    n = basis.size
    # The products are banded; zero the roundoff outside the band explicitly.
    q2 = np.triu(np.tril(q2, 2), -2)
    q4 = np.triu(np.tril(q4, 4), -4)
    p2 = np.triu(np.tril(p2, 2), -2)
    return Operators(q[:n, :n], q2[:n, :n], q4[:n, :n], p2[:n, :n])


def hamiltonian_from_operators(ops: Operators, params: SystemParams) -> np.ndarray:
    h = 0.5 * ops.p2 + 0.5 * params.k * ops.q2 + (params.lam / 24.0) * ops.q4
    return 0.5 * (h + h.T)


def build_hamiltonian(basis: BasisSpec, params: SystemParams) -> np.ndarray:
    """``p^2/2 + k q^2/2 + lam q^4/24`` as a dense symmetric matrix."""
    return hamiltonian_from_operators(build_operators(basis, params), params)


@dataclass(frozen=True)
class SpectralResult:
    """Eigenpairs of the truncated Hamiltonian.

    Attributes
    ----------
    energies : ndarray
        Ascending eigenvalues.
    vectors : ndarray
        Orthonormal eigenvectors as columns, each with its largest-magnitude
        component positive.
    parity : ndarray
        0 for even, 1 for odd states.
    n_converged : int
        Number of leading eigenvalues that are stable under basis growth.
    basis : BasisSpec
        Basis actually used (may be larger than the one requested).
    """

    energies: np.ndarray
    vectors: np.ndarray
    parity: np.ndarray
    n_converged: int
    basis: BasisSpec
    operators: Operators = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.energies)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that the largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def diagonalize(h: np.ndarray, split_parity: bool = True):
    """Full symmetric eigendecomposition, optionally block-wise by parity.

    Splitting is not only cheaper: for a deep double well the even and odd
    ground states are degenerate to ~1e-11 and a joint solve mixes them.
    """
    n = h.shape[0]
    if not split_parity:
        e, v = scipy.linalg.eigh(h)
        parity = np.array([int(np.argmax(np.abs(col))) % 2 for col in v.T])
        return e, fix_signs(v), parity
    energies, vectors, parity = [], [], []
    for par in (0, 1):
        idx = np.arange(par, n, 2)
        e, v = scipy.linalg.eigh(h[np.ix_(idx, idx)])
        full = np.zeros((n, len(e)))
        full[idx] = v
        energies.append(e)
        vectors.append(full)
        parity.append(np.full(len(e), par))
    e = np.concatenate(energies)
    order = np.argsort(e, kind="stable")
    v = np.hstack(vectors)[:, order]
    return e[order], fix_signs(v), np.concatenate(parity)[order]


def count_converged(e_small: np.ndarray, e_large: np.ndarray, tolerance: float) -> int:
    """Leading eigenvalues that moved by less than ``tolerance`` (relative)."""
    m = min(len(e_small), len(e_large))
    diff = np.abs(e_small[:m] - e_large[:m])
    ok = diff < tolerance * np.maximum(1.0, np.abs(e_large[:m]))
    bad = np.flatnonzero(~ok)
    return int(bad[0]) if bad.size else m


def eigensolve(
    h: np.ndarray | None,
    basis: BasisSpec,
    params: SystemParams,
    tolerance: float = 1e-9,
    n_required: int = 1,
    max_size: int = MAX_BASIS,
    split_parity: bool = True,
) -> SpectralResult:
    """Diagonalize and count converged states.

    The reference solve uses ``N + 50`` basis states. If fewer than
    ``n_required`` states converge, the basis grows in steps of 50 up to
    ``max_size``.

    Parameters
    ----------
    h : ndarray or None
        Hamiltonian for ``basis``; built here when None.
    """
    size = basis.size
    while True:
        cur = basis.resized(size)
        ops = build_operators(cur, params)
        if h is None or h.shape[0] != size:
            h = hamiltonian_from_operators(ops, params)
        e, v, parity = diagonalize(h, split_parity)
        e_ref, _, _ = diagonalize(build_hamiltonian(cur.resized(size + CONVERGENCE_STEP), params), split_parity)
        n_conv = count_converged(e, e_ref, tolerance)
        if n_conv >= n_required:
            return SpectralResult(e, v, parity, n_conv, cur, ops)
        if size + CONVERGENCE_STEP > max_size:
            raise ConvergenceError(
                f"only {n_conv} of {n_required} states converged at N={size} "
                f"(k={params.k}, lambda={params.lam})"
            )
        size += CONVERGENCE_STEP
        h = None


def solve(params: SystemParams, size: int = 250, n_required: int = 1, omega_b: float | None = None,
          tolerance: float = 1e-9) -> SpectralResult:
    """Build and diagonalize with default basis choices."""
    basis = BasisSpec(size, omega_b if omega_b is not None else default_basis_frequency(params))
    return eigensolve(None, basis, params, tolerance=tolerance, n_required=n_required)


def hermite_functions(n_max: int, xi: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions ``phi_0..phi_{n_max-1}`` at ``xi``.

    Uses the three-term recurrence, which is stable for large ``n``.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((n_max,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n_max > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for l in range(1, n_max - 1):
        out[l + 1] = math.sqrt(2.0 / (l + 1)) * xi * out[l] - math.sqrt(l / (l + 1)) * out[l - 1]
    return out


def wavefunction(result: SpectralResult, q_grid, state: int = 0, hbar: float = 1.0) -> np.ndarray:
    """Position-space amplitude of eigenstate ``state``."""
    scale = result.basis.omega_b / hbar
    xi = math.sqrt(scale) * np.asarray(q_grid, dtype=float)
    phis = hermite_functions(result.size, xi)
    return scale**0.25 * np.tensordot(result.vectors[:, state], phis, axes=1)


def ground_density(result: SpectralResult, q_grid, hbar: float = 1.0, mass_tol: float = 1e-6) -> np.ndarray:
    """``|Psi_0(q)|^2`` on ``q_grid``.

    Raises
    ------
    DomainError
        If the trapezoid mass on the grid misses unity by more than
        ``mass_tol``, i.e. the grid is too narrow or too coarse.
    """
    if result.n_converged < 1:
        raise ConvergenceError("ground state not converged")
    q_grid = np.asarray(q_grid, dtype=float)
    if not np.all(np.isfinite(q_grid)):
        raise DomainError("q grid must be finite")
    rho = wavefunction(result, q_grid, 0, hbar) ** 2
    mass = trapezoid(rho, q_grid)
    if abs(mass - 1.0) > mass_tol:
        raise DomainError(f"density mass on grid is {mass:.9f}; widen or refine the grid")
    return rho


def density_grid(params: SystemParams, n_points: int = 4001) -> np.ndarray:
    """A symmetric position grid wide enough for the ground-state density."""
    # harmonic width of the variational Gaussian plus the well offset
    width = 12.0 * math.sqrt(params.hbar / (2.0 * variational_frequency(params)))
    if params.k < 0:
        width += well_position(params)
    return np.linspace(-width, width, n_points)


def local_maxima(values: np.ndarray, x: np.ndarray, rel_floor: float = 1e-6) -> np.ndarray:
    """Positions of interior local maxima above ``rel_floor`` times the peak.

    The floor suppresses spurious bumps in the roundoff-dominated tails.
    """
    floor = rel_floor * values.max()
    inner = (values[1:-1] > values[:-2]) & (values[1:-1] >= values[2:]) & (values[1:-1] > floor)
    return x[1:-1][inner]


@dataclass(frozen=True)
class BimodalityReport:
    two_maxima_onset: float | None
    separation_onset: float | None
    separation_ratio: float


def bimodality_scan(lam: float, k_values, hbar: float = 1.0, size: int = 250,
                    separation_ratio: float = 1e-3) -> BimodalityReport:
    """Scan ``k`` downward and report where the ground density splits.

    Reports the first ``k`` with two local maxima, and the first ``k`` where
    the density at ``q = 0`` falls below ``separation_ratio`` times its peak.
    """
    k_values = np.sort(np.asarray(k_values, dtype=float))[::-1]
    two_max = sep = None
    for k in k_values:
        params = SystemParams(float(k), lam, hbar)
        res = solve(params, size)
        q = density_grid(params)
        rho = ground_density(res, q, hbar)
        if two_max is None and len(local_maxima(rho, q)) >= 2:
            two_max = float(k)
        centre = rho[len(q) // 2]
        if sep is None and centre < separation_ratio * rho.max():
            sep = float(k)
        if two_max is not None and sep is not None:
            break
    return BimodalityReport(two_max, sep, separation_ratio)
