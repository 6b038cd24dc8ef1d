"""Classical action-angle data of bound orbits and the numeric classical metric.

All quadratures use the substitution ``q = c + h sin(theta)`` between the
turning points. Writing ``E - V(q) = h^2 cos^2(theta) r(q)`` with ``r``
known in closed form removes both endpoint square-root singularities, so
Gauss-Legendre quadrature in ``theta`` converges spectrally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .model import SystemParams, barrier_height, force, potential
from .qmt import MetricValue

M_CL = 32
SAMPLES_LOG2 = 12


def _check_well(params: SystemParams, well: str | None) -> str | None:
    if params.k >= 0:
        return None
    if well not in ("left", "right"):
        raise DomainError(f"well must be 'left' or 'right' for k < 0, got {well!r}")
    return well


def _roots_in_q2(E: float, params: SystemParams) -> tuple[float, float, float]:
    """Roots ``u_plus > u_minus`` of ``a u^2 + b u - E`` and ``s = sqrt(b^2 + 4aE)``."""
    a, b = params.lam / 24.0, params.k / 2.0
    s = math.sqrt(b * b + 4.0 * a * E)
    # avoid cancellation in whichever root would suffer from it
    if b >= 0:
        u_plus = 2.0 * E / (b + s) if E != 0 else 0.0
        u_minus = -(b + s) / (2.0 * a)
    else:
        u_plus = (s - b) / (2.0 * a)
        u_minus = (-E / a) / u_plus
    return u_plus, u_minus, s


def _check_energy(E: float, params: SystemParams) -> None:
    if params.k >= 0:
        if not E > 0:
            raise DomainError(f"bound orbit needs E > 0 for k >= 0, got {E}")
        return
    bottom = -barrier_height(params)
    if not bottom < E < 0.0:
        raise DomainError(f"energy {E} outside the single-well window ({bottom}, 0)")


def turning_points(E: float, params: SystemParams, well: str | None = None) -> tuple[float, float]:
    """Turning points ``q_minus < q_plus`` of the orbit of energy ``E``.

    Energies are measured in the original frame, where the double-well
    bottoms sit at ``-3k^2/(2 lam)`` and the barrier top at 0.
    """
    well = _check_well(params, well)
    _check_energy(E, params)
    u_plus, u_minus, _ = _roots_in_q2(E, params)
    if params.k >= 0:
        q = math.sqrt(u_plus)
        return -q, q
    inner, outer = math.sqrt(u_minus), math.sqrt(u_plus)
    return (inner, outer) if well == "right" else (-outer, -inner)


@lru_cache(maxsize=16)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * math.pi * x, 0.5 * math.pi * w


def _r_factor(q: np.ndarray, E: float, params: SystemParams) -> np.ndarray:
    """``(E - V)/((q - q_minus)(q_plus - q))`` for the right well or ``k >= 0``."""
    a = params.lam / 24.0
    u_plus, u_minus, s = _roots_in_q2(E, params)
    if params.k >= 0:
        return a * q * q + 0.5 * (params.k / 2.0 + s)
    return a * (math.sqrt(u_plus) + q) * (q + math.sqrt(u_minus))


def _quadrature(E: float, params: SystemParams, integrand, rtol: float = 1e-14,
                n0: int = 32, n_max: int = 1 << 14) -> float:
    u_plus, u_minus, _ = _roots_in_q2(E, params)
    if params.k >= 0:
        lo, hi = -math.sqrt(u_plus), math.sqrt(u_plus)
    else:
        lo, hi = math.sqrt(u_minus), math.sqrt(u_plus)
    c, h = 0.5 * (hi + lo), 0.5 * (hi - lo)
    prev = None
    n = n0
    while n <= n_max:
        th, w = _legendre(n)
        q = c + h * np.sin(th)
        val = float(np.dot(w, integrand(th, q, h, _r_factor(q, E, params))))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
        n *= 2
    raise ConvergenceError(f"action/period quadrature did not converge at E={E}")


def action_of_energy(E: float, params: SystemParams, well: str | None = None) -> float:
    """``I = (1/pi) * integral of p dq`` between the turning points."""
    _check_well(params, well)
    _check_energy(E, params)
    val = _quadrature(E, params, lambda th, q, h, r: np.sqrt(2.0 * r) * (h * np.cos(th)) ** 2)
    return val / math.pi


def period_of_energy(E: float, params: SystemParams, well: str | None = None) -> float:
    """``T = 2 * integral of dq / p`` between the turning points."""
    _check_well(params, well)
    _check_energy(E, params)
    return 2.0 * _quadrature(E, params, lambda th, q, h, r: 1.0 / np.sqrt(2.0 * r))


def separatrix_action(params: SystemParams) -> float:
    """Action of one well at the barrier energy, ``4 (-k)^{3/2} / (pi lam)``."""
    if params.k >= 0:
        raise DomainError("separatrix exists only for k < 0")
    return 4.0 * (-params.k) ** 1.5 / (math.pi * params.lam)


def energy_of_action(I: float, params: SystemParams, well: str | None = None) -> float:
    """Invert ``action_of_energy`` by bracketed root finding."""
    _check_well(params, well)
    if not I > 0:
        raise DomainError(f"action must be positive, got {I}")
    if params.k >= 0:
        lo = 0.0
        hi = max(1.0, math.sqrt(params.k) * I) if params.k > 0 else 1.0
        while action_of_energy(hi, params) < I:
            lo, hi = hi, 2.0 * hi
        f = lambda E: action_of_energy(E, params) - I if E > 0 else -I  # noqa: E731
    else:
        if I >= separatrix_action(params):
            raise DomainError(f"action {I} is at or above the separatrix")
        v0 = barrier_height(params)
        lo, hi = -v0, -1e-9 * v0
        if action_of_energy(hi, params, "right") < I:
            raise DomainError(f"action {I} too close to the separatrix")
        f = lambda E: action_of_energy(E, params, "right") - I if E > lo else -I  # noqa: E731
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def omega_of_action(I: float, params: SystemParams, well: str | None = None) -> float:
    E = energy_of_action(I, params, well)
    return 2.0 * math.pi / period_of_energy(E, params, well)


@dataclass(frozen=True)
class Orbit:
    """One period of a bound orbit sampled uniformly in the angle.

    ``samples[j]`` is ``q`` at angle ``phi_j = 2 pi j / n - pi/2``, i.e. the
    sampling starts at the lower turning point.
    """

    E: float
    I: float
    T: float
    omega: float
    q_minus: float
    q_plus: float
    samples: np.ndarray
    momenta: np.ndarray
    energy_drift: float

    @property
    def angles(self) -> np.ndarray:
        n = len(self.samples)
        return 2.0 * math.pi * np.arange(n) / n - 0.5 * math.pi


def integrate_orbit(I: float, params: SystemParams, well: str | None = None,
                    s: int = SAMPLES_LOG2, drift_tol: float = 1e-10) -> Orbit:
    """Integrate Hamilton's equations for one period from the lower turning point."""
    well = _check_well(params, well)
    E = energy_of_action(I, params, well)
    T = period_of_energy(E, params, well)
    q_minus, q_plus = turning_points(E, params, well)
    n = 1 << s
    t = T * np.arange(n) / n

    def rhs(_, y):
        return [y[1], force(y[0], params)]

    sol = solve_ivp(rhs, (0.0, T), [q_minus, 0.0], method="DOP853", t_eval=t,
                    rtol=1e-13, atol=1e-14 * max(1.0, abs(q_plus), abs(q_minus)))
    if not sol.success:
        raise ConvergenceError(f"orbit integration failed: {sol.message}")
    q, p = sol.y
    h_vals = 0.5 * p * p + potential(q, params)
    drift = float(np.max(np.abs(h_vals - E)))
    if drift > drift_tol * max(1.0, abs(E)):
        raise ConvergenceError(f"energy drift {drift:.2e} over one period")
    return Orbit(E, I, T, 2.0 * math.pi / T, q_minus, q_plus, q, p, drift)


@dataclass(frozen=True)
class FourierData:
    """Fourier coefficients ``beta_i^(m)`` for ``m = 0..M_cl``.

    Negative harmonics follow from ``beta^(-m) = conj(beta^(m))``.
    """

    beta1: np.ndarray
    beta2: np.ndarray
    omega: float
    I: float

    @property
    def M(self) -> int:
        return len(self.beta1) - 1

    def shift_origin(self, delta: float) -> "FourierData":
        """Coefficients after moving the angle origin by ``delta``."""
        ph = np.exp(-1j * np.arange(self.M + 1) * delta)
        return FourierData(self.beta1 * ph, self.beta2 * ph, self.omega, self.I)


def fourier_from_orbit(orbit: Orbit, M_cl: int = M_CL) -> FourierData:
    n = len(orbit.samples)
    if n < 8 * M_cl:
        raise DomainError(f"{n} samples are too few for {M_cl} harmonics")
    q = orbit.samples
    o1 = 0.5 * q * q
    o2 = q**4 / 24.0
    # samples start at phi = -pi/2, hence the phase factor
    phase = np.exp(0.5j * math.pi * np.arange(M_cl + 1))
    b1 = np.fft.fft(o1)[: M_cl + 1] / n * phase
    b2 = np.fft.fft(o2)[: M_cl + 1] / n * phase
    return FourierData(b1, b2, orbit.omega, orbit.I)


def orbit_fourier(I: float, params: SystemParams, well: str | None = None, M_cl: int = M_CL,
                  s: int = SAMPLES_LOG2, tail_tol: float = 1e-10) -> FourierData:
    """Fourier coefficients of ``q^2/2`` and ``q^4/24`` along the orbit of action ``I``.

    The angle origin makes ``q`` proportional to ``sin(phi)`` at leading order.

    Raises
    ------
    ConvergenceError
        If the last two harmonics are not below ``tail_tol`` times the
        ``m = 2`` harmonic (aliasing), or the energy drifts.
    """
    fd = fourier_from_orbit(integrate_orbit(I, params, well, s), M_cl)
    for b in (fd.beta1, fd.beta2):
        ref = abs(b[2])
        if max(abs(b[-1]), abs(b[-2])) > tail_tol * ref:
            raise ConvergenceError("Fourier tail not decayed; increase M_cl")
    return fd


def cmt_numeric(fd: FourierData, omega: float | None = None) -> MetricValue:
    """``g_ij = 2 sum_{m>=1} Re(beta_i^(m) conj(beta_j^(m))) / (m omega)^2``."""
    w = fd.omega if omega is None else omega
    m = np.arange(1, fd.M + 1)
    wt = 2.0 / (m * w) ** 2
    b1, b2 = fd.beta1[1:], fd.beta2[1:]
    g11 = float(np.sum(wt * (b1 * b1.conj()).real))
    g12 = float(np.sum(wt * (b1 * b2.conj()).real))
    g22 = float(np.sum(wt * (b2 * b2.conj()).real))
    return MetricValue(g11, g12, g22)


def classical_metric(I: float, params: SystemParams, well: str | None = "left", M_cl: int = M_CL) -> MetricValue:
    """Numeric classical metric at action ``I``; the well is ignored for ``k >= 0``."""
    return cmt_numeric(orbit_fourier(I, params, well if params.k < 0 else None, M_cl))
