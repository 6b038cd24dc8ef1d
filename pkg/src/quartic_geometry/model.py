"""Parameter point, potential and fixed points of the quartic oscillator.

The Hamiltonian is ``H = p**2/2 + k q**2/2 + lam q**4/24`` with unit mass.
For ``k < 0`` the potential is a symmetric double well.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class SystemParams:
    """Physical parameter point ``(k, lambda, hbar)``."""

    k: float
    lam: float
    hbar: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"quartic coupling must be positive, got {self.lam}")
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")

    @property
    def double_well(self) -> bool:
        return self.k < 0

    def with_(self, **changes) -> "SystemParams":
        data = {"k": self.k, "lam": self.lam, "hbar": self.hbar}
        data.update(changes)
        return SystemParams(**data)


class FixedPointKind(str, enum.Enum):
    CENTER = "center"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class FixedPoint:
    q: float
    p: float
    kind: FixedPointKind


def potential(q, params: SystemParams):
    """``k q^2/2 + lam q^4/24``; works elementwise on arrays."""
    q2 = q * q
    return 0.5 * params.k * q2 + params.lam * q2 * q2 / 24.0


def force(q, params: SystemParams):
    """``-dV/dq``."""
    return -(params.k * q + params.lam * q * q * q / 6.0)


def well_position(params: SystemParams) -> float:
    """Distance of the double-well minima from the origin, ``sqrt(-6k/lam)``."""
    if params.k >= 0:
        raise DomainError("well_position requires k < 0")
    return math.sqrt(-6.0 * params.k / params.lam)


def _classify(q: float, params: SystemParams) -> FixedPointKind:
    # Hamilton's equations linearised at (q, 0): eigenvalues are +-sqrt(-V''(q)).
    curvature = params.k + 0.5 * params.lam * q * q
    return FixedPointKind.CENTER if curvature > 0 else FixedPointKind.HYPERBOLIC


def fixed_points(params: SystemParams) -> list[FixedPoint]:
    """Phase-space fixed points, ordered by position.

    For ``k >= 0`` only the origin; for ``k < 0`` the two well bottoms
    (centres) and the hyperbolic point at the origin.
    """
    if params.k >= 0:
        return [FixedPoint(0.0, 0.0, FixedPointKind.CENTER)]
    a = well_position(params)
    return [FixedPoint(q, 0.0, _classify(q, params)) for q in (-a, 0.0, a)]


def linearization_eigenvalues(point: FixedPoint, params: SystemParams) -> tuple[complex, complex]:
    """Eigenvalues of the Jacobian of Hamilton's equations at a fixed point."""
    curvature = params.k + 0.5 * params.lam * point.q**2
    root = complex(-curvature) ** 0.5
    return root, -root


def barrier_height(params: SystemParams) -> float:
    """Energy of the barrier top above the well bottoms, ``3 k^2 / (2 lam)``."""
    if params.k >= 0:
        raise DomainError("barrier height is defined only for k < 0")
    return 1.5 * params.k**2 / params.lam
