"""Determinant, scalar curvature and extrema of 2D metric fields.

Coordinates are ``x1 = k`` (grid axis 0) and ``x2 = lambda`` (grid axis 1).
For a 2D metric the scalar curvature is ``R = (A + B)/sqrt(g)`` with

    A = d1[ g12/(g11 sqrt g) d2 g11 - d1 g22/sqrt g ]
    B = d2[ 2/sqrt g d1 g12 - d2 g11/sqrt g - g12/(g11 sqrt g) d1 g11 ]

and ``g = det g_ij``. With this sign convention the unit sphere has
``R = +2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridError
from .qmt import MetricValue

DET_FLOOR = 1e-18
# Nodes this close to the grid boundary are affected by the low-order edge
# stencils of the nested derivatives.
EDGE_PAD = 4


def metric_determinant(m: MetricValue) -> float:
    return m.g11 * m.g22 - m.g12 * m.g12


def _check_uniform(values: np.ndarray, name: str) -> float:
    if values.ndim != 1 or values.size < 2:
        raise GridError(f"{name} axis needs at least two points")
    steps = np.diff(values)
    h = float(steps.mean())
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-12 * max(1.0, np.abs(values).max()):
        raise GridError(f"{name} axis must be ascending with uniform spacing")
    return h


@dataclass(frozen=True)
class ParamGrid:
    """Uniform tensor-product grid in ``(k, lambda)``."""

    k_values: np.ndarray
    lambda_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k_values", np.asarray(self.k_values, dtype=float))
        object.__setattr__(self, "lambda_values", np.asarray(self.lambda_values, dtype=float))
        _check_uniform(self.k_values, "k")
        _check_uniform(self.lambda_values, "lambda")

    @property
    def hk(self) -> float:
        return float(np.diff(self.k_values).mean())

    @property
    def hl(self) -> float:
        return float(np.diff(self.lambda_values).mean())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.k_values.size, self.lambda_values.size)

    @classmethod
    def from_ranges(cls, k0: float, nk: int, hk: float, l0: float, nl: int, hl: float) -> "ParamGrid":
        return cls(k0 + hk * np.arange(nk), l0 + hl * np.arange(nl))

    def straddles_k0(self) -> bool:
        return bool(self.k_values.min() < 0.0 < self.k_values.max() or np.any(self.k_values == 0.0))


@dataclass(frozen=True)
class MetricField:
    """Metric components on every grid node, arrays of shape ``grid.shape``."""

    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    mask: np.ndarray | None = None

    @classmethod
    def from_values(cls, values: Sequence[Sequence[MetricValue]]) -> "MetricField":
        arr = np.array([[m.as_tuple() for m in row] for row in values], dtype=float)
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "MetricField":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    @property
    def det(self) -> np.ndarray:
        return self.g11 * self.g22 - self.g12 * self.g12

    def at(self, i: int, j: int) -> MetricValue:
        return MetricValue(float(self.g11[i, j]), float(self.g12[i, j]), float(self.g22[i, j]))


@dataclass(frozen=True)
class CurvatureField:
    """Scalar curvature per node; ``mask`` is True where ``R`` is invalid."""

    R: np.ndarray
    mask: np.ndarray


def fd_derivative(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """First derivative along ``axis``.

    Fourth-order central differences in the interior, second-order central
    on the nodes next to the boundary and second-order one-sided on the
    boundary itself.
    """
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 5:
        raise GridError("finite differences need at least 5 nodes per axis")
    out = np.empty_like(f)
    out[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
    out[1] = (f[2] - f[0]) / (2 * h)
    out[-2] = (f[-1] - f[-3]) / (2 * h)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return np.moveaxis(out, 0, axis)


def scalar_curvature(field: MetricField, grid: ParamGrid, det_floor: float = DET_FLOOR,
                     check_k0: bool = True) -> CurvatureField:
    """Scalar curvature of a metric field on a uniform grid.

    Nodes within ``EDGE_PAD`` points of the grid boundary inherit the error
    of the low-order edge stencils; callers needing full accuracy should
    pad the grid by that many nodes and discard them.

    Raises
    ------
    GridError
        If the grid has fewer than five nodes along an axis, the field shape
        does not match, or (with ``check_k0``) the grid contains or spans
        ``k = 0``.
    """
    if field.g11.shape != grid.shape:
        raise GridError(f"field shape {field.g11.shape} does not match grid {grid.shape}")
    if check_k0 and grid.straddles_k0():
        raise GridError("curvature stencil may not touch or span k = 0")
    hk, hl = grid.hk, grid.hl
    g11, g12, g22 = field.g11, field.g12, field.g22
    det = g11 * g22 - g12 * g12
    bad = ~(det > det_floor)
    if field.mask is not None:
        bad = bad | field.mask
    with np.errstate(invalid="ignore", divide="ignore"):
        sg = np.sqrt(np.where(bad, np.nan, det))
        d1 = lambda f: fd_derivative(f, 0, hk)  # noqa: E731
        d2 = lambda f: fd_derivative(f, 1, hl)  # noqa: E731
        a = d1(g12 / (g11 * sg) * d2(g11) - d1(g22) / sg)
        b = d2(2.0 / sg * d1(g12) - d2(g11) / sg - g12 / (g11 * sg) * d1(g11))
        r = (a + b) / sg
    mask = bad | ~np.isfinite(r)
    return CurvatureField(np.where(mask, np.nan, r), mask)


@dataclass(frozen=True)
class Extremum:
    location: float
    value: float
    kind: str  # "max" or "min"


def find_extrema(values, x) -> list[Extremum]:
    """Interior local maxima and minima of a sampled 1D function.

    Each extremum is refined by the vertex of the parabola through the
    node and its two neighbours. NaN samples are never extrema and never
    neighbours of one.
    """
    y = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.size < 5:
        raise GridError("need at least 5 samples to locate extrema")
    out = []
    for i in range(1, y.size - 1):
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        if not np.isfinite([y0, y1, y2]).all():
            continue
        if y1 > y0 and y1 >= y2:
            kind = "max"
        elif y1 < y0 and y1 <= y2:
            kind = "min"
        else:
            continue
        h = x[i + 1] - x[i]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        loc = x[i] + shift * h
        val = y1 - 0.25 * (y0 - y2) * shift
        out.append(Extremum(float(loc), float(val), kind))
    return out
