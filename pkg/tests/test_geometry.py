import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quartic_geometry.errors import GridError
from quartic_geometry.geometry import (
    EDGE_PAD,
    MetricField,
    ParamGrid,
    fd_derivative,
    find_extrema,
    scalar_curvature,
)


def _interior(R, pad=EDGE_PAD):
    return R[pad:-pad, pad:-pad]


def _field(grid, fn):
    K, L = np.meshgrid(grid.k_values, grid.lambda_values, indexing="ij")
    g11, g12, g22 = fn(K, L)
    return MetricField(np.broadcast_to(g11, K.shape).astype(float), np.broadcast_to(g12, K.shape).astype(float),
                       np.broadcast_to(g22, K.shape).astype(float))


def test_flat_constant():
    grid = ParamGrid.from_ranges(0.5, 21, 0.05, 0.1, 21, 0.05)
    R = scalar_curvature(_field(grid, lambda K, L: (2.0, 0.3, 1.5)), grid).R
    assert np.abs(R).max() < 1e-10


def test_flat_polar():
    # dr^2 + r^2 dphi^2 in (r, phi) coordinates is flat
    grid = ParamGrid.from_ranges(1.0, 41, 0.025, 0.0, 41, 0.025)
    R = scalar_curvature(_field(grid, lambda K, L: (1.0, 0.0, K**2)), grid).R
    assert np.abs(_interior(R)).max() < 1e-6


def test_sphere():
    # unit sphere chart (theta, phi): R = 2
    grid = ParamGrid.from_ranges(0.6, 41, 0.025, 0.0, 41, 0.025)
    R = scalar_curvature(_field(grid, lambda K, L: (1.0, 0.0, np.sin(K) ** 2)), grid).R
    assert np.abs(_interior(R) - 2).max() < 1e-3


def test_hyperbolic_half_plane():
    # (dx^2 + dy^2)/y^2 with x along k, y along lambda: R = -2
    grid = ParamGrid.from_ranges(0.5, 41, 0.025, 1.0, 41, 0.025)
    R = scalar_curvature(_field(grid, lambda K, L: (1 / L**2, 0.0, 1 / L**2)), grid).R
    assert np.abs(_interior(R) + 2).max() < 1e-3


def test_off_diagonal_chart():
    # sphere in a sheared chart u = theta, v = phi + theta keeps R = 2
    def sheared(K, L):
        s2 = np.sin(K) ** 2
        return 1.0 + s2, -s2, s2
    grid = ParamGrid.from_ranges(0.6, 41, 0.025, 0.0, 41, 0.025)
    R = scalar_curvature(_field(grid, sheared), grid).R
    assert np.abs(_interior(R) - 2).max() < 1e-3


def test_refinement_convergence():
    def metric(K, L):
        return 1 / L**2 + K**2, 0.1 * K * L, 1 / L**2

    coarse = ParamGrid.from_ranges(0.6, 21, 0.04, 1.0, 21, 0.04)
    fine = ParamGrid.from_ranges(0.6, 41, 0.02, 1.0, 41, 0.02)
    rc = _interior(scalar_curvature(_field(coarse, metric), coarse).R)
    rf = _interior(scalar_curvature(_field(fine, metric), fine).R, 2 * EDGE_PAD)[::2, ::2]
    assert rc.shape == rf.shape
    assert np.max(np.abs(rc - rf) / np.abs(rf)) < 0.01


def test_k0_rejected():
    grid = ParamGrid.from_ranges(-0.1, 41, 0.005, 0.1, 9, 0.005)
    f = _field(grid, lambda K, L: (1.0, 0.0, 1.0))
    with pytest.raises(GridError):
        scalar_curvature(f, grid)
    scalar_curvature(f, grid, check_k0=False)


def test_degenerate_metric_masked():
    grid = ParamGrid.from_ranges(0.5, 11, 0.1, 0.1, 11, 0.1)
    out = scalar_curvature(_field(grid, lambda K, L: (1.0, 1.0, 1.0)), grid)
    assert out.mask.all() and np.isnan(out.R).all()


def test_grid_validation():
    with pytest.raises(GridError):
        ParamGrid(np.array([0.1, 0.2, 0.4]), np.array([0.1, 0.2]))
    with pytest.raises(GridError):
        fd_derivative(np.ones(4), 0, 0.1)
    grid = ParamGrid.from_ranges(0.5, 6, 0.1, 0.1, 6, 0.1)
    with pytest.raises(GridError):
        scalar_curvature(MetricField(np.ones((5, 5)), np.zeros((5, 5)), np.ones((5, 5))), grid)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_fd_exact_for_quartics(a, b, c, d):
    x = np.linspace(-1, 1, 21)
    f = a * x**4 + b * x**3 + c * x**2 + d * x
    df = 4 * a * x**3 + 3 * b * x**2 + 2 * c * x + d
    assert np.allclose(fd_derivative(f, 0, x[1] - x[0])[2:-2], df[2:-2], atol=1e-10)


def test_find_extrema_refines():
    x = np.linspace(-1, 1, 41)
    y = -(x - 0.1234) ** 2 + 0.2 * np.cos(8 * x) * 0
    (e,) = find_extrema(y, x)
    assert e.kind == "max" and e.location == pytest.approx(0.1234, abs=1e-12)
    y2 = np.sin(3 * x)
    y2[20] = np.nan
    kinds = sorted(e.kind for e in find_extrema(y2, x))
    assert kinds == ["max", "min"]
    with pytest.raises(GridError):
        find_extrema([1, 2, 3], [0, 1, 2])
