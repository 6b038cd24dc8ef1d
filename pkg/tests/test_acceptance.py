"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import math

import numpy as np
import pytest

from quartic_geometry.cpt import BranchSpec, cmt_series_assemble, w_functions
from quartic_geometry.cpt.series import COS, SIN
from quartic_geometry.fock import bimodality_scan, density_grid, ground_density, local_maxima, solve
from quartic_geometry.geometry import EDGE_PAD, MetricField, ParamGrid, find_extrema, scalar_curvature
from quartic_geometry.harness import SweepConfig, landmarks, run_sweep
from quartic_geometry.model import SystemParams
from quartic_geometry.orbit import (
    classical_metric,
    cmt_numeric,
    energy_of_action,
    integrate_orbit,
    omega_of_action,
    orbit_fourier,
)
from quartic_geometry.qmt import TransitionData, qmt_provost_fd, qmt_sum, transition_elements
from quartic_geometry.tables import eval_cmt_series, eval_curvature_series, eval_qmt_series, fit_f_alpha


def _rel(a, b):
    return abs(a - b) / abs(b)


def _near(value, target, tol):
    return abs(value - target) <= tol, f"{value:.6g} vs {target} +- {tol}"


def test_criterion_01_harmonic_limit(criterion):
    p = SystemParams(1, 1e-6)
    g = qmt_sum(transition_elements(solve(p, n_required=61), 60)).metric
    want = (0.03125, 0.0078125, 0.0021159)
    criterion(1, "harmonic-limit QMT", {
        f"g{c}": (_rel(v, w) < 1e-4, f"{v:.8g} vs {w}") for c, v, w in zip(("11", "12", "22"), g.as_tuple(), want)})


def test_criterion_02_series_vs_numeric(criterion):
    s = eval_qmt_series(1, 0.2).metric
    n = qmt_sum(transition_elements(solve(SystemParams(1, 0.2), n_required=61), 60)).metric
    criterion(2, "series/numeric quantum agreement", {
        f"g{c}": (_rel(a, b) < 1e-3, f"rel {_rel(a, b):.2e}")
        for c, a, b in zip(("11", "12", "22"), s.as_tuple(), n.as_tuple())})


def test_criterion_03_double_well_gaps(criterion):
    r = solve(SystemParams(-1, 0.2), n_required=7)
    g = r.energies - r.energies[0]
    criterion(3, "double-well gaps", {
        "E2-E0": _near(g[2], 1.360866, 1e-4),
        "E4-E0": _near(g[4], 2.661983, 1e-4),
        "E6-E0": _near(g[6], 3.893522, 2e-4),
        "E1-E0": (g[1] < 1e-9, f"{g[1]:.3g}"),
    })


R4, R3, R2 = 2 ** 0.25, math.sqrt(3), math.sqrt(2)
GOLDEN_W = {
    ("k_positive", 1): [(8 / 192, 2, SIN), (-1 / 192, 4, SIN)],
    ("k_positive", 2): [(-384 / 55296, 2, SIN), (132 / 55296, 4, SIN), (-32 / 55296, 6, SIN), (3 / 55296, 8, SIN)],
    ("k_negative", 1): [(-9 / (12 * R4 * R3), 1, COS), (1 / (12 * R4 * R3), 3, COS)],
    ("k_negative", 2): [(-37 / (384 * R2), 2, SIN), (8 / (384 * R2), 4, SIN), (-1 / (384 * R2), 6, SIN)],
}


def test_criterion_04_cpt_golden(criterion):
    checks = {}
    for (branch, mu), terms in GOLDEN_W.items():
        w = w_functions(BranchSpec(branch, 2 if branch == "k_positive" else 5))[mu - 1]
        got = {(m, kind): float(c) for m, kind, _, c in w.items()}
        want = {(m, kind): c for c, m, kind in terms}
        ok = got.keys() == want.keys() and all(_rel(got[key], want[key]) < 1e-12 for key in want)
        checks[f"W{mu} {branch}"] = (ok, "coefficient mismatch")
    pos = cmt_series_assemble(BranchSpec("k_positive", 2))
    neg = cmt_series_assemble(BranchSpec("k_negative", 5))
    checks["b0(11)"] = _near(float(pos["11"][0]), 0.03125, 1e-4)
    checks["b1(11)"] = _near(float(pos["11"][1]), 0.0143229, 1e-4)
    checks["c0(11)"] = _near(float(neg["11"][0]), 2.1213, 1e-3)
    checks["c1(22)"] = (neg["22"][1] == 0, str(neg["22"][1]))
    criterion(4, "CPT golden series and tables", checks)


def test_criterion_05_classical(criterion):
    g = cmt_numeric(orbit_fourier(0.5, SystemParams(1, 0.05)))
    s = eval_cmt_series("k_positive", 1, 0.05, I=0.5).metric
    checks = {f"g{c}": (_rel(a, b) < 1e-3, f"rel {_rel(a, b):.2e}")
              for c, a, b in zip(("11", "12", "22"), g.as_tuple(), s.as_tuple())}
    p = SystemParams(-1, 0.2)
    left = np.array(classical_metric(0.5, p, "left").as_tuple())
    right = np.array(classical_metric(0.5, p, "right").as_tuple())
    diff = np.max(np.abs(left - right) / np.abs(right))
    checks["left/right"] = (diff < 1e-10, f"rel {diff:.2e}")
    criterion(5, "classical numeric vs series; well symmetry", checks)


def test_criterion_06_f_fit(criterion):
    f = fit_f_alpha()
    criterion(6, "f identification fit", {
        "f2": _near(f[2], 1.0, 1e-6), "f3": _near(f[3], 1.1447, 5e-4),
        "f4": _near(f[4], 1.2484, 5e-4), "f14": _near(f[14], 2.0120, 5e-4)})


def _chart(k0, l0, n, h, fn):
    grid = ParamGrid.from_ranges(k0, n, h, l0, n, h)
    K, L = np.meshgrid(grid.k_values, grid.lambda_values, indexing="ij")
    g = [np.broadcast_to(np.asarray(x, dtype=float), K.shape) for x in fn(K, L)]
    # abstract charts: the k = 0 guard applies to physical grids only
    R = scalar_curvature(MetricField(*g), grid, check_k0=False).R
    return R[EDGE_PAD:-EDGE_PAD, EDGE_PAD:-EDGE_PAD]


def test_criterion_07_curvature_oracles(criterion):
    flat = _chart(0.5, 0.5, 41, 0.025, lambda K, L: (1.3, 0.2, 0.7))
    sphere = _chart(0.6, 0.0, 41, 0.025, lambda K, L: (1.0, 0.0, np.sin(K) ** 2))
    hyper = _chart(0.0, 1.0, 41, 0.025, lambda K, L: (1 / L**2, 0.0, 1 / L**2))
    criterion(7, "curvature oracles", {
        "flat": (np.abs(flat).max() < 1e-10, f"max {np.abs(flat).max():.2e}"),
        "sphere": (np.abs(sphere - 2).max() < 1e-3, f"max err {np.abs(sphere - 2).max():.2e}"),
        "half-plane": (np.abs(hyper + 2).max() < 1e-3, f"max err {np.abs(hyper + 2).max():.2e}"),
    })


def _point_curvature(k, lam, h=0.005):
    cfg = SweepConfig(mode="grid", k_min=k, k_max=k, k_step=h, lam_min=lam, lam_max=lam, lam_step=h,
                      engines=("quantum-numeric",))
    return run_sweep(cfg).rows[0]["R_q"]


def test_criterion_08_curvature_limits(criterion):
    r_dw = _point_curvature(-0.9, 0.2)
    r_k5 = _point_curvature(5.0, 0.1)
    s_k5 = eval_curvature_series("quantum", 5.0, 0.1)
    criterion(8, "curvature limits", {
        "quantum series lam->0": _near(eval_curvature_series("quantum", 1.0, 1e-12), -28, 1e-6),
        "classical series k<0": _near(eval_curvature_series("classical", -1.0, 1e-12), -4, 1e-6),
        "numeric R(-0.9, 0.2)": _near(r_dw, -4, 0.3),
        "numeric vs series (5, 0.1)": (_rel(r_k5, s_k5) < 0.05, f"{r_k5:.6g} vs {s_k5:.6g}"),
    })


def _find(items, column, kind, near):
    cands = [l for l in items if l.column == column and l.kind == kind]
    if not cands:
        return math.nan
    return min(cands, key=lambda l: abs(l.location - near)).location


def test_criterion_09_landmarks(criterion):
    ks = landmarks(run_sweep(SweepConfig(mode="k_sweep", k_min=-0.7, k_max=-0.15, k_step=0.005, lam=0.2,
                                         engines=("quantum-numeric", "classical-series"))))
    ls = landmarks(run_sweep(SweepConfig(mode="lambda_sweep", k=-0.5, lam_min=0.1, lam_max=0.35, lam_step=0.005,
                                         engines=("quantum-numeric",))), ("R_q",))
    targets = [
        ("g11_q max", ks, "g11_q", "max", -0.285, 0.01),
        ("g12_q max", ks, "g12_q", "max", -0.32, 0.01),
        ("g12_q min", ks, "g12_q", "min", -0.45, 0.015),
        ("det_q max", ks, "det_q", "max", -0.325, 0.01),
        ("R_q max", ks, "R_q", "max", -0.245, 0.015),
        ("R_q min", ks, "R_q", "min", -0.48, 0.015),
        ("g12_cl min", ks, "g12_cl", "min", -0.504, 0.01),
        ("det_cl max", ks, "det_cl", "max", -0.586, 0.01),
        ("R_q min over lambda", ls, "R_q", "min", 0.215, 0.01),
    ]
    criterion(9, "landmarks", {label: _near(_find(items, col, kind, t), t, tol)
                               for label, items, col, kind, t, tol in targets})


def test_criterion_10_delocalization(criterion):
    ks = np.round(np.arange(-0.005, -0.6001, -0.005), 10)
    rep = bimodality_scan(0.2, ks)
    p = SystemParams(-0.8, 0.2)
    q = density_grid(p)
    peaks = np.sort(local_maxima(ground_density(solve(p), q), q))
    peaks_ok = len(peaks) == 2 and np.all(np.abs(np.abs(peaks) - 4.89898) < 0.1 * 4.89898)
    nan = math.nan
    criterion(10, "delocalization scan", {
        "two-maxima onset": _near(rep.two_maxima_onset if rep.two_maxima_onset is not None else nan, -0.15, 0.03),
        "separation onset": _near(rep.separation_onset if rep.separation_onset is not None else nan, -0.32, 0.03),
        "maxima at k=-0.8": (bool(peaks_ok), f"{peaks}"),
    })


def test_criterion_11_properties(criterion):
    checks = {}
    p = SystemParams(1, 0.2)
    r = solve(p, n_required=61)
    td = transition_elements(r, 60)
    s = np.random.default_rng(1).choice([-1.0, 1.0], 60)
    flipped = qmt_sum(TransitionData(td.B1 * s, td.B2 * s, td.gaps, td.parity)).metric
    checks["gauge invariance"] = (flipped == qmt_sum(td).metric, "sign flips changed the metric")

    fd = orbit_fourier(0.5, SystemParams(-1, 0.2), "left")
    base = np.array(cmt_numeric(fd).as_tuple())
    shifts = [np.max(np.abs(np.array(cmt_numeric(fd.shift_origin(d)).as_tuple()) - base) / np.abs(base))
              for d in (0.3, 1.7, 4.1)]
    checks["origin invariance"] = (max(shifts) <= 1e-10, f"{max(shifts):.2e}")
    orb = integrate_orbit(0.5, SystemParams(-1, 0.2), "left")
    full = np.fft.fft(0.5 * orb.samples**2) / len(orb.samples)
    conj_err = np.abs(full[1:33] - np.conj(full[-1:-33:-1])).max() / np.abs(full).max()
    checks["beta conjugation"] = (conj_err <= 1e-10, f"{conj_err:.2e}")

    odd = td.parity == 1
    checks["parity selection"] = (np.abs(td.B1[odd]).max() < 1e-12 and np.abs(td.B2[odd]).max() < 1e-12,
                                  "odd elements nonzero")

    errs = []
    for k, lam, I, well in ((1, 0.2, 0.5, None), (0.5, 0.7, 1.3, None), (-1, 0.2, 0.5, "left")):
        pp = SystemParams(k, lam)
        h = 1e-4 * I
        dE = (energy_of_action(I + h, pp, well) - energy_of_action(I - h, pp, well)) / (2 * h)
        errs.append(_rel(dE, omega_of_action(I, pp, well)))
    checks["dE/dI = omega"] = (max(errs) < 1e-6, f"{max(errs):.2e}")

    ref = np.array(qmt_sum(td).metric.as_tuple())
    e3 = np.abs(np.array(qmt_provost_fd(p, delta=1e-3).as_tuple()) - ref).max()
    e4 = np.abs(np.array(qmt_provost_fd(p, delta=1e-4).as_tuple()) - ref).max()
    checks["Provost O(delta^2)"] = (e4 < e3 / 30, f"{e3:.2e} -> {e4:.2e}")

    ref_pts = [(-0.9, 0.2), (1.0, 0.2), (-0.5, 0.215)]
    worst = max(_rel(_point_curvature(k, lam, 0.01), _point_curvature(k, lam, 0.005)) for k, lam in ref_pts)
    checks["curvature refinement"] = (worst < 0.01, f"{worst:.2e}")
    criterion(11, "property suites", checks)
