"""Parameter sweeps, landmark extraction and quantum/classical comparison.

Sweeps evaluate the metric on a tensor grid padded by ``EDGE_PAD`` nodes
along both axes, so the curvature at every requested node comes from
full-order stencils. Grids are split at ``k = 0`` and no stencil ever
crosses it.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .cpt.engine import BranchSpec, cmt_series
from .errors import ConvergenceError, DomainError, PairingError
from .fock import BasisSpec, default_basis_frequency, eigensolve
from .geometry import EDGE_PAD, MetricField, ParamGrid, find_extrema, scalar_curvature
from .model import SystemParams
from .orbit import cmt_numeric, omega_of_action, orbit_fourier, separatrix_action
from .qmt import DEFAULT_M, MetricValue, qmt_sum, quantum_metric, transition_elements
from .tables import eval_cmt_series, eval_qmt_series, printed_f

QUANTUM_ENGINES = ("quantum-numeric", "quantum-series")
CLASSICAL_ENGINES = ("classical-series", "cpt", "classical-numeric")
ENGINES = QUANTUM_ENGINES + CLASSICAL_ENGINES
COLUMNS = ("k", "lambda", "g11_q", "g12_q", "g22_q", "det_q", "R_q",
           "g11_cl", "g12_cl", "g22_cl", "det_cl", "R_cl", "tail_q", "tail_cl", "flags")
TAIL_WARN = 1e-3
MODES = ("k_sweep", "lambda_sweep", "grid")


@dataclass(frozen=True)
class SweepConfig:
    """Sweep description; ranges are inclusive and steps positive."""

    mode: str = "k_sweep"
    k_min: float = -1.0
    k_max: float = 1.0
    k_step: float = 0.005
    lam: float = 0.2
    lam_min: float = 0.05
    lam_max: float = 0.5
    lam_step: float = 0.005
    k: float = -0.5
    hbar: float = 1.0
    basis_size: int = 250
    tolerance: float = 1e-9
    M: int = DEFAULT_M
    order: int | None = None
    engines: tuple = ("quantum-numeric", "classical-series")
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        unknown = set(self.engines) - set(ENGINES)
        if unknown:
            raise DomainError(f"unknown engines {sorted(unknown)}")
        if not self.engines:
            raise DomainError("no engine selected")
        for name in ("k_step", "lam_step"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.mode in ("k_sweep", "grid") and not self.k_max >= self.k_min:
            raise DomainError("empty k range")
        if self.mode in ("lambda_sweep", "grid") and not self.lam_max >= self.lam_min:
            raise DomainError("empty lambda range")
        if self.mode in ("lambda_sweep", "grid") and not self.lam_min > 0:
            raise DomainError("lambda must be positive")
        if self.mode == "k_sweep" and not self.lam > 0:
            raise DomainError("lambda must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        data = dict(data)
        if "engines" in data:
            data["engines"] = tuple(data["engines"])
        return cls(**data)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Requested ``k`` and ``lambda`` values."""
        def rng(lo, hi, h):
            n = int(math.floor((hi - lo) / h + 1e-9)) + 1
            return np.round(lo + h * np.arange(n), 12)
        ks = rng(self.k_min, self.k_max, self.k_step) if self.mode != "lambda_sweep" else np.array([self.k])
        ls = rng(self.lam_min, self.lam_max, self.lam_step) if self.mode != "k_sweep" else np.array([self.lam])
        return ks, ls

    @property
    def quantum_engine(self) -> str | None:
        return next((e for e in QUANTUM_ENGINES if e in self.engines), None)

    @property
    def classical_engine(self) -> str | None:
        return next((e for e in CLASSICAL_ENGINES if e in self.engines), None)


@dataclass
class NodeResult:
    metric: MetricValue | None
    tail: float = math.nan


def quantum_node(engine: str, k: float, lam: float, cfg: SweepConfig) -> NodeResult:
    params = SystemParams(k, lam, cfg.hbar)
    if engine == "quantum-numeric":
        res = quantum_metric(params, cfg.basis_size, cfg.M, tolerance=cfg.tolerance)
        return NodeResult(res.metric, res.tail)
    if k <= 0:
        return NodeResult(None)
    s = eval_qmt_series(k, lam, cfg.hbar)
    return NodeResult(s.metric, s.tail)


def classical_node(engine: str, k: float, lam: float, cfg: SweepConfig) -> NodeResult:
    if k == 0:
        return NodeResult(None)
    branch = "k_positive" if k > 0 else "k_negative"
    f = printed_f()
    if engine == "classical-series":
        s = eval_cmt_series(branch, k, lam, cfg.hbar, f=f)
        return NodeResult(s.metric, s.tail)
    if engine == "cpt":
        spec = BranchSpec.for_k(k, cfg.order)
        return NodeResult(cmt_series(spec).evaluate_identified(k, lam, f, cfg.hbar, branch))
    params = SystemParams(k, lam, cfg.hbar)
    I = f[1] * cfg.hbar
    if k < 0 and I >= separatrix_action(params):
        return NodeResult(None)
    fd = orbit_fourier(I, params, "left" if k < 0 else None)
    tail = max(abs(fd.beta1[-1]) / abs(fd.beta1[2]), abs(fd.beta2[-1]) / abs(fd.beta2[2]))
    return NodeResult(cmt_numeric(fd), float(tail))


def _row_task(args):
    k, lams, cfg, which = args
    out = []
    for lam in lams:
        if which == "q":
            out.append(quantum_node(cfg.quantum_engine, k, lam, cfg))
        else:
            out.append(classical_node(cfg.classical_engine, k, lam, cfg))
    return out


def _padded(values: np.ndarray, step: float) -> np.ndarray:
    lo = values[0] - EDGE_PAD * step
    return np.round(lo + step * np.arange(values.size + 2 * EDGE_PAD), 12)


def _evaluate_grid(ks: np.ndarray, ls: np.ndarray, cfg: SweepConfig, which: str, pool) -> list[list[NodeResult]]:
    tasks = [(float(k), [float(l) for l in ls], cfg, which) for k in ks]
    if pool is None:
        return [_row_task(t) for t in tasks]
    return list(pool.map(_row_task, tasks))


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list = field(default_factory=list)  # list of dicts keyed by COLUMNS

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] if r[name] is not None else np.nan for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in COLUMNS])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if not math.isfinite(v):
        return ""
    return format(float(v), ".12g")


def _side_curvature(ks_side, ls_pad, results, lam_ok):
    """Curvature on one sign of ``k``; returns R array or None."""
    if ks_side.size < 2 * EDGE_PAD + 1 or ls_pad.size < 2 * EDGE_PAD + 1:
        return None
    arr = np.full(ks_side.shape + ls_pad.shape + (3,), np.nan)
    for i, row in enumerate(results):
        for j, node in enumerate(row):
            if node.metric is not None:
                arr[i, j] = node.metric.as_tuple()
    field_ = MetricField.from_array(arr)
    if ls_pad.size > 1:
        grid = ParamGrid(ks_side, ls_pad)
        return scalar_curvature(field_, grid).R
    return None


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate the configured engines and curvature at every requested node."""
    ks, ls = cfg.axes()
    hk = cfg.k_step
    hl = cfg.lam_step
    k_pad = _padded(ks, hk)
    l_pad = _padded(ls, hl)
    l_pad = l_pad[l_pad > 0]
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        per_side = {}
        for side in (-1, 1):
            ks_side = k_pad[k_pad * side > 0]
            if not np.any(ks * side > 0):
                continue
            entry = {"k": ks_side}
            for which, engine in (("q", cfg.quantum_engine), ("cl", cfg.classical_engine)):
                if engine is None:
                    continue
                res = _evaluate_grid(ks_side, l_pad, cfg, which, pool)
                entry[which] = res
                entry["R_" + which] = _side_curvature(ks_side, l_pad, res, None)
            per_side[side] = entry
    finally:
        if pool is not None:
            pool.shutdown()

    rows = []
    for k in ks:
        for lam in ls:
            row = {c: None for c in COLUMNS}
            row["k"], row["lambda"] = float(k), float(lam)
            flags = []
            if abs(k) < 2 * hk:
                flags.append("near_k0")
            side = -1 if k < 0 else 1
            entry = per_side.get(side)
            masked = False
            for which in ("q", "cl"):
                engine = cfg.quantum_engine if which == "q" else cfg.classical_engine
                if engine is None:
                    continue
                node = None
                i = j = None
                if k == 0:
                    if which == "q":
                        node = quantum_node(engine, float(k), float(lam), cfg)
                elif entry is not None:
                    i = int(np.argmin(np.abs(entry["k"] - k)))
                    j = int(np.argmin(np.abs(l_pad - lam)))
                    node = entry[which][i][j]
                if node is not None and node.metric is not None:
                    m = node.metric
                    row[f"g11_{which}"], row[f"g12_{which}"], row[f"g22_{which}"] = m.as_tuple()
                    row[f"det_{which}"] = m.det
                    row[f"tail_{which}"] = node.tail
                    if math.isfinite(node.tail) and node.tail > TAIL_WARN:
                        flags.append("tail_warn")
                r_val = None
                if i is not None and entry.get("R_" + which) is not None:
                    n_k, n_l = entry["R_" + which].shape
                    if EDGE_PAD <= i < n_k - EDGE_PAD and EDGE_PAD <= j < n_l - EDGE_PAD:
                        r_val = entry["R_" + which][i, j]
                if r_val is None or not math.isfinite(r_val):
                    masked = True
                    r_val = None
                row[f"R_{which}"] = r_val
            if masked:
                flags.append("masked_curvature")
            row["flags"] = ";".join(dict.fromkeys(flags))
            rows.append(row)
    return SweepResult(cfg, rows)


@dataclass(frozen=True)
class Landmark:
    column: str
    kind: str
    location: float
    value: float
    step: float


def landmarks(result: SweepResult, columns=("g11_q", "g12_q", "g22_q", "det_q", "R_q",
                                             "g11_cl", "g12_cl", "g22_cl", "det_cl", "R_cl")) -> list[Landmark]:
    """Interior extrema of each column along the sweep axis."""
    cfg = result.config
    if cfg.mode == "grid":
        raise DomainError("landmarks need a one-dimensional sweep")
    axis = "k" if cfg.mode == "k_sweep" else "lambda"
    step = cfg.k_step if axis == "k" else cfg.lam_step
    x = result.column(axis)
    out = []
    for col in columns:
        y = result.column(col)
        if np.count_nonzero(np.isfinite(y)) < 5:
            continue
        for e in find_extrema(y, x):
            out.append(Landmark(col, e.kind, e.location, e.value, step))
    return out


def landmarks_json(items: list[Landmark]) -> str:
    return json.dumps([asdict(l) for l in items], indent=2)


@dataclass
class CompareReport:
    """Quantum transition data next to classical Fourier data.

    ``pairing`` maps each quantum index ``m`` to the classical harmonic
    ``m'`` (identity for ``k > 0``; ``m/2`` for even ``m`` when ``k < 0``).
    """

    params: SystemParams
    action: float
    omega: float
    rows: list
    pairing: dict

    columns = ("m", "m_cl", "gap_q", "m_omega", "B1", "B2", "beta1p_re", "beta1p_im", "beta2p_re",
               "beta2p_im", "G11", "G12", "G22", "Gcl11", "Gcl12", "Gcl22")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(r.get(c)) if not isinstance(r.get(c), int) else str(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {"k": self.params.k, "lambda": self.params.lam, "hbar": self.params.hbar,
                "action": self.action, "omega": self.omega,
                "pairing": {str(k): v for k, v in self.pairing.items()},
                "rows": [{c: (r.get(c) if r.get(c) is None or isinstance(r.get(c), int) or math.isfinite(r.get(c))
                              else None) for c in self.columns} for r in self.rows]}
        return json.dumps(data, indent=2)


PAIRING_RATIO = 1e-3


def doublet_pairing(energies: np.ndarray, M: int, ratio: float = PAIRING_RATIO) -> dict:
    """Map even quantum indices ``m <= M`` to ``m/2`` after checking the doublets."""
    scale = energies[2] - energies[0]
    pairing = {}
    for m in range(0, M + 1, 2):
        if m + 1 >= len(energies):
            raise PairingError(f"not enough states to pair index {m}")
        split = energies[m + 1] - energies[m]
        if not split < ratio * scale:
            raise PairingError(f"states {m} and {m + 1} are split by {split:.3g}; not a doublet")
        if m:
            pairing[m] = m // 2
    return pairing


def compare(params: SystemParams, M: int = 8, I: float | None = None, basis_size: int = 250,
            M_cl: int = 32) -> CompareReport:
    """Term-by-term comparison of the quantum and classical metric sums."""
    if I is None:
        I = printed_f()[1] * params.hbar
    basis = BasisSpec(basis_size, default_basis_frequency(params))
    spec = eigensolve(None, basis, params, n_required=M + 2)
    td = transition_elements(spec, M)
    q = qmt_sum(td)
    well = "left" if params.k < 0 else None
    fd = orbit_fourier(I, params, well, M_cl)
    omega = omega_of_action(I, params, well)
    if params.k < 0:
        pairing = doublet_pairing(spec.energies, M)
    else:
        pairing = {m: m for m in range(1, M + 1)}
    rows = []
    for idx in range(M):
        m = idx + 1
        row = {"m": m, "gap_q": float(td.gaps[idx]), "B1": float(td.B1[idx]), "B2": float(td.B2[idx]),
               "G11": float(q.terms[idx, 0]), "G12": float(q.terms[idx, 1]), "G22": float(q.terms[idx, 2])}
        mc = pairing.get(m)
        row["m_cl"] = mc
        if mc is not None and mc <= fd.M:
            b1, b2 = math.sqrt(2) * fd.beta1[mc], math.sqrt(2) * fd.beta2[mc]
            w2 = (mc * omega) ** 2
            row.update({"m_omega": mc * omega, "beta1p_re": b1.real, "beta1p_im": b1.imag,
                        "beta2p_re": b2.real, "beta2p_im": b2.imag,
                        "Gcl11": float((b1 * b1.conjugate()).real / w2),
                        "Gcl12": float((b1 * b2.conjugate()).real / w2),
                        "Gcl22": float((b2 * b2.conjugate()).real / w2)})
        rows.append(row)
    return CompareReport(params, I, omega, rows, pairing)


def with_overrides(cfg: SweepConfig, **changes) -> SweepConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(cfg, **changes)


__all__ = ["SweepConfig", "SweepResult", "run_sweep", "landmarks", "landmarks_json", "compare", "CompareReport",
           "doublet_pairing", "with_overrides", "COLUMNS", "ENGINES", "ConvergenceError"]
