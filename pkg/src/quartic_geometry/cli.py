"""Command-line driver.

Every subcommand reads an optional JSON config (``--config``) whose keys
match the long flag names with dashes replaced by underscores; flags given
on the command line override the file. Results go to ``--output`` or stdout.

Exit codes: 0 success, 1 usage error, 2 convergence failure, 3 domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import harness
from .cpt.engine import BranchSpec, cmt_series_assemble, dump
from .errors import ConvergenceError, DomainError, GridError, PairingError, SeriesOrderError
from .fock import BasisSpec, bimodality_scan, default_basis_frequency, density_grid, eigensolve, ground_density
from .model import SystemParams
from .orbit import classical_metric, omega_of_action
from .qmt import quantum_metric
from .tables import eval_cmt_series, eval_curvature_series, fit_f_alpha, printed_f

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _point_flags(p: argparse.ArgumentParser, k: bool = True) -> None:
    if k:
        p.add_argument("--k", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--hbar", type=float)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--output", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quartic-geometry", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", help="converged low-lying energies")
    _common(p); _point_flags(p)
    p.add_argument("--basis-size", type=int)
    p.add_argument("--states", type=int)

    p = sub.add_parser("density", help="ground-state density, or a bimodality scan over k")
    _common(p); _point_flags(p)
    p.add_argument("--basis-size", type=int)
    p.add_argument("--k-min", type=float)
    p.add_argument("--k-max", type=float)
    p.add_argument("--k-step", type=float)

    p = sub.add_parser("qmt", help="quantum metric by perturbation sum")
    _common(p); _point_flags(p)
    p.add_argument("--basis-size", type=int)
    p.add_argument("--M", type=int)

    p = sub.add_parser("cmt-numeric", help="classical metric from the numeric orbit")
    _common(p); _point_flags(p)
    p.add_argument("--action", type=float)
    p.add_argument("--well", choices=("left", "right"))

    p = sub.add_parser("cmt-series", help="classical metric from the tabulated series")
    _common(p); _point_flags(p)
    p.add_argument("--action", type=float, help="literal action; default uses the f identification")

    p = sub.add_parser("cpt-dump", help="generated perturbation series as text")
    _common(p)
    p.add_argument("--k", type=float, help="sign selects the branch")
    p.add_argument("--order", type=int)
    p.add_argument("--tables", action="store_true", help="print assembled coefficient tables instead")

    p = sub.add_parser("curvature", help="scalar curvature series")
    _common(p); _point_flags(p)
    p.add_argument("--kind", choices=("quantum", "classical"))

    for name, help_ in (("sweep", "CSV sweep of metrics and curvatures"),
                        ("landmarks", "extrema of a one-dimensional sweep as JSON")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--mode", choices=harness.MODES)
        p.add_argument("--k", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        for flag in ("--k-min", "--k-max", "--k-step", "--lambda-min", "--lambda-max", "--lambda-step", "--hbar",
                     "--tolerance"):
            p.add_argument(flag, type=float)
        p.add_argument("--basis-size", type=int)
        p.add_argument("--M", type=int)
        p.add_argument("--order", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--engines", help="comma-separated subset of " + ",".join(harness.ENGINES))
        if name == "landmarks":
            p.add_argument("--columns", help="comma-separated CSV columns")

    p = sub.add_parser("compare", help="term-by-term quantum/classical comparison")
    _common(p); _point_flags(p)
    p.add_argument("--M", type=int)
    p.add_argument("--action", type=float)
    p.add_argument("--basis-size", type=int)
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("fit-f", help="semiclassical identification numbers")
    _common(p)
    p.add_argument("--hbar", type=float)
    return parser


def _merge(args: argparse.Namespace) -> dict:
    opts = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        opts.update({key.replace("-", "_"): v for key, v in data.items()})
        if "lambda" in opts:
            opts["lam"] = opts.pop("lambda")
    opts.update({key: v for key, v in vars(args).items() if v is not None and key not in ("config", "command")})
    return opts


def _params(opts: dict, k_required: bool = True) -> SystemParams:
    if k_required and opts.get("k") is None:
        raise UsageError("--k is required")
    if opts.get("lam") is None:
        raise UsageError("--lambda is required")
    return SystemParams(opts.get("k", 0.0), opts["lam"], opts.get("hbar", 1.0))


def _emit(text: str, opts: dict) -> None:
    if opts.get("output"):
        with open(opts["output"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def cmd_spectrum(opts):
    params = _params(opts)
    n = opts.get("states", 8)
    basis = BasisSpec(opts.get("basis_size", 250), default_basis_frequency(params))
    res = eigensolve(None, basis, params, n_required=n)
    e = res.energies[:n]
    return _json({"energies": e.tolist(), "gaps": (e - e[0]).tolist(), "parity": res.parity[:n].tolist(),
                  "n_converged": res.n_converged, "basis_size": res.basis.size})


def cmd_density(opts):
    if opts.get("k_min") is not None or opts.get("k_max") is not None:
        lam = opts.get("lam")
        if lam is None:
            raise UsageError("--lambda is required")
        k_min, k_max, step = opts.get("k_min", -1.0), opts.get("k_max", 0.0), opts.get("k_step", 0.01)
        if not (step > 0 and k_max >= k_min):
            raise UsageError("empty or invalid k range")
        ks = np.round(np.arange(k_max, k_min - 0.5 * step, -step), 12)
        rep = bimodality_scan(lam, ks, opts.get("hbar", 1.0), opts.get("basis_size", 250))
        return _json(asdict(rep))
    params = _params(opts)
    res = eigensolve(None, BasisSpec(opts.get("basis_size", 250), default_basis_frequency(params)), params)
    q = density_grid(params)
    rho = ground_density(res, q, params.hbar)
    return "q,density\n" + "".join(f"{a:.12g},{b:.12g}\n" for a, b in zip(q, rho))


def cmd_qmt(opts):
    params = _params(opts)
    r = quantum_metric(params, opts.get("basis_size", 250), opts.get("M", 60))
    return _json({"g11": r.metric.g11, "g12": r.metric.g12, "g22": r.metric.g22, "det": r.metric.det,
                  "tail": r.tail})


def cmd_cmt_numeric(opts):
    params = _params(opts)
    I = opts.get("action", printed_f()[1] * params.hbar)
    well = opts.get("well", "left")
    m = classical_metric(I, params, well)
    w = omega_of_action(I, params, well if params.k < 0 else None)
    return _json({"action": I, "omega": w, "g11": m.g11, "g12": m.g12, "g22": m.g22, "det": m.det})


def cmd_cmt_series(opts):
    params = _params(opts)
    branch = "k_positive" if params.k > 0 else "k_negative"
    s = eval_cmt_series(branch, params.k, params.lam, params.hbar, I=opts.get("action"))
    m = s.metric
    return _json({"g11": m.g11, "g12": m.g12, "g22": m.g22, "det": m.det, "tail": s.tail})


def cmd_cpt_dump(opts):
    if opts.get("k") is None or opts["k"] == 0:
        raise UsageError("--k with a nonzero value selects the branch")
    spec = BranchSpec.for_k(opts["k"], opts.get("order"))
    if opts.get("tables"):
        tabs = cmt_series_assemble(spec)
        return _json({c: [float(v) for v in vals] for c, vals in tabs.items()})
    return dump(spec)


def cmd_curvature(opts):
    params = _params(opts)
    kind = opts.get("kind", "quantum")
    return _json({"kind": kind, "R": eval_curvature_series(kind, params.k, params.lam, params.hbar)})


_SWEEP_KEYS = {"mode": "mode", "k": "k", "lam": "lam", "k_min": "k_min", "k_max": "k_max", "k_step": "k_step",
               "lambda_min": "lam_min", "lambda_max": "lam_max", "lambda_step": "lam_step", "hbar": "hbar",
               "tolerance": "tolerance", "basis_size": "basis_size", "M": "M", "order": "order",
               "workers": "workers", "engines": "engines"}


def _sweep_config(opts) -> harness.SweepConfig:
    kw = {_SWEEP_KEYS[k]: v for k, v in opts.items() if k in _SWEEP_KEYS}
    if isinstance(kw.get("engines"), str):
        kw["engines"] = tuple(e.strip() for e in kw["engines"].split(",") if e.strip())
    try:
        return harness.SweepConfig.from_dict(kw)
    except (DomainError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_sweep(opts):
    return harness.run_sweep(_sweep_config(opts)).to_csv()


def cmd_landmarks(opts):
    cfg = _sweep_config(opts)
    if cfg.mode == "grid":
        raise UsageError("landmarks need --mode k_sweep or lambda_sweep")
    result = harness.run_sweep(cfg)
    cols = opts.get("columns")
    items = harness.landmarks(result, tuple(cols.split(","))) if cols else harness.landmarks(result)
    return harness.landmarks_json(items)


def cmd_compare(opts):
    params = _params(opts)
    rep = harness.compare(params, opts.get("M", 8), opts.get("action"), opts.get("basis_size", 250))
    return rep.to_json() if opts.get("format", "json") == "json" else rep.to_csv()


def cmd_fit_f(opts):
    fa = fit_f_alpha(hbar=opts.get("hbar", 1.0))
    printed = printed_f()
    return _json({str(p): {"fit": v, "printed": printed.f.get(p), "candidates": list(fa.candidates.get(p, ()))}
                  for p, v in fa.f.items()})


COMMANDS = {"spectrum": cmd_spectrum, "density": cmd_density, "qmt": cmd_qmt, "cmt-numeric": cmd_cmt_numeric,
            "cmt-series": cmd_cmt_series, "cpt-dump": cmd_cpt_dump, "curvature": cmd_curvature,
            "sweep": cmd_sweep, "landmarks": cmd_landmarks, "compare": cmd_compare, "fit-f": cmd_fit_f}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        opts = _merge(args)
        _emit(COMMANDS[args.command](opts), opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, PairingError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DomainError, GridError, SeriesOrderError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
