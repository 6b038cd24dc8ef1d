"""Tabulated perturbative series for the metrics and curvatures.

Coefficients are read from ``data/coefficients.txt``. Each entry is kept
both as the printed significand/scale pair and as a float.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import DomainError
from .qmt import MetricValue

COMPONENTS = ("11", "12", "22")
# power of the action multiplying alpha = 0 in each classical component
_CMT_POS_IPOW = {"11": 2, "12": 3, "22": 4}
_CMT_NEG_IPOW = {"11": 1, "12": 1, "22": 1}


@dataclass(frozen=True)
class CoefficientTable:
    """One family of coefficients, indexed by ``(component, alpha)``."""

    kind: str
    printed: dict = field(default_factory=dict)  # (comp, alpha) -> (significand, scale) strings

    def value(self, comp: str, alpha: int) -> float:
        sig, scale = self.printed[(comp, alpha)]
        return float(Decimal(sig) * Decimal(scale))

    def series(self, comp: str) -> np.ndarray:
        alphas = sorted(a for c, a in self.printed if c == comp)
        return np.array([self.value(comp, a) for a in alphas])

    def components(self) -> list[str]:
        return sorted({c for c, _ in self.printed})


def _parse(text: str) -> dict[str, CoefficientTable]:
    tables: dict[str, dict] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, comp, alpha, sig, scale = line.split()
        tables.setdefault(kind, {})[(comp, int(alpha))] = (sig, scale)
    return {k: CoefficientTable(k, v) for k, v in tables.items()}


@lru_cache(maxsize=1)
def load_tables() -> dict[str, CoefficientTable]:
    text = resources.files("quartic_geometry").joinpath("data/coefficients.txt").read_text()
    return _parse(text)


def table(kind: str) -> CoefficientTable:
    return load_tables()[kind]


@dataclass(frozen=True)
class FAlpha:
    """Identification numbers ``f_p`` with ``I^p -> (f_p hbar)^p``."""

    f: dict
    candidates: dict = field(default_factory=dict)

    def __getitem__(self, p: int) -> float:
        return self.f[p]


def printed_f() -> FAlpha:
    t = table("f")
    return FAlpha({a: t.value("-", a) for _, a in t.printed})


@dataclass(frozen=True)
class SeriesMetric:
    """Metric from a truncated series plus the size of the last term kept."""

    metric: MetricValue
    last_term: tuple
    tail: float


def _alternating(coeffs: np.ndarray, x: float, sign: int = -1) -> tuple[float, float]:
    terms = coeffs * (sign * x) ** np.arange(len(coeffs))
    return float(terms.sum()), float(terms[-1])


def _summarize(values, lasts) -> SeriesMetric:
    tail = max((abs(l / v) if v else 0.0) for v, l in zip(values, lasts))
    return SeriesMetric(MetricValue(*map(float, values)), tuple(abs(float(l)) for l in lasts), float(tail))


def eval_qmt_series(k: float, lam: float, hbar: float = 1.0) -> SeriesMetric:
    """Quantum metric from the ``a`` coefficients (``k > 0`` only)."""
    if not k > 0:
        raise DomainError("quantum metric series requires k > 0")
    x = hbar * lam / k**1.5
    if x > 0.5:
        warnings.warn(f"expansion parameter {x:.3g} is large; series unreliable", stacklevel=2)
    a = table("a")
    pref = {"11": 1.0 / k**2, "12": hbar / k**2.5, "22": hbar**2 / k**3}
    values, lasts = [], []
    for comp in COMPONENTS:
        s, last = _alternating(a.series(comp), x)
        values.append(pref[comp] * s)
        lasts.append(pref[comp] * last)
    return _summarize(values, lasts)


def eval_cmt_series(branch: str, k: float, lam: float, hbar: float = 1.0, I: float | None = None,
                    f: FAlpha | None = None) -> SeriesMetric:
    """Classical metric from the ``b`` (``k > 0``) or ``c`` (``k < 0``) coefficients.

    With ``I`` given the action enters literally. Otherwise every power
    ``I^p`` is replaced by ``(f_p hbar)^p`` using ``f`` (default: the
    tabulated identification numbers).
    """
    if branch not in ("k_positive", "k_negative"):
        raise DomainError(f"unknown branch {branch!r}")
    if (branch == "k_positive") != (k > 0) or k == 0:
        raise DomainError(f"branch {branch} is inconsistent with k = {k}")
    if I is None and f is None:
        f = printed_f()
    kk = abs(k)
    values, lasts = [], []
    for comp in COMPONENTS:
        if branch == "k_positive":
            coeffs = table("b").series(comp)
            p0 = _CMT_POS_IPOW[comp]
            pref = {"11": 1.0 / kk**2, "12": 1.0 / kk**2.5, "22": 1.0 / kk**3}[comp]
            sign = -1.0
        else:
            coeffs = table("c").series(comp)
            p0 = _CMT_NEG_IPOW[comp]
            pref = {"11": 1.0 / (kk**0.5 * lam), "12": kk**0.5 / lam**2, "22": kk**1.5 / lam**3}[comp]
            sign = 1.0
        y = lam / kk**1.5
        terms = []
        for alpha, c in enumerate(coeffs):
            p = p0 + alpha
            ip = I**p if I is not None else (f[p] * hbar) ** p
            terms.append(c * (sign * y) ** alpha * ip)
        values.append(pref * math.fsum(terms))
        lasts.append(pref * terms[-1])
    return _summarize(values, lasts)


def eval_curvature_series(kind: str, k: float, lam: float, hbar: float = 1.0) -> float:
    """Scalar curvature series.

    ``kind='quantum'`` (``k > 0``): ``sum (-1)^(alpha+1) d_alpha x^alpha``;
    ``kind='classical'``: ``sum (-1)^(alpha+1) h_alpha x^alpha`` for ``k > 0``
    and ``sum l_alpha x^alpha`` for ``k < 0``; ``x = hbar lam / |k|^1.5``.
    """
    if k == 0:
        raise DomainError("curvature series are singular at k = 0")
    x = hbar * lam / abs(k) ** 1.5
    if kind == "quantum":
        if k < 0:
            raise DomainError("quantum curvature series requires k > 0")
        c = table("d").series("R")
        return float(np.sum(-c * (-x) ** np.arange(len(c))))
    if kind == "classical":
        if k > 0:
            c = table("h").series("R")
            return float(np.sum(-c * (-x) ** np.arange(len(c))))
        c = table("l").series("R")
        return float(np.sum(c * x ** np.arange(len(c))))
    raise DomainError(f"unknown curvature kind {kind!r}")


def fit_f_alpha(table_a: CoefficientTable | None = None, table_b: CoefficientTable | None = None,
                hbar: float = 1.0) -> FAlpha:
    """Identification numbers from matching ``hbar^2 g`` with the classical metric.

    Component ``11`` at order ``alpha`` gives ``I^(alpha+2) = hbar^(alpha+2) a/b``,
    ``12`` gives ``I^(alpha+3)`` and ``22`` gives ``I^(alpha+4)``. Each ratio
    yields a candidate ``f_p = (I^p)^(1/p) / hbar``; ``f_p`` is the mean of
    all candidates for ``p``. ``f_1 = 1/2`` is a convention (``I = hbar/2``
    for the ground state); no relation fixes it.
    """
    table_a = table_a or table("a")
    table_b = table_b or table("b")
    shift = {"11": 2, "12": 3, "22": 4}
    cands: dict[int, list[float]] = {}
    for comp in COMPONENTS:
        a, b = table_a.series(comp), table_b.series(comp)
        for alpha in range(min(len(a), len(b))):
            p = alpha + shift[comp]
            ip = hbar**p * a[alpha] / b[alpha]
            cands.setdefault(p, []).append(ip ** (1.0 / p) / hbar)
    f = {1: 0.5}
    f.update({p: float(np.mean(v)) for p, v in sorted(cands.items())})
    return FAlpha(f, {p: tuple(v) for p, v in sorted(cands.items())})


def perturbative_groundstate(q, k: float, lam: float, order: int = 4):
    """Unnormalized ground state expanded to ``lam^order`` (``order <= 4``)."""
    if not k > 0:
        raise DomainError("perturbative ground state requires k > 0")
    if not 0 <= order <= 4:
        raise DomainError("order must be between 0 and 4")
    q = np.asarray(q, dtype=float)
    r = math.sqrt(k)
    q2 = q * q
    p1 = r * q2 + 3
    p2 = 3 * k**1.5 * q2**3 + 26 * k * q2**2 + 93 * r * q2 + 252
    p3 = k**2.5 * q2**5 + 141 * k**1.5 * q2**3 + 17 * k**2 * q2**4 + 813 * k * q2**2 + 2916 * r * q2 + 7992
    p4 = (3 * k**3.5 * q2**7 + 1198 * k**2.5 * q2**5 + 82755 * k**1.5 * q2**3 + 84 * k**3 * q2**6
          + 11748 * k**2 * q2**4 + 443064 * k * q2**2 + 1599552 * r * q2 + 4447440)
    corrections = [
        -lam * q2 * p1 / (96 * k),
        lam**2 * q2 * p2 / (55296 * k**2.5),
        -(lam**3) * q2 * p3 / (5308416 * k**4),
        lam**4 * q2 * p4 / (6115295232 * k**5.5),
    ]
    return np.exp(-r * q2 / 2) * (1 + sum(corrections[:order]))
