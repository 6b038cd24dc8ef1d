"""Truncated trigonometric power series in the unperturbed angle.

A ``TrigSeries`` is a finite sum of terms

    c * I^pI * eps^pe * |k|^pk * {cos, sin}(m phi0)

where ``eps`` is the expansion coupling. ``order`` records the highest
power of ``eps`` that is known exactly; products and sums propagate it so
that no term beyond the reliable order is ever kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import SeriesOrderError

INF = math.inf
COS, SIN = "cos", "sin"


@dataclass(frozen=True, order=True)
class Monomial:
    """Exponents of the action, the coupling and ``|k|``."""

    pI: Fraction
    pe: int
    pk: Fraction

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.pI + other.pI, self.pe + other.pe, self.pk + other.pk)


ONE = Monomial(Fraction(0), 0, Fraction(0))


def mono(pI=0, pe=0, pk=0) -> Monomial:
    return Monomial(Fraction(pI), int(pe), Fraction(pk))


def _put(block: dict, key, value) -> None:
    new = block.get(key, 0) + value
    if new:
        block[key] = new
    else:
        block.pop(key, None)


def _product_harmonics(m1: int, k1: str, m2: int, k2: str):
    """``f1(m1 x) * f2(m2 x)`` as ``[(m, kind, weight)]`` with ``m >= 0``."""
    d, s = m1 - m2, m1 + m2
    half = Fraction(1, 2)
    if k1 == COS and k2 == COS:
        return [(abs(d), COS, half), (s, COS, half)]
    if k1 == SIN and k2 == SIN:
        return [(abs(d), COS, half), (s, COS, -half)]
    if k1 == SIN:  # sin(m1) cos(m2)
        sgn = 1 if d >= 0 else -1
        return [(s, SIN, half), (abs(d), SIN, half * sgn)]
    # cos(m1) sin(m2) = 1/2 [sin(s) - sin(d)]
    sgn = 1 if d >= 0 else -1
    return [(s, SIN, half), (abs(d), SIN, -half * sgn)]


class TrigSeries:
    """Sparse truncated series; see module docstring.

    Storage is ``{(m, kind): {Monomial: coefficient}}``. Coefficients may be
    ``Fraction``, ``Surd`` or ``float``.
    """

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order=INF):
        self.terms: dict = {}
        self.order = order
        if terms:
            for tk, block in terms.items():
                for mk, c in block.items():
                    self._add(tk, mk, c)

    # -- construction -------------------------------------------------------
    @classmethod
    def term(cls, coeff, m: int = 0, kind: str = COS, monomial: Monomial = ONE, order=INF) -> "TrigSeries":
        out = cls(order=order)
        out._add((m, kind), monomial, coeff)
        return out

    @classmethod
    def zero(cls, order=INF) -> "TrigSeries":
        return cls(order=order)

    def _add(self, tk, mk, c) -> None:
        m, kind = tk
        if m == 0 and kind == SIN:
            return
        if mk.pe > self.order:
            return
        block = self.terms.setdefault(tk, {})
        _put(block, mk, c)
        if not block:
            del self.terms[tk]

    def copy(self) -> "TrigSeries":
        out = TrigSeries(order=self.order)
        out.terms = {tk: dict(block) for tk, block in self.terms.items()}
        return out

    def items(self):
        for (m, kind), block in self.terms.items():
            for mk, c in block.items():
                yield m, kind, mk, c

    def __len__(self):
        return sum(len(b) for b in self.terms.values())

    # -- bookkeeping --------------------------------------------------------
    @property
    def lowest(self):
        """Lowest coupling power that can be nonzero."""
        powers = [mk.pe for block in self.terms.values() for mk in block]
        low = min(powers) if powers else INF
        return min(low, self.order + 1)

    @property
    def max_harmonic(self) -> int:
        return max((m for m, _ in self.terms), default=0)

    def truncate(self, order) -> "TrigSeries":
        out = TrigSeries(order=min(self.order, order))
        for tk, block in self.terms.items():
            for mk, c in block.items():
                out._add(tk, mk, c)
        return out

    def coefficient(self, pe: int) -> "TrigSeries":
        """Exact slice at ``eps^pe``."""
        if pe > self.order:
            raise SeriesOrderError(f"eps^{pe} requested but series is known only to eps^{self.order}")
        out = TrigSeries()
        for m, kind, mk, c in self.items():
            if mk.pe == pe:
                out._add((m, kind), mk, c)
        return out

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "TrigSeries":
        if not isinstance(other, TrigSeries):
            other = TrigSeries.term(other)
        out = TrigSeries(order=min(self.order, other.order))
        for src in (self, other):
            for m, kind, mk, c in src.items():
                out._add((m, kind), mk, c)
        return out

    __radd__ = __add__

    def __neg__(self) -> "TrigSeries":
        return self.scale(-1)

    def __sub__(self, other) -> "TrigSeries":
        if not isinstance(other, TrigSeries):
            other = TrigSeries.term(other)
        return self + (-other)

    def __rsub__(self, other) -> "TrigSeries":
        return (-self) + other

    def scale(self, c, monomial: Monomial = ONE) -> "TrigSeries":
        """Multiply by the scalar ``c * monomial``."""
        out = TrigSeries(order=self.order + monomial.pe)
        for tk, block in self.terms.items():
            out.terms[tk] = {mk * monomial: v * c for mk, v in block.items() if v * c}
            if not out.terms[tk]:
                del out.terms[tk]
        return out

    def __mul__(self, other) -> "TrigSeries":
        if not isinstance(other, TrigSeries):
            return self.scale(other)
        order = min(self.order + other.lowest, other.order + self.lowest)
        out = TrigSeries(order=order)
        for (m1, k1), b1 in self.terms.items():
            for (m2, k2), b2 in other.terms.items():
                prods: dict = {}
                for mk1, c1 in b1.items():
                    for mk2, c2 in b2.items():
                        if mk1.pe + mk2.pe > order:
                            continue
                        _put(prods, mk1 * mk2, c1 * c2)
                if not prods:
                    continue
                for m, kind, w in _product_harmonics(m1, k1, m2, k2):
                    if m == 0 and kind == SIN:
                        continue
                    for mk, c in prods.items():
                        out._add((m, kind), mk, c * w)
        return out

    __rmul__ = __mul__

    def power(self, j: int) -> "TrigSeries":
        out = TrigSeries.term(Fraction(1))
        for _ in range(j):
            out = out * self
        return out

    def harmonic_of_product(self, other: "TrigSeries", n: int, kind: str) -> "TrigSeries":
        """The ``kind(n phi0)`` coefficient of ``self * other`` as an angle-free series."""
        order = min(self.order + other.lowest, other.order + self.lowest)
        out = TrigSeries(order=order)
        for (m1, k1), b1 in self.terms.items():
            for (m2, k2), b2 in other.terms.items():
                if n not in (m1 + m2, abs(m1 - m2)):
                    continue
                w = sum((wt for m, kd, wt in _product_harmonics(m1, k1, m2, k2) if m == n and kd == kind),
                        Fraction(0))
                if not w:
                    continue
                for mk1, c1 in b1.items():
                    for mk2, c2 in b2.items():
                        if mk1.pe + mk2.pe <= order:
                            out._add((0, COS), mk1 * mk2, c1 * c2 * w)
        return out

    # -- calculus -----------------------------------------------------------
    def d_phi(self) -> "TrigSeries":
        out = TrigSeries(order=self.order)
        for m, kind, mk, c in self.items():
            if m == 0:
                continue
            if kind == COS:
                out._add((m, SIN), mk, -m * c)
            else:
                out._add((m, COS), mk, m * c)
        return out

    def integrate_phi(self) -> "TrigSeries":
        """Antiderivative with zero integration constant.

        Raises
        ------
        SeriesOrderError
            If the series has a nonzero angle average.
        """
        if (0, COS) in self.terms:
            raise SeriesOrderError("cannot integrate a series with nonzero mean in the angle")
        out = TrigSeries(order=self.order)
        for m, kind, mk, c in self.items():
            if kind == COS:
                out._add((m, SIN), mk, c * Fraction(1, m))
            else:
                out._add((m, COS), mk, -c * Fraction(1, m))
        return out

    def d_action(self) -> "TrigSeries":
        out = TrigSeries(order=self.order)
        for m, kind, mk, c in self.items():
            if mk.pI:
                out._add((m, kind), Monomial(mk.pI - 1, mk.pe, mk.pk), c * mk.pI)
        return out

    def mean(self) -> "TrigSeries":
        out = TrigSeries(order=self.order)
        for mk, c in self.terms.get((0, COS), {}).items():
            out._add((0, COS), mk, c)
        return out

    def oscillating(self) -> "TrigSeries":
        out = self.copy()
        out.terms.pop((0, COS), None)
        return out

    def has_zero_mean(self) -> bool:
        return (0, COS) not in self.terms

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, phi0, I: float, k_abs: float, eps: float):
        """Numeric value; ``phi0`` may be an array."""
        phi0 = np.asarray(phi0, dtype=float)
        total = np.zeros_like(phi0)
        for (m, kind), block in self.terms.items():
            amp = math.fsum(float(c) * I ** float(mk.pI) * eps**mk.pe * k_abs ** float(mk.pk)
                            for mk, c in block.items())
            total = total + amp * (np.cos(m * phi0) if kind == COS else np.sin(m * phi0))
        return total if total.ndim else float(total)

    def float_coefficients(self) -> dict:
        return {(m, kind, mk): float(c) for m, kind, mk, c in self.items()}

    def __eq__(self, other):
        if not isinstance(other, TrigSeries):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    def __repr__(self):
        return f"TrigSeries({len(self)} terms, order={self.order})"

    def dump(self) -> str:
        """One term per line: ``factor m phase pI pe pk``."""
        rows = sorted(self.items(), key=lambda t: (t[2].pe, t[0], t[1], t[2].pI, t[2].pk))
        return "\n".join(f"{c}\t{m}\t{kind}\t{mk.pI}\t{mk.pe}\t{mk.pk}" for m, kind, mk, c in rows)


def generalized_binomial(p: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out = out * (p - i) / (i + 1)
    return out


def substitute_action(series: TrigSeries, delta: TrigSeries) -> TrigSeries:
    """Replace ``I`` by ``I + delta`` using the binomial series.

    ``delta`` must start at a positive coupling power; the expansion is
    carried as far as the bookkeeping of ``delta`` allows.
    """
    if delta.lowest < 1:
        raise SeriesOrderError("action shift must be of positive order in the coupling")
    max_j = None if math.isinf(delta.order) else int(delta.order)
    by_power: dict = {}
    for m, kind, mk, c in series.items():
        part = by_power.setdefault(mk.pI, TrigSeries(order=series.order))
        part._add((m, kind), Monomial(Fraction(0), mk.pe, mk.pk), c)
    if max_j is None:
        raise SeriesOrderError("exact action shifts are not supported")
    powers = [TrigSeries.term(Fraction(1))]
    for _ in range(max_j):
        powers.append(powers[-1] * delta)
    total = TrigSeries.zero(order=INF)
    for p, part in by_power.items():
        if p == 0:
            total = total + part
            continue
        shift = TrigSeries.zero(order=INF)
        for j, dj in enumerate(powers):
            b = generalized_binomial(p, j)
            if b:
                shift = shift + dj.scale(b, Monomial(p - j, 0, Fraction(0)))
        # every omitted power delta^j (j > max_j) starts beyond the known order
        shift.order = min(shift.order, delta.order)
        total = total + part * shift
    if not by_power:
        total.order = series.order
    return total
