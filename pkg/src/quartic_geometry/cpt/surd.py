"""Exact numbers of the field ``Q(2^(1/4), 3^(1/2))``.

The double-well expansion produces factors such as ``2^(1/4)``, ``sqrt(2)``
and ``sqrt(6)``. Every such number is a rational combination of the eight
basis elements ``2^(a/4) 3^(b/2)`` with ``a in 0..3`` and ``b in 0..1``;
multiplication stays inside the field, so the whole perturbation series
can be carried exactly.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

_BASIS_FLOAT = {(a, b): 2.0 ** (a / 4.0) * 3.0 ** (b / 2.0) for a in range(4) for b in range(2)}


def _normalize(a: int, b: int) -> tuple[Fraction, tuple[int, int]]:
    qa, ra = divmod(a, 4)
    qb, rb = divmod(b, 2)
    return Fraction(2) ** qa * Fraction(3) ** qb, (ra, rb)


class Surd:
    """Element of ``Q(2^(1/4), 3^(1/2))`` stored as ``{(a, b): rational}``."""

    __slots__ = ("parts",)

    def __init__(self, value=0, a: int = 0, b: int = 0):
        self.parts: dict[tuple[int, int], Fraction] = {}
        value = Fraction(value)
        if value:
            factor, key = _normalize(a, b)
            self.parts[key] = value * factor

    @classmethod
    def _from_parts(cls, parts: dict) -> "Surd":
        out = cls.__new__(cls)
        out.parts = {k: v for k, v in parts.items() if v}
        return out

    @classmethod
    def coerce(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x)
        raise TypeError(f"cannot represent {type(x).__name__} exactly as a surd")

    def __add__(self, other):
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        parts = dict(self.parts)
        for k, v in other.parts.items():
            parts[k] = parts.get(k, 0) + v
        return Surd._from_parts(parts)

    __radd__ = __add__

    def __neg__(self):
        return Surd._from_parts({k: -v for k, v in self.parts.items()})

    def __sub__(self, other):
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            other = Fraction(other)
            return Surd._from_parts({k: v * other for k, v in self.parts.items()})
        if not isinstance(other, Surd):
            return NotImplemented
        parts: dict = {}
        for (a1, b1), v1 in self.parts.items():
            for (a2, b2), v2 in other.parts.items():
                factor, key = _normalize(a1 + a2, b1 + b2)
                parts[key] = parts.get(key, 0) + v1 * v2 * factor
        return Surd._from_parts(parts)

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        """Inverse of a single-term surd."""
        if len(self.parts) != 1:
            raise ZeroDivisionError("only single-term surds are inverted exactly")
        (a, b), v = next(iter(self.parts.items()))
        return Surd(1 / v, -a, -b)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (Fraction(1) / Fraction(other))
        return self * Surd.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Surd.coerce(other) * self.inverse()

    def __bool__(self):
        return bool(self.parts)

    def __eq__(self, other):
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(frozenset(self.parts.items()))

    def __float__(self):
        return math.fsum(float(v) * _BASIS_FLOAT[k] for k, v in self.parts.items())

    def is_rational(self) -> bool:
        return set(self.parts) <= {(0, 0)}

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        if not self.parts:
            return "0"
        pieces = []
        for (a, b), v in sorted(self.parts.items()):
            s = str(v)
            if a:
                s += f"*2^({a}/4)"
            if b:
                s += "*3^(1/2)"
            pieces.append(s)
        return " + ".join(pieces)


ROOT2 = Surd(1, 2, 0)
