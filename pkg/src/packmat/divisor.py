"""Picard lattice of the blow-up of CP^2 at k points.

A class ``(a; b_1, ..., b_k)`` stands for ``aH - sum b_i E_i``.  The
intersection form is ``diag(1, -1, ..., -1)``.  Ball weights enter with
positive ``b_i``, so the canonical class is ``(-3; -1, ..., -1)``.

All data is expressed in units where the line class has area pi; the
factor pi is divided out everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import as_fraction, fraction_to_str, parse_fraction

__all__ = [
    "DivisorClass",
    "RealDivisorClass",
    "DimensionError",
    "intersect",
    "canonical_class",
    "anticanonical_class",
    "line_class",
    "exceptional_divisor",
    "blowup_class",
]


class DimensionError(ValueError):
    """Two classes live on blow-ups at different numbers of points."""


@dataclass(frozen=True, order=True)
class DivisorClass:
    a: int
    b: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        object.__setattr__(self, "a", int(self.a))

    @property
    def k(self) -> int:
        return len(self.b)

    def self_intersection(self) -> int:
        return intersect(self, self)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(-self.a, tuple(-x for x in self.b))

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        _check_dims(self, other)
        return DivisorClass(self.a + other.a, tuple(x + y for x, y in zip(self.b, other.b)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def to_json(self) -> dict:
        return {"a": self.a, "b": list(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> "DivisorClass":
        return cls(int(obj["a"]), tuple(int(x) for x in obj["b"]))

    def __str__(self) -> str:
        return f"({self.a};{','.join(str(x) for x in self.b)})"


@dataclass(frozen=True)
class RealDivisorClass:
    """Class with rational coefficients, e.g. the blow-up class of a ball packing."""

    a: Fraction
    b: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", tuple(as_fraction(x) for x in self.b))

    @property
    def k(self) -> int:
        return len(self.b)

    def self_intersection(self) -> Fraction:
        return intersect(self, self)

    def scaled(self, t) -> "RealDivisorClass":
        t = as_fraction(t)
        return RealDivisorClass(self.a * t, tuple(x * t for x in self.b))

    def to_json(self) -> dict:
        return {"a": fraction_to_str(self.a), "b": [fraction_to_str(x) for x in self.b]}

    @classmethod
    def from_json(cls, obj: dict) -> "RealDivisorClass":
        return cls(parse_fraction(str(obj["a"])), tuple(parse_fraction(str(x)) for x in obj["b"]))


def _check_dims(c, d) -> None:
    if len(c.b) != len(d.b):
        raise DimensionError(f"classes on blow-ups at {len(c.b)} and {len(d.b)} points")


def intersect(c, d):
    """``a a' - sum b_i b_i'`` for integer or rational classes."""
    _check_dims(c, d)
    return c.a * d.a - sum(x * y for x, y in zip(c.b, d.b))


def canonical_class(k: int) -> DivisorClass:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return DivisorClass(-3, (-1,) * k)


def anticanonical_class(k: int) -> DivisorClass:
    return -canonical_class(k)


def line_class(k: int) -> DivisorClass:
    return DivisorClass(1, (0,) * k)


def exceptional_divisor(i: int, k: int) -> DivisorClass:
    """``E_i`` (0-based slot ``i``), stored as ``(0; 0, ..., -1, ..., 0)``."""
    if not 0 <= i < k:
        raise IndexError(f"slot {i} out of range for k={k}")
    return DivisorClass(0, tuple(-1 if j == i else 0 for j in range(k)))


def blowup_class(weights: Sequence) -> RealDivisorClass:
    """Class ``H - sum u_i E_i`` of the blow-up at balls of squared radii ``u_i``."""
    u = tuple(as_fraction(x) for x in weights)
    for x in u:
        if x <= 0:
            raise ValueError(f"weights must be positive, got {x}")
    return RealDivisorClass(Fraction(1), u)
