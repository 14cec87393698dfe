"""Trapezoidal fuzzy sets, linguistic variables, quantifiers and sigma-count truth."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidArgument, UndefinedTruth

Membership = Callable[[float], float]

UNITS = ("seconds", "ratio", "count")


@dataclass(frozen=True)
class FuzzySet:
    """Trapezoid ``a <= b <= c <= d``: 0 outside [a, d], 1 on [b, c], linear in between."""

    label: str
    a: float
    b: float
    c: float
    d: float
    units: str = "ratio"

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d):
            raise InvalidArgument(
                f"fuzzy set {self.label!r}: need a <= b <= c <= d, got "
                f"({self.a}, {self.b}, {self.c}, {self.d})"
            )
        if self.units not in UNITS:
            raise InvalidArgument(f"fuzzy set {self.label!r}: unknown units {self.units!r}")

    @property
    def params(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x: float) -> float:
        return membership(self, x)


def membership(s: FuzzySet, x: float) -> float:
    if s.b <= x <= s.c:
        return 1.0
    if x <= s.a or x >= s.d:
        return 0.0
    if x < s.b:
        return (x - s.a) / (s.b - s.a)
    return (s.d - x) / (s.d - s.c)


def around(value: float, label: str | None = None, units: str = "seconds") -> FuzzySet:
    """The auto-centred hedge "around v": trapezoid (0.9v, 0.97v, 1.03v, 1.1v)."""
    v = abs(value)
    lo, hi = value - 0.1 * v, value + 0.1 * v
    return FuzzySet(
        label or f"around {value:g}",
        lo, value - 0.03 * v, value + 0.03 * v, hi,
        units,
    )


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    units: str
    terms: tuple[FuzzySet, ...]

    def __post_init__(self):
        labels = [t.label for t in self.terms]
        if len(set(labels)) != len(labels):
            raise InvalidArgument(f"variable {self.name!r}: duplicate term labels")
        for t in self.terms:
            if t.units != self.units:
                raise InvalidArgument(
                    f"variable {self.name!r}: term {t.label!r} is in {t.units}, not {self.units}"
                )
            if self.units == "ratio" and (t.a < 0 or t.d > 1):
                raise InvalidArgument(f"variable {self.name!r}: term {t.label!r} leaves [0, 1]")
            if self.units in ("seconds", "count") and t.a < 0:
                raise InvalidArgument(f"variable {self.name!r}: term {t.label!r} is negative")

    def term(self, label: str) -> FuzzySet:
        for t in self.terms:
            if t.label == label:
                return t
        raise KeyError(label)


class Monotone(str, enum.Enum):
    NON_DECREASING = "non-decreasing"
    NON_INCREASING = "non-increasing"
    UNIMODAL = "unimodal"


def _shape_monotonicity(s: FuzzySet) -> Monotone:
    if s.c >= 1.0:
        return Monotone.NON_DECREASING
    if s.b <= 0.0:
        return Monotone.NON_INCREASING
    return Monotone.UNIMODAL


@dataclass(frozen=True)
class Quantifier:
    """A relative quantifier: a fuzzy set over proportions in [0, 1]."""

    label: str
    shape: FuzzySet
    monotone: Monotone | None = None
    kind: str = "relative"

    def __post_init__(self):
        if self.kind != "relative":
            raise InvalidArgument(f"quantifier {self.label!r}: only relative quantifiers are supported")
        if self.shape.a < 0 or self.shape.d > 1:
            raise InvalidArgument(f"quantifier {self.label!r}: support must lie in [0, 1]")
        actual = _shape_monotonicity(self.shape)
        if self.monotone is None:
            object.__setattr__(self, "monotone", actual)
        elif Monotone(self.monotone) != actual:
            raise InvalidArgument(
                f"quantifier {self.label!r}: declared {Monotone(self.monotone).value} "
                f"but the trapezoid is {actual.value}"
            )

    @classmethod
    def trapezoid(cls, label: str, a: float, b: float, c: float, d: float) -> "Quantifier":
        return cls(label, FuzzySet(label, a, b, c, d, "ratio"))

    def __call__(self, r: float) -> float:
        return membership(self.shape, r)


def default_quantifiers() -> list[Quantifier]:
    return [
        Quantifier.trapezoid("most", 0.5, 0.8, 1.0, 1.0),
        Quantifier.trapezoid("around half", 0.3, 0.45, 0.55, 0.7),
        Quantifier.trapezoid("few", 0.0, 0.0, 0.2, 0.5),
    ]


def truth_degree(
    q: Quantifier | Membership,
    a: Membership,
    population: Sequence[float],
    b: Membership | None = None,
) -> float:
    """Truth of "Q (B) items are A" by relative sigma-count.

    ``r = sum(min(A(x), B(x))) / sum(B(x))``, with ``B == 1`` when absent,
    and the truth is ``Q(r)``.  ``a`` and ``b`` may be fuzzy sets or any
    callable returning a degree in [0, 1]; crisp restrictions return 0 or 1.
    """
    if len(population) == 0:
        raise UndefinedTruth("empty population")
    if b is None:
        r = math.fsum(a(x) for x in population) / len(population)
    else:
        mb = [b(x) for x in population]
        denom = math.fsum(mb)
        if denom <= 0:
            raise UndefinedTruth("qualifier selects no element of the population")
        r = math.fsum(min(a(x), w) for x, w in zip(population, mb)) / denom
    return q(min(1.0, max(0.0, r)))
