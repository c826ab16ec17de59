"""
exact.py - Exact arithmetic shared by every lacuna module

Rationals travel as fractions.Fraction and are written "p/q" in reports and on
the command line. Square roots never become floats: a value c·√r is carried
as a Surd and compared through squares.
"""

from fractions import Fraction
from typing import Annotated, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer

from errors import BadParameter

RationalLike = Union[Fraction, int, str]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse "p/q", an integer or a decimal literal such as ".01" exactly.

    Floats are refused: they would smuggle rounding into an exact verdict.
    """
    if isinstance(value, bool):
        raise BadParameter(f"not a rational: {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise BadParameter(f"not a rational: {value!r}") from exc
    raise BadParameter(f"not a rational (use \"p/q\"): {value!r}")


def _validate_rational(value):
    try:
        return parse_rational(value)
    except BadParameter as exc:
        raise ValueError(str(exc)) from exc


def render_rational(value: Fraction) -> str:
    return str(Fraction(value))


# Pydantic field type: accepts "p/q" / int / Fraction, serializes as "p/q".
Rational = Annotated[
    Fraction,
    BeforeValidator(_validate_rational),
    PlainSerializer(render_rational, return_type=str),
]


class Surd(BaseModel):
    """The nonnegative real coefficient·√radicand, kept symbolic."""

    model_config = ConfigDict(frozen=True)

    coefficient: Rational
    radicand: int = 1

    def squared(self) -> Fraction:
        return self.coefficient * self.coefficient * self.radicand

    def __mul__(self, other: Union["Surd", Fraction, int]) -> "Surd":
        if isinstance(other, Surd):
            return Surd(
                coefficient=self.coefficient * other.coefficient,
                radicand=self.radicand * other.radicand,
            )
        return Surd(coefficient=self.coefficient * Fraction(other), radicand=self.radicand)

    __rmul__ = __mul__

    def __truediv__(self, other: Union[Fraction, int]) -> "Surd":
        return Surd(coefficient=self.coefficient / Fraction(other), radicand=self.radicand)

    def _square_of(self, other: Union["Surd", Fraction, int]) -> Fraction:
        if isinstance(other, Surd):
            return other.squared()
        other = Fraction(other)
        if other < 0:
            raise BadParameter("Surd comparisons are defined for nonnegative values only")
        return other * other

    # Both sides are nonnegative, so squaring preserves order.
    def __lt__(self, other):
        return self.squared() < self._square_of(other)

    def __le__(self, other):
        return self.squared() <= self._square_of(other)

    def __gt__(self, other):
        return self.squared() > self._square_of(other)

    def __ge__(self, other):
        return self.squared() >= self._square_of(other)

    def __str__(self) -> str:
        if self.radicand == 1:
            return str(self.coefficient)
        return f"{self.coefficient}*sqrt({self.radicand})"
