"""Exact and log-domain scalars shared by every other module.

Exact integers are plain ``int`` and exact rationals are
``fractions.Fraction``: both are arbitrary precision, and ``Fraction`` is
always stored in lowest terms with a positive denominator, so the standard
library already provides the exact layer.  This module adds the two pieces
it lacks: a trichotomy helper for rationals, and a log-domain real type for
quantities whose magnitudes overflow a double (products of thousands of
twist parameters, intersection numbers with hundreds of digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

# Exact types used throughout the package. ``int`` and ``Fraction`` meet the
# closure and lowest-terms requirements natively.
BigInt = int
BigRational = Fraction

Rational = Union[int, Fraction]


def big_rational_cmp(a: Rational, b: Rational) -> int:
    """Exact three-way comparison of rationals: -1, 0 or +1.

    Fraction comparison cross-multiplies integers, so there is no rounding
    at any size.
    """
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


@dataclass(frozen=True)
class LogReal:
    """A real number stored as a sign and the natural log of its magnitude.

    Supports zero and positive values (negative magnitudes never occur in
    this package; attempts to build them raise).  Multiplication, division
    and comparison operate purely in the log domain, so values such as
    ``6**1000`` stay representable.
    """

    sign: int  # 0 or 1
    log: float  # natural log of the magnitude; -inf when sign == 0

    def __post_init__(self) -> None:
        if self.sign not in (0, 1):
            raise ValueError("LogReal supports zero and positive values only")
        if self.sign == 0 and self.log != float("-inf"):
            object.__setattr__(self, "log", float("-inf"))

    @staticmethod
    def zero() -> "LogReal":
        return LogReal(0, float("-inf"))

    @staticmethod
    def from_float(x: float) -> "LogReal":
        if x < 0:
            raise ValueError("LogReal supports zero and positive values only")
        if x == 0:
            return LogReal.zero()
        return LogReal(1, math.log(x))

    @staticmethod
    def from_int(n: int) -> "LogReal":
        if n < 0:
            raise ValueError("LogReal supports zero and positive values only")
        if n == 0:
            return LogReal.zero()
        # math.log handles arbitrary-size ints without overflow.
        return LogReal(1, math.log(n))

    @staticmethod
    def from_fraction(q: Rational) -> "LogReal":
        if isinstance(q, int):
            return LogReal.from_int(q)
        if q < 0:
            raise ValueError("LogReal supports zero and positive values only")
        if q == 0:
            return LogReal.zero()
        return LogReal(1, math.log(q.numerator) - math.log(q.denominator))

    @staticmethod
    def from_log(log: float) -> "LogReal":
        """The positive value exp(log)."""
        return LogReal(1, log)

    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self) -> float:
        """Magnitude as a double; overflows to inf, underflows to 0.0."""
        if self.sign == 0:
            return 0.0
        if self.log > 709.0:
            return float("inf")
        return math.exp(self.log)

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(1, self.log + other.log)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(1, self.log - other.log)

    def __pow__(self, exponent: float) -> "LogReal":
        if self.sign == 0:
            if exponent <= 0:
                raise ZeroDivisionError("zero to a non-positive power")
            return LogReal.zero()
        return LogReal(1, self.log * exponent)

    def sqrt(self) -> "LogReal":
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(1, self.log / 2.0)

    def _key(self) -> tuple[int, float]:
        return (self.sign, self.log if self.sign else float("-inf"))

    def __lt__(self, other: "LogReal") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "LogReal") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "LogReal") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "LogReal") -> bool:
        return self._key() >= other._key()


def log_sum(values: Iterable[LogReal]) -> LogReal:
    """Log-domain sum of positive values via the max-factored formula.

    ``log(sum_i x_i) = m + log(sum_i exp(log x_i - m))`` with ``m`` the
    largest log, which keeps every exponent non-positive and the relative
    error at double-precision level.
    """
    vals = list(values)
    if not vals:
        raise ValueError("empty sum")
    for v in vals:
        if v.sign != 1:
            raise ValueError("log_sum requires positive values")
    m = max(v.log for v in vals)
    acc = math.fsum(math.exp(v.log - m) for v in vals)
    return LogReal(1, m + math.log(acc))
