"""Parameter sequences, the curve family, and exact intersection numbers.

A run is configured by a rational ``epsilon`` in (0, 1/2) and a finite
prefix of positive integer twist powers ``r_1, ..., r_L`` subject to the
growth constraints ``1/epsilon <= r_1`` and ``r_i <= epsilon * r_{i+1}``.
Curve ``i`` of the family (``i >= 2``) is carried by the track with weight
vector ``M(r_1) ... M(r_{i-2}) * v2 = M(r_1) ... M(r_{i-3}) * v3``; curves
0 and 1 cross the track efficiently instead.

Intersection numbers between family curves reduce to entry sums of the
matrix products and are computed here exactly, together with the
comparability ratios against the product of doubled twist powers and the
two growth conditions used by the timeline analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .traintrack import (
    CURVE2_WEIGHTS,
    CURVE3_WEIGHTS,
    IDENTITY,
    EfficientCurve,
    Mat,
    WeightVector,
    mat_mul,
    mat_vec,
    twist_matrix,
)


class SequenceValidationError(ValueError):
    """Raised with the full list of violated constraints and their indices."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class RSequence:
    """A validated twist-power sequence prefix with its epsilon.

    ``r`` is 1-indexed through :meth:`r_at`.  The even curves of the family
    (indices 2t) twist ``even_twist(t) = r_{2t-1}`` times, the odd curves
    (indices 2t+1) twist ``odd_twist(t) = r_{2t}`` times, with
    ``odd_twist(0) = 1`` by convention.
    """

    epsilon: Fraction
    r: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.r)

    @property
    def max_curve(self) -> int:
        """Largest family index with a computable carried weight vector."""
        return self.length + 2

    def r_at(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise IndexError(f"r_{i} is outside the configured prefix (length {self.length})")
        return self.r[i - 1]

    def even_twist(self, t: int) -> int:
        """Twist count of even-family curve t (sequence position 2t-1)."""
        return self.r_at(2 * t - 1)

    def odd_twist(self, t: int) -> int:
        """Twist count of odd-family curve t (position 2t; 1 for t = 0)."""
        if t == 0:
            return 1
        return self.r_at(2 * t)

    @property
    def max_even_family(self) -> int:
        return (self.length + 1) // 2

    @property
    def max_odd_family(self) -> int:
        return self.length // 2


def validate_sequence(epsilon: Fraction | int | str, r: Sequence[int]) -> RSequence:
    """Check the growth constraints exactly and return the validated sequence.

    Violations are collected (not first-failure) and raised together in a
    :class:`SequenceValidationError`.
    """
    eps = Fraction(epsilon)
    violations: list[str] = []
    if not Fraction(0) < eps < Fraction(1, 2):
        violations.append("epsilon out of range")
    rs = tuple(int(x) for x in r)
    if len(rs) < 8:
        violations.append("sequence prefix must have length >= 8")
    for i, x in enumerate(rs, start=1):
        if x < 1:
            violations.append(f"r_{i} must be a positive integer")
    if not violations:
        if Fraction(1, 1) / eps > rs[0]:
            violations.append("growth violated at 1: 1/epsilon > r_1")
        for i in range(1, len(rs)):
            if rs[i - 1] > eps * rs[i]:
                violations.append(f"growth violated at {i}: r_{i} > epsilon * r_{i + 1}")
        # implied bound, checked exactly as a guard against bad arithmetic
        for i in range(1, len(rs) + 1):
            if Fraction(1, rs[i - 1]) > eps**i:
                violations.append(f"derived bound violated at {i}: 1/r_{i} > epsilon^{i}")
    if violations:
        raise SequenceValidationError(violations)
    return RSequence(eps, rs)


def geometric_sequence(base: int, length: int, epsilon: Fraction | int | str) -> RSequence:
    """The family ``r_i = base**i``, valid whenever ``base >= 1/epsilon``."""
    return validate_sequence(epsilon, tuple(base**i for i in range(1, length + 1)))


@dataclass(frozen=True)
class CurveIndex:
    """Position of a curve in the family, with its parity bookkeeping."""

    i: int

    def __post_init__(self) -> None:
        if self.i < 0:
            raise ValueError("curve index must be nonnegative")

    @property
    def parity(self) -> str:
        return "even" if self.i % 2 == 0 else "odd"

    @property
    def family_position(self) -> int:
        """t such that the curve is even-family t (i = 2t) or odd-family t."""
        return self.i // 2

    @classmethod
    def even(cls, t: int) -> "CurveIndex":
        return cls(2 * t)

    @classmethod
    def odd(cls, t: int) -> "CurveIndex":
        return cls(2 * t + 1)

    def label(self) -> str:
        return f"{self.parity}[{self.family_position}]"


@lru_cache(maxsize=None)
def _twist_product(seq: RSequence, lo: int, hi: int) -> Mat:
    """Product M(r_lo) M(r_lo+1) ... M(r_hi); identity when lo > hi."""
    if lo > hi:
        return IDENTITY
    if lo == hi:
        return twist_matrix(seq.r_at(lo)).entries
    return mat_mul(_twist_product(seq, lo, hi - 1), twist_matrix(seq.r_at(hi)).entries)


def curve_weights(seq: RSequence, i: int) -> WeightVector:
    """Exact branch weights of family curve ``i`` (``2 <= i <= length + 2``).

    Both defining products (acting on the second and on the third seed
    vector) are evaluated and must agree exactly.
    """
    if i < 2:
        raise ValueError("curves 0 and 1 are not carried; use EfficientCurve crossings")
    if i > seq.max_curve:
        raise IndexError(f"curve {i} needs a longer sequence prefix (max {seq.max_curve})")
    if i == 2:
        return CURVE2_WEIGHTS
    if i == 3:
        return CURVE3_WEIGHTS
    via_v2 = mat_vec(_twist_product(seq, 1, i - 2), CURVE2_WEIGHTS.entries)
    via_v3 = mat_vec(_twist_product(seq, 1, i - 3), CURVE3_WEIGHTS.entries)
    if via_v2 != via_v3:
        raise AssertionError(f"dual defining products disagree for curve {i}")
    return WeightVector(via_v2)


def intersection(seq: RSequence, j: int, k: int, *, allow_small_gap: bool = False) -> int:
    """Exact geometric intersection number of family curves ``j < k``.

    Consecutive curves are disjoint, curves two apart meet twice, and for
    gaps of at least four the number is twice an entry sum of the matrix
    product between the two indices.  The gap-3 value is not part of the
    validated contract; ``allow_small_gap=True`` returns the same entry-sum
    expression for it, which callers must flag as an unvalidated small case.
    """
    if j < 0 or k <= j:
        raise ValueError("need 0 <= j < k")
    gap = k - j
    if gap == 1:
        return 0
    if gap == 2:
        return 2
    if gap == 3 and not allow_small_gap:
        raise ValueError(f"small case unvalidated: intersection ({j}, {k}) has gap 3")
    if k - 3 > seq.length:
        raise IndexError(f"curve {k} needs a longer sequence prefix")
    if j == 0:
        # crossing vector of curve 0 selects rows 2,3 of the product from r_1
        prod = _twist_product(seq, 1, k - 3)
        rows = (1, 2)
    else:
        # crossing vector of curve 1, shifted by j-1, selects rows 4,5
        prod = _twist_product(seq, j, k - 3)
        rows = (3, 4)
    return 2 * sum(prod[s][t] for s in rows for t in (2, 3))


def marking_intersection(seq: RSequence, j: int, k: int) -> int:
    """Intersection of the four-curve marking at ``j`` with curve ``k``.

    The marking consists of curves j..j+3; additivity makes the number a
    four-term sum.  Requires ``k >= j + 7`` so that every summand is in the
    validated gap range.
    """
    if k < j + 7:
        raise ValueError("marking sum needs k >= j+7")
    return sum(intersection(seq, t, k) for t in range(j, j + 4))


def mu_intersection(seq: RSequence, k: int, *, allow_small_gap: bool = False) -> int:
    """Intersection of the base marking (curves 0..3) with curve ``k``.

    For ``4 <= k <= 6`` one summand has gap 3; with ``allow_small_gap`` the
    unvalidated candidate value is used and the caller is expected to flag
    the result.
    """
    if k >= 7:
        return marking_intersection(seq, 0, k)
    if k < 4:
        raise ValueError("marking sum needs k >= 4")
    if not allow_small_gap:
        raise ValueError("marking sum needs k >= j+7")
    return sum(intersection(seq, t, k, allow_small_gap=True) for t in range(0, 4))


def doubled_twist_product(seq: RSequence, j: int, k: int) -> int:
    """The reference product of doubled twist powers for the pair (j, k).

    Runs over positions ``i = j, j+2, ..., k-4`` with factor ``2 r_{i+1}``;
    empty (1) when ``k = j + 2``.
    """
    if (k - j) % 2 != 0 or k < j + 2:
        raise ValueError("reference product needs j == k (mod 2) and k >= j+2")
    out = 1
    for i in range(j, k - 3, 2):
        out *= 2 * seq.r_at(i + 1)
    return out


def comparability_report(seq: RSequence, j: int, k: int) -> Fraction:
    """Exact ratio of the intersection number to its reference product."""
    return Fraction(intersection(seq, j, k), doubled_twist_product(seq, j, k))


def comparability_series(seq: RSequence, j: int, k_max: int) -> list[tuple[int, Fraction]]:
    """Ratios for all same-parity ``k`` with ``j + 2 <= k <= k_max``."""
    return [
        (k, comparability_report(seq, j, k))
        for k in range(j + 2, k_max + 1, 2)
    ]


@dataclass(frozen=True)
class GrowthVerdict:
    """Exact evaluation of the two growth conditions over the prefix.

    ``interleaving`` is the chain
    ``prod(n_j/m_{j-1}) <= prod(m_j/n_j) <= prod up to i+1`` per index;
    the decay ratios divide the next step ratio by the accumulated product
    and should fall monotonically below the threshold.
    """

    indices: tuple[int, ...]
    even_products: tuple[Fraction, ...]  # prod_{j<=i} n_j / m_{j-1}
    odd_products: tuple[Fraction, ...]  # prod_{j<=i} m_j / n_j
    interleaving: tuple[bool, ...]
    interleaving_onset: int | None
    decay_even: tuple[Fraction, ...]  # (m_{i+1}/n_{i+1}) / even_product(i)
    decay_odd: tuple[Fraction, ...]  # (n_{i+2}/m_{i+1}) / odd_product(i)
    decay_even_ok: bool
    decay_odd_ok: bool
    threshold: Fraction

    @property
    def interleaving_ok(self) -> bool:
        return self.interleaving_onset is not None

    @property
    def all_ok(self) -> bool:
        return self.interleaving_ok and self.decay_even_ok and self.decay_odd_ok

    def even_product(self, i: int) -> Fraction:
        return self.even_products[i - 1]

    def odd_product(self, i: int) -> Fraction:
        return self.odd_products[i - 1]


def _monotone_decay(values: Sequence[Fraction], threshold: Fraction) -> bool:
    if not values:
        return False
    decreasing = all(values[t + 1] < values[t] for t in range(len(values) - 1))
    return decreasing and values[-1] < threshold


def growth_check(seq: RSequence, threshold: Fraction = Fraction(1, 1000)) -> GrowthVerdict:
    """Evaluate both growth conditions in exact rationals over the prefix."""
    i_n = seq.max_even_family
    i_m = seq.max_odd_family
    i_top = min(i_n, i_m)
    evens: list[Fraction] = []
    odds: list[Fraction] = []
    acc_e = Fraction(1)
    acc_o = Fraction(1)
    for i in range(1, i_top + 1):
        acc_e *= Fraction(seq.even_twist(i), seq.odd_twist(i - 1))
        acc_o *= Fraction(seq.odd_twist(i), seq.even_twist(i))
        evens.append(acc_e)
        odds.append(acc_o)

    # interleaving at i compares against the even product at i+1, which
    # needs n_{i+1} (and m_i, already implied by i <= i_top)
    inter: list[bool] = []
    for i in range(1, min(i_top, i_n - 1) + 1):
        if i < i_top:
            a_next = evens[i]
        else:
            a_next = evens[i - 1] * Fraction(seq.even_twist(i + 1), seq.odd_twist(i))
        inter.append(evens[i - 1] <= odds[i - 1] <= a_next)
    onset: int | None = None
    for i in range(len(inter), 0, -1):
        if not inter[i - 1]:
            break
        onset = i
    decay_e = tuple(
        Fraction(seq.odd_twist(i + 1), seq.even_twist(i + 1)) / evens[i - 1]
        for i in range(1, min(i_n - 1, i_m - 1) + 1)
    )
    decay_o = tuple(
        Fraction(seq.even_twist(i + 2), seq.odd_twist(i + 1)) / odds[i - 1]
        for i in range(1, min(i_n - 2, i_m - 1) + 1)
    )
    return GrowthVerdict(
        indices=tuple(range(1, i_top + 1)),
        even_products=tuple(evens),
        odd_products=tuple(odds),
        interleaving=tuple(inter),
        interleaving_onset=onset,
        decay_even=decay_e,
        decay_odd=decay_o,
        decay_even_ok=_monotone_decay(decay_e, threshold),
        decay_odd_ok=_monotone_decay(decay_o, threshold),
        threshold=threshold,
    )


def seed_curve(i: int) -> EfficientCurve:
    """The efficient crossing data of family curve 0 or 1."""
    return EfficientCurve.for_index(i)
