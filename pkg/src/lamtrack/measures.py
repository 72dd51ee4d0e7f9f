"""Normalized matrix products, their envelope bounds, and limit measures.

Even-step products of the normalized matrices stay entrywise bounded and
converge; normalizing the curve family by its intersection with the base
marking therefore yields two limit weight vectors, one per parity class.
These are the two ergodic transverse measures carried by the limiting
lamination, and the diagnostics here (intersection bands, divergent
measure ratios) certify that they are not proportional.

Everything in this module is exact rational arithmetic except for the
stabilization tolerances, which are converted to exact fractions before
being compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .curves import (
    CurveIndex,
    RSequence,
    curve_weights,
    intersection,
    mu_intersection,
)
from .traintrack import Mat, NormalizedMatrix, mat_mul, normalized_matrix, vec_mat


@lru_cache(maxsize=None)
def step_matrix(seq: RSequence, i: int) -> NormalizedMatrix:
    """The normalized matrix built from sequence positions (i, i+1)."""
    return normalized_matrix(seq.r_at(i), seq.r_at(i + 1), source=(i, i + 1))


@dataclass(frozen=True)
class NormalizedProduct:
    """Even-step product of normalized matrices starting at position j.

    ``length`` counts the extra factors beyond the first, so the product is
    N(j) N(j+2) ... N(j+2*length).  Entry (3,4) of the product never drops
    below 1/3 and entry (4,4) never below 1 (1-based positions); both are
    verified exactly on construction.
    """

    start: int
    length: int
    entries: Mat

    def __post_init__(self) -> None:
        if self.entries[2][3] < Fraction(1, 3):
            raise AssertionError("normalized product entry (3,4) fell below 1/3")
        if self.entries[3][3] < 1:
            raise AssertionError("normalized product entry (4,4) fell below 1")

    @property
    def sup_entry(self) -> Fraction:
        return max(x for row in self.entries for x in row)


def normalized_products(seq: RSequence, j: int, ell_max: int) -> Iterator[NormalizedProduct]:
    """Yield the products for ell = 0..ell_max, computed incrementally."""
    if j < 1:
        raise ValueError("products start at sequence position >= 1")
    if j + 2 * ell_max + 1 > seq.length:
        raise IndexError("product runs past the configured prefix")
    acc = step_matrix(seq, j).entries
    yield NormalizedProduct(j, 0, acc)
    for ell in range(1, ell_max + 1):
        acc = mat_mul(acc, step_matrix(seq, j + 2 * ell).entries)
        yield NormalizedProduct(j, ell, acc)


def normalized_product(seq: RSequence, j: int, ell: int, verify: bool = False) -> NormalizedProduct:
    """The single product N(j) N(j+2) ... N(j+2*ell).

    With ``verify=True`` the result is cross-checked against the plain
    twist-matrix product divided by the doubled powers at the odd offsets.
    """
    out = None
    for out in normalized_products(seq, j, ell):
        pass
    assert out is not None
    if verify:
        from .curves import _twist_product

        raw = _twist_product(seq, j, j + 2 * ell + 1)
        denom = 1
        for t in range(ell + 1):
            denom *= 2 * seq.r_at(j + 2 * t + 1)
        expected = tuple(tuple(Fraction(x, denom) for x in row) for row in raw)
        if expected != out.entries:
            raise AssertionError("normalized product disagrees with scaled twist product")
    return out


def envelope_start(epsilon: Fraction) -> int:
    """Least positive J with 2*epsilon + epsilon**J < 1."""
    if not Fraction(0) < epsilon < Fraction(1, 2):
        raise ValueError("epsilon out of range")
    j = 1
    while 2 * epsilon + epsilon**j >= 1:
        j += 1
    return j


def envelope_delta(epsilon: Fraction) -> Fraction:
    """The contraction constant 2*epsilon + epsilon**J for minimal J."""
    return 2 * epsilon + epsilon ** envelope_start(epsilon)


def upper_envelope(epsilon: Fraction, j: int, ell: int) -> tuple[Fraction, ...]:
    """Entrywise upper bound vector for a unit-sup row after the product.

    Components: (2e)^{l+1}, (2e)^{l+1}, d*(2e)^l, 2 + d*S, (2 + d*S)(1+e^j)
    with d the contraction constant and S the geometric sum of (2e)^t for
    t < l.
    """
    two_eps = 2 * epsilon
    delta = envelope_delta(epsilon)
    geo = sum((two_eps**t for t in range(ell)), Fraction(0))
    tail = 2 + delta * geo
    return (
        two_eps ** (ell + 1),
        two_eps ** (ell + 1),
        delta * two_eps**ell,
        tail,
        tail * (1 + epsilon**j),
    )


def lower_envelope(x: Sequence[Fraction | int]) -> tuple[Fraction, ...]:
    """Entrywise lower bound (0, 0, 0, x4, x4) for a nonnegative row x."""
    x4 = Fraction(x[3])
    return (Fraction(0), Fraction(0), Fraction(0), x4, x4)


def row_products(
    seq: RSequence, x: Sequence[Fraction | int], j: int, ell_max: int
) -> Iterator[tuple[int, tuple[Fraction, ...]]]:
    """Yield (ell, x * N(j) ... N(j+2*ell)) for ell = 0..ell_max."""
    row = tuple(Fraction(v) for v in x)
    if any(v < 0 for v in row):
        raise ValueError("row vector must be nonnegative")
    for ell in range(ell_max + 1):
        row = vec_mat(row, step_matrix(seq, j + 2 * ell).entries)
        yield ell, row


@dataclass(frozen=True)
class EnvelopeVerdict:
    """Outcome of the exact two-sided envelope check for one (x, j, ell)."""

    j: int
    ell: int
    ok_lower: bool
    ok_upper: bool | None  # None when j is below the envelope start
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.ok_lower and self.ok_upper is not False


def check_envelope_bounds(
    seq: RSequence, x: Sequence[Fraction | int], j: int, ell: int
) -> EnvelopeVerdict:
    """Verify the two-sided entrywise bounds for ``x`` in exact rationals.

    The lower bound holds for every ``j >= 1``; the upper bound is asserted
    only from the minimal envelope start onward.
    """
    row = None
    for _, row in row_products(seq, x, j, ell):
        pass
    assert row is not None
    failures: list[str] = []
    lo = lower_envelope(x)
    ok_lower = True
    for t in range(5):
        if row[t] < lo[t]:
            ok_lower = False
            failures.append(f"lower bound entry {t + 1}: {row[t]} < {lo[t]}")
    j_min = envelope_start(seq.epsilon)
    ok_upper: bool | None = None
    if j >= j_min:
        sup = max(Fraction(v) for v in x)
        hi = upper_envelope(seq.epsilon, j, ell)
        ok_upper = True
        for t in range(5):
            if row[t] > sup * hi[t]:
                ok_upper = False
                failures.append(f"upper bound entry {t + 1}: {row[t]} > {sup * hi[t]}")
    return EnvelopeVerdict(j, ell, ok_lower, ok_upper, tuple(failures))


@dataclass(frozen=True)
class MeasureVector:
    """A (finite-stage) limit transverse measure as track weights.

    Entries are exact rationals.  For a pure parity class the vector is the
    weight vector of a deep family curve divided by its intersection with
    the base marking, recorded together with the stage and the achieved
    sup-norm gap; blends are convex combinations of the two pure limits with
    weights rescaled to sum to one, which keeps the marking pairing equal
    to one.
    """

    entries: tuple[Fraction, Fraction, Fraction, Fraction, Fraction]
    parity: str  # "even", "odd" or "blend"
    weight_even: Fraction
    weight_odd: Fraction
    achieved_stage: int | None = None
    achieved_gap: Fraction | None = None

    def __post_init__(self) -> None:
        if self.parity not in ("even", "odd", "blend"):
            raise ValueError("parity must be 'even', 'odd' or 'blend'")
        e = self.entries
        if any(x < 0 for x in e):
            raise ValueError("measure entries must be nonnegative")
        if e[0] + e[3] + e[4] != e[1] + e[2]:
            raise AssertionError("measure vector violates the switch condition")


def limit_measure(seq: RSequence, parity: str, tol: float | Fraction = Fraction(1, 10**9)) -> MeasureVector:
    """Stabilized normalized limit of one parity class of the curve family.

    Walks the family ``curve/markingintersection`` until two successive
    vectors differ by less than ``tol`` in sup norm (exact comparison), and
    returns the stabilized vector with the achieved stage and gap.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if parity == "even":
        stages = range(4, seq.max_curve // 2 + 1)
        index_of = lambda t: 2 * t
        weights = (Fraction(1), Fraction(0))
    elif parity == "odd":
        stages = range(3, (seq.max_curve - 1) // 2 + 1)
        index_of = lambda t: 2 * t + 1
        weights = (Fraction(0), Fraction(1))
    else:
        raise ValueError("parity must be 'even' or 'odd'")

    prev: tuple[Fraction, ...] | None = None
    gap: Fraction | None = None
    for t in stages:
        i = index_of(t)
        w = curve_weights(seq, i)
        denom = mu_intersection(seq, i)
        vec = tuple(Fraction(x, denom) for x in w.entries)
        if prev is not None:
            gap = max(abs(a - b) for a, b in zip(vec, prev))
            if gap < tol:
                return MeasureVector(vec, parity, *weights, achieved_stage=t, achieved_gap=gap)
        prev = vec
    raise ValueError(
        f"not converged at length {seq.length}: sup gap {gap} has not dropped below {tol}"
    )


@lru_cache(maxsize=None)
def _pure_measure_intersection(
    seq: RSequence, curve_i: int, parity: str, rel_tol: Fraction
) -> Fraction:
    """Ratio-limit intersection of a family curve with a pure limit measure."""
    if parity == "even":
        stages = range(4, seq.max_curve // 2 + 1)
        index_of = lambda t: 2 * t
    else:
        stages = range(3, (seq.max_curve - 1) // 2 + 1)
        index_of = lambda t: 2 * t + 1
    prev: Fraction | None = None
    change: Fraction | None = None
    for t in stages:
        k = index_of(t)
        if k < curve_i + 4 or k > seq.max_curve:
            continue
        value = Fraction(intersection(seq, curve_i, k), mu_intersection(seq, k))
        if prev is not None:
            change = abs(value - prev)
            if change <= rel_tol * value:
                return value
        prev = value
    raise ValueError(
        f"measure intersection not stabilized for curve {curve_i}: "
        f"last relative change {change}"
    )


def measure_intersection(
    seq: RSequence,
    curve: CurveIndex,
    measure: MeasureVector,
    rel_tol: float | Fraction = Fraction(1, 10**9),
) -> Fraction:
    """Intersection number of a family curve with a limit measure.

    Pure measures use the stabilized ratio limit along their own parity
    class; blends combine the two pure values linearly with the blend
    weights.  The result is an exact rational (these numbers underflow
    doubles quickly).
    """
    rel_tol = Fraction(rel_tol)
    total = Fraction(0)
    if measure.weight_even:
        total += measure.weight_even * _pure_measure_intersection(seq, curve.i, "even", rel_tol)
    if measure.weight_odd:
        total += measure.weight_odd * _pure_measure_intersection(seq, curve.i, "odd", rel_tol)
    return total


def blend(
    m_even: MeasureVector,
    m_odd: MeasureVector,
    c_even: Fraction | float | str,
    c_odd: Fraction | float | str,
) -> MeasureVector:
    """Convex combination of the two ergodic limits, marking-normalized.

    The weights are rescaled to sum to one, so the blend still pairs to one
    with the base marking.  A zero weight returns the other pure measure.
    """
    ce = Fraction(c_even)
    co = Fraction(c_odd)
    if ce < 0 or co < 0:
        raise ValueError("blend weights must be nonnegative")
    if ce == 0 and co == 0:
        raise ValueError("blend weights must not both be zero")
    if m_even.parity != "even" or m_odd.parity != "odd":
        raise ValueError("blend expects the even and odd pure limits")
    total = ce + co
    ce, co = ce / total, co / total
    if co == 0:
        return m_even
    if ce == 0:
        return m_odd
    entries = tuple(ce * a + co * b for a, b in zip(m_even.entries, m_odd.entries))
    return MeasureVector(entries, "blend", ce, co)


@dataclass(frozen=True)
class SingularityRow:
    """One line of the mutual-singularity diagnostic table."""

    i: int
    even_band: Fraction  # marking(even i+1) * i(even_i, even limit)
    even_cross: Fraction  # marking(even i+1) * i(even_i, odd limit)
    odd_band: Fraction
    odd_cross: Fraction
    even_ratio: Fraction  # i(even_i, even limit) / i(even_i, odd limit)
    odd_ratio: Fraction  # i(odd_i, even limit) / i(odd_i, odd limit)


def singularity_table(
    seq: RSequence,
    i_range: Sequence[int],
    rel_tol: float | Fraction = Fraction(1, 10**9),
) -> list[SingularityRow]:
    """Bands and crossing decays certifying the two limits are singular.

    The band products stay in a bounded multiplicative window while the
    cross products decay to zero; the two measure ratios diverge in
    opposite directions.
    """
    rel_tol = Fraction(rel_tol)
    rows = []
    for i in i_range:
        even_i = CurveIndex.even(i)
        odd_i = CurveIndex.odd(i)
        ia_e = _pure_measure_intersection(seq, even_i.i, "even", rel_tol)
        ib_e = _pure_measure_intersection(seq, even_i.i, "odd", rel_tol)
        ia_o = _pure_measure_intersection(seq, odd_i.i, "even", rel_tol)
        ib_o = _pure_measure_intersection(seq, odd_i.i, "odd", rel_tol)
        mark_e = mu_intersection(seq, 2 * (i + 1))
        mark_o = mu_intersection(seq, 2 * (i + 1) + 1)
        rows.append(
            SingularityRow(
                i=i,
                even_band=mark_e * ia_e,
                even_cross=mark_e * ib_e,
                odd_band=mark_o * ib_o,
                odd_cross=mark_o * ia_o,
                even_ratio=ia_e / ib_e,
                odd_ratio=ia_o / ib_o,
            )
        )
    return rows
