"""Flat-length model of the geodesic: balance times, intervals, orderings.

Every family curve gets a model vertical length (its intersection number
with the base marking) and a model horizontal length (its intersection
with the chosen limit-measure blend).  Vertical lengths shrink like
``e^-t`` and horizontal ones grow like ``e^t``, so each curve has a unique
balance time; around it sits an active interval whose half-length is half
the log of the curve's twist parameter.  The relative order of these
intervals, and how strongly consecutive gaps diverge, is what distinguishes
the weight regimes, and is evaluated here with explicit per-index gaps.

All comparability statements enter with additive constant zero; the
closed-form balance-time expressions are carried alongside the measured
ones as cross-check columns, never asserted equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import CurveIndex, RSequence, growth_check, mu_intersection
from .measures import MeasureVector, measure_intersection
from .numerics import LogReal


@dataclass(frozen=True)
class FlatLengths:
    """Model vertical/horizontal lengths of one curve at time zero."""

    vertical: int
    horizontal: Fraction
    small_gap: bool  # marking sum used an unvalidated gap-3 summand


class FlatLengthModel:
    """Per-curve flat-length data for one sequence and measure blend."""

    def __init__(
        self,
        seq: RSequence,
        measure: MeasureVector,
        rel_tol: float | Fraction = Fraction(1, 10**9),
    ):
        self.seq = seq
        self.measure = measure
        self.rel_tol = Fraction(rel_tol)
        self._cache: dict[int, FlatLengths] = {}

    def lengths(self, curve: CurveIndex) -> FlatLengths:
        if curve.i not in self._cache:
            small = curve.i < 7
            v0 = mu_intersection(self.seq, curve.i, allow_small_gap=small)
            h0 = measure_intersection(self.seq, curve, self.measure, self.rel_tol)
            self._cache[curve.i] = FlatLengths(v0, h0, small)
        return self._cache[curve.i]

    def vertical(self, curve: CurveIndex, t: float) -> LogReal:
        """Model vertical length at time t: e^-t times the start value."""
        return LogReal(1, math.log(self.lengths(curve).vertical) - t)

    def horizontal(self, curve: CurveIndex, t: float) -> LogReal:
        h0 = self.lengths(curve).horizontal
        return LogReal.from_fraction(h0) * LogReal.from_log(t)


def balance_from_lengths(v0: LogReal, h0: LogReal) -> float:
    """The unique time where e^-t * v0 equals e^t * h0."""
    if h0.is_zero():
        raise ValueError("curve not crossed by measure")
    if v0.is_zero():
        raise ValueError("curve has zero vertical length")
    return 0.5 * (v0.log - h0.log)


def balance_time(model: FlatLengthModel, curve: CurveIndex) -> float:
    """Balance time of a family curve under the model."""
    fl = model.lengths(curve)
    return balance_from_lengths(LogReal.from_int(fl.vertical), LogReal.from_fraction(fl.horizontal))


def _formula_a(seq: RSequence, i: int, c_even: Fraction) -> float:
    """Closed-form balance time of even-family curve i, additive constant 0."""
    base = sum(math.log(2 * seq.even_twist(j)) for j in range(1, i))
    base += 0.5 * math.log(seq.even_twist(i))
    if c_even > 0:
        return base - 0.5 * math.log(c_even)
    shift = 0.5 * sum(
        math.log(seq.odd_twist(j)) - math.log(seq.even_twist(j)) for j in range(1, i + 1)
    )
    return base + shift


def _formula_b(seq: RSequence, i: int, c_odd: Fraction) -> float:
    """Closed-form balance time of odd-family curve i, additive constant 0.

    In the zero-weight case the cross-family ratio sum starts at j = 0
    (first ratio ``even_twist(1)/odd_twist(0)``): the odd curves sit half a
    step after the even ones, and dropping the boundary term would shift
    the formula by half the log of the first twist power, which is not
    uniform over sequences.
    """
    base = sum(math.log(2 * seq.odd_twist(j)) for j in range(1, i))
    base += 0.5 * math.log(seq.odd_twist(i))
    if c_odd > 0:
        return base - 0.5 * math.log(c_odd)
    shift = 0.5 * sum(
        math.log(seq.even_twist(j + 1)) - math.log(seq.odd_twist(j)) for j in range(0, i + 1)
    )
    return base + shift


@dataclass(frozen=True)
class TimelineRow:
    """Balance data of the index-i pair of curves.

    ``a``/``b`` are the measured balance times of the even/odd curve,
    ``*_lo``/``*_hi`` the active-interval endpoints (half-length half the
    log of the twist parameter), and ``formula_*`` the closed-form values
    with additive constant zero.
    """

    i: int
    a: float
    b: float
    a_lo: float
    a_hi: float
    b_lo: float
    b_hi: float
    formula_a: float
    formula_b: float
    small_gap_even: bool
    small_gap_odd: bool


@dataclass(frozen=True)
class TimelineLayout:
    """Rows of balance data plus the weights they were computed with."""

    seq: RSequence
    c_even: Fraction
    c_odd: Fraction
    rows: tuple[TimelineRow, ...]

    def row(self, i: int) -> TimelineRow:
        first = self.rows[0].i
        idx = i - first
        if not 0 <= idx < len(self.rows):
            raise IndexError(f"timeline has no row {i}")
        return self.rows[idx]

    @property
    def i_min(self) -> int:
        return self.rows[0].i

    @property
    def i_max(self) -> int:
        return self.rows[-1].i

    @property
    def case(self) -> str:
        if self.c_even == 0:
            return "even_zero"
        if self.c_odd == 0:
            return "odd_zero"
        return "both"


def layout(
    seq: RSequence,
    measure: MeasureVector,
    *,
    i_min: int = 2,
    i_max: int,
    rel_tol: float | Fraction = Fraction(1, 10**9),
) -> TimelineLayout:
    """Balance times and active intervals for indices ``i_min..i_max``.

    The weights come from the measure blend; both balance times must be
    strictly increasing in the index, which is verified.
    """
    if i_min < 2:
        raise ValueError("timeline rows start at index 2")
    if i_max > seq.length // 2:
        raise IndexError("timeline extends past the computable curve range")
    model = FlatLengthModel(seq, measure, rel_tol)
    c_even, c_odd = measure.weight_even, measure.weight_odd
    rows = []
    for i in range(i_min, i_max + 1):
        even_c = CurveIndex.even(i)
        odd_c = CurveIndex.odd(i)
        a = balance_time(model, even_c)
        b = balance_time(model, odd_c)
        half_a = 0.5 * math.log(seq.even_twist(i))
        half_b = 0.5 * math.log(seq.odd_twist(i))
        rows.append(
            TimelineRow(
                i=i,
                a=a,
                b=b,
                a_lo=a - half_a,
                a_hi=a + half_a,
                b_lo=b - half_b,
                b_hi=b + half_b,
                formula_a=_formula_a(seq, i, c_even),
                formula_b=_formula_b(seq, i, c_odd),
                small_gap_even=model.lengths(even_c).small_gap,
                small_gap_odd=model.lengths(odd_c).small_gap,
            )
        )
    for prev, cur in zip(rows, rows[1:]):
        if not (cur.a > prev.a and cur.b > prev.b):
            raise AssertionError(f"balance times fail to increase at index {cur.i}")
    return TimelineLayout(seq, c_even, c_odd, tuple(rows))


@dataclass(frozen=True)
class LinkVerdict:
    """One inequality of an interval-ordering chain, with per-index gaps.

    ``kind`` is "diverging" for links whose gap must grow without bound
    (positive, strictly increasing, and at least ``factor`` times the first
    gap by the last index) and "positive" for links only required to have a
    positive gap.
    """

    name: str
    kind: str
    indices: tuple[int, ...]
    gaps: tuple[float, ...]
    divergence_factor: float

    @property
    def all_positive(self) -> bool:
        return all(g > 0 for g in self.gaps)

    @property
    def strictly_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.gaps, self.gaps[1:]))

    @property
    def doubled(self) -> bool:
        return bool(self.gaps) and self.gaps[-1] >= self.divergence_factor * self.gaps[0]

    @property
    def ok(self) -> bool:
        if self.kind == "positive":
            return self.all_positive
        return self.all_positive and self.strictly_increasing and self.doubled


@dataclass(frozen=True)
class OffsetVerdict:
    """A bounded-above comparison: slack must not drift upward."""

    name: str
    indices: tuple[int, ...]
    slacks: tuple[float, ...]
    tolerance: float

    @property
    def bounded(self) -> bool:
        half = max(1, len(self.slacks) // 2)
        head = max(self.slacks[:half])
        tail = max(self.slacks[half:]) if self.slacks[half:] else head
        return tail <= head + self.tolerance


@dataclass(frozen=True)
class OrderingVerdict:
    """Chain evaluation for the weight case of a layout."""

    case: str
    indices: tuple[int, ...]
    links: tuple[LinkVerdict, ...]
    offsets: tuple[OffsetVerdict, ...]

    @property
    def chain_holds(self) -> bool:
        return all(link.all_positive for link in self.links)

    @property
    def all_ok(self) -> bool:
        return all(link.ok for link in self.links) and all(o.bounded for o in self.offsets)


def _links_for_case(case: str):
    """Gap definitions per weight case.

    Links whose proof gap is an unbounded sum are tagged "diverging"; links
    whose gap is a single bounded term (disjointness margins, or the
    next-interval handoff when the step ratios stay bounded) are tagged
    "positive".
    """
    if case == "both":
        return [
            ("a_lo[i] << b_hi[i-1]", "diverging", lambda L, i: L.row(i - 1).b_hi - L.row(i).a_lo),
            ("b_hi[i-1] < b_lo[i]", "positive", lambda L, i: L.row(i).b_lo - L.row(i - 1).b_hi),
            ("b_lo[i] << a_hi[i]", "diverging", lambda L, i: L.row(i).a_hi - L.row(i).b_lo),
            ("a_hi[i] < a_lo[i+1]", "positive", lambda L, i: L.row(i + 1).a_lo - L.row(i).a_hi),
            ("a_lo[i+1] << b_hi[i]", "diverging", lambda L, i: L.row(i).b_hi - L.row(i + 1).a_lo),
        ]
    if case == "even_zero":
        return [
            ("a_lo[i] << b_hi[i-1]", "diverging", lambda L, i: L.row(i - 1).b_hi - L.row(i).a_lo),
            ("b_hi[i-1] < b_lo[i]", "positive", lambda L, i: L.row(i).b_lo - L.row(i - 1).b_hi),
            ("b_lo[i] << a[i]", "diverging", lambda L, i: L.row(i).a - L.row(i).b_lo),
            ("a[i] << b[i]", "diverging", lambda L, i: L.row(i).b - L.row(i).a),
            ("b[i] << a_hi[i]", "diverging", lambda L, i: L.row(i).a_hi - L.row(i).b),
            ("a_hi[i] < a_lo[i+1]", "positive", lambda L, i: L.row(i + 1).a_lo - L.row(i).a_hi),
            ("a_lo[i+1] << b_hi[i]", "diverging", lambda L, i: L.row(i).b_hi - L.row(i + 1).a_lo),
        ]
    if case == "odd_zero":
        return [
            ("b_lo[i] << a_hi[i]", "diverging", lambda L, i: L.row(i).a_hi - L.row(i).b_lo),
            ("a_hi[i] < a_lo[i+1]", "positive", lambda L, i: L.row(i + 1).a_lo - L.row(i).a_hi),
            ("a_lo[i+1] << b[i]", "diverging", lambda L, i: L.row(i).b - L.row(i + 1).a_lo),
            ("b[i] << a[i+1]", "diverging", lambda L, i: L.row(i + 1).a - L.row(i).b),
            ("a[i+1] << b_hi[i]", "diverging", lambda L, i: L.row(i).b_hi - L.row(i + 1).a),
            ("b_hi[i] < b_lo[i+1]", "positive", lambda L, i: L.row(i + 1).b_lo - L.row(i).b_hi),
            ("b_lo[i+1] << a_hi[i+1]", "diverging", lambda L, i: L.row(i + 1).a_hi - L.row(i + 1).b_lo),
        ]
    raise ValueError(f"unknown weight case {case!r}")


def ordering_verdict(
    lay: TimelineLayout,
    *,
    divergence_factor: float = 2.0,
    offset_tolerance: float = 0.5,
) -> OrderingVerdict:
    """Evaluate the interval-ordering chain of the layout's weight case.

    Every link is reported with its per-index gap; "diverging" links must
    additionally have strictly increasing gaps that grow by at least the
    divergence factor over the tested window.
    """
    case = lay.case
    indices = tuple(range(lay.i_min + 1, lay.i_max))
    if not indices:
        raise ValueError("layout too short for an ordering window")
    links = tuple(
        LinkVerdict(
            name=name,
            kind=kind,
            indices=indices,
            gaps=tuple(gap(lay, i) for i in indices),
            divergence_factor=divergence_factor,
        )
        for name, kind, gap in _links_for_case(case)
    )
    offsets: tuple[OffsetVerdict, ...] = ()
    if case == "both":
        shift_ab = 0.5 * (math.log(lay.c_odd) - math.log(lay.c_even))
        shift_ba = -shift_ab
        offsets = (
            OffsetVerdict(
                "a_hi[i] <=+ b[i] + 0.5*log(c_odd/c_even)",
                indices,
                tuple(lay.row(i).a_hi - lay.row(i).b - shift_ab for i in indices),
                offset_tolerance,
            ),
            OffsetVerdict(
                "b_hi[i] <=+ a[i+1] + 0.5*log(c_even/c_odd)",
                indices,
                tuple(lay.row(i).b_hi - lay.row(i + 1).a - shift_ba for i in indices),
                offset_tolerance,
            ),
        )
    return OrderingVerdict(case, indices, links, offsets)


@dataclass(frozen=True)
class DecayDiagnostic:
    """A ratio sequence that should decay monotonically below a threshold."""

    name: str
    indices: tuple[int, ...]
    values: tuple[float, ...]
    threshold: float

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.values, self.values[1:]))

    @property
    def below_threshold(self) -> bool:
        return bool(self.values) and self.values[-1] < self.threshold

    @property
    def ok(self) -> bool:
        return self.decreasing and self.below_threshold


@dataclass(frozen=True)
class LittleODiagnostics:
    """Negligibility ratios of slow terms against the accumulated products."""

    log_odd_vs_even_product: DecayDiagnostic
    log_even_vs_odd_product: DecayDiagnostic
    handoff_vs_even_product: DecayDiagnostic | None  # only when c_even == 0
    handoff_vs_odd_product: DecayDiagnostic | None  # only when c_odd == 0
    handoff_identity_deviation: tuple[float, ...] | None

    @property
    def all_ok(self) -> bool:
        diags = [self.log_odd_vs_even_product, self.log_even_vs_odd_product]
        if self.handoff_vs_even_product is not None:
            diags.append(self.handoff_vs_even_product)
        if self.handoff_vs_odd_product is not None:
            diags.append(self.handoff_vs_odd_product)
        return all(d.ok for d in diags)


def _ratio_from_logs(log_num: float, log_den: float) -> float:
    x = log_num - log_den
    if x < -700:
        return 0.0
    return math.exp(x)


def little_o_diagnostics(
    seq: RSequence, lay: TimelineLayout, threshold: float = 1e-3
) -> LittleODiagnostics:
    """Per-index negligibility ratios with monotone-decay verdicts.

    The first two clauses compare the logs of the twist parameters against
    the accumulated twist-ratio products; the handoff clauses (one per zero
    weight) compare the exponential of the gap between consecutive balance
    structures against the same products.
    """
    growth = growth_check(seq)
    indices = tuple(range(max(lay.i_min, 1), lay.i_max))

    def even_product_log(i: int) -> float:
        p = growth.even_product(i)
        return math.log(p.numerator) - math.log(p.denominator)

    def odd_product_log(i: int) -> float:
        p = growth.odd_product(i)
        return math.log(p.numerator) - math.log(p.denominator)

    clause1 = DecayDiagnostic(
        "log(odd twist) / even-ratio product",
        indices,
        tuple(
            _ratio_from_logs(math.log(math.log(seq.odd_twist(i))), even_product_log(i))
            for i in indices
        ),
        threshold,
    )
    clause2 = DecayDiagnostic(
        "log(next even twist) / odd-ratio product",
        indices,
        tuple(
            _ratio_from_logs(math.log(math.log(seq.even_twist(i + 1))), odd_product_log(i))
            for i in indices
        ),
        threshold,
    )
    handoff_even = None
    handoff_odd = None
    identity_dev = None
    if lay.c_even == 0:
        handoff_even = DecayDiagnostic(
            "exp(a_lo[i+1] - b[i]) / even-ratio product",
            indices,
            tuple(
                _ratio_from_logs(lay.row(i + 1).a_lo - lay.row(i).b, even_product_log(i))
                for i in indices
            ),
            threshold,
        )
        identity_dev = tuple(
            (lay.row(i + 1).a_lo - lay.row(i).b)
            - 0.5
            * (
                math.log(seq.odd_twist(i + 1))
                - math.log(seq.even_twist(i + 1))
                + even_product_log(i)
            )
            for i in indices
        )
    if lay.c_odd == 0:
        handoff_odd = DecayDiagnostic(
            "exp(b_lo[i+1] - a[i+1]) / odd-ratio product",
            indices,
            tuple(
                _ratio_from_logs(lay.row(i + 1).b_lo - lay.row(i + 1).a, odd_product_log(i))
                for i in indices
            ),
            threshold,
        )
    return LittleODiagnostics(clause1, clause2, handoff_even, handoff_odd, identity_dev)
