"""Short-curve length contributions and the boundary limit-set probe.

At any time along the modeled geodesic, at most two disjoint family curves
are short: one per parity class.  A test curve's modeled length is the sum
of its contributions from those two curves, each of the form
``crossings * (collar width + twisting * short length)``, plus a recorded
slack proportional to the crossing counts.

The model length of a curve inside its own active interval follows the
normalized cosh profile with minimum the reciprocal twist parameter;
outside its interval a family curve is never short again and its model
length is one.  Evaluating the reports at the right-hand interval
endpoints (or, when the even weight vanishes, at the handoff time where
two consecutive even curves both reach model length one) produces ratio
traces that converge to the corresponding measure-intersection ratios:
the probed boundary points sweep out the whole measure simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curves import CurveIndex, RSequence, growth_check, intersection
from .measures import MeasureVector, blend, measure_intersection
from .numerics import LogReal, log_sum
from .timeline import TimelineLayout, TimelineRow, layout


@dataclass(frozen=True)
class ShortCurveState:
    """Model state of one potentially-short curve at a fixed time.

    ``hyp`` is the modeled hyperbolic length: the normalized cosh profile
    ``cosh(t - balance) / twist_param`` inside the curve's active interval
    and exactly 1 outside it (after its interval a curve never gets short
    again, and the interval endpoints are the handoff moments where the
    model length is comparable to one).  ``width`` is the collar term
    ``2 log(1/hyp)``, zero when the curve is not short, and the twist
    regime is 0 before the balance time and the full twist parameter after.
    """

    curve: CurveIndex
    t: float
    hyp: float
    width: float
    twist_regime: int
    twist_param: int
    balance: float
    inside_interval: bool


def _state_from_row(curve: CurveIndex, row: TimelineRow, seq: RSequence, t: float) -> ShortCurveState:
    if curve.parity == "even":
        bal, lo, hi = row.a, row.a_lo, row.a_hi
        w = seq.even_twist(row.i)
    else:
        bal, lo, hi = row.b, row.b_lo, row.b_hi
        w = seq.odd_twist(row.i)
    inside = lo < t < hi
    if inside:
        hyp = min(1.0, math.cosh(t - bal) / w)
    else:
        hyp = 1.0
    width = 2.0 * math.log(1.0 / hyp) if hyp < 1.0 else 0.0
    regime = 0 if t <= bal else w
    return ShortCurveState(curve, t, hyp, width, regime, w, bal, inside)


def short_curve_state(lay: TimelineLayout, curve: CurveIndex, t: float) -> ShortCurveState:
    """Model state of the given family curve at time ``t``."""
    return _state_from_row(curve, lay.row(curve.family_position), lay.seq, t)


def contribution(state: ShortCurveState, i_count: int, twist: int) -> LogReal:
    """Length contribution ``i_count * (width + twist * hyp)``.

    Crossing counts grow past double range, so the product is returned in
    the log domain.
    """
    if i_count < 0:
        raise ValueError("crossing count must be nonnegative")
    bracket = state.width + twist * state.hyp
    return LogReal.from_int(i_count) * LogReal.from_float(bracket)


def active_curves(lay: TimelineLayout, t: float) -> tuple[CurveIndex, CurveIndex]:
    """The even and odd family curves governing the geometry at time ``t``.

    Per parity this is the last curve whose active interval has opened
    (strictly) before ``t``; at a handoff moment the earlier neighbor is
    still the governing one.  Beyond the last covered interval the layout
    cannot answer.
    """
    last = lay.rows[-1]
    if t > max(last.a_hi, last.b_hi):
        raise ValueError("timeline exhausted")
    even_i = lay.i_min
    odd_i = lay.i_min
    for row in lay.rows:
        if row.a_lo < t:
            even_i = row.i
        if row.b_lo < t:
            odd_i = row.i
    return CurveIndex.even(even_i), CurveIndex.odd(odd_i)


def _report_intersection(seq: RSequence, a: int, b: int) -> tuple[int, bool]:
    """Crossing count of two family curves; flags the unvalidated gap 3."""
    if a == b:
        return 0, False
    j, k = min(a, b), max(a, b)
    if k - j == 3:
        return intersection(seq, j, k, allow_small_gap=True), True
    return intersection(seq, j, k), False


@dataclass(frozen=True)
class ReportEntry:
    """Modeled length of one test curve at the report time."""

    curve: CurveIndex
    count_even: int
    count_odd: int
    contribution_even: LogReal
    contribution_odd: LogReal
    slack_term: LogReal
    total: LogReal
    small_gap_flag: bool


@dataclass(frozen=True)
class LengthReport:
    """Contributions of the two active short curves to the test curves."""

    t: float
    state_even: ShortCurveState
    state_odd: ShortCurveState
    entries: tuple[ReportEntry, ...]

    def entry(self, curve: CurveIndex) -> ReportEntry:
        for e in self.entries:
            if e.curve == curve:
                return e
        raise KeyError(f"no report entry for curve {curve.i}")


def length_report(
    lay: TimelineLayout,
    t: float,
    test_curves: Sequence[CurveIndex],
    slack: int = 1,
) -> LengthReport:
    """Evaluate the two-short-curve length estimate at time ``t``.

    The slack constant multiplies the total crossing count, mirroring the
    additive error of the estimate; it is recorded separately in each
    entry.
    """
    even_c, odd_c = active_curves(lay, t)
    state_even = short_curve_state(lay, even_c, t)
    state_odd = short_curve_state(lay, odd_c, t)
    entries = []
    for curve in test_curves:
        ce, fe = _report_intersection(lay.seq, curve.i, even_c.i)
        co, fo = _report_intersection(lay.seq, curve.i, odd_c.i)
        contrib_e = contribution(state_even, ce, state_even.twist_regime)
        contrib_o = contribution(state_odd, co, state_odd.twist_regime)
        slack_term = LogReal.from_int(slack * (ce + co))
        parts = [p for p in (contrib_e, contrib_o, slack_term) if not p.is_zero()]
        total = log_sum(parts) if parts else LogReal.zero()
        entries.append(
            ReportEntry(curve, ce, co, contrib_e, contrib_o, slack_term, total, fe or fo)
        )
    return LengthReport(t, state_even, state_odd, tuple(entries))


def handoff_time(lay: TimelineLayout, i: int, parity: str = "even") -> float:
    """First time after balance where the model length of curve i reaches 1.

    Clipped to the window between the curve's right interval endpoint and
    the next same-parity left endpoint, inside which both neighbors have
    model length one.
    """
    row = lay.row(i)
    nxt = lay.row(i + 1)
    if parity == "even":
        raw = row.a + math.acosh(float(lay.seq.even_twist(i)))
        lo, hi = row.a_hi, nxt.a_lo
    else:
        raw = row.b + math.acosh(float(lay.seq.odd_twist(i)))
        lo, hi = row.b_hi, nxt.b_lo
    return max(lo, min(raw, hi))


@dataclass(frozen=True)
class ProbeRow:
    """One sample of the boundary probe trace."""

    i: int
    t: float
    ratio: float
    target: float
    diagnostic: float


@dataclass(frozen=True)
class ProbeTrace:
    """Ratio trace of modeled lengths against a measure-intersection target."""

    case: str
    target_parity: str
    curve_a: CurveIndex
    curve_b: CurveIndex
    target_exact: Fraction
    rows: tuple[ProbeRow, ...]
    converged: bool
    final_relative_error: float

    @property
    def target(self) -> float:
        return float(self.target_exact)

    @property
    def diagnostics(self) -> tuple[float, ...]:
        return tuple(r.diagnostic for r in self.rows)


def limit_set_probe(
    seq: RSequence,
    measure_even: MeasureVector,
    measure_odd: MeasureVector,
    c_even: Fraction | float | str,
    c_odd: Fraction | float | str,
    test_pair: tuple[CurveIndex, CurveIndex],
    *,
    i_min: int = 3,
    i_max: int,
    target_parity: str = "even",
    rel_tol: float | Fraction = Fraction(1, 10**9),
    ratio_tolerance: float = 0.05,
    diagnostic_threshold: float = 1e-2,
    slack: int = 1,
) -> ProbeTrace:
    """Trace the modeled length ratio of two test curves along the ray.

    Samples sit at the right endpoints of the target family's active
    intervals, or at the handoff times when the target family's weight is
    zero.  The trace should approach the ratio of the curves' intersection
    numbers with the target limit measure, while the off-family
    contribution ratio (the diagnostic) decays.
    """
    if target_parity not in ("even", "odd"):
        raise ValueError("target parity must be 'even' or 'odd'")
    curve_a, curve_b = test_pair
    growth = growth_check(seq)
    if not growth.interleaving_ok:
        raise ValueError("interleaving growth condition fails on this prefix")
    ce = Fraction(c_even)
    co = Fraction(c_odd)
    zero_weight_case = (target_parity == "even" and ce == 0) or (
        target_parity == "odd" and co == 0
    )
    if zero_weight_case and not (growth.decay_even_ok and growth.decay_odd_ok):
        raise ValueError("zero-weight probe needs the ratio-decay growth condition")

    mixed = blend(measure_even, measure_odd, ce, co)
    target_measure = measure_even if target_parity == "even" else measure_odd
    va = measure_intersection(seq, curve_a, target_measure, rel_tol)
    vb = measure_intersection(seq, curve_b, target_measure, rel_tol)
    if va <= 0 or vb <= 0:
        raise ValueError("test curves must cross the target measure")
    target_exact = va / vb

    lay = layout(seq, mixed, i_min=2, i_max=i_max + 1, rel_tol=rel_tol)
    rows = []
    for i in range(i_min, i_max + 1):
        if zero_weight_case:
            t = handoff_time(lay, i, target_parity)
        else:
            t = lay.row(i).a_hi if target_parity == "even" else lay.row(i).b_hi
        report = length_report(lay, t, (curve_a, curve_b), slack=slack)
        ea = report.entry(curve_a)
        eb = report.entry(curve_b)
        ratio = (ea.total / eb.total).to_float()
        on_family = ea.contribution_even if target_parity == "even" else ea.contribution_odd
        off_family = ea.contribution_odd if target_parity == "even" else ea.contribution_even
        if on_family.is_zero():
            raise ValueError(
                f"test curve {curve_a.i} does not cross the active short curve at index {i}"
            )
        diag = (off_family / on_family).to_float()
        rows.append(ProbeRow(i, t, ratio, float(target_exact), diag))

    final_err = abs(rows[-1].ratio - float(target_exact)) / float(target_exact)
    diags = [r.diagnostic for r in rows]
    diag_ok = all(b < a for a, b in zip(diags, diags[1:])) and diags[-1] < diagnostic_threshold
    return ProbeTrace(
        case="zero_weight" if zero_weight_case else "positive_weights",
        target_parity=target_parity,
        curve_a=curve_a,
        curve_b=curve_b,
        target_exact=target_exact,
        rows=tuple(rows),
        converged=final_err <= ratio_tolerance and diag_ok,
        final_relative_error=final_err,
    )
