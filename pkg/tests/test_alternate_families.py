"""Runs on configurations away from the reference one: a larger epsilon
(where the envelope start moves past 1) and a non-geometric block family
(step factors alternating in pairs)."""

import random
from fractions import Fraction

import pytest

from lamtrack.curves import CurveIndex, growth_check, validate_sequence
from lamtrack.lengthmodel import limit_set_probe
from lamtrack.measures import (
    blend,
    check_envelope_bounds,
    envelope_delta,
    envelope_start,
    limit_measure,
)
from lamtrack.timeline import layout, ordering_verdict

RATIO_TOL = Fraction(1, 10**4)


@pytest.fixture(scope="module")
def seq_wide_epsilon():
    # 1/epsilon = 5/2, so factor-3 growth is admissible
    return validate_sequence(Fraction(2, 5), [3**i for i in range(1, 15)])


@pytest.fixture(scope="module")
def seq_blocks():
    # step factors 5,5,7,7,5,5,...: both growth products advance by the
    # same factor every two indices, so the interleaving condition holds
    # without the sequence being geometric
    rs = []
    cur = 1
    for t in range(34):
        cur *= 5 if (t // 2) % 2 == 0 else 7
        rs.append(cur)
    return validate_sequence(Fraction(1, 5), rs)


def test_envelope_start_two(seq_wide_epsilon):
    eps = seq_wide_epsilon.epsilon
    assert envelope_start(eps) == 2
    assert envelope_delta(eps) == Fraction(4, 5) + Fraction(4, 25)


def test_envelope_below_start_checks_lower_only(seq_wide_epsilon):
    rng = random.Random(41)
    for _ in range(10):
        x = tuple(Fraction(rng.randrange(0, 1000)) for _ in range(5))
        below = check_envelope_bounds(seq_wide_epsilon, x, 1, 4)
        assert below.ok_upper is None and below.ok_lower and below.ok
        at = check_envelope_bounds(seq_wide_epsilon, x, 2, 4)
        assert at.ok_upper is True and at.ok_lower


def test_block_family_growth(seq_blocks):
    g = growth_check(seq_blocks)
    assert g.interleaving_onset == 1
    assert g.decay_even_ok and g.decay_odd_ok
    # products advance by 35 every two indices
    assert g.even_product(4) == 5 * 7 * 5 * 7
    assert g.even_product(i=4) == g.odd_product(4)


def test_block_family_timeline_and_probe(seq_blocks):
    me = limit_measure(seq_blocks, "even")
    mo = limit_measure(seq_blocks, "odd")
    lay = layout(seq_blocks, blend(me, mo, 1, 1), i_min=2, i_max=9, rel_tol=RATIO_TOL)
    verdict = ordering_verdict(lay)
    assert verdict.case == "both"
    assert verdict.chain_holds and verdict.all_ok
    devs = [max(abs(r.a - r.formula_a), abs(r.b - r.formula_b)) for r in lay.rows]
    assert max(devs) < 2.0

    probe = limit_set_probe(
        seq_blocks, me, mo, 1, 1,
        (CurveIndex.even(1), CurveIndex.even(2)), i_min=3, i_max=8, rel_tol=RATIO_TOL,
    )
    assert probe.converged
    assert probe.final_relative_error < 1e-3
    diags = probe.diagnostics
    assert all(b < a for a, b in zip(diags, diags[1:]))
