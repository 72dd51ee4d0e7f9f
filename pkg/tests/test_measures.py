import random
from fractions import Fraction

import pytest

from lamtrack.curves import CurveIndex, geometric_sequence, mu_intersection
from lamtrack.measures import (
    MeasureVector,
    blend,
    check_envelope_bounds,
    envelope_delta,
    envelope_start,
    limit_measure,
    lower_envelope,
    measure_intersection,
    normalized_product,
    normalized_products,
    row_products,
    singularity_table,
    step_matrix,
    upper_envelope,
)

RATIO_TOL = Fraction(1, 10**6)


@pytest.fixture(scope="module")
def seq():
    return geometric_sequence(6, 40, Fraction(1, 5))


@pytest.fixture(scope="module")
def limits(seq):
    return limit_measure(seq, "even"), limit_measure(seq, "odd")


def test_step_matrix_source(seq):
    n = step_matrix(seq, 3)
    assert n.source == (3, 4)
    assert n.entries[2][4] == 1 and n.entries[3][3] == 1


def test_normalized_product_single(seq):
    p = normalized_product(seq, 2, 0)
    assert p.entries == step_matrix(seq, 2).entries
    assert p.start == 2 and p.length == 0


def test_normalized_product_verified_against_twist_product(seq):
    for j, ell in ((1, 3), (2, 2), (4, 1)):
        normalized_product(seq, j, ell, verify=True)


def test_normalized_product_lower_entries(seq):
    for j in (1, 2, 3):
        for p in normalized_products(seq, j, 8):
            assert p.entries[2][3] >= Fraction(1, 3)
            assert p.entries[3][3] >= 1


def test_normalized_product_cauchy_decay(seq):
    prods = list(normalized_products(seq, 1, 11))

    def sup_diff(a, b):
        return max(abs(x - y) for ra, rb in zip(a.entries, b.entries) for x, y in zip(ra, rb))

    late = sup_diff(prods[11], prods[10])
    early = sup_diff(prods[4], prods[3])
    assert late < early
    # geometric envelope: successive sup-norm steps stay under a small
    # multiple of (2*epsilon)**length
    two_eps = 2 * seq.epsilon
    for ell in range(1, 12):
        step = sup_diff(prods[ell], prods[ell - 1])
        assert step <= 4 * two_eps**ell


def test_deep_product_columns_vanish(seq):
    # every row of a deep product has vanishing first three entries
    # (geometric in the number of factors)
    deep = normalized_product(seq, 1, 10)
    two_eps = 2 * seq.epsilon
    for s in range(5):
        for t in range(3):
            assert deep.entries[s][t] <= two_eps**10


def test_odd_family_scaling_constant(seq):
    # the raw odd-curve weights divided by the doubled twist powers at the
    # even sequence positions reproduce the bounded normalized products
    from lamtrack.curves import curve_weights
    from lamtrack.traintrack import mat_mul, mat_vec

    for stage in (3, 5):
        i = 2 * stage + 1
        scale = 1
        for t in range(1, stage):
            scale *= 2 * seq.r_at(2 * t)
        prod = step_matrix(seq, 1).entries
        for pos in range(3, 2 * stage - 2, 2):
            prod = mat_mul(prod, step_matrix(seq, pos).entries)
        normalized = mat_vec(prod, (0, 0, 1, 1, 0))
        raw = curve_weights(seq, i).entries
        assert tuple(Fraction(x, scale) for x in raw) == tuple(normalized)


def test_envelope_start_and_delta():
    assert envelope_start(Fraction(1, 5)) == 1
    assert envelope_delta(Fraction(1, 5)) == Fraction(3, 5)
    assert envelope_start(Fraction(49, 100)) > 1


def test_upper_envelope_components():
    eps = Fraction(1, 5)
    delta = envelope_delta(eps)
    assert upper_envelope(eps, 3, 0) == (
        Fraction(2, 5),
        Fraction(2, 5),
        delta,
        Fraction(2),
        2 * (1 + eps**3),
    )


def test_upper_envelope_third_entry_at_ell0(seq):
    # unit row times a single normalized matrix: third entry stays below
    # the contraction constant
    delta = envelope_delta(seq.epsilon)
    for j in (1, 2, 5):
        _, row = next(iter(row_products(seq, (1, 1, 1, 1, 1), j, 0)))
        assert row[2] <= delta


def test_envelope_bounds_randomized(seq):
    rng = random.Random(31)
    for _ in range(20):
        x = tuple(Fraction(rng.randrange(0, 10**6)) for _ in range(5))
        for j in (1, 2, 4):
            for ell in (0, 2, 5):
                verdict = check_envelope_bounds(seq, x, j, ell)
                assert verdict.ok, verdict.failures


def test_envelope_lower_degenerate_zero():
    assert lower_envelope((3, 5, 7, 0, 2)) == (0, 0, 0, 0, 0)


def test_envelope_rejects_negative_rows(seq):
    with pytest.raises(ValueError, match="nonnegative"):
        list(row_products(seq, (1, -1, 0, 0, 0), 1, 0))


def test_limit_measure_converges(seq, limits):
    m_even, m_odd = limits
    for m in limits:
        assert m.achieved_gap < Fraction(1, 10**9)
        # the first three branch weights die off, the fourth persists
        assert max(m.entries[0], m.entries[1], m.entries[2]) < 1
        assert m.entries[3] > 0
    assert m_even.parity == "even" and m_odd.parity == "odd"


def test_limit_measure_switch_condition_exact(limits):
    for m in limits:
        e = m.entries
        assert e[0] + e[3] + e[4] == e[1] + e[2]


def test_limit_measures_not_proportional(limits):
    m_even, m_odd = limits
    cross_even = m_even.entries[0] / m_even.entries[3]
    cross_odd = m_odd.entries[0] / m_odd.entries[3]
    assert abs(cross_even - cross_odd) > Fraction(1, 10) * max(cross_even, cross_odd)


def test_limit_measure_needs_long_prefix():
    short = geometric_sequence(6, 8, Fraction(1, 5))
    with pytest.raises(ValueError, match="not converged at length 8"):
        limit_measure(short, "even", Fraction(1, 10**9))


def test_marking_normalization(seq, limits):
    # the four base-marking curves pair to one with either limit
    for m in limits:
        total = sum(
            measure_intersection(seq, CurveIndex(t), m, RATIO_TOL) for t in range(4)
        )
        assert abs(total - 1) < Fraction(1, 10**4)


def test_measure_intersection_band_and_decay(seq, limits):
    m_even, m_odd = limits
    band = []
    cross = []
    for i in range(3, 11):
        mark = mu_intersection(seq, 2 * (i + 1))
        band.append(mark * measure_intersection(seq, CurveIndex.even(i), m_even, RATIO_TOL))
        cross.append(mark * measure_intersection(seq, CurveIndex.even(i), m_odd, RATIO_TOL))
    assert max(band) / min(band) < 10
    assert all(b < a for a, b in zip(cross, cross[1:]))
    assert cross[-1] < Fraction(1, 10**3)


def test_measure_intersection_not_stabilized():
    short = geometric_sequence(6, 14, Fraction(1, 5))
    with pytest.raises(ValueError, match="not stabilized"):
        measure_intersection(short, CurveIndex.even(5), limit_measure(short, "odd", 1),
                             Fraction(1, 10**9))


def test_blend_pure_cases(limits):
    m_even, m_odd = limits
    assert blend(m_even, m_odd, 1, 0) is m_even
    assert blend(m_even, m_odd, 0, 1) is m_odd
    with pytest.raises(ValueError, match="not both be zero"):
        blend(m_even, m_odd, 0, 0)


def test_blend_normalizes_weights(seq, limits):
    m_even, m_odd = limits
    b = blend(m_even, m_odd, Fraction(1, 2), Fraction(1, 2))
    assert b.weight_even == b.weight_odd == Fraction(1, 2)
    b2 = blend(m_even, m_odd, 3, 1)
    assert b2.weight_even == Fraction(3, 4)
    # marking pairing stays one under blending (linearity)
    total = sum(measure_intersection(seq, CurveIndex(t), b, RATIO_TOL) for t in range(4))
    assert abs(total - 1) < Fraction(1, 10**4)


def test_blend_requires_pure_inputs(limits):
    m_even, m_odd = limits
    mixed = blend(m_even, m_odd, 1, 1)
    with pytest.raises(ValueError, match="pure limits"):
        blend(mixed, m_odd, 1, 1)


def test_measure_vector_validation():
    with pytest.raises(ValueError, match="parity"):
        MeasureVector((Fraction(1),) * 5, "mixed", Fraction(1), Fraction(0))
    with pytest.raises(AssertionError, match="switch"):
        MeasureVector(
            (Fraction(1), Fraction(0), Fraction(0), Fraction(0), Fraction(0)),
            "even",
            Fraction(1),
            Fraction(0),
        )


def test_singularity_table(seq):
    rows = singularity_table(seq, range(3, 9), RATIO_TOL)
    assert [r.i for r in rows] == list(range(3, 9))
    # diverging measure ratios in opposite directions
    even_ratios = [r.even_ratio for r in rows]
    odd_ratios = [r.odd_ratio for r in rows]
    assert all(b > a for a, b in zip(even_ratios, even_ratios[1:]))
    assert all(b < a for a, b in zip(odd_ratios, odd_ratios[1:]))
    assert even_ratios[-1] > 10**3
    assert odd_ratios[-1] < Fraction(1, 10**3)
