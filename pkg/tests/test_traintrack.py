import random
from fractions import Fraction

import pytest

from lamtrack.traintrack import (
    CURVE2_WEIGHTS,
    CURVE3_WEIGHTS,
    IDENTITY,
    EfficientCurve,
    WeightVector,
    apply,
    mat_mul,
    normalized_matrix,
    pair,
    prefix_products,
    product,
    twist_matrix,
    vec_mat,
)


def random_admissible(rng):
    """Random nonnegative weights satisfying the switch condition."""
    s1 = rng.randrange(0, 10**6)
    s4 = rng.randrange(0, 10**6)
    s5 = rng.randrange(0, 10**6)
    total = s1 + s4 + s5
    s2 = rng.randrange(0, total + 1)
    s3 = total - s2
    if total == 0:
        return random_admissible(rng)
    return WeightVector((s1, s2, s3, s4, s5))


def test_twist_matrix_r1():
    assert twist_matrix(1).entries == (
        (0, 0, 0, 1, 2),
        (0, 0, 0, 2, 3),
        (1, 0, 0, 0, 0),
        (0, 1, 0, 0, 0),
        (0, 0, 1, 0, 0),
    )


def test_twist_matrix_r5_first_row():
    assert twist_matrix(5).entries[0] == (0, 0, 0, 9, 10)


def test_twist_matrix_shift_block():
    rng = random.Random(3)
    for _ in range(20):
        m = twist_matrix(rng.randrange(1, 10**6)).entries
        assert m[2] == (1, 0, 0, 0, 0)
        assert m[3] == (0, 1, 0, 0, 0)
        assert m[4] == (0, 0, 1, 0, 0)


def test_twist_matrix_rejects_nonpositive():
    with pytest.raises(ValueError, match="twist power must be positive"):
        twist_matrix(0)
    with pytest.raises(ValueError, match="twist power must be positive"):
        twist_matrix(-4)


def test_apply_curve3_seed():
    assert apply(twist_matrix(1), CURVE3_WEIGHTS).entries == (1, 2, 0, 0, 1)


def test_apply_curve3_symbolic():
    rng = random.Random(5)
    for _ in range(50):
        r = rng.randrange(1, 10**6)
        assert apply(twist_matrix(r), CURVE3_WEIGHTS).entries == (2 * r - 1, 2 * r, 0, 0, 1)


def test_apply_preserves_switch_condition():
    rng = random.Random(9)
    for _ in range(1000):
        w = random_admissible(rng)
        r = rng.randrange(1, 10**6)
        out = apply(twist_matrix(r), w)  # WeightVector revalidates
        assert out.s1 + out.s4 + out.s5 == out.s2 + out.s3


def test_weight_vector_invariants():
    with pytest.raises(ValueError, match="switch condition"):
        WeightVector((1, 0, 0, 0, 0))
    with pytest.raises(ValueError, match="nonnegative"):
        WeightVector((-1, 0, -1, 0, 0))
    with pytest.raises(ValueError, match="must not be zero"):
        WeightVector((0, 0, 0, 0, 0))


def test_pairing_examples():
    u0 = EfficientCurve.for_index(0)
    u1 = EfficientCurve.for_index(1)
    w = WeightVector((1, 2, 0, 0, 1))
    assert pair(u0, w) == 4
    assert pair(u1, w) == 2
    assert pair(u0, CURVE2_WEIGHTS) == 2


def test_efficient_curve_rejects_others():
    with pytest.raises(ValueError):
        EfficientCurve.for_index(2)
    with pytest.raises(ValueError):
        EfficientCurve(0, (0, 0, 0, 1, 1))


def test_normalized_matrix_entries():
    n = normalized_matrix(5, 25).entries
    assert n[0][1] == Fraction(9, 50)
    assert n[1][2] == Fraction(11, 50)
    assert n[4][0] == Fraction(1, 50)
    assert n[2][4] == 1
    assert n[3][3] == 1


def test_normalized_matrix_consistency():
    rng = random.Random(21)
    for _ in range(25):
        a = rng.randrange(1, 10**4)
        b = rng.randrange(1, 10**4)
        n = normalized_matrix(a, b).entries
        raw = mat_mul(twist_matrix(a).entries, twist_matrix(b).entries)
        assert all(2 * b * n[i][j] == raw[i][j] for i in range(5) for j in range(5))


def test_row_action_closed_form():
    # x * N equals the displayed row recursion, entry by entry
    rng = random.Random(23)
    for _ in range(50):
        a = rng.randrange(1, 10**5)
        b = rng.randrange(1, 10**5)
        x = tuple(Fraction(rng.randrange(0, 10**6)) for _ in range(5))
        got = vec_mat(x, normalized_matrix(a, b).entries)
        d = 2 * b
        expected = (
            x[4] / d,
            ((2 * a - 1) * x[0] + 2 * a * x[1]) / d,
            (2 * a * x[0] + (2 * a + 1) * x[1]) / d,
            Fraction((d - 1), d) * x[2] + x[3],
            x[2] + Fraction((d + 1), d) * x[3],
        )
        assert got == expected


def test_product_scan_parallel_matches_sequential():
    rng = random.Random(27)
    mats = [twist_matrix(rng.randrange(1, 50)).entries for _ in range(30)]
    assert product(mats) == product(mats, parallel=True, chunk=4)
    assert prefix_products(mats) == prefix_products(mats, parallel=True, chunk=4)
    assert product([]) == IDENTITY
    assert prefix_products([]) == []
