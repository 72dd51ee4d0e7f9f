"""The five-branch train track: weight vectors, twist matrices, pairing.

Weights live on the five branches of a fixed train track on the
five-times-punctured sphere.  A composite move (one twist to the r-th power
followed by the order-five rotation) acts on branch weights by left
multiplication with an integer 5x5 matrix; the whole curve family of this
package is generated by products of these matrices.  Two curves of the
family are not carried by the track but cross it transversally, and their
geometric intersection number with any carried curve is twice a dot
product.

All arithmetic here is exact: matrices and vectors are tuples of ``int`` or
``Fraction``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Vec = tuple
Mat = tuple

IDENTITY: Mat = tuple(tuple(1 if i == j else 0 for j in range(5)) for i in range(5))


def mat_mul(a: Mat, b: Mat) -> Mat:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(5)) for j in range(5))
        for i in range(5)
    )


def mat_vec(m: Mat, v: Vec) -> Vec:
    return tuple(sum(m[i][k] * v[k] for k in range(5)) for i in range(5))


def vec_mat(v: Vec, m: Mat) -> Vec:
    return tuple(sum(v[k] * m[k][j] for k in range(5)) for j in range(5))


def product(mats: Sequence[Mat], parallel: bool = False, chunk: int = 8) -> Mat:
    """Left-to-right product of 5x5 matrices.

    With ``parallel=True`` the list is cut into chunks whose internal
    products are computed on a thread pool and then folded in order.  Exact
    arithmetic makes any association bit-identical to the sequential fold.
    """
    if not mats:
        return IDENTITY
    if not parallel or len(mats) <= chunk:
        acc = mats[0]
        for m in mats[1:]:
            acc = mat_mul(acc, m)
        return acc
    chunks = [mats[i : i + chunk] for i in range(0, len(mats), chunk)]
    with ThreadPoolExecutor() as pool:
        partials = list(pool.map(lambda c: product(c, parallel=False), chunks))
    acc = partials[0]
    for p in partials[1:]:
        acc = mat_mul(acc, p)
    return acc


def prefix_products(mats: Sequence[Mat], parallel: bool = False, chunk: int = 8) -> list[Mat]:
    """All prefixes ``M_1, M_1 M_2, ..., M_1 ... M_t`` of a matrix list.

    The parallel strategy computes chunk-internal prefixes on a thread pool
    and stitches them with the carried product of earlier chunks; results
    are bit-identical to the sequential scan.
    """
    if not mats:
        return []
    if not parallel or len(mats) <= chunk:
        out = [mats[0]]
        for m in mats[1:]:
            out.append(mat_mul(out[-1], m))
        return out
    chunks = [mats[i : i + chunk] for i in range(0, len(mats), chunk)]
    with ThreadPoolExecutor() as pool:
        inner = list(pool.map(lambda c: prefix_products(c, parallel=False), chunks))
    out: list[Mat] = list(inner[0])
    for prefixes in inner[1:]:
        carry = out[-1]
        out.extend(mat_mul(carry, p) for p in prefixes)
    return out


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative integer branch weights satisfying the switch condition.

    The single switch relation of the track reads
    ``s1 + s4 + s5 == s2 + s3``; a valid weight vector is not identically
    zero and determines a carried curve or lamination.
    """

    entries: tuple[int, int, int, int, int]

    def __post_init__(self) -> None:
        e = self.entries
        if len(e) != 5:
            raise ValueError("weight vector needs exactly five branch weights")
        if any(x < 0 for x in e):
            raise ValueError("branch weights must be nonnegative")
        if e[0] + e[3] + e[4] != e[1] + e[2]:
            raise ValueError("switch condition violated: s1 + s4 + s5 != s2 + s3")
        if not any(e):
            raise ValueError("weight vector must not be zero")

    @property
    def s1(self) -> int:
        return self.entries[0]

    @property
    def s2(self) -> int:
        return self.entries[1]

    @property
    def s3(self) -> int:
        return self.entries[2]

    @property
    def s4(self) -> int:
        return self.entries[3]

    @property
    def s5(self) -> int:
        return self.entries[4]


#: Carried weight vectors of the second and third curve in the family.
CURVE2_WEIGHTS = WeightVector((1, 1, 0, 0, 0))
CURVE3_WEIGHTS = WeightVector((0, 0, 1, 1, 0))

#: Branch-crossing vectors of the two curves that meet the track
#: transversally (family indices 0 and 1).
_EFFICIENT_CROSSINGS = {
    0: (0, 1, 1, 0, 0),
    1: (0, 0, 0, 1, 1),
}


@dataclass(frozen=True)
class EfficientCurve:
    """One of the two family curves crossing the track without bigons."""

    index: int
    crossings: tuple[int, int, int, int, int]

    def __post_init__(self) -> None:
        if self.index not in _EFFICIENT_CROSSINGS:
            raise ValueError("only family curves 0 and 1 cross the track efficiently")
        if self.crossings != _EFFICIENT_CROSSINGS[self.index]:
            raise ValueError("crossing vector does not match the curve")

    @classmethod
    def for_index(cls, index: int) -> "EfficientCurve":
        if index not in _EFFICIENT_CROSSINGS:
            raise ValueError("only family curves 0 and 1 cross the track efficiently")
        return cls(index, _EFFICIENT_CROSSINGS[index])


@dataclass(frozen=True)
class TwistMatrix:
    """Integer matrix of the composite twist-and-rotate move at power r."""

    r: int
    entries: Mat


def twist_matrix(r: int) -> TwistMatrix:
    """The 5x5 move matrix for twist power ``r >= 1``.

    Rows: (0,0,0,2r-1,2r), (0,0,0,2r,2r+1), then the shift block sending
    branches 1,2,3 to rows 3,4,5.
    """
    if r <= 0:
        raise ValueError("twist power must be positive")
    return TwistMatrix(
        r,
        (
            (0, 0, 0, 2 * r - 1, 2 * r),
            (0, 0, 0, 2 * r, 2 * r + 1),
            (1, 0, 0, 0, 0),
            (0, 1, 0, 0, 0),
            (0, 0, 1, 0, 0),
        ),
    )


def apply(m: TwistMatrix, w: WeightVector) -> WeightVector:
    """Exact matrix-vector action on carried weights.

    The move matrix preserves the switch condition, which the returned
    ``WeightVector`` re-validates.
    """
    return WeightVector(mat_vec(m.entries, w.entries))


def pair(u: EfficientCurve, w: WeightVector) -> int:
    """Geometric intersection number of an efficient curve with a carried one.

    Each crossing of the track contributes two intersection points with the
    carried representative, so the pairing is twice the dot product of the
    crossing vector with the weight vector.  The doubling lives here, not in
    callers.
    """
    return 2 * sum(a * b for a, b in zip(u.crossings, w.entries))


@dataclass(frozen=True)
class NormalizedMatrix:
    """Product of two consecutive move matrices, scaled by 1/(2 * second r).

    Scaling by the dominant entry size keeps long even-step products of
    these matrices bounded, which is what makes the curve family converge
    projectively.  ``source`` records the pair of sequence positions
    (i, i+1) when the matrix comes from a parameter sequence.
    """

    entries: Mat
    source: tuple[int, int] | None = None


def normalized_matrix(r_lo: int, r_hi: int, source: tuple[int, int] | None = None) -> NormalizedMatrix:
    """Exact rational matrix M(r_lo) * M(r_hi) / (2 * r_hi)."""
    if r_lo <= 0 or r_hi <= 0:
        raise ValueError("twist power must be positive")
    raw = mat_mul(twist_matrix(r_lo).entries, twist_matrix(r_hi).entries)
    d = 2 * r_hi
    entries = tuple(tuple(Fraction(x, d) for x in row) for row in raw)
    return NormalizedMatrix(entries, source)
