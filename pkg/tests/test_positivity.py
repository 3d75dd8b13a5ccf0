from fractions import Fraction

import pytest
from scipy.optimize import linprog

from herdability.generators import two_level_tree, random_matrix
from herdability.matrix import InvalidInputError, RationalMatrix, controllability_matrix
from herdability.positivity import (
    HerdabilityVerdict,
    block_triangular_positive,
    check_dual,
    check_primal,
    is_unisigned,
    strictly_positive_in_image,
    unisigned_cover_check,
)


def float_oracle(Mx: RationalMatrix) -> bool:
    """max t s.t. M u >= t, |u| <= 1, t <= 1, solved in floating point."""
    n, d = Mx.shape
    A_ub = [[-float(x) for x in row] + [1.0] for row in Mx.rows]
    res = linprog([0.0] * d + [-1.0], A_ub=A_ub, b_ub=[0.0] * n,
                  bounds=[(-1, 1)] * d + [(None, 1)], method="highs")
    return res.status == 0 and -res.fun > 1e-9


def test_identity_is_herdable():
    v = strictly_positive_in_image(RationalMatrix.identity(3))
    assert v.herdable
    assert check_primal(RationalMatrix.identity(3), v.primal_certificate)


def test_opposite_signs_not_herdable():
    v = strictly_positive_in_image(RationalMatrix([[1], [-1]]))
    assert not v.herdable
    y = v.dual_certificate
    assert y[0] == y[1] > 0


@pytest.mark.parametrize("c, herdable", [(1, True), (-1, False)])
def test_two_level_controllability(c, herdable):
    R = controllability_matrix(two_level_tree(1, 1, c))
    assert strictly_positive_in_image(R).herdable is herdable


def test_alternative_exactness(rng):
    seen = set()
    for _ in range(300):
        Mx = random_matrix(rng, rng.randint(1, 7), rng.randint(1, 7), rng.choice([0.3, 0.6, 0.9]))
        v = strictly_positive_in_image(Mx)
        assert (v.primal_certificate is None) != (v.dual_certificate is None)
        if v.herdable:
            assert check_primal(Mx, v.primal_certificate)
        else:
            assert check_dual(Mx, v.dual_certificate)
        assert v.herdable == float_oracle(Mx)
        seen.add(v.herdable)
    assert seen == {True, False}


def test_column_scaling_invariance(rng):
    for _ in range(60):
        Mx = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        scales = [rng.choice([Fraction(-2), Fraction(1, 3), Fraction(5), Fraction(-1, 7)]) for _ in range(Mx.ncols)]
        scaled = Mx @ RationalMatrix.diag(scales)
        assert strictly_positive_in_image(Mx).herdable == strictly_positive_in_image(scaled).herdable


def test_verdict_requires_exactly_one_certificate():
    with pytest.raises(ValueError):
        HerdabilityVerdict(True, "x")
    with pytest.raises(ValueError):
        HerdabilityVerdict(False, "x", primal_certificate=(1,), dual_certificate=(1,))


@pytest.mark.parametrize("v, expected", [
    ((0, -2, -5), True), ((1, -1), False), ((0, 0), False), ((3,), True),
])
def test_is_unisigned(v, expected):
    assert is_unisigned([Fraction(x) for x in v]) is expected


def test_unisigned_cover_examples():
    w = unisigned_cover_check(RationalMatrix([[1, 0], [0, -1]]))
    assert w == (1, -1)
    assert RationalMatrix([[1, 0], [0, -1]]).matvec(w) == (1, 1)
    assert unisigned_cover_check(RationalMatrix([[1], [-1]])) is None


def test_layered_shape_blocks_are_unisigned():
    # columns e1, A e1, A^2 e1, ... of a tree pair: layer d first appears at
    # power d with a unisigned vector v_d (v1 > 0, v2 < 0, v3 < 0)
    Mx = RationalMatrix([
        [1, 0, 4, 0, -9],
        [0, 2, 0, 5, 0],
        [0, 3, 0, 1, 0],
        [0, 0, -1, 0, 7],
        [0, 0, -2, 0, -3],
        [0, 0, 0, -4, 0],
    ])
    rows = [range(0, 1), range(1, 3), range(3, 5), range(5, 6)]
    cols = [range(0, 1), range(1, 2), range(2, 3), range(3, 5)]
    for r, c in zip(rows, cols):
        assert unisigned_cover_check(Mx.submatrix(r, c)) is not None
    u = block_triangular_positive(Mx, rows, cols)
    assert all(x > 0 for x in Mx.matvec(u))
    assert strictly_positive_in_image(Mx).herdable


def test_cover_implies_herdable(rng):
    for _ in range(200):
        Mx = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 6), 0.4)
        if unisigned_cover_check(Mx) is not None:
            assert strictly_positive_in_image(Mx).herdable


def test_block_triangular_examples():
    D = RationalMatrix([
        [1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1],
    ])
    u = block_triangular_positive(D, [range(0, 2), range(2, 5)], [range(0, 2), range(2, 5)])
    assert u == (1,) * 5
    Mx = RationalMatrix([[1, 5], [0, -1]])
    u = block_triangular_positive(Mx, [range(0, 1), range(1, 2)], [range(0, 1), range(1, 2)])
    assert all(x > 0 for x in Mx.matvec(u))
    bad = RationalMatrix([[1, 0], [0, 1], [0, -1]])
    assert block_triangular_positive(bad, [range(0, 1), range(1, 3)], [range(0, 1), range(1, 2)]) is None


def test_block_triangular_errors():
    Mx = RationalMatrix([[1, 0], [1, 1]])
    with pytest.raises(InvalidInputError):
        block_triangular_positive(Mx, [range(0, 1), range(1, 2)], [range(0, 1), range(1, 2)])
    with pytest.raises(InvalidInputError):
        block_triangular_positive(Mx, [range(0, 1)], [range(0, 2)])


def test_block_triangular_implies_herdable(rng):
    hits = 0
    for _ in range(150):
        sizes = [(rng.randint(1, 3), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        nrows, ncols = sum(s[0] for s in sizes), sum(s[1] for s in sizes)
        rows = [[0] * ncols for _ in range(nrows)]
        r0 = 0
        c_start = [sum(s[1] for s in sizes[:k]) for k in range(len(sizes))]
        for k, (r, c) in enumerate(sizes):
            for i in range(r0, r0 + r):
                for j in range(c_start[k], ncols):
                    rows[i][j] = rng.choice([0, 1, -1, 2, "1/2"])
            r0 += r
        Mx = RationalMatrix(rows)
        rp, cp, r0 = [], [], 0
        for k, (r, c) in enumerate(sizes):
            rp.append(range(r0, r0 + r))
            cp.append(range(c_start[k], c_start[k] + c))
            r0 += r
        u = block_triangular_positive(Mx, rp, cp)
        if u is not None:
            hits += 1
            assert all(x > 0 for x in Mx.matvec(u))
            assert strictly_positive_in_image(Mx).herdable
    assert hits > 10
