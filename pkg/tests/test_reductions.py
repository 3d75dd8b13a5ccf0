from fractions import Fraction

import pytest

from herdability.generators import (
    two_level_tree,
    random_block_pair,
    random_diagonal_pair,
    random_matrix,
    random_nonsingular,
    random_pair,
    star,
)
from herdability.matrix import InvalidInputError, RationalMatrix, SystemPair, controllability_matrix, rank
from herdability.positivity import check_dual, check_primal
from herdability.reductions import (
    NotNormalizableError,
    diagonal_pair_herdability,
    leader_block_reduction,
    normalize_input,
    pair_verdict,
    permute_pair,
    reduce_pair,
)


def col(*xs):
    return RationalMatrix.column_vector(xs)


def test_normalize_already_normal():
    A = RationalMatrix.identity(3)
    B = RationalMatrix([[1, 0], [0, 1], [0, 0]])
    out, T, perm = normalize_input(SystemPair(A, B))
    assert T == RationalMatrix.identity(2) and perm == [0, 1, 2]
    assert out.B == B


def test_normalize_scaled_column():
    out, T, perm = normalize_input(SystemPair(RationalMatrix.identity(2), col(2, 0)))
    assert T == RationalMatrix([[Fraction(1, 2)]]) and perm == [0, 1]
    assert out.B == col(1, 0)


def test_normalize_two_by_two_block():
    B = RationalMatrix([[1, 1], [1, -1], [0, 0]])
    out, T, perm = normalize_input(SystemPair(RationalMatrix.identity(3), B))
    # exact inverse of [[1, 1], [1, -1]]
    assert T == RationalMatrix([["1/2", "1/2"], ["1/2", "-1/2"]])
    assert out.B == RationalMatrix([[1, 0], [0, 1], [0, 0]])


def test_normalize_moves_leader_rows_up():
    A = RationalMatrix([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    out, T, perm = normalize_input(SystemPair(A, col(0, 0, 5)))
    assert perm == [2, 0, 1]
    assert out.A == A.submatrix(perm, perm)
    assert out.B == col(1, 0, 0)


def test_normalize_dependent_rows():
    with pytest.raises(NotNormalizableError):
        normalize_input(SystemPair(RationalMatrix.identity(3), col(1, 2, 0)))
    with pytest.raises(NotNormalizableError):
        normalize_input(SystemPair(RationalMatrix.identity(2), col(0, 0)))


def test_star_reduces_to_zero_and_weights():
    w = [1, -2, 3]
    pair = star(w)
    red = leader_block_reduction(pair)
    assert red.A == RationalMatrix.zeros(3, 3)
    assert red.B == col(*w)


def test_full_leader_set_is_empty_and_herdable():
    pair = SystemPair.with_leaders(RationalMatrix([[0, -1], [1, 0]]), [0, 1])
    red = leader_block_reduction(pair)
    assert red.n == 0
    assert pair_verdict(red).herdable


def test_two_level_reduction_shape():
    for a in (1, -3):
        red = leader_block_reduction(two_level_tree(a, 1, 1))
        assert red.A.shape == (5, 5)
        assert red.B == col(1, a, 2, 0, 0)


def test_leader_block_requires_block_form():
    with pytest.raises(InvalidInputError):
        leader_block_reduction(SystemPair(RationalMatrix.identity(2), col(0, 1)))
    with pytest.raises(InvalidInputError):
        leader_block_reduction(SystemPair(RationalMatrix.identity(3), RationalMatrix([[1, 2], [2, 4], [0, 0]])))


def test_verdict_preservation(rng):
    kinds = set()
    for _ in range(120):
        n = rng.randint(2, 6)
        m = rng.randint(1, 3)
        r = rng.randint(1, min(m, n))
        pair = random_block_pair(rng, n, r, m)
        v = pair_verdict(pair).herdable
        kinds.add(v)
        norm, T, perm = normalize_input(pair)
        assert pair_verdict(norm).herdable == v
        assert pair_verdict(leader_block_reduction(norm)).herdable == v
        reduced, trace = reduce_pair(pair)
        assert trace.replay(pair) == reduced
    assert kinds == {True, False}


def test_input_transform_image_equality(rng):
    for _ in range(60):
        n, m = rng.randint(1, 5), rng.randint(1, 3)
        pair = random_pair(rng, n, m)
        T = random_nonsingular(rng, m)
        R = controllability_matrix(pair)
        RT = controllability_matrix(SystemPair(pair.A, pair.B @ T))
        # mutual containment: stacking adds no rank on either side
        assert rank(R) == rank(RT) == rank(R.hstack(RT))
        assert pair_verdict(pair).herdable == pair_verdict(SystemPair(pair.A, pair.B @ T)).herdable


def test_permutation_invariance(rng):
    for _ in range(60):
        n = rng.randint(1, 6)
        pair = random_pair(rng, n, rng.randint(1, 2))
        perm = list(range(n))
        rng.shuffle(perm)
        assert pair_verdict(pair).herdable == pair_verdict(permute_pair(pair, perm)).herdable


@pytest.mark.parametrize("lam, gamma, herdable", [
    ([1, 2], [1, -1], True),
    ([1, 1], [1, -1], False),
    ([3, 3], [2, 5], True),
])
def test_diagonal_examples(lam, gamma, herdable):
    v = diagonal_pair_herdability(RationalMatrix.diag(lam), gamma)
    assert v.herdable is herdable
    R = controllability_matrix(SystemPair(RationalMatrix.diag(lam), col(*gamma)))
    assert v.verify(R)
    if not herdable:
        y = v.dual_certificate
        assert y[0] * y[1] > 0 and y[0] == y[1]


def test_diagonal_preconditions():
    with pytest.raises(InvalidInputError):
        diagonal_pair_herdability(RationalMatrix.diag([1, 2]), [1, 0])
    with pytest.raises(InvalidInputError):
        diagonal_pair_herdability(RationalMatrix([[1, 1], [0, 1]]), [1, 1])


def test_diagonal_agrees_with_direct(rng):
    for _ in range(150):
        n = rng.randint(1, 7)
        Lam, gamma = random_diagonal_pair(rng, n)
        v = diagonal_pair_herdability(Lam, gamma)
        pair = SystemPair(Lam, RationalMatrix.column_vector(gamma))
        R = controllability_matrix(pair)
        assert v.herdable == pair_verdict(pair).herdable
        if v.herdable:
            assert check_primal(R, v.primal_certificate)
        else:
            assert check_dual(R, v.dual_certificate)
