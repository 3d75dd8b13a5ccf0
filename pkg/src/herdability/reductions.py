"""Verdict-preserving transformations of a pair (A, B)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .matrix import (
    InvalidInputError,
    RationalMatrix,
    SystemPair,
    controllability_matrix,
    inverse,
    pivot_columns,
    rank,
    sign,
    solve,
)
from .positivity import HerdabilityVerdict, strictly_positive_in_image


class NotNormalizableError(InvalidInputError):
    """The nonzero rows of B are linearly dependent."""


@dataclass(frozen=True)
class ReductionStep:
    name: str
    input_shape: tuple
    output_shape: tuple
    data: dict = field(default_factory=dict)


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)

    def record(self, name: str, before: SystemPair, after: SystemPair, **data):
        self.steps.append(ReductionStep(name, (before.n, before.m), (after.n, after.m), data))

    def replay(self, pair: SystemPair) -> SystemPair:
        for step in self.steps:
            if step.name == "normalize_input":
                pair = apply_normalization(pair, step.data["permutation"], step.data["T"], step.data["kept_columns"])
            elif step.name == "leader_block_reduction":
                pair = leader_block_reduction(pair)
            else:
                raise ValueError(f"unknown reduction step {step.name!r}")
        return pair


def permute_pair(pair: SystemPair, perm: Sequence[int]) -> SystemPair:
    """(P A Pᵀ, P B) where new state ``k`` is old state ``perm[k]``."""
    cols = range(pair.B.ncols)
    return SystemPair(pair.A.submatrix(perm, perm), pair.B.submatrix(perm, cols), pair.meta)


def apply_normalization(pair: SystemPair, perm: Sequence[int], T: RationalMatrix, kept: Sequence[int]) -> SystemPair:
    permuted = permute_pair(pair, perm)
    BT = permuted.B @ T
    return SystemPair(permuted.A, BT.submatrix(range(BT.nrows), kept), pair.meta)


def normalize_input(pair: SystemPair) -> tuple[SystemPair, RationalMatrix, list[int]]:
    """Bring B to ``[I_r; 0]`` by a state permutation and an input transform.

    Returns ``(normalized, T, perm)``: leader (nonzero) rows of B move to the
    top in ascending order, ``T`` is nonsingular with ``B1 T = [I_r 0]``,
    and the zero columns of ``P B T`` are dropped from the returned pair.
    """
    B = pair.B
    nonzero = [i for i in range(B.nrows) if any(B.row(i))]
    if not nonzero:
        raise NotNormalizableError("B is zero")
    B1 = B.submatrix(nonzero, range(B.ncols))
    r = len(nonzero)
    if rank(B1) != r:
        raise NotNormalizableError("nonzero rows of B are linearly dependent")
    perm = nonzero + [i for i in range(B.nrows) if i not in nonzero]
    m = B.ncols
    piv = pivot_columns(B1)
    order = piv + [j for j in range(m) if j not in piv]
    C = B1.submatrix(range(r), piv)
    D = B1.submatrix(range(r), order[r:])
    Cinv = inverse(C)
    # B1 Q [[C^-1, -C^-1 D], [0, I]] = [I 0] with Q the column permutation
    top = Cinv.hstack(-(Cinv @ D)) if m > r else Cinv
    bottom = RationalMatrix.zeros(m - r, r).hstack(RationalMatrix.identity(m - r)) if m > r else RationalMatrix.zeros(0, m)
    inner = top.vstack(bottom)
    Q = RationalMatrix([[1 if order[c] == row else 0 for c in range(m)] for row in range(m)])
    T = Q @ inner
    kept = list(range(r))
    normalized = apply_normalization(pair, perm, T, kept)
    return normalized, T, perm


def leader_block_reduction(pair: SystemPair) -> SystemPair:
    """Reduce ``(A, [B1; 0])`` with B1 of full row rank to ``(A22, A21)``.

    The split is at r = number of leading nonzero rows of B.  An empty
    result (r = n) has zero states; see :func:`pair_verdict`.
    """
    B = pair.B
    n = pair.n
    r = 0
    while r < n and any(B.row(r)):
        r += 1
    if r == 0 or any(any(B.row(i)) for i in range(r, n)):
        raise InvalidInputError("B is not of the form [B1; 0]")
    if rank(B.submatrix(range(r), range(B.ncols))) != r:
        raise InvalidInputError("B1 is not of full row rank")
    rest = range(r, n)
    A22 = pair.A.submatrix(rest, rest)
    A21 = pair.A.submatrix(rest, range(r))
    return SystemPair(A22, A21 if A21.nrows else RationalMatrix.zeros(0, r), pair.meta)


def pair_verdict(pair: SystemPair, method: str = "direct-feasibility") -> HerdabilityVerdict:
    """Direct verdict on R(A, B); a pair with no states is herdable."""
    if pair.n == 0:
        return HerdabilityVerdict(True, method, primal_certificate=())
    return strictly_positive_in_image(controllability_matrix(pair), method)


def reduce_pair(pair: SystemPair) -> tuple[SystemPair, ReductionTrace]:
    """normalize_input then leader_block_reduction, recording the trace."""
    trace = ReductionTrace()
    normalized, T, perm = normalize_input(pair)
    trace.record("normalize_input", pair, normalized, permutation=perm, T=T, kept_columns=list(range(normalized.m)))
    reduced = leader_block_reduction(normalized)
    trace.record("leader_block_reduction", normalized, reduced, split=normalized.m)
    return reduced, trace


def diagonal_pair_herdability(Lambda: RationalMatrix, Gamma: Sequence) -> HerdabilityVerdict:
    """Herdability of (diag(λ), Γ) with Γ free of zeros.

    Herdable iff equal eigenvalues always come with same-sign Γ entries.
    The primal certificate solves a square Vandermonde system so that R u
    lands on a grouped, sign-matched target; the dual certificate is
    ``Γ_j e_i - Γ_i e_j`` for an offending pair, oriented nonnegative.
    """
    if not Lambda.is_diagonal():
        raise InvalidInputError("Lambda is not diagonal")
    gamma = tuple(Fraction(g) for g in Gamma)
    n = Lambda.nrows
    if len(gamma) != n:
        raise InvalidInputError("Gamma length does not match Lambda")
    if any(g == 0 for g in gamma):
        raise InvalidInputError("Gamma has a zero entry")
    lam = [Lambda[i, i] for i in range(n)]
    method = "vandermonde-diagonal"

    groups: dict[Fraction, list[int]] = {}
    for i, l in enumerate(lam):
        groups.setdefault(l, []).append(i)
    for members in groups.values():
        first = members[0]
        for j in members[1:]:
            if sign(gamma[first]) != sign(gamma[j]):
                i = first
                w = [Fraction(0)] * n
                w[i] = gamma[j]
                w[j] = -gamma[i]
                if w[i] < 0:
                    w = [-x for x in w]
                return HerdabilityVerdict(False, method, dual_certificate=tuple(w))

    eig = list(groups)
    s = len(eig)
    target = []
    for l in eig:
        members = groups[l]
        smallest = min(abs(gamma[i]) for i in members)
        target.append(sign(gamma[members[0]]) / smallest)
    V = RationalMatrix([[l ** k for k in range(s)] for l in eig])
    head = solve(V, target)
    u = tuple(head) + (Fraction(0),) * (n - s)
    return HerdabilityVerdict(True, method, primal_certificate=u)
