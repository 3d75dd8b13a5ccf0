"""Search for minimal leader sets that make a network herdable."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .matrix import InvalidInputError, RationalMatrix, SystemPair
from .positivity import HerdabilityVerdict
from .reductions import pair_verdict


@dataclass(frozen=True)
class DesignResult:
    minimal_sets: tuple  # ((leaders, verdict), ...) in canonical order
    explored: int
    budget: int

    @property
    def sets(self) -> list[tuple]:
        return [s for s, _ in self.minimal_sets]


def herdable_with_leaders(A: RationalMatrix, leaders) -> HerdabilityVerdict:
    leaders = sorted(leaders)
    if not leaders:
        raise InvalidInputError("leader set is empty")
    return pair_verdict(SystemPair.with_leaders(A, leaders))


def minimal_herdable_leader_sets(
    A: RationalMatrix, max_size: int, *, prune: bool = True, check_prunes: bool = False
) -> DesignResult:
    """All minimal herdable leader sets with at most ``max_size`` nodes.

    Candidates go by cardinality, then lexicographically.  Adding a leader
    only enlarges the controllability image, so supersets of a herdable
    set are skipped; ``check_prunes`` evaluates them anyway and asserts it.
    Without pruning every candidate is evaluated and minimality is
    filtered afterwards.
    """
    n = A.nrows
    if not 1 <= max_size <= n:
        raise InvalidInputError(f"max_size must be in [1, {n}], got {max_size}")
    found: list[tuple] = []
    herdable_sets: list[frozenset] = []
    explored = 0
    for size in range(1, max_size + 1):
        for cand in itertools.combinations(range(n), size):
            s = frozenset(cand)
            dominated = any(h <= s for h in herdable_sets)
            if prune and dominated:
                if check_prunes:
                    assert herdable_with_leaders(A, cand).herdable, f"monotonicity violated at {cand}"
                continue
            explored += 1
            verdict = herdable_with_leaders(A, cand)
            if verdict.herdable:
                if not dominated:
                    found.append((cand, verdict))
                herdable_sets.append(s)
    return DesignResult(tuple(found), explored, max_size)
