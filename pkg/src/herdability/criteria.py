"""Graph-structural herdability criteria.

Each check returns a :class:`CriterionReport`.  Sufficient criteria only
ever imply "herdable"; the tree criteria for depth one and two are exact
characterizations.  :func:`run_all_criteria` always computes the direct
verdict as ground truth and flags any exact criterion that disagrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graph import (
    INF,
    SignedDigraph,
    TreeLayers,
    clustering_balance,
    is_undirected_tree,
    layer_decomposition,
    structural_balance,
    structural_partitions,
)
from .matrix import InvalidInputError, RationalMatrix, SystemPair, sign
from .positivity import HerdabilityVerdict, is_unisigned
from .reductions import (
    NotNormalizableError,
    ReductionTrace,
    diagonal_pair_herdability,
    pair_verdict,
    reduce_pair,
)

HERDABLE = "herdable"
NOT_HERDABLE = "not-herdable"

CLUSTER_LEADER = "cluster-leader"
SPLIT_LEADER = "split-leader"
TREE_LAYER_SIGN = "tree-layer-sign"
TREE_DEPTH1 = "tree-depth1"
TREE_DEPTH2 = "tree-depth2"
DIAGONAL_PAIR = "diagonal-pair"

CANONICAL_ORDER = (CLUSTER_LEADER, SPLIT_LEADER, TREE_LAYER_SIGN, TREE_DEPTH1, TREE_DEPTH2, DIAGONAL_PAIR)


class PreconditionError(InvalidInputError):
    """The pair does not have the shape a criterion is stated for."""


class InternalConsistencyError(AssertionError):
    pass


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    hypotheses_hold: bool
    implied_verdict: str | None
    strength: str  # "sufficient" or "iff"
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.implied_verdict is not None) != self.hypotheses_hold:
            raise ValueError("implied_verdict is present iff the hypotheses hold")
        if self.strength == "sufficient" and self.implied_verdict == NOT_HERDABLE:
            raise ValueError("a sufficient criterion cannot imply non-herdability")


def _sufficient(name: str, holds: bool, evidence: dict) -> CriterionReport:
    return CriterionReport(name, holds, HERDABLE if holds else None, "sufficient", evidence)


def _iff(name: str, herdable: bool, evidence: dict) -> CriterionReport:
    return CriterionReport(name, True, HERDABLE if herdable else NOT_HERDABLE, "iff", evidence)


def _require_selection(pair: SystemPair):
    if pair.leaders is None:
        raise PreconditionError("B is not a selection matrix")


def _closest_leader(g: SignedDigraph, candidates, target: int, rivals) -> tuple | None:
    """First leader strictly closer to ``target`` than to every rival."""
    for l in sorted(candidates):
        dist = g.distances_from(l)
        d = dist[target]
        if d == INF:
            continue
        if all(d < dist[j] for j in rivals):
            return l, d
    return None


def check_cluster_leader_criterion(pair: SystemPair, g: SignedDigraph | None = None) -> CriterionReport:
    """Leaders form one cluster of a clustering-balanced graph.

    Holds when every follower ``i`` in cluster ``p`` has a leader strictly
    closer to ``i`` than to any node of the clusters other than the
    leaders' and ``p``.  A follower must be reachable from its witness.
    """
    _require_selection(pair)
    g = g or SignedDigraph(pair.A)
    leaders = frozenset(pair.leaders)
    partition = clustering_balance(g, leaders)
    if partition is None:
        return _sufficient(CLUSTER_LEADER, False, {"reason": "leaders are not a cluster of a balanced partition"})
    clusters = partition.clusters
    witnesses = []
    for p in range(1, len(clusters)):
        rivals = [j for q, c in enumerate(clusters) if q not in (0, p) for j in c]
        for i in sorted(clusters[p]):
            found = _closest_leader(g, leaders, i, rivals)
            if found is None:
                return _sufficient(CLUSTER_LEADER, False, {
                    "reason": "distance hypothesis fails",
                    "clusters": [sorted(c) for c in clusters],
                    "follower": i,
                })
            witnesses.append({"follower": i, "leader": found[0], "distance": found[1]})
    # follower clusters with no arcs between them could be merged
    A = pair.A
    coarsenable = any(
        not any(A[i, j] or A[j, i] for i in clusters[p] for j in clusters[q])
        for p in range(1, len(clusters)) for q in range(p + 1, len(clusters))
    )
    return _sufficient(CLUSTER_LEADER, True, {
        "clusters": [sorted(c) for c in clusters],
        "witnesses": witnesses,
        "coarsenable": coarsenable,
    })


def _split_conditions(g: SignedDigraph, clusters, leaders) -> tuple[list, dict | None]:
    witnesses = []
    for side in (0, 1):
        own_leaders = clusters[side] & leaders
        rivals = sorted(clusters[1 - side] - leaders)
        for i in sorted(clusters[side] - leaders):
            found = _closest_leader(g, own_leaders, i, rivals)
            if found is None:
                return witnesses, {"follower": i, "condition": "a" if side == 0 else "b"}
            witnesses.append({"follower": i, "leader": found[0], "distance": found[1]})
    return witnesses, None


def check_split_leader_criterion(pair: SystemPair, g: SignedDigraph | None = None) -> CriterionReport:
    """Structurally balanced graph with leaders on both sides.

    Every follower needs a same-side leader strictly closer to it than to
    any follower on the other side.  All balanced 2-partitions are tried.
    """
    _require_selection(pair)
    g = g or SignedDigraph(pair.A)
    leaders = frozenset(pair.leaders)
    if structural_balance(g) is None:
        return _sufficient(SPLIT_LEADER, False, {"reason": "graph is not structurally balanced"})
    failure = {"reason": "no balanced partition with leaders in both clusters"}
    for partition in structural_partitions(g):
        if partition.k != 2:
            continue
        clusters = partition.clusters
        if not (clusters[0] & leaders and clusters[1] & leaders):
            continue
        witnesses, bad = _split_conditions(g, clusters, leaders)
        if bad is None:
            return _sufficient(SPLIT_LEADER, True, {
                "clusters": [sorted(c) for c in clusters],
                "witnesses": witnesses,
            })
        failure = {"reason": "distance hypothesis fails", "clusters": [sorted(c) for c in clusters], **bad}
    return _sufficient(SPLIT_LEADER, False, failure)


def _tree_layers(pair: SystemPair, g: SignedDigraph | None) -> TreeLayers:
    if pair.leaders is None or pair.m != 1:
        raise PreconditionError("B must be a single canonical column")
    g = g or SignedDigraph(pair.A)
    if not is_undirected_tree(g):
        raise PreconditionError("graph of A is not an undirected tree")
    return layer_decomposition(g, pair.leaders[0])


def _layer_signs(pair: SystemPair, layers: TreeLayers) -> list[list[int]]:
    """Distinct edge signs from layer d to layer d+1, for each d."""
    out = []
    for d in range(1, layers.depth + 1):
        out.append(sorted({sign(pair.A[v, layers.parent[v]]) for v in layers.layer(d)}))
    return out


def check_tree_layer_sign_criterion(pair: SystemPair, g: SignedDigraph | None = None) -> CriterionReport:
    layers = _tree_layers(pair, g)
    signs = _layer_signs(pair, layers)
    holds = all(len(s) == 1 for s in signs)
    evidence = {"layers": [list(l) for l in layers.layers], "layer_signs": signs}
    if not holds:
        evidence["first_mixed_layer"] = next(d for d, s in enumerate(signs) if len(s) > 1)
    return _sufficient(TREE_LAYER_SIGN, holds, evidence)


def check_tree_depth1_criterion(pair: SystemPair, g: SignedDigraph | None = None) -> CriterionReport:
    """Star around the leader: herdable iff all edges share one sign."""
    layers = _tree_layers(pair, g)
    if layers.depth != 1:
        raise PreconditionError(f"followers must all be at distance 1, tree depth is {layers.depth}")
    edges = [pair.A[v, layers.leader] for v in layers.layers[0]]
    herdable = is_unisigned(edges)
    return _iff(TREE_DEPTH1, herdable, {"edge_signs": [sign(w) for w in edges]})


def check_tree_depth2_criterion(pair: SystemPair, g: SignedDigraph | None = None) -> CriterionReport:
    """Tree of depth at most two around the leader.

    With Λ = A23 A32 (diagonal: Λ_ii is the sum of squared weights from
    follower i to its children), every pair i, j of first-layer followers
    with Λ_ii = Λ_jj, i = j included, needs same-sign leader edges and
    same-sign edges towards their children.
    """
    layers = _tree_layers(pair, g)
    if layers.depth not in (1, 2):
        raise PreconditionError(f"followers must be within distance 2, tree depth is {layers.depth}")
    A = pair.A
    F1 = layers.layers[0]
    F2 = layers.layers[1] if layers.depth == 2 else ()
    gamma = [A[i, layers.leader] for i in F1]
    A32 = A.submatrix(F2, F1)
    A23 = A.submatrix(F1, F2)
    Lam = A23 @ A32
    if not Lam.is_diagonal():
        raise InternalConsistencyError("A23 A32 is not diagonal on a tree")
    evidence = {"layers": [list(F1), list(F2)], "lambda": [Lam[i, i] for i in range(len(F1))]}
    for a in range(len(F1)):
        for b in range(a, len(F1)):
            if Lam[a, a] != Lam[b, b]:
                continue
            if gamma[a] * gamma[b] <= 0:
                evidence["failing_pair"] = [F1[a], F1[b]]
                evidence["failed_condition"] = "i"
                return _iff(TREE_DEPTH2, False, evidence)
            children = [x + y for x, y in zip(A32.column(a), A32.column(b))] if a != b else list(A32.column(a))
            if any(children) and not is_unisigned(children):
                evidence["failing_pair"] = [F1[a], F1[b]]
                evidence["failed_condition"] = "ii"
                return _iff(TREE_DEPTH2, False, evidence)
    return _iff(TREE_DEPTH2, True, evidence)


def check_diagonal_reduced_pair(reduced: SystemPair) -> CriterionReport | None:
    """Exact check on a reduced pair that is (diagonal, zero-free column)."""
    if reduced.n == 0 or reduced.m != 1 or not reduced.A.is_diagonal():
        return None
    gamma = reduced.B.column(0)
    if any(x == 0 for x in gamma):
        return None
    v = diagonal_pair_herdability(reduced.A, gamma)
    return _iff(DIAGONAL_PAIR, v.herdable, {"eigenvalues": [reduced.A[i, i] for i in range(reduced.n)]})


@dataclass
class CriteriaRun:
    reports: list
    verdict: HerdabilityVerdict
    trace: ReductionTrace | None = None
    reduced_verdict: HerdabilityVerdict | None = None
    disagreements: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.disagreements


_CHECKS = (
    (CLUSTER_LEADER, check_cluster_leader_criterion),
    (SPLIT_LEADER, check_split_leader_criterion),
    (TREE_LAYER_SIGN, check_tree_layer_sign_criterion),
    (TREE_DEPTH1, check_tree_depth1_criterion),
    (TREE_DEPTH2, check_tree_depth2_criterion),
)


def run_all_criteria(pair: SystemPair) -> CriteriaRun:
    verdict = pair_verdict(pair)
    g = SignedDigraph(pair.A)
    reports = []
    for _, check in _CHECKS:
        try:
            reports.append(check(pair, g))
        except PreconditionError:
            continue

    run = CriteriaRun(reports, verdict)
    try:
        reduced, trace = reduce_pair(pair)
    except NotNormalizableError:
        reduced = None
    if reduced is not None:
        run.trace = trace
        run.reduced_verdict = pair_verdict(reduced)
        if run.reduced_verdict.herdable != verdict.herdable:
            run.disagreements.append({"source": "leader_block_reduction", "reduced": run.reduced_verdict.herdable})
        diag = check_diagonal_reduced_pair(reduced)
        if diag is not None:
            reports.append(diag)

    for r in reports:
        if r.implied_verdict is None:
            continue
        implied = r.implied_verdict == HERDABLE
        if implied != verdict.herdable and (r.strength == "iff" or implied):
            run.disagreements.append({"source": r.criterion, "implied": r.implied_verdict})
    reports.sort(key=lambda r: CANONICAL_ORDER.index(r.criterion))
    return run
