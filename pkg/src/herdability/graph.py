"""Signed digraph view of a square matrix.

Convention: ``A[i][j] != 0`` is an arc from node ``j`` to node ``i``
(row is the head, column the tail).  Nodes are 0-based.
"""

from __future__ import annotations

import itertools
import threading
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .matrix import InvalidInputError, RationalMatrix

INF = float("inf")


class NotATreeError(InvalidInputError):
    pass


@dataclass(frozen=True)
class ClusterPartition:
    clusters: tuple  # tuple of frozensets, ordered
    kind: str  # "clustering" or "structural"

    @property
    def k(self) -> int:
        return len(self.clusters)

    def cluster_of(self, node: int) -> int:
        for idx, c in enumerate(self.clusters):
            if node in c:
                return idx
        raise KeyError(node)

    def is_valid_for(self, A: RationalMatrix) -> bool:
        """Entrywise sign check: >= 0 inside clusters, <= 0 across."""
        label = {v: idx for idx, c in enumerate(self.clusters) for v in c}
        if sorted(label) != list(range(A.nrows)):
            return False
        for i, row in enumerate(A.rows):
            for j, x in enumerate(row):
                if x > 0 and label[i] != label[j]:
                    return False
                if x < 0 and label[i] == label[j]:
                    return False
        return self.kind != "structural" or self.k <= 2


@dataclass(frozen=True)
class TreeLayers:
    leader: int
    layers: tuple  # layers[d-1] is the sorted tuple of nodes at distance d
    parent: dict

    @property
    def depth(self) -> int:
        return len(self.layers)

    def layer(self, d: int) -> tuple:
        return (self.leader,) if d == 0 else self.layers[d - 1]


@dataclass(eq=False)
class SignedDigraph:
    A: RationalMatrix
    _succ: list = field(init=False, repr=False)
    _dist: dict = field(init=False, repr=False, default_factory=dict)
    _lock: threading.Lock = field(init=False, repr=False, default_factory=threading.Lock)

    def __post_init__(self):
        if not self.A.is_square():
            raise InvalidInputError(f"adjacency matrix must be square, got {self.A.shape}")
        self._succ = [[] for _ in range(self.n)]
        for i, row in enumerate(self.A.rows):
            for j, x in enumerate(row):
                if x:
                    self._succ[j].append(i)

    @property
    def n(self) -> int:
        return self.A.nrows

    def arcs(self) -> list[tuple[int, int, Fraction]]:
        """(tail, head, weight) triples sorted by tail then head."""
        return sorted((j, i, x) for i, row in enumerate(self.A.rows) for j, x in enumerate(row) if x)

    def weight(self, tail: int, head: int) -> Fraction:
        return self.A[head, tail]

    def successors(self, node: int) -> list[int]:
        return list(self._succ[node])

    def undirected_neighbors(self, node: int) -> set[int]:
        out = set(self._succ[node])
        out.update(j for j, x in enumerate(self.A.row(node)) if x)
        out.discard(node)
        return out

    def distances_from(self, source: int) -> tuple:
        if not 0 <= source < self.n:
            raise InvalidInputError(f"source {source} out of range for n={self.n}")
        cached = self._dist.get(source)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._dist.get(source)
            if cached is None:
                cached = _bfs(self._succ, source)
                self._dist[source] = cached
        return cached

    def distance(self, tail: int, head: int):
        return self.distances_from(tail)[head]


def _bfs(succ: list, source: int) -> tuple:
    dist = [INF] * len(succ)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if dist[w] == INF:
                dist[w] = dist[v] + 1
                queue.append(w)
    return tuple(dist)


def graph_from_adjacency(A: RationalMatrix) -> SignedDigraph:
    return SignedDigraph(A)


def distances_from(g: SignedDigraph, source: int) -> tuple:
    return g.distances_from(source)


def _components(nodes: Iterable[int], linked) -> list[frozenset]:
    """Connected components of the undirected relation ``linked(u, v)``."""
    nodes = sorted(nodes)
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in itertools.combinations(nodes, 2):
        if linked(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, set] = {}
    for v in nodes:
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(s) for s in groups.values()), key=min)


def _finest_partition(A: RationalMatrix, nodes: Iterable[int]) -> list[frozenset] | None:
    comps = _components(nodes, lambda a, b: A[a, b] > 0 or A[b, a] > 0)
    for c in comps:
        for i in c:
            for j in c:
                if A[i, j] < 0:
                    return None
    return comps


def clustering_balance(g: SignedDigraph, required_first_cluster: Iterable[int] | None = None) -> ClusterPartition | None:
    """Finest clustering-balanced partition, or one whose first cluster is fixed.

    Without a required cluster the result is the set of components of the
    positive-arc support (ordered by smallest node); every valid partition
    coarsens it.  A pair of opposite-sign arcs between two nodes makes
    balance impossible and yields ``None``.
    """
    A = g.A
    if required_first_cluster is None:
        comps = _finest_partition(A, range(g.n))
        return None if comps is None else ClusterPartition(tuple(comps), "clustering")

    first = frozenset(required_first_cluster)
    if not first or not first <= set(range(g.n)):
        raise InvalidInputError(f"required cluster {sorted(first)} is not a nonempty subset of the nodes")
    rest = [v for v in range(g.n) if v not in first]
    for i in first:
        if any(A[i, j] < 0 for j in first):
            return None
        if any(A[i, j] > 0 or A[j, i] > 0 for j in rest):
            return None
    comps = _finest_partition(A, rest)
    if comps is None:
        return None
    return ClusterPartition((first, *comps), "clustering")


def _component_graph(g: SignedDigraph):
    comps = _finest_partition(g.A, range(g.n))
    if comps is None:
        return None
    label = {v: idx for idx, c in enumerate(comps) for v in c}
    adj = {idx: set() for idx in range(len(comps))}
    for i, row in enumerate(g.A.rows):
        for j, x in enumerate(row):
            if x < 0:
                adj[label[i]].add(label[j])
                adj[label[j]].add(label[i])
    return comps, adj


def _two_colorings(comps, adj) -> list[list[dict]] | None:
    """Per connected part of the component graph, its two colorings."""
    color: dict[int, int] = {}
    parts = []
    for start in range(len(comps)):
        if start in color:
            continue
        color[start] = 0
        part = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in color:
                    color[w] = 1 - color[v]
                    part.append(w)
                    queue.append(w)
                elif color[w] == color[v]:
                    return None
        base = {v: color[v] for v in part}
        parts.append([base, {v: 1 - c for v, c in base.items()}])
    return parts


def _assemble(comps, coloring: dict) -> ClusterPartition:
    sides = [set(), set()]
    for idx, c in coloring.items():
        sides[c].update(comps[idx])
    clusters = tuple(frozenset(s) for s in sides if s)
    clusters = tuple(sorted(clusters, key=min))
    return ClusterPartition(clusters, "structural")


def structural_balance(g: SignedDigraph) -> ClusterPartition | None:
    """Two-cluster balanced partition (k = 1 when every arc is positive).

    Positive components are contracted and the negative-arc component
    graph is 2-colored; an odd negative cycle means no partition.
    """
    if g.n == 0:
        return ClusterPartition((), "structural")
    cg = _component_graph(g)
    if cg is None:
        return None
    comps, adj = cg
    parts = _two_colorings(comps, adj)
    if parts is None:
        return None
    coloring = {}
    for choices in parts:
        coloring.update(choices[0])
    return _assemble(comps, coloring)


def structural_partitions(g: SignedDigraph, limit: int = 1 << 12) -> Iterator[ClusterPartition]:
    """Every distinct structurally balanced partition, up to ``limit`` of them.

    When the negative-arc component graph is disconnected, each part may be
    flipped independently, so the partition is not unique.
    """
    cg = _component_graph(g)
    if cg is None:
        return
    comps, adj = cg
    parts = _two_colorings(comps, adj)
    if parts is None:
        return
    seen = set()
    # fixing the first part's orientation removes mirror duplicates
    choices = [parts[0][:1]] + [p for p in parts[1:]]
    for combo in itertools.islice(itertools.product(*choices), limit):
        coloring = {}
        for c in combo:
            coloring.update(c)
        partition = _assemble(comps, coloring)
        key = partition.clusters
        if key not in seen:
            seen.add(key)
            yield partition


def is_undirected_tree(g: SignedDigraph) -> bool:
    A = g.A
    if g.n == 0 or not A.is_symmetric():
        return False
    if any(A[i, i] for i in range(g.n)):
        return False
    edges = sum(1 for i in range(g.n) for j in range(i) if A[i, j])
    if edges != g.n - 1:
        return False
    return all(d != INF for d in g.distances_from(0))


def layer_decomposition(g: SignedDigraph, leader: int) -> TreeLayers:
    if not is_undirected_tree(g):
        raise NotATreeError("graph is not an undirected tree")
    if not 0 <= leader < g.n:
        raise InvalidInputError(f"leader {leader} out of range for n={g.n}")
    dist = g.distances_from(leader)
    depth = max(dist)
    layers = tuple(tuple(v for v in range(g.n) if dist[v] == d) for d in range(1, depth + 1))
    parent = {}
    for v in range(g.n):
        if v != leader:
            (p,) = [w for w in g.undirected_neighbors(v) if dist[w] == dist[v] - 1]
            parent[v] = p
    return TreeLayers(leader, layers, parent)
