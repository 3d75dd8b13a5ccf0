"""Random instance generators shared by the test-suite and ``fuzz``.

All generators take an explicit :class:`random.Random` so runs are
reproducible from a seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .matrix import RationalMatrix, SystemPair, rank

SMALL = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2))
TREE_WEIGHTS = tuple(s * w for w in SMALL for s in (1, -1))


def magnitude(rng: random.Random) -> Fraction:
    return rng.choice(SMALL)


def random_matrix(rng: random.Random, nrows: int, ncols: int, density: float = 0.6,
                  values: Sequence = (1, -1, 2, -2, 3, Fraction(1, 2), Fraction(-1, 3))) -> RationalMatrix:
    return RationalMatrix(
        [[rng.choice(values) if rng.random() < density else 0 for _ in range(ncols)] for _ in range(nrows)]
    )


def random_pair(rng: random.Random, n: int, m: int, density: float = 0.5) -> SystemPair:
    return SystemPair(random_matrix(rng, n, n, density), random_matrix(rng, n, m, 0.7))


def random_leader_pair(rng: random.Random, n: int, m: int, density: float = 0.4) -> SystemPair:
    return SystemPair.with_leaders(random_matrix(rng, n, n, density), rng.sample(range(n), m))


def random_block_pair(rng: random.Random, n: int, r: int, m: int, density: float = 0.5) -> SystemPair:
    """Pair with ``B = [B1; 0]`` and B1 (r x m) of full row rank, r <= m."""
    while True:
        B1 = random_matrix(rng, r, m, 0.8)
        if rank(B1) == r:
            break
    B = B1.vstack(RationalMatrix.zeros(n - r, m))
    return SystemPair(random_matrix(rng, n, n, density), B)


def random_nonsingular(rng: random.Random, m: int) -> RationalMatrix:
    while True:
        T = random_matrix(rng, m, m, 0.8)
        if rank(T) == m:
            return T


def two_level_tree(a, b, c) -> SystemPair:
    """Depth-two tree: leader 0; followers 1, 2, 3; node 2 has children 4, 5."""
    A = RationalMatrix([
        [0, 1, a, 2, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [a, 0, 0, 0, b, c],
        [2, 0, 0, 0, 0, 0],
        [0, 0, b, 0, 0, 0],
        [0, 0, c, 0, 0, 0],
    ])
    return SystemPair.with_leaders(A, [0], {"name": f"two_level_tree(a={a}, b={b}, c={c})"})


def star(weights: Sequence) -> SystemPair:
    """Leader 0 joined to leaves 1..k with the given symmetric weights."""
    n = len(weights) + 1
    rows = [[0] * n for _ in range(n)]
    for leaf, w in enumerate(weights, start=1):
        rows[0][leaf] = rows[leaf][0] = w
    return SystemPair.with_leaders(RationalMatrix(rows), [0])


def _relabel(rng: random.Random, rows: list, leader: int) -> tuple[list, int]:
    n = len(rows)
    perm = list(range(n))
    rng.shuffle(perm)  # old node v becomes perm[v]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            out[perm[i]][perm[j]] = rows[i][j]
    return out, perm[leader]


def random_tree(rng: random.Random, layer_sizes: Sequence[int], layer_signs: Sequence[int] | None = None,
                weights: Sequence = TREE_WEIGHTS, shuffle: bool = True) -> SystemPair:
    """Tree with the given number of nodes per layer below the leader.

    With ``layer_signs`` every edge from layer d to layer d+1 gets sign
    ``layer_signs[d]``; otherwise signs come with the sampled weights.
    """
    n = 1 + sum(layer_sizes)
    rows = [[Fraction(0)] * n for _ in range(n)]
    prev = [0]
    nxt = 1
    for d, size in enumerate(layer_sizes):
        layer = list(range(nxt, nxt + size))
        for v in layer:
            p = rng.choice(prev)
            w = Fraction(rng.choice(weights))
            if layer_signs is not None:
                w = abs(w) * layer_signs[d]
            rows[v][p] = rows[p][v] = w
        prev = layer
        nxt += size
    leader = 0
    if shuffle:
        rows, leader = _relabel(rng, rows, leader)
    return SystemPair.with_leaders(RationalMatrix(rows), [leader])


def random_depth2_tree(rng: random.Random, max_n: int = 9) -> SystemPair:
    n = rng.randint(2, max_n)
    m1 = rng.randint(1, n - 1)
    return random_tree(rng, [m1, n - 1 - m1] if n - 1 - m1 else [m1])


def random_layer_sign_tree(rng: random.Random, max_n: int = 8) -> SystemPair:
    n = rng.randint(2, max_n)
    sizes = []
    left = n - 1
    while left:
        s = rng.randint(1, left)
        sizes.append(s)
        left -= s
    return random_tree(rng, sizes, [rng.choice((1, -1)) for _ in sizes])


def _partition(rng: random.Random, nodes: list, sizes: Sequence[int]) -> list[list[int]]:
    rng.shuffle(nodes)
    out, pos = [], 0
    for s in sizes:
        out.append(sorted(nodes[pos:pos + s]))
        pos += s
    return out


def _balanced_weight(rng: random.Random, same: bool) -> Fraction:
    return magnitude(rng) if same else -magnitude(rng)


def cluster_leader_instance(rng: random.Random, cluster_sizes: Sequence[int], density: float = 0.3) -> SystemPair:
    """Clustering-balanced graph whose first cluster is the leader set.

    Each leader targets one follower cluster and only sends arcs into its
    own cluster and that target, so every follower sits at distance 1
    from some leader and at distance >= 2 from leaders of other targets.
    Follower clusters are positively connected, so they are exactly the
    finest balanced partition of the followers.
    """
    n = sum(cluster_sizes)
    clusters = _partition(rng, list(range(n)), cluster_sizes)
    label = {v: c for c, members in enumerate(clusters) for v in members}
    leaders = clusters[0]
    k = len(clusters)
    target = {l: 1 + idx % (k - 1) for idx, l in enumerate(leaders)} if k > 1 else {}
    rows = [[Fraction(0)] * n for _ in range(n)]

    def put(tail, head):
        rows[head][tail] = _balanced_weight(rng, label[head] == label[tail])

    for p in range(1, k):
        owners = [l for l in leaders if target[l] == p]
        for i in clusters[p]:
            put(rng.choice(owners), i)
        # positive chain keeps the cluster a single positive component
        for tail, head in zip(clusters[p], clusters[p][1:]):
            if rng.random() < 0.5:
                tail, head = head, tail
            put(tail, head)
    for tail in range(n):
        for head in range(n):
            if rows[head][tail] or rng.random() >= density:
                continue
            if tail in target and label[head] not in (0, target[tail]):
                continue
            put(tail, head)
    return SystemPair.with_leaders(RationalMatrix(rows), leaders)


def split_leader_instance(rng: random.Random, sizes: tuple[int, int], leaders_per_side: tuple[int, int],
                          density: float = 0.3) -> SystemPair:
    """Structurally balanced graph with leaders on both sides.

    Followers get an arc from a same-side leader; leaders never send arcs
    to followers of the other side.
    """
    n = sum(sizes)
    sides = _partition(rng, list(range(n)), sizes)
    label = {v: s for s, members in enumerate(sides) for v in members}
    leaders = set()
    for s in (0, 1):
        leaders.update(rng.sample(sides[s], leaders_per_side[s]))
    rows = [[Fraction(0)] * n for _ in range(n)]

    def put(tail, head):
        rows[head][tail] = _balanced_weight(rng, label[head] == label[tail])

    for s in (0, 1):
        own = [l for l in sides[s] if l in leaders]
        for i in sides[s]:
            if i not in leaders:
                put(rng.choice(own), i)
    for tail in range(n):
        for head in range(n):
            if rows[head][tail] or rng.random() >= density:
                continue
            if tail in leaders and head not in leaders and label[head] != label[tail]:
                continue
            put(tail, head)
    return SystemPair.with_leaders(RationalMatrix(rows), sorted(leaders))


def random_diagonal_pair(rng: random.Random, n: int) -> tuple[RationalMatrix, tuple]:
    """Diagonal Λ with forced repeated eigenvalues and a zero-free Γ."""
    distinct = rng.randint(1, max(1, n - 1))
    pool = rng.sample([Fraction(x) for x in (-3, -2, -1, 0, 1, 2, 3, 5)] + [Fraction(1, 2)], distinct)
    lam = [rng.choice(pool) for _ in range(n)]
    gamma = tuple(rng.choice((1, -1)) * magnitude(rng) for _ in range(n))
    return RationalMatrix.diag(lam), gamma
