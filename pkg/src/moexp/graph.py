"""Immutable undirected attributed graphs with canonical orderings.

Nodes carry dense integer ids 0..n-1 and a fixed-length feature vector.
Edges are unordered pairs stored sorted as (lo, hi) and ordered
lexicographically, so an edge id (the position in the edge list) is
stable across runs and input permutations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DISCONNECTED = "disconnected"
CYCLIC = "cyclic"
MISSING_TARGET = "missing-target"


@dataclass(frozen=True, eq=False)
class Graph:
    """Canonical in-memory form of an undirected graph.

    ``adjacency[v]`` lists neighbors ascending; ``incidence[v]`` pairs each
    neighbor with the id of the connecting edge.
    """

    node_count: int
    features: np.ndarray
    labels: tuple | None
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    incidence: tuple[tuple[tuple[int, int], ...], ...]
    edge_index: dict = field(repr=False, default_factory=dict)

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_id(self, u: int, w: int) -> int:
        key = (u, w) if u < w else (w, u)
        return self.edge_index[key]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.labels == other.labels
            and self.edges == other.edges
            and np.array_equal(self.features, other.features)
        )


@dataclass(frozen=True)
class Subgraph:
    """Edge-induced subgraph anchored at a target node.

    ``edge_set`` holds sorted edge ids of the parent graph; ``node_set``
    holds the endpoints of those edges plus the target, sorted. Two
    subgraphs are equal when their targets and edge sets are equal.
    """

    target: int
    edge_set: tuple[int, ...]
    node_set: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.node_set)


@dataclass(frozen=True)
class CanonicalOrder:
    """Deterministic node and edge ranks relative to a target.

    ``node_rank[v]`` is the BFS discovery position from the target, ties
    broken by ascending node id; unreachable nodes come last, ascending.
    ``edge_rank[e]`` orders edges by the sorted pair of endpoint ranks.
    """

    node_rank: tuple[int, ...]
    edge_rank: tuple[int, ...]


def build_graph(features, edges: Iterable[Sequence[int]], labels=None) -> Graph:
    """Validate raw inputs and assemble a canonical Graph.

    Raises ValueError for ragged feature vectors, out-of-range node ids,
    self-loops, or duplicate edges (in either orientation).
    """
    rows = [np.asarray(f, dtype=float).reshape(-1) for f in features]
    n = len(rows)
    if n == 0:
        raise ValueError("graph needs at least one node")
    dim = rows[0].size
    if dim == 0:
        raise ValueError("feature vectors must be non-empty")
    for i, r in enumerate(rows):
        if r.size != dim:
            raise ValueError(f"feature length mismatch at node {i}: {r.size} != {dim}")
    feats = np.vstack(rows)

    label_tuple = None
    if labels is not None:
        labels = list(labels)
        if len(labels) != n:
            raise ValueError(f"label count {len(labels)} != node count {n}")
        label_tuple = tuple(None if l is None else int(l) for l in labels)

    seen: set[tuple[int, int]] = set()
    for pair in edges:
        u, w = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= w < n):
            raise ValueError(f"node id out of range in edge ({u}, {w})")
        if u == w:
            raise ValueError(f"self-loop at node {u} not allowed")
        key = (u, w) if u < w else (w, u)
        if key in seen:
            raise ValueError(f"duplicate edge ({u}, {w})")
        seen.add(key)

    edge_list = tuple(sorted(seen))
    edge_index = {e: i for i, e in enumerate(edge_list)}
    incidence_lists: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid, (u, w) in enumerate(edge_list):
        incidence_lists[u].append((w, eid))
        incidence_lists[w].append((u, eid))
    for lst in incidence_lists:
        lst.sort()
    adjacency = tuple(tuple(nbr for nbr, _ in lst) for lst in incidence_lists)
    incidence = tuple(tuple(lst) for lst in incidence_lists)
    return Graph(n, feats, label_tuple, edge_list, adjacency, incidence, edge_index)


def bfs_distances(graph: Graph, source: int) -> list:
    """Hop distance from ``source`` to every node; None when unreachable."""
    if not 0 <= source < graph.node_count:
        raise ValueError(f"node id out of range: {source}")
    dist: list = [None] * graph.node_count
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in graph.adjacency[u]:
            if dist[w] is None:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def canonical_order(graph: Graph, target: int) -> CanonicalOrder:
    """Rank nodes by BFS from ``target`` and edges by their endpoint ranks."""
    if not 0 <= target < graph.node_count:
        raise ValueError(f"node id out of range: {target}")
    dist = bfs_distances(graph, target)
    reachable = sorted((v for v in range(graph.node_count) if dist[v] is not None), key=lambda v: (dist[v], v))
    unreachable = [v for v in range(graph.node_count) if dist[v] is None]
    node_rank = [0] * graph.node_count
    for rank, v in enumerate(reachable + unreachable):
        node_rank[v] = rank

    keyed = sorted(
        range(len(graph.edges)),
        key=lambda e: tuple(sorted((node_rank[graph.edges[e][0]], node_rank[graph.edges[e][1]]))),
    )
    edge_rank = [0] * len(graph.edges)
    for rank, eid in enumerate(keyed):
        edge_rank[eid] = rank
    return CanonicalOrder(tuple(node_rank), tuple(edge_rank))


def l_hop_neighborhood(graph: Graph, v: int, hops: int) -> set:
    """Nodes within ``hops`` of v, excluding v itself."""
    if hops < 1:
        raise ValueError("hops must be positive")
    dist = bfs_distances(graph, v)
    return {u for u in range(graph.node_count) if u != v and dist[u] is not None and dist[u] <= hops}


def make_subgraph(graph: Graph, target: int, edge_ids: Iterable[int]) -> Subgraph:
    """Build a Subgraph from parent-graph edge ids, deriving the node set."""
    if not 0 <= target < graph.node_count:
        raise ValueError(f"node id out of range: {target}")
    ids = sorted(set(int(e) for e in edge_ids))
    if ids and not (0 <= ids[0] and ids[-1] < len(graph.edges)):
        raise ValueError("edge id out of range")
    nodes = {target}
    for eid in ids:
        u, w = graph.edges[eid]
        nodes.add(u)
        nodes.add(w)
    return Subgraph(target, tuple(ids), tuple(sorted(nodes)))


def validate_subgraph(graph: Graph, sub: Subgraph):
    """Check the tree discipline; return None when valid.

    Returns one of ``missing-target``, ``disconnected``, ``cyclic``. A valid
    subgraph is connected, acyclic, and contains its target.
    """
    for eid in sub.edge_set:
        if not 0 <= eid < len(graph.edges):
            raise ValueError(f"edge id out of range: {eid}")
    nodes = {sub.target}
    adj: dict[int, list[int]] = {sub.target: []}
    for eid in sub.edge_set:
        u, w = graph.edges[eid]
        for x in (u, w):
            nodes.add(x)
            adj.setdefault(x, [])
        adj[u].append(w)
        adj[w].append(u)
    if sub.target not in sub.node_set:
        return MISSING_TARGET
    reached = {sub.target}
    queue = deque([sub.target])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in reached:
                reached.add(w)
                queue.append(w)
    if reached != nodes:
        return DISCONNECTED
    if len(sub.edge_set) != len(nodes) - 1:
        return CYCLIC
    return None
