"""Network statistics: degree, components, betweenness, Louvain communities, spanning forests."""

from __future__ import annotations

import heapq
import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .cooccurrence import CooccurrenceGraph
from .graph import WeightedGraph

__all__ = [
    "UnknownNode",
    "PartitionMismatch",
    "SpanningForest",
    "MetricsRow",
    "MetricsTable",
    "degree",
    "connected_components",
    "component_labels",
    "betweenness_centrality",
    "modularity",
    "louvain_levels",
    "louvain_communities",
    "minimum_spanning_forest",
    "compute_metrics",
]


class UnknownNode(KeyError):
    pass


class PartitionMismatch(ValueError):
    pass


def _as_weighted(graph, weight: str) -> WeightedGraph:
    if isinstance(graph, CooccurrenceGraph):
        return graph.weighted(weight)
    return graph


def degree(graph, node) -> int:
    g = _as_weighted(graph, "hops")
    if node not in g:
        raise UnknownNode(node)
    return len(g.neighbors(node))


def connected_components(graph) -> list[list]:
    """Components as sorted member lists, largest first, ties by smallest member."""
    g = _as_weighted(graph, "hops")
    seen = set()
    comps = []
    for start in g.nodes:
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def component_labels(components: Sequence[Sequence]) -> dict:
    return {n: i for i, comp in enumerate(components) for n in comp}


def _sssp_hops(adj, s):
    """BFS from ``s`` over integer adjacency lists; returns Brandes bookkeeping."""
    n = len(adj)
    order = []
    preds = [[] for _ in range(n)]
    sigma = [0] * n
    sigma[s] = 1
    dist = [-1] * n
    dist[s] = 0
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        dv = dist[v] + 1
        for w, _ in adj[v]:
            if dist[w] < 0:
                dist[w] = dv
                queue.append(w)
            if dist[w] == dv:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def _sssp_weighted(adj, s):
    """Dijkstra variant of :func:`_sssp_hops`; weights are compared exactly."""
    n = len(adj)
    order = []
    preds = [[] for _ in range(n)]
    sigma = [0] * n
    sigma[s] = 1
    done = [False] * n
    seen = {s: 0}
    tie = itertools.count()
    heap = [(0, next(tie), s, s)]
    while heap:
        d, _, pred, v = heapq.heappop(heap)
        if done[v]:
            continue
        if pred != v:
            sigma[v] += sigma[pred]
        order.append(v)
        done[v] = True
        for w, weight in adj[v]:
            if done[w]:
                continue
            vw = d + weight
            if w not in seen or vw < seen[w]:
                seen[w] = vw
                heapq.heappush(heap, (vw, next(tie), v, w))
                sigma[w] = 0
                preds[w] = [v]
            elif vw == seen[w]:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def betweenness_centrality(graph, normalized: bool = True, use_weights: bool = False) -> dict:
    """Brandes betweenness on an undirected graph.

    Normalization divides by ``(n-1)(n-2)/2`` with ``n`` the node count of the
    whole graph, also when it is disconnected. With ``use_weights`` path
    lengths are summed edge weights; for a co-occurrence graph those are the
    inverse Jaccard distances.
    """
    g = _as_weighted(graph, "distance" if use_weights else "hops")
    nodes = g.nodes
    index = {u: i for i, u in enumerate(nodes)}
    adj = [[(index[v], w) for v, w in sorted(g.neighbors(u).items())] for u in nodes]
    n = len(nodes)
    bc = [0.0] * n
    sssp = _sssp_weighted if use_weights else _sssp_hops
    for s in range(n):
        order, preds, sigma = sssp(adj, s)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    # Each unordered pair was counted from both endpoints.
    scale = 0.5
    if normalized:
        scale = 1.0 / ((n - 1) * (n - 2)) if n > 2 else 0.0
    return {u: bc[i] * scale for i, u in enumerate(nodes)}


def modularity(graph, partition: Mapping, resolution: float = 1.0) -> float:
    """Weighted Newman-Girvan modularity with a resolution factor on the null model."""
    g = _as_weighted(graph, "jaccard")
    if set(partition) != set(g.nodes):
        raise PartitionMismatch("partition does not cover exactly the graph's nodes")
    m = float(g.total_weight())
    if m == 0:
        return 0.0
    internal: dict = {}
    total: dict = {}
    for u in g.nodes:
        c = partition[u]
        total[c] = total.get(c, 0.0) + sum(float(w) for w in g.neighbors(u).values())
    for u, v, w in g.edges():
        if partition[u] == partition[v]:
            internal[partition[u]] = internal.get(partition[u], 0.0) + 2.0 * float(w)
    two_m = 2.0 * m
    return math.fsum(
        internal.get(c, 0.0) / two_m - resolution * (tot / two_m) ** 2 for c, tot in total.items()
    )


def _one_level(adj, k, two_m, resolution, rng):
    """Local moving phase over an aggregated graph; returns community index per node."""
    n = len(adj)
    comm = list(range(n))
    tot = list(k)
    order = list(range(n))
    rng.shuffle(order)
    moved_any = False
    while True:
        moved = False
        for i in order:
            ci = comm[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[ci] -= ki
            best = ci
            best_gain = links.get(ci, 0.0) - resolution * tot[ci] * ki / two_m
            for c, w in links.items():
                gain = w - resolution * tot[c] * ki / two_m
                if gain > best_gain + 1e-12 * max(1.0, abs(best_gain)):
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moved = True
                moved_any = True
        if not moved:
            break
    return comm, moved_any


def louvain_levels(graph, resolution: float = 1.0, seed: int = 0) -> Iterator[dict]:
    """Yield the partition (node -> community index) reached after each Louvain level."""
    g = _as_weighted(graph, "jaccard")
    nodes = list(g.nodes)
    index = {u: i for i, u in enumerate(nodes)}
    adj = [dict() for _ in nodes]
    for u, v, w in g.edges():
        adj[index[u]][index[v]] = float(w)
        adj[index[v]][index[u]] = float(w)
    loops = [0.0] * len(nodes)
    two_m = 2.0 * float(g.total_weight())
    member = list(range(len(nodes)))  # original node -> current super node
    rng = random.Random(seed)
    yielded = False
    while two_m > 0:
        k = [sum(a.values()) + 2.0 * loops[i] for i, a in enumerate(adj)]
        comm, moved = _one_level(adj, k, two_m, resolution, rng)
        if not moved:
            break
        relabel: dict[int, int] = {}
        for c in comm:
            relabel.setdefault(c, len(relabel))
        comm = [relabel[c] for c in comm]
        member = [comm[s] for s in member]
        yield {u: member[i] for i, u in enumerate(nodes)}
        yielded = True
        size = len(relabel)
        new_adj = [dict() for _ in range(size)]
        new_loops = [0.0] * size
        for i, a in enumerate(adj):
            ci = comm[i]
            new_loops[ci] += loops[i]
            for j, w in a.items():
                cj = comm[j]
                if ci == cj:
                    if i < j:
                        new_loops[ci] += w
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        adj, loops = new_adj, new_loops
    if not yielded:
        yield {u: i for i, u in enumerate(nodes)}


def _renumber(partition: Mapping) -> dict:
    groups: dict = {}
    for u in sorted(partition):
        groups.setdefault(partition[u], []).append(u)
    ranked = sorted(groups.values(), key=lambda members: (-len(members), members[0]))
    return {u: label for label, members in enumerate(ranked) for u in members}


def louvain_communities(graph, resolution: float = 1.0, seed: int = 0) -> tuple[dict, float]:
    """Multi-level Louvain on Jaccard weights.

    Labels are renumbered from 0 by descending community size (ties broken
    by the smallest member). Returns the partition and its modularity.
    """
    g = _as_weighted(graph, "jaccard")
    if len(g) == 0:
        raise ValueError("Louvain needs at least one node")
    last = None
    for last in louvain_levels(g, resolution, seed):
        pass
    partition = _renumber(last)
    return partition, modularity(g, partition, resolution)


@dataclass(frozen=True)
class SpanningForest:
    nodes: tuple
    edges: dict = field(default_factory=dict)  # (u, v) -> distance, u < v

    @property
    def total_weight(self):
        return sum(self.edges.values())

    def as_graph(self) -> WeightedGraph:
        return WeightedGraph(self.nodes, self.edges)


def minimum_spanning_forest(distance_graph) -> SpanningForest:
    """Kruskal over all edges sorted by (distance, source, target)."""
    g = _as_weighted(distance_graph, "distance")
    parent = {u: u for u in g.nodes}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    chosen = {}
    for u, v, w in sorted(g.edges(), key=lambda e: (e[2], e[0], e[1])):
        if not w > 0:
            raise ValueError(f"edge ({u}, {v}) has non-positive distance {w}")
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen[(u, v)] = w
    return SpanningForest(g.nodes, dict(sorted(chosen.items())))


@dataclass(frozen=True)
class MetricsRow:
    code: object
    occurrence_count: int
    degree: int
    betweenness: float
    modularity_class: int | None = None
    component_id: int | None = None
    mst_degree: int | None = None
    mst_betweenness: float | None = None


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple[MetricsRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def by_node(self) -> dict:
        return {r.code: r for r in self.rows}


def compute_metrics(
    graph: CooccurrenceGraph,
    partition: Mapping | None = None,
    mst_graph: CooccurrenceGraph | None = None,
    *,
    use_weights: bool = False,
) -> MetricsTable:
    """Per-node table, most frequent codes first."""
    hops = _as_weighted(graph, "hops")
    mst_hops = _as_weighted(mst_graph, "hops") if mst_graph is not None else None
    bc = betweenness_centrality(graph, use_weights=use_weights)
    comps = component_labels(connected_components(hops))
    mst_bc = betweenness_centrality(mst_graph, use_weights=use_weights) if mst_graph is not None else None
    rows = []
    for code in sorted(graph.nodes, key=lambda c: (-graph.nodes[c], c)):
        rows.append(
            MetricsRow(
                code=code,
                occurrence_count=graph.nodes[code],
                degree=len(hops.neighbors(code)),
                betweenness=bc[code],
                modularity_class=None if partition is None else partition[code],
                component_id=comps[code],
                mst_degree=None if mst_hops is None else len(mst_hops.neighbors(code)),
                mst_betweenness=None if mst_bc is None else mst_bc[code],
            )
        )
    return MetricsTable(tuple(rows))
