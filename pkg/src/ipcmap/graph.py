"""Minimal undirected weighted graph used by the metric algorithms."""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator, Mapping

Node = Hashable


def edge_key(u, v) -> tuple:
    """Canonical unordered pair: endpoints in sorted order."""
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Undirected simple graph with one numeric weight per edge.

    Nodes are kept in sorted order so every traversal is reproducible.
    Weights may be ``int``, ``float`` or ``fractions.Fraction``.
    """

    def __init__(self, nodes: Iterable[Node] = (), edges: Mapping[tuple, object] | Iterable = ()):
        self._adj: dict[Node, dict[Node, object]] = {}
        for n in nodes:
            self._adj.setdefault(n, {})
        if isinstance(edges, Mapping):
            edges = [(u, v, w) for (u, v), w in edges.items()]
        for item in edges:
            u, v, *rest = item
            self.add_edge(u, v, rest[0] if rest else 1)
        self._order: tuple | None = None

    def add_edge(self, u, v, weight=1) -> None:
        if u == v:
            raise ValueError(f"self-loop on {u!r}")
        self._adj.setdefault(u, {})[v] = weight
        self._adj.setdefault(v, {})[u] = weight
        self._order = None

    @property
    def nodes(self) -> tuple:
        if self._order is None:
            self._order = tuple(sorted(self._adj))
        return self._order

    def __contains__(self, node) -> bool:
        return node in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def neighbors(self, node) -> Mapping[Node, object]:
        return self._adj[node]

    def edges(self) -> Iterator[tuple]:
        """Yield ``(u, v, weight)`` with ``u < v``, sorted by endpoints."""
        for u in self.nodes:
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v, self._adj[u][v]

    def number_of_edges(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def weight(self, u, v):
        return self._adj[u][v]

    def total_weight(self):
        return sum(w for _, _, w in self.edges())

    def subgraph_edges(self, pairs: Iterable[tuple]) -> WeightedGraph:
        """Same node set, only the listed edges."""
        return WeightedGraph(self.nodes, [(u, v, self._adj[u][v]) for u, v in pairs])
