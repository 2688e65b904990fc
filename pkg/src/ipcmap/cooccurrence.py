"""IPC co-occurrence graphs with Jaccard-normalized edges."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Mapping

from .corpus import Corpus, codes_at_level
from .graph import WeightedGraph, edge_key
from .ipc import IpcCode, IpcLevel

__all__ = [
    "Edge",
    "CooccurrenceGraph",
    "InvalidCounts",
    "jaccard",
    "round_half_up",
    "build_graph",
    "threshold_edges",
    "to_distance_graph",
]

log = logging.getLogger(__name__)


class InvalidCounts(ValueError):
    pass


def jaccard(n_i: int, n_j: int, n_ij: int) -> float:
    """Jaccard index of two codes from their patent counts and co-occurrence count."""
    if n_i < 1 or n_j < 1 or n_ij < 0 or n_ij > n_i or n_ij > n_j:
        raise InvalidCounts(f"inconsistent counts n_i={n_i}, n_j={n_j}, n_ij={n_ij}")
    if n_ij == 0:
        return 0.0
    return n_ij / (n_i + n_j - n_ij)


def round_half_up(value, places: int = 3) -> str:
    """Render ``value`` with ``places`` decimals, ties away from zero (0.2105 -> "0.211")."""
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(repr(float(value)))
    return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class Edge:
    n_ij: int
    union: int  # N_i + N_j - N_ij

    @property
    def jaccard(self) -> float:
        return self.n_ij / self.union

    @property
    def jaccard_exact(self) -> Fraction:
        return Fraction(self.n_ij, self.union)

    @property
    def distance(self) -> Fraction:
        """Inverse Jaccard index, exact."""
        return Fraction(self.union, self.n_ij)


@dataclass(frozen=True)
class CooccurrenceGraph:
    level: IpcLevel
    nodes: Mapping[IpcCode, int]
    edges: Mapping[tuple[IpcCode, IpcCode], Edge] = field(default_factory=dict)

    def __post_init__(self):
        for (u, v), e in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if not u < v:
                raise ValueError(f"edge key ({u}, {v}) not in canonical order")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u}, {v}) references unknown node")
            if e.union != self.nodes[u] + self.nodes[v] - e.n_ij:
                raise ValueError(f"edge ({u}, {v}) union does not match node counts")

    @property
    def sorted_nodes(self) -> list[IpcCode]:
        return sorted(self.nodes)

    @property
    def sorted_edges(self) -> list[tuple[IpcCode, IpcCode]]:
        return sorted(self.edges)

    def weighted(self, weight: str = "jaccard") -> WeightedGraph:
        """View for the metric algorithms; ``weight`` is jaccard, distance, n_ij or hops."""
        if weight == "hops":
            return WeightedGraph(self.nodes, {k: 1 for k in self.edges})
        getter = {
            "jaccard": lambda e: e.jaccard,
            "distance": lambda e: e.distance,
            "n_ij": lambda e: e.n_ij,
        }[weight]
        return WeightedGraph(self.nodes, {k: getter(e) for k, e in self.edges.items()})

    def restrict_edges(self, pairs: Iterable[tuple]) -> CooccurrenceGraph:
        """Same nodes, only the given edges (e.g. a spanning forest)."""
        keys = [edge_key(u, v) for u, v in pairs]
        return CooccurrenceGraph(self.level, dict(self.nodes), {k: self.edges[k] for k in sorted(keys)})


def build_graph(corpus: Corpus | Iterable, level: IpcLevel, min_occurrence: int = 2) -> CooccurrenceGraph:
    """Count code occurrences and pairwise co-occurrences at ``level``.

    Every code in at least ``min_occurrence`` patents becomes a node, even
    without any co-occurring partner. Co-occurrences are counted only between
    retained codes.
    """
    if min_occurrence < 1:
        raise ValueError("min_occurrence must be >= 1")
    level = IpcLevel(level)
    records = corpus.records if isinstance(corpus, Corpus) else corpus
    code_sets = [codes_at_level(r, level) for r in records]
    occurrence = Counter(itertools.chain.from_iterable(code_sets))
    nodes = {c: n for c, n in sorted(occurrence.items()) if n >= min_occurrence}

    pairs: Counter = Counter()
    for codes in code_sets:
        kept = sorted(c for c in codes if c in nodes)
        pairs.update(itertools.combinations(kept, 2))

    edges = {
        (u, v): Edge(n, nodes[u] + nodes[v] - n)
        for (u, v), n in sorted(pairs.items())
    }
    if not nodes:
        log.warning("no IPC code occurs in at least %d patents at %s level", min_occurrence, level.name.lower())
    return CooccurrenceGraph(level, nodes, edges)


def threshold_edges(graph: CooccurrenceGraph, r_min: float = 0.05) -> CooccurrenceGraph:
    """Drop edges whose Jaccard index is below ``r_min`` (inclusive bound); nodes stay."""
    if not 0 <= r_min <= 1:
        raise ValueError("r_min must lie in [0, 1]")
    # Compare exactly so that R == r_min is kept even when r_min is not a binary fraction.
    bound = Fraction(str(r_min)) if isinstance(r_min, float) else Fraction(r_min)
    kept = {k: e for k, e in graph.edges.items() if e.jaccard_exact >= bound}
    return CooccurrenceGraph(graph.level, dict(graph.nodes), kept)


def to_distance_graph(graph: CooccurrenceGraph) -> WeightedGraph:
    """Same topology, each edge weighted by the exact inverse Jaccard index."""
    return graph.weighted("distance")
