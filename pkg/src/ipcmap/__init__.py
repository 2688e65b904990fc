"""IPC code co-occurrence maps: from patent records to networks, metrics, layouts and exports."""

from .cooccurrence import CooccurrenceGraph, Edge, build_graph, jaccard, threshold_edges, to_distance_graph
from .corpus import (
    Corpus,
    PatentRecord,
    annual_counts,
    codes_at_level,
    filter_by_applicant,
    filter_by_publication_year,
    group_counts,
    load_corpus,
)
from .graph import WeightedGraph
from .ipc import IpcCode, IpcLevel, format_ipc_code, level_of, parse_ipc_code, truncate_to_level
from .layout import LayoutParams, LayoutPositions, force_atlas2
from .metrics import (
    MetricsTable,
    betweenness_centrality,
    connected_components,
    degree,
    louvain_communities,
    minimum_spanning_forest,
    modularity,
)

__version__ = "0.1.0"
