"""Serialization of graphs, metrics and layouts: GraphML, GEXF, DOT, CSV, SVG.

Every writer is a pure function returning UTF-8 bytes with nodes ordered by
canonical code text and edges by canonical pair, so repeated exports are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .cooccurrence import CooccurrenceGraph, round_half_up
from .layout import LayoutPositions
from .metrics import MetricsTable

__all__ = [
    "UnsupportedFormat",
    "MissingPositions",
    "EXPORT_FORMATS",
    "PALETTE",
    "RenderStyle",
    "export_graph",
    "nodes_csv",
    "edges_csv",
    "metrics_csv",
    "positions_csv",
    "render_svg",
    "network_summary",
    "fmt_real",
    "fmt_score",
]

EXPORT_FORMATS = ("graphml", "gexf", "dot", "csv-edgelist")

# 16 high-contrast categorical colors; community k uses PALETTE[k % 16].
PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231",
    "#911eb4", "#42d4f4", "#f032e6", "#bfef45",
    "#fabed4", "#469990", "#dcbeff", "#9a6324",
    "#800000", "#aaffc3", "#808000", "#000075",
)
PROLIFIC_COLOR = "#d62728"
PLAIN_COLOR = "#9e9e9e"


class UnsupportedFormat(ValueError):
    pass


class MissingPositions(ValueError):
    pass


def fmt_real(x) -> str:
    """Shortest round-tripping text of a float."""
    return repr(float(x))


def fmt_score(x) -> str:
    """Centrality/modularity scores: 6 decimals, ties rounded away from zero."""
    return round_half_up(float(x), 6)


def _node_attrs(graph: CooccurrenceGraph, metrics: MetricsTable | None, positions: LayoutPositions | None):
    """(name, type, {node: text}) columns in a fixed order."""
    cols = [("occurrence", "int", {c: str(n) for c, n in graph.nodes.items()})]
    if metrics is not None:
        rows = metrics.by_node()
        missing = set(graph.nodes) - set(rows)
        if missing:
            raise ValueError(f"metrics missing for {len(missing)} nodes")
        cols.append(("degree", "int", {c: str(rows[c].degree) for c in graph.nodes}))
        cols.append(("betweenness", "double", {c: fmt_score(rows[c].betweenness) for c in graph.nodes}))
        if all(rows[c].modularity_class is not None for c in graph.nodes):
            cols.append(("modularity_class", "int", {c: str(rows[c].modularity_class) for c in graph.nodes}))
        if all(rows[c].component_id is not None for c in graph.nodes):
            cols.append(("component", "int", {c: str(rows[c].component_id) for c in graph.nodes}))
    if positions is not None:
        _check_positions(graph, positions)
        cols.append(("x", "double", {c: fmt_real(positions[c][0]) for c in graph.nodes}))
        cols.append(("y", "double", {c: fmt_real(positions[c][1]) for c in graph.nodes}))
    return cols


def _edge_attrs(graph: CooccurrenceGraph, distances: bool):
    cols = [
        ("n_ij", "int", {k: str(e.n_ij) for k, e in graph.edges.items()}),
        ("jaccard", "double", {k: fmt_real(e.jaccard) for k, e in graph.edges.items()}),
    ]
    if distances:
        cols.append(("distance", "double", {k: fmt_real(e.distance) for k, e in graph.edges.items()}))
    return cols


def _check_positions(graph, positions):
    if positions is None or any(c not in positions.positions for c in graph.nodes):
        raise MissingPositions("positions do not cover every node")


def _graphml(graph, node_cols, edge_cols) -> str:
    ids = {c: f"n{i}" for i, c in enumerate(graph.sorted_nodes)}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"'
        ' xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"'
        ' xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
    ]
    for name, typ, _ in node_cols:
        out.append(f'  <key id="{name}" for="node" attr.name="{name}" attr.type="{typ}"/>')
    for name, typ, _ in edge_cols:
        out.append(f'  <key id="e_{name}" for="edge" attr.name="{name}" attr.type="{typ}"/>')
    out.append(f'  <graph id="{graph.level.name.lower()}" edgedefault="undirected">')
    for c in graph.sorted_nodes:
        out.append(f'    <node id="{ids[c]}">')
        out.append(f'      <data key="label">{escape(str(c))}</data>')
        for name, _, values in node_cols:
            out.append(f'      <data key="{name}">{values[c]}</data>')
        out.append("    </node>")
    for k in graph.sorted_edges:
        u, v = k
        out.append(f'    <edge source="{ids[u]}" target="{ids[v]}">')
        for name, _, values in edge_cols:
            out.append(f'      <data key="e_{name}">{values[k]}</data>')
        out.append("    </edge>")
    out += ["  </graph>", "</graphml>", ""]
    return "\n".join(out)


_GEXF_TYPES = {"int": "integer", "double": "double", "string": "string"}


def _gexf(graph, node_cols, edge_cols, positions, metrics) -> str:
    ids = {c: f"n{i}" for i, c in enumerate(graph.sorted_nodes)}
    node_cols = [col for col in node_cols if col[0] not in ("x", "y")]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<gexf xmlns="http://www.gexf.net/1.2draft" xmlns:viz="http://www.gexf.net/1.2draft/viz"'
        ' xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"'
        ' xsi:schemaLocation="http://www.gexf.net/1.2draft http://www.gexf.net/1.2draft/gexf.xsd" version="1.2">',
        "  <meta>",
        "    <creator>ipcmap</creator>",
        "  </meta>",
        '  <graph defaultedgetype="undirected" mode="static">',
        '    <attributes class="node" mode="static">',
    ]
    for i, (name, typ, _) in enumerate(node_cols):
        out.append(f'      <attribute id="{i}" title="{name}" type="{_GEXF_TYPES[typ]}"/>')
    out += ["    </attributes>", '    <attributes class="edge" mode="static">']
    for i, (name, typ, _) in enumerate(edge_cols):
        out.append(f'      <attribute id="{i}" title="{name}" type="{_GEXF_TYPES[typ]}"/>')
    out += ["    </attributes>", "    <nodes>"]
    rows = metrics.by_node() if metrics is not None else {}
    for c in graph.sorted_nodes:
        out.append(f'      <node id="{ids[c]}" label={quoteattr(str(c))}>')
        out.append("        <attvalues>")
        for i, (_, _, values) in enumerate(node_cols):
            out.append(f'          <attvalue for="{i}" value="{values[c]}"/>')
        out.append("        </attvalues>")
        if positions is not None:
            x, y = positions[c]
            out.append(f'        <viz:position x="{fmt_real(x)}" y="{fmt_real(y)}" z="0.0"/>')
            out.append(f'        <viz:size value="{fmt_real(_radius_unit(graph.nodes[c], graph))}"/>')
            klass = rows[c].modularity_class if c in rows else None
            if klass is not None:
                r, g, b = _rgb(PALETTE[klass % len(PALETTE)])
                out.append(f'        <viz:color r="{r}" g="{g}" b="{b}"/>')
        out.append("      </node>")
    out += ["    </nodes>", "    <edges>"]
    for i, k in enumerate(graph.sorted_edges):
        u, v = k
        e = graph.edges[k]
        out.append(f'      <edge id="e{i}" source="{ids[u]}" target="{ids[v]}" weight="{fmt_real(e.jaccard)}">')
        out.append("        <attvalues>")
        for j, (_, _, values) in enumerate(edge_cols):
            out.append(f'          <attvalue for="{j}" value="{values[k]}"/>')
        out.append("        </attvalues>")
        out.append("      </edge>")
    out += ["    </edges>", "  </graph>", "</gexf>", ""]
    return "\n".join(out)


def _dot(graph, node_cols, edge_cols) -> str:
    out = [f"graph {graph.level.name.lower()} {{"]
    for c in graph.sorted_nodes:
        attrs = ", ".join(f"{name}={values[c]}" for name, _, values in node_cols)
        out.append(f'  "{c}" [{attrs}];')
    for k in graph.sorted_edges:
        u, v = k
        attrs = ", ".join(f"{name}={values[k]}" for name, _, values in edge_cols)
        out.append(f'  "{u}" -- "{v}" [{attrs}];')
    out += ["}", ""]
    return "\n".join(out)


def _csv(header: Sequence[str], rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode("utf-8")


def edges_csv(graph: CooccurrenceGraph, distances: bool = False) -> bytes:
    header = ["source", "target", "n_ij", "jaccard"] + (["distance"] if distances else [])
    rows = []
    for u, v in graph.sorted_edges:
        e = graph.edges[(u, v)]
        row = [str(u), str(v), e.n_ij, fmt_real(e.jaccard)]
        if distances:
            row.append(fmt_real(e.distance))
        rows.append(row)
    return _csv(header, rows)


def nodes_csv(graph: CooccurrenceGraph) -> bytes:
    return _csv(["code", "occurrence"], [[str(c), graph.nodes[c]] for c in graph.sorted_nodes])


def metrics_csv(metrics: MetricsTable) -> bytes:
    """Per-code table; MST and modularity columns appear only when computed."""
    rows = list(metrics)
    has_class = any(r.modularity_class is not None for r in rows)
    has_mst = any(r.mst_degree is not None for r in rows)
    header = ["code", "patents"]
    if has_class:
        header.append("modularity_class")
    header += ["degree", "betweenness"]
    if has_mst:
        header += ["mst_degree", "mst_betweenness"]
    out = []
    for r in rows:
        row = [str(r.code), r.occurrence_count]
        if has_class:
            row.append(r.modularity_class)
        row += [r.degree, fmt_score(r.betweenness)]
        if has_mst:
            row += [r.mst_degree, fmt_score(r.mst_betweenness)]
        out.append(row)
    return _csv(header, out)


def positions_csv(positions: LayoutPositions) -> bytes:
    return _csv(["code", "x", "y"], [[str(c), fmt_real(x), fmt_real(y)] for c, (x, y) in sorted(positions.positions.items())])


def export_graph(
    graph: CooccurrenceGraph,
    positions: LayoutPositions | None = None,
    metrics: MetricsTable | None = None,
    format: str = "graphml",
    *,
    distances: bool = False,
) -> bytes:
    """Serialize ``graph`` with optional metrics and coordinates.

    GraphML and GEXF node ids are ``n0, n1, ...`` in canonical code order;
    the code text is carried in the ``label`` attribute since IPC codes
    contain characters that are not valid XML name tokens.
    """
    if format not in EXPORT_FORMATS:
        raise UnsupportedFormat(f"unsupported export format {format!r}; expected one of {', '.join(EXPORT_FORMATS)}")
    if format == "csv-edgelist":
        return edges_csv(graph, distances)
    node_cols = _node_attrs(graph, metrics, positions)
    edge_cols = _edge_attrs(graph, distances)
    if format == "graphml":
        text = _graphml(graph, node_cols, edge_cols)
    elif format == "gexf":
        text = _gexf(graph, node_cols, edge_cols, positions, metrics)
    else:
        text = _dot(graph, node_cols, edge_cols)
    return text.encode("utf-8")


@dataclass(frozen=True)
class RenderStyle:
    size_by: str = "occurrence_count"
    color_by: str = "modularity_class"  # or "fixed", "prolific_flag"
    label_min_occurrence: int = 0
    prolific_threshold: int = 50
    edge_thickness_by: str = "jaccard"  # or "fixed"
    width: int = 1000
    height: int = 1000
    min_radius: float = 3.0
    max_radius: float = 30.0

    def __post_init__(self):
        if self.size_by != "occurrence_count":
            raise ValueError(f"unsupported size_by {self.size_by!r}")
        if self.color_by not in ("modularity_class", "fixed", "prolific_flag"):
            raise ValueError(f"unsupported color_by {self.color_by!r}")
        if self.edge_thickness_by not in ("jaccard", "fixed"):
            raise ValueError(f"unsupported edge_thickness_by {self.edge_thickness_by!r}")
        if self.label_min_occurrence < 0:
            raise ValueError("label_min_occurrence must be >= 0")
        if self.prolific_threshold < 1:
            raise ValueError("prolific_threshold must be >= 1")


def _radius_unit(occurrence: int, graph: CooccurrenceGraph) -> float:
    top = max(graph.nodes.values())
    return math.sqrt(occurrence / top)


def _rgb(hexcolor: str) -> tuple[int, int, int]:
    return tuple(int(hexcolor[i : i + 2], 16) for i in (1, 3, 5))


def render_svg(
    graph: CooccurrenceGraph,
    positions: LayoutPositions,
    metrics: MetricsTable | None = None,
    style: RenderStyle | None = None,
) -> bytes:
    """Draw the network as SVG 1.1: edges underneath, circles sized by sqrt(occurrence)."""
    style = style or RenderStyle()
    _check_positions(graph, positions)
    nodes = graph.sorted_nodes
    rows = metrics.by_node() if metrics is not None else {}
    pad = style.max_radius + 10
    if nodes:
        xs = [positions[c][0] for c in nodes]
        ys = [positions[c][1] for c in nodes]
        x0, y0 = min(xs), min(ys)
        span = max(max(xs) - x0, max(ys) - y0) or 1.0
    else:
        x0 = y0 = 0.0
        span = 1.0
    scale = min(style.width, style.height) - 2 * pad

    def project(c):
        x, y = positions[c]
        # SVG y grows downward.
        return pad + (x - x0) / span * scale, style.height - pad - (y - y0) / span * scale

    def color(c):
        if style.color_by == "prolific_flag":
            return PROLIFIC_COLOR if graph.nodes[c] >= style.prolific_threshold else PLAIN_COLOR
        if style.color_by == "modularity_class":
            row = rows.get(c)
            if row is not None and row.modularity_class is not None:
                return PALETTE[row.modularity_class % len(PALETTE)]
        return PLAIN_COLOR

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{style.width}" height="{style.height}"'
        f' viewBox="0 0 {style.width} {style.height}">',
        f'  <rect width="{style.width}" height="{style.height}" fill="#ffffff"/>',
        '  <g id="edges" stroke="#b0b0b0" stroke-opacity="0.7">',
    ]
    for u, v in graph.sorted_edges:
        (x1, y1), (x2, y2) = project(u), project(v)
        width = 0.5 + 4.0 * graph.edges[(u, v)].jaccard if style.edge_thickness_by == "jaccard" else 1.0
        out.append(f'    <line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke-width="{width:.2f}"/>')
    out += ["  </g>", '  <g id="nodes" stroke="#ffffff" stroke-width="0.5">']
    for c in nodes:
        x, y = project(c)
        r = style.min_radius + (style.max_radius - style.min_radius) * _radius_unit(graph.nodes[c], graph)
        out.append(f'    <circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{color(c)}"><title>{escape(str(c))}</title></circle>')
    out += ["  </g>", '  <g id="labels" font-family="sans-serif" font-size="12" fill="#202020">']
    for c in nodes:
        if graph.nodes[c] >= style.label_min_occurrence:
            x, y = project(c)
            out.append(f'    <text x="{x:.2f}" y="{y:.2f}" text-anchor="middle" dy="0.35em">{escape(str(c))}</text>')
    out += ["  </g>", "</svg>", ""]
    return "\n".join(out).encode("utf-8")


def _edge_entry(graph, k):
    e = graph.edges[k]
    return {
        "source": str(k[0]),
        "target": str(k[1]),
        "n_ij": e.n_ij,
        "jaccard": e.jaccard,
        "jaccard_display": round_half_up(e.jaccard_exact, 3),
    }


def network_summary(
    graph: CooccurrenceGraph,
    partition: Mapping | None,
    components: Sequence[Sequence],
    top_k: int = 10,
    modularity_value: float | None = None,
) -> dict:
    """Counts plus the strongest edges by co-occurrence and by Jaccard index."""
    by_count = sorted(graph.edges, key=lambda k: (-graph.edges[k].n_ij, -graph.edges[k].jaccard_exact, k))
    by_jaccard = sorted(graph.edges, key=lambda k: (-graph.edges[k].jaccard_exact, -graph.edges[k].n_ij, k))
    summary = {
        "level": graph.level.name.lower(),
        "node_count": len(graph.nodes),
        "edge_count": len(graph.edges),
        "component_count": len(components),
        "component_sizes": [len(c) for c in components],
        "community_count": len(set(partition.values())) if partition is not None else None,
        "modularity": None if modularity_value is None else fmt_score(modularity_value),
        "perfect_jaccard_edges": sum(1 for e in graph.edges.values() if e.n_ij == e.union),
        "top_edges_by_cooccurrence": [_edge_entry(graph, k) for k in by_count[:top_k]],
        "top_edges_by_jaccard": [_edge_entry(graph, k) for k in by_jaccard[:top_k]],
    }
    return summary
