"""End-to-end pipeline: corpus -> modularity network + MST network -> files."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .config import PipelineConfig
from .cooccurrence import CooccurrenceGraph, build_graph, threshold_edges, to_distance_graph
from .corpus import (
    Corpus,
    annual_counts,
    filter_by_applicant,
    filter_by_publication_year,
    group_counts,
    load_corpus,
    write_ingest_report,
)
from .export import (
    RenderStyle,
    edges_csv,
    export_graph,
    metrics_csv,
    network_summary,
    nodes_csv,
    positions_csv,
    render_svg,
)
from .layout import LayoutPositions, force_atlas2
from .metrics import (
    MetricsTable,
    SpanningForest,
    compute_metrics,
    connected_components,
    louvain_communities,
    minimum_spanning_forest,
)

__all__ = [
    "EmptyGraph",
    "Networks",
    "load_filtered_corpus",
    "build_networks",
    "OutputWriter",
    "run_stats",
    "run_network",
    "run_mst",
    "run_layout",
    "run_export",
]

log = logging.getLogger(__name__)

_EXT = {"graphml": "graphml", "gexf": "gexf", "dot": "dot", "csv-edgelist": "edgelist.csv"}


class EmptyGraph(RuntimeError):
    pass


@dataclass
class Networks:
    """The two networks of one IPC level and their statistics."""

    full: CooccurrenceGraph
    modularity: CooccurrenceGraph
    partition: dict
    modularity_value: float
    components: list
    forest: SpanningForest
    mst: CooccurrenceGraph
    mst_components: list
    metrics: MetricsTable
    mst_metrics: MetricsTable

    def summary(self, top_k: int = 10) -> dict:
        return {
            "modularity_network": network_summary(
                self.modularity, self.partition, self.components, top_k, self.modularity_value
            ),
            "mst_network": network_summary(self.mst, None, self.mst_components, top_k)
            | {"total_distance": float(self.forest.total_weight)},
        }


def load_filtered_corpus(config: PipelineConfig) -> Corpus:
    corpus = load_corpus(config.input, config.input_format, columns=config.columns or None)
    if config.applicant_patterns:
        corpus = filter_by_applicant(corpus, config.applicant_patterns)
    if config.from_year is not None or config.to_year is not None:
        lo = config.from_year if config.from_year is not None else 1
        hi = config.to_year if config.to_year is not None else 9999
        corpus = filter_by_publication_year(corpus, lo, hi)
    return corpus


def build_networks(corpus: Corpus, config: PipelineConfig, level=None) -> Networks:
    """Modularity network (thresholded) and minimum spanning forest (unthresholded)."""
    level = config.ipc_level if level is None else level
    full = build_graph(corpus, level, config.min_occurrence)
    if not full.nodes:
        raise EmptyGraph(
            f"no IPC code at {level.name.lower()} level occurs in at least {config.min_occurrence} patents"
        )
    modular = threshold_edges(full, config.jaccard_threshold)
    partition, q = louvain_communities(modular, config.resolution, config.seed)
    forest = minimum_spanning_forest(to_distance_graph(full))
    mst = full.restrict_edges(forest.edges)
    metrics = compute_metrics(modular, partition, mst, use_weights=config.use_weights)
    return Networks(
        full=full,
        modularity=modular,
        partition=partition,
        modularity_value=q,
        components=connected_components(modular),
        forest=forest,
        mst=mst,
        mst_components=connected_components(mst),
        metrics=metrics,
        mst_metrics=compute_metrics(mst, use_weights=config.use_weights),
    )


class OutputWriter:
    """Writes files under one directory and records their SHA-256 in manifest.json."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}

    def write(self, name: str, data: bytes | str) -> Path:
        if isinstance(data, str):
            data = data.encode("utf-8")
        path = self.root / name
        path.write_bytes(data)
        self.files[name] = hashlib.sha256(data).hexdigest()
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def finish(self) -> Path:
        manifest = {"files": dict(sorted(self.files.items()))}
        path = self.root / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _write_ingest(out: OutputWriter, corpus: Corpus) -> None:
    if corpus.report is not None:
        out.write_json("ingest-report.json", corpus.report.to_dict() | {"source": Path(corpus.report.source).name})


def _counts_csv(header, mapping) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(mapping.items())
    return buf.getvalue().encode("utf-8")


def run_stats(config: PipelineConfig) -> dict:
    corpus = load_filtered_corpus(config)
    out = OutputWriter(config.output_dir)
    _write_ingest(out, corpus)
    annual = annual_counts(corpus)
    applicants = group_counts(corpus, "applicant-pattern", config.applicant_rules) if len(corpus) else {}
    offices = group_counts(corpus, "office") if len(corpus) else {}
    out.write("annual_counts.csv", _counts_csv(["year", "count"], annual))
    out.write("applicant_counts.csv", _counts_csv(["applicant", "count"], applicants))
    out.write("office_counts.csv", _counts_csv(["office", "count"], offices))
    lines = [f"records: {len(corpus)}", f"provenance: {corpus.provenance}", "", "by applicant:"]
    lines += [f"  {k}: {v}" for k, v in applicants.items()]
    lines += ["", "by office:"] + [f"  {k}: {v}" for k, v in offices.items()]
    lines += ["", "by publication year:"] + [f"  {k}: {v}" for k, v in annual.items()]
    out.write("stats_summary.txt", "\n".join(lines) + "\n")
    out.finish()
    return {"records": len(corpus), "annual": annual, "applicants": applicants, "offices": offices}


def _layout(networks: Networks, config: PipelineConfig) -> tuple[LayoutPositions, LayoutPositions]:
    return force_atlas2(networks.modularity, config.layout), force_atlas2(networks.mst, config.layout)


def _style(config: PipelineConfig, color_by: str) -> RenderStyle:
    return RenderStyle(
        color_by=color_by,
        label_min_occurrence=config.label_min_occurrence,
        prolific_threshold=config.prolific_threshold,
    )


def _write_graph_files(out, prefix, networks, config, pos_mod=None, pos_mst=None):
    for fmt in config.formats:
        ext = _EXT[fmt]
        pm = pos_mod if fmt == "gexf" else None
        ps = pos_mst if fmt == "gexf" else None
        out.write(f"{prefix}_modularity.{ext}", export_graph(networks.modularity, pm, networks.metrics, fmt))
        out.write(f"{prefix}_mst.{ext}", export_graph(networks.mst, ps, networks.mst_metrics, fmt, distances=True))


def run_network(config: PipelineConfig) -> Networks:
    corpus = load_filtered_corpus(config)
    networks = build_networks(corpus, config)
    prefix = config.ipc_level.name.lower()
    out = OutputWriter(config.output_dir)
    _write_ingest(out, corpus)
    out.write(f"{prefix}_nodes.csv", nodes_csv(networks.full))
    out.write(f"{prefix}_modularity_edges.csv", edges_csv(networks.modularity))
    out.write(f"{prefix}_mst_edges.csv", edges_csv(networks.mst, distances=True))
    out.write(f"{prefix}_metrics.csv", metrics_csv(networks.metrics))
    out.write_json(f"{prefix}_summary.json", networks.summary(config.top_k))
    pos_mod, pos_mst = _layout(networks, config)
    out.write(f"{prefix}_modularity_positions.csv", positions_csv(pos_mod))
    out.write(f"{prefix}_mst_positions.csv", positions_csv(pos_mst))
    _write_graph_files(out, prefix, networks, config, pos_mod, pos_mst)
    out.write(f"{prefix}_modularity.svg", render_svg(networks.modularity, pos_mod, networks.metrics, _style(config, "modularity_class")))
    out.write(f"{prefix}_mst.svg", render_svg(networks.mst, pos_mst, networks.mst_metrics, _style(config, "prolific_flag")))
    out.finish()
    return networks


def run_mst(config: PipelineConfig) -> Networks:
    corpus = load_filtered_corpus(config)
    networks = build_networks(corpus, config)
    prefix = config.ipc_level.name.lower()
    out = OutputWriter(config.output_dir)
    _write_ingest(out, corpus)
    out.write(f"{prefix}_nodes.csv", nodes_csv(networks.full))
    out.write(f"{prefix}_mst_edges.csv", edges_csv(networks.mst, distances=True))
    out.write(f"{prefix}_mst_metrics.csv", metrics_csv(networks.mst_metrics))
    out.write_json(f"{prefix}_mst_summary.json", networks.summary(config.top_k)["mst_network"])
    out.finish()
    return networks


def run_layout(config: PipelineConfig) -> tuple[LayoutPositions, LayoutPositions]:
    corpus = load_filtered_corpus(config)
    networks = build_networks(corpus, config)
    prefix = config.ipc_level.name.lower()
    out = OutputWriter(config.output_dir)
    pos_mod, pos_mst = _layout(networks, config)
    out.write(f"{prefix}_modularity_positions.csv", positions_csv(pos_mod))
    out.write(f"{prefix}_mst_positions.csv", positions_csv(pos_mst))
    out.write_json(f"{prefix}_layout_params.json", pos_mod.params_used)
    out.finish()
    return pos_mod, pos_mst


def run_export(config: PipelineConfig) -> Networks:
    corpus = load_filtered_corpus(config)
    networks = build_networks(corpus, config)
    prefix = config.ipc_level.name.lower()
    out = OutputWriter(config.output_dir)
    pos_mod, pos_mst = _layout(networks, config)
    _write_graph_files(out, prefix, networks, config, pos_mod, pos_mst)
    out.write(f"{prefix}_modularity.svg", render_svg(networks.modularity, pos_mod, networks.metrics, _style(config, "modularity_class")))
    out.write(f"{prefix}_mst.svg", render_svg(networks.mst, pos_mst, networks.mst_metrics, _style(config, "prolific_flag")))
    out.finish()
    return networks
