"""Compare recomputed networks and corpus counts against an expected-values manifest."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .config import PipelineConfig
from .cooccurrence import round_half_up
from .corpus import Corpus, annual_counts, group_counts
from .graph import edge_key
from .ipc import IpcLevel, MalformedCode, parse_ipc_code
from .pipeline import Networks, OutputWriter, build_networks, load_filtered_corpus

__all__ = ["Check", "load_expected", "check_corpus", "check_networks", "run_replicate"]

COMMUNITY_NOTE = "community count depends on the Louvain run; labels are never compared"


@dataclass(frozen=True)
class Check:
    item: str
    expected: object
    actual: object
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


def load_expected(path: str | Path | None = None) -> dict:
    """Read a manifest; without a path, the bundled published values."""
    if path is None:
        text = resources.files("ipcmap").joinpath("data/activision_blizzard_expected.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def check_corpus(corpus: Corpus, expected: dict, config: PipelineConfig) -> list[Check]:
    checks = []
    if "total" in expected:
        checks.append(Check("corpus.total", expected["total"], len(corpus)))
    if "offices" in expected:
        offices = group_counts(corpus, "office")
        for office, n in expected["offices"].items():
            checks.append(Check(f"corpus.office.{office}", n, offices.get(office, 0)))
    if "applicants" in expected:
        applicants = group_counts(corpus, "applicant-pattern", config.applicant_rules)
        for label, n in expected["applicants"].items():
            checks.append(Check(f"corpus.applicant.{label}", n, applicants.get(label)))
    if "annual" in expected:
        annual = annual_counts(corpus)
        for year, n in expected["annual"].items():
            checks.append(Check(f"corpus.annual.{year}", n, annual.get(int(year), 0)))
    return checks


def _code(text):
    try:
        return parse_ipc_code(text)
    except MalformedCode:
        return None


def check_networks(networks: Networks, expected: dict, prefix: str) -> list[Check]:
    checks = []
    summary = networks.summary()
    for key, section in (("modularity", "modularity_network"), ("mst", "mst_network")):
        for field, value in expected.get(key, {}).items():
            note = COMMUNITY_NOTE if field == "community_count" else ""
            checks.append(Check(f"{prefix}.{key}.{field}", value, summary[section].get(field), note))
    for text, n in expected.get("occurrence", {}).items():
        code = _code(text)
        checks.append(Check(f"{prefix}.occurrence.{text}", n, networks.full.nodes.get(code)))
    for edge in expected.get("edges", []):
        u, v = _code(edge["source"]), _code(edge["target"])
        found = networks.full.edges.get(edge_key(u, v)) if u is not None and v is not None else None
        name = f"{prefix}.edge.{edge['source']}|{edge['target']}"
        if edge.get("n_ij") is not None:
            checks.append(Check(f"{name}.n_ij", edge["n_ij"], found.n_ij if found else None))
        if edge.get("jaccard") is not None:
            actual = round_half_up(found.jaccard_exact, 3) if found else None
            checks.append(Check(f"{name}.jaccard", edge["jaccard"], actual))
    return checks


def run_replicate(config: PipelineConfig, expected: dict | None = None) -> list[Check]:
    expected = expected if expected is not None else load_expected(config.expected)
    corpus = load_filtered_corpus(config)
    checks = check_corpus(corpus, expected.get("corpus", {}), config)
    out = OutputWriter(config.output_dir)
    for level_name, exp in expected.get("networks", {}).items():
        level = IpcLevel.parse(level_name)
        networks = build_networks(corpus, config, level)
        out.write_json(f"{level_name}_summary.json", networks.summary(config.top_k))
        checks += check_networks(networks, exp, level_name)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["item", "expected", "actual", "status", "note"])
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        w.writerow([c.item, json.dumps(c.expected), json.dumps(c.actual), status, c.note])
        lines.append(f"{status} {c.item}: expected {c.expected!r}, got {c.actual!r}" + (f" ({c.note})" if c.note else ""))
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    out.write("replication_report.csv", buf.getvalue())
    out.write("replication_report.txt", "\n".join(lines) + "\n")
    out.finish()
    return checks
