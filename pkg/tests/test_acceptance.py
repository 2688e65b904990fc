"""Acceptance checks; each prints one PASS/FAIL/SKIP line in the terminal summary."""

import hashlib
import importlib.util
import itertools
import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import FIXTURES, GOLDEN, make_corpus, random_group_code
from oracles import (
    brute_betweenness,
    exhaustive_min_forest_weight,
    exhaustive_modularity_optimum,
    modularity_by_pairs,
    naive_cooccurrence,
    random_graph,
)
from ipcmap.cli import EXIT_OK, main
from ipcmap.config import PipelineConfig
from ipcmap.cooccurrence import build_graph, jaccard, round_half_up
from ipcmap.corpus import codes_at_level, load_corpus
from ipcmap.graph import WeightedGraph
from ipcmap.ipc import IpcCode, IpcLevel
from ipcmap.layout import force_atlas2
from ipcmap.metrics import betweenness_centrality, connected_components, louvain_communities, minimum_spanning_forest
from ipcmap.pipeline import build_networks
from ipcmap.replicate import run_replicate

ROOT = Path(__file__).resolve().parents[1]
criterion = pytest.mark.criterion


@criterion(1, "Jaccard checkpoints within 0.0005 after 3-decimal rounding")
@pytest.mark.parametrize(
    "counts, expected",
    [
        ((485, 177, 115), 0.210),
        ((20, 65, 19), 0.288),
        ((17, 52, 11), 0.190),
        ((121, 79, 36), 0.220),
        ((78, 65, 35), 0.324),
        ((121, 78, 35), 0.213),
    ],
)
def test_c1_jaccard_checkpoints(counts, expected):
    assert abs(float(round_half_up(jaccard(*counts), 3)) - expected) <= 0.0005


def _mixed_code(rng, pool):
    """Group-level code, sometimes recorded only at subclass or class depth."""
    c = random_group_code(rng, pool)
    r = rng.random()
    if r < 0.15:
        return IpcCode(c.section, c.class_digits)
    if r < 0.35:
        return IpcCode(c.section, c.class_digits, c.subclass)
    return c


@criterion(2, "build_graph equals naive oracle on 200 random corpora in < 10 s")
def test_c2_cooccurrence_oracle():
    rng = random.Random(20)
    start = time.perf_counter()
    for trial in range(200):
        pool = rng.randint(2, 20)
        docs = [[_mixed_code(rng, pool) for _ in range(rng.randint(0, 6))] for _ in range(rng.randint(0, 50))]
        corpus = make_corpus(docs)
        level = list(IpcLevel)[trial % 4]
        min_occ = 1 + trial % 3
        g = build_graph(corpus, level, min_occ)
        nodes, edges = naive_cooccurrence([codes_at_level(r, level) for r in corpus], min_occ)
        assert dict(g.nodes) == nodes, trial
        assert {k: (e.n_ij, e.jaccard) for k, e in g.edges.items()} == edges, trial
    assert time.perf_counter() - start < 10.0


def _weights(rng):
    return Fraction(rng.randint(1, 6), rng.randint(1, 3))


@criterion(3, "betweenness equals brute-force enumeration (1e-9) on 100 graphs, both modes; analytic cases exact")
def test_c3_betweenness():
    assert betweenness_centrality(WeightedGraph(range(3), {(0, 1): 1, (1, 2): 1}))[1] == 1.0
    assert betweenness_centrality(WeightedGraph(range(6), {(0, i): 1 for i in range(1, 6)}))[0] == 1.0
    rng = random.Random(30)
    for trial in range(100):
        for weighted in (False, True):
            nodes, edges = random_graph(rng, 10, weights=_weights if weighted else None)
            got = betweenness_centrality(WeightedGraph(nodes, edges), use_weights=weighted)
            want = brute_betweenness(nodes, edges)
            assert all(abs(got[u] - want[u]) <= 1e-9 for u in nodes), (trial, weighted)


@criterion(4, "spanning forest weight equals exhaustive minimum on 100 graphs; size-1 edges per component")
def test_c4_spanning_forest():
    rng = random.Random(40)
    for trial in range(100):
        nodes, edges = random_graph(rng, 8, weights=_weights)
        g = WeightedGraph(nodes, edges)
        forest = minimum_spanning_forest(g)
        assert forest.total_weight == exhaustive_min_forest_weight(nodes, edges), trial
        for comp in connected_components(g):
            members = set(comp)
            assert sum(1 for u, v in forest.edges if u in members) == len(comp) - 1, trial


@criterion(5, "Louvain recovers two 5-cliques at the exhaustive optimum; returned Q re-evaluates within 1e-12")
def test_c5_louvain():
    edges = {e: 1 for e in itertools.combinations(range(5), 2)}
    edges.update({e: 1 for e in itertools.combinations(range(5, 10), 2)})
    edges[(4, 5)] = 1
    part, q = louvain_communities(WeightedGraph(range(10), edges))
    assert sorted({frozenset(u for u in part if part[u] == c) for c in set(part.values())}, key=min) == [
        frozenset(range(5)),
        frozenset(range(5, 10)),
    ]
    _, best_q = exhaustive_modularity_optimum(list(range(10)), edges)
    assert abs(q - best_q) <= 1e-9
    assert abs(q - modularity_by_pairs(list(range(10)), edges, part)) <= 1e-12
    rng = random.Random(50)
    for trial in range(100):
        nodes, wedges = random_graph(rng, 15, weights=lambda r: r.uniform(0.05, 1.0))
        part, q = louvain_communities(WeightedGraph(nodes, wedges), seed=trial)
        assert abs(q - modularity_by_pairs(nodes, wedges, part)) <= 1e-12, trial


GOLDEN_NAMES = ("nodes.csv", "modularity_edges.csv", "mst_edges.csv", "metrics.csv", "modularity.graphml", "mst.graphml", "summary.json")


@criterion(6, "fixture pipeline outputs byte-identical to oracle golden files")
def test_c6_golden_fixture(tmp_path):
    oracle = subprocess.run([sys.executable, str(ROOT / "scripts" / "make_golden.py"), "--check"], capture_output=True, text=True)
    assert oracle.returncode == 0, oracle.stdout + oracle.stderr
    cfg = str(FIXTURES / "fixture.toml")
    for level in ("subclass", "group"):
        out = tmp_path / level
        assert main(["network", "-c", cfg, "--level", level, "-o", str(out), "--format", "graphml"]) == EXIT_OK
        for name in GOLDEN_NAMES:
            got = (out / f"{level}_{name}").read_bytes()
            assert got == (GOLDEN / f"{level}_{name}").read_bytes(), f"{level}_{name}"


def _tree_digest(root: Path) -> dict:
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(root.rglob("*")) if p.is_file()}


@criterion(7, "two network runs give byte-identical output trees")
def test_c7_determinism(tmp_path):
    cfg = str(FIXTURES / "fixture.toml")
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["network", "-c", cfg, "--level", "group", "-o", str(out)]) == EXIT_OK
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    assert _tree_digest(a) == _tree_digest(b)
    listed = json.loads((a / "manifest.json").read_text())["files"]
    assert set(listed) | {"manifest.json"} == set(_tree_digest(a))


@criterion(8, "replication counts on the published dataset (needs IPCMAP_REPLICATION_DATA)")
def test_c8_replication(tmp_path):
    data = os.environ.get("IPCMAP_REPLICATION_DATA")
    if not data:
        pytest.skip("set IPCMAP_REPLICATION_DATA to the published patent export to run this check")
    config = PipelineConfig(
        input=data,
        input_format=os.environ.get("IPCMAP_REPLICATION_FORMAT", "patentscope-csv"),
        output_dir=str(tmp_path),
    )
    checks = run_replicate(config)
    failed = [f"{c.item}: expected {c.expected!r}, got {c.actual!r}" for c in checks if not c.passed]
    assert not failed, "\n".join(failed)


def _load_script(name):
    spec = importlib.util.spec_from_file_location(name, ROOT / "scripts" / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@criterion(9, "group-level build + metrics + layout on 10,000 patents / 500 codes in < 30 s")
@pytest.mark.slow
def test_c9_performance(tmp_path):
    synthetic = _load_script("synthetic_corpus")
    path = synthetic.write_corpus(tmp_path / "synthetic.csv", 10_000, 500, seed=0)
    corpus = load_corpus(path)
    config = PipelineConfig(input=str(path), level="group", applicant_patterns=())
    start = time.perf_counter()
    networks = build_networks(corpus, config)
    force_atlas2(networks.modularity, config.layout)
    force_atlas2(networks.mst, config.layout)
    elapsed = time.perf_counter() - start
    print(f"nodes={len(networks.full.nodes)} edges={len(networks.full.edges)} elapsed={elapsed:.1f}s")
    assert len(networks.full.nodes) >= 450
    assert elapsed < 30.0
