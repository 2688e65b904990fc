#!/usr/bin/env python3
"""Regenerate tests/golden/ for the fixture corpus from independent oracles.

Nothing from ``ipcmap`` is imported. The corpus is read with the csv module
and a regex, co-occurrence counts come from set intersections, communities
from exhaustive modularity search in exact arithmetic, the spanning forest
from enumeration of edge subsets, and betweenness from networkx.

    python scripts/make_golden.py            # writes tests/golden/
    python scripts/make_golden.py --check    # exits 1 if files would change
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import re
import sys
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

import networkx as nx

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN = ROOT / "tests" / "golden"

CODE = re.compile(r"^([A-H])(\d\d)([A-Z])\s*(\d{1,4})\s*/\s*(\d{1,6})$")


def read_corpus(path, patterns, lo, hi):
    """[(patent_id, set of (subclass, group) code texts)] after the fixture's filters."""
    seen = set()
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pid = row["patent_id"].strip()
            if pid in seen:
                continue
            seen.add(pid)
            names = [a.strip().lower() for a in row["applicants"].split(";")]
            if not any(p.lower() in n for p in patterns for n in names):
                continue
            if not lo <= int(row["publication_date"][:4]) <= hi:
                continue
            codes = []
            for raw in row["ipc_codes"].split(";"):
                m = CODE.match(raw.strip().upper())
                if m:
                    minor = "00" if int(m[5]) == 0 else m[5]
                    codes.append((m[1] + m[2] + m[3], f"{m[1]}{m[2]}{m[3]} {int(m[4])}/{minor}"))
            out.append((pid, codes))
    return out


def naive_graph(docs, min_occ):
    """Node counts and edge counts by brute-force set intersection."""
    universe = sorted({c for _, codes in docs for c in codes})
    patents = {c: {pid for pid, codes in docs if c in codes} for c in universe}
    nodes = {c: len(p) for c, p in patents.items() if len(p) >= min_occ}
    edges = {}
    for a, b in itertools.combinations(sorted(nodes), 2):
        n = len(patents[a] & patents[b])
        if n:
            edges[(a, b)] = (n, Fraction(n, nodes[a] + nodes[b] - n))
    return nodes, edges


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def exact_modularity(nodes, edges, blocks, gamma=Fraction(1)):
    m = sum(r for _, r in edges.values())
    if m == 0:
        return Fraction(0)
    where = {u: i for i, b in enumerate(blocks) for u in b}
    k = {u: Fraction(0) for u in nodes}
    for (a, b), (_, r) in edges.items():
        k[a] += r
        k[b] += r
    q = Fraction(0)
    for u in nodes:
        for v in nodes:
            if where[u] != where[v]:
                continue
            a_uv = edges.get((u, v), edges.get((v, u), (0, Fraction(0))))[1]
            q += a_uv - gamma * k[u] * k[v] / (2 * m)
    return q / (2 * m)


def best_partition(nodes, edges):
    touched = sorted({u for e in edges for u in e})
    best, best_q, ties = None, None, 0
    for part in set_partitions(touched):
        blocks = part + [[u] for u in nodes if u not in touched]
        q = exact_modularity(nodes, edges, blocks)
        if best_q is None or q > best_q:
            best, best_q, ties = blocks, q, 1
        elif q == best_q:
            ties += 1
    assert ties == 1, "modularity optimum is not unique; fixture is ambiguous"
    ranked = sorted((sorted(b) for b in best), key=lambda b: (-len(b), b[0]))
    return {u: i for i, b in enumerate(ranked) for u in b}, best_q


def min_forest(nodes, edges):
    """Minimum spanning forest by enumeration; ties go to the lexicographically smallest (distance, pair) list."""
    dist = {e: Fraction(1) / r for e, (_, r) in edges.items()}
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    size = len(nodes) - nx.number_connected_components(g)
    best = None
    for subset in itertools.combinations(sorted(edges), size):
        f = nx.Graph()
        f.add_nodes_from(nodes)
        f.add_edges_from(subset)
        if not nx.is_forest(f):
            continue
        key = (sum(dist[e] for e in subset), sorted((dist[e], e) for e in subset))
        if best is None or key < best[0]:
            best = (key, subset)
    return sorted(best[1]), best[0][0]


def half_up(x: Fraction | float, places: int) -> str:
    d = Decimal(x.numerator) / Decimal(x.denominator) if isinstance(x, Fraction) else Decimal(repr(float(x)))
    return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def real(x) -> str:
    return repr(float(x))


def components(nodes, edges):
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    comps = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: (-len(c), c[0]))
    return comps, g


def csv_bytes(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def graphml(level, nodes, edges, node_attrs, edge_attrs):
    ids = {c: f"n{i}" for i, c in enumerate(sorted(nodes))}
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"'
        ' xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"'
        ' xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
    ]
    lines += [f'  <key id="{n}" for="node" attr.name="{n}" attr.type="{t}"/>' for n, t, _ in node_attrs]
    lines += [f'  <key id="e_{n}" for="edge" attr.name="{n}" attr.type="{t}"/>' for n, t, _ in edge_attrs]
    lines.append(f'  <graph id="{level}" edgedefault="undirected">')
    for c in sorted(nodes):
        lines.append(f'    <node id="{ids[c]}">')
        lines.append(f'      <data key="label">{c}</data>')
        lines += [f'      <data key="{n}">{vals[c]}</data>' for n, _, vals in node_attrs]
        lines.append("    </node>")
    for e in sorted(edges):
        lines.append(f'    <edge source="{ids[e[0]]}" target="{ids[e[1]]}">')
        lines += [f'      <data key="e_{n}">{vals[e]}</data>' for n, _, vals in edge_attrs]
        lines.append("    </edge>")
    lines += ["  </graph>", "</graphml>", ""]
    return "\n".join(lines)


def summarize(level, nodes, edges, comps, partition, top_k, q=None):
    def entry(e):
        n, r = edges[e]
        return {"source": e[0], "target": e[1], "n_ij": n, "jaccard": float(r), "jaccard_display": half_up(r, 3)}

    by_n = sorted(edges, key=lambda e: (-edges[e][0], -edges[e][1], e))
    by_r = sorted(edges, key=lambda e: (-edges[e][1], -edges[e][0], e))
    return {
        "level": level,
        "node_count": len(nodes),
        "edge_count": len(edges),
        "component_count": len(comps),
        "component_sizes": [len(c) for c in comps],
        "community_count": None if partition is None else len(set(partition.values())),
        "modularity": None if q is None else half_up(q, 6),
        "perfect_jaccard_edges": sum(1 for _, r in edges.values() if r == 1),
        "top_edges_by_cooccurrence": [entry(e) for e in by_n[:top_k]],
        "top_edges_by_jaccard": [entry(e) for e in by_r[:top_k]],
    }


def corpus_counts(cfg) -> dict:
    """Totals by office, applicant rule and year for the filtered fixture."""
    patterns = cfg["applicant_patterns"]
    lo, hi = cfg["from_year"], cfg["to_year"]
    seen = set()
    offices, applicants, years = {}, {r["label"]: 0 for r in cfg["applicant_rules"]}, {}
    total = 0
    with open(FIXTURES / cfg["input"], newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["patent_id"] in seen:
                continue
            seen.add(row["patent_id"])
            names = [a.strip().lower() for a in row["applicants"].split(";")]
            year = int(row["publication_date"][:4])
            if not any(p.lower() in n for p in patterns for n in names) or not lo <= year <= hi:
                continue
            total += 1
            offices[row["office"]] = offices.get(row["office"], 0) + 1
            years[str(year)] = years.get(str(year), 0) + 1
            for rule in cfg["applicant_rules"]:
                if any(p.lower() in n for p in rule["patterns"] for n in names):
                    applicants[rule["label"]] += 1
                    break
    return {"total": total, "offices": offices, "applicants": applicants, "annual": years}


def stats_files(counts) -> dict[str, str]:
    """Expected outputs of ``ipcmap stats`` on the fixture."""
    years = sorted(int(y) for y in counts["annual"])
    annual = [[y, counts["annual"].get(str(y), 0)] for y in range(years[0], years[-1] + 1)] if years else []
    applicants = list(counts["applicants"].items())
    applicants.append(["unmatched", counts["total"] - sum(counts["applicants"].values())])
    blank = counts["offices"].get("", 0)
    offices = sorted(((k, v) for k, v in counts["offices"].items() if k), key=lambda kv: (-kv[1], kv[0]))
    return {
        "stats_annual_counts.csv": csv_bytes(["year", "count"], annual),
        "stats_applicant_counts.csv": csv_bytes(["applicant", "count"], applicants),
        "stats_office_counts.csv": csv_bytes(["office", "count"], offices + [["unmatched", blank]]),
    }


def golden_files(cfg) -> dict[str, str]:
    docs = read_corpus(FIXTURES / cfg["input"], cfg["applicant_patterns"], cfg["from_year"], cfg["to_year"])
    threshold = Fraction(str(cfg["jaccard_threshold"]))
    files = {}
    manifest = {"description": "Fixture corpus values computed by scripts/make_golden.py.", "corpus": corpus_counts(cfg), "networks": {}}
    for level, idx in (("subclass", 0), ("group", 1)):
        level_docs = [(pid, {c[idx] for c in codes}) for pid, codes in docs]
        nodes, edges = naive_graph(level_docs, cfg["min_occurrence"])
        mod_edges = {e: v for e, v in edges.items() if v[1] >= threshold}
        partition, q = best_partition(nodes, mod_edges)
        forest, total = min_forest(nodes, edges)
        mst_edges = {e: edges[e] for e in forest}
        comps, g_mod = components(nodes, mod_edges)
        mst_comps, g_mst = components(nodes, mst_edges)
        bc = nx.betweenness_centrality(g_mod, normalized=True)
        mst_bc = nx.betweenness_centrality(g_mst, normalized=True)
        comp_of = {u: i for i, c in enumerate(comps) for u in c}
        mst_comp_of = {u: i for i, c in enumerate(mst_comps) for u in c}

        files[f"{level}_nodes.csv"] = csv_bytes(["code", "occurrence"], [[c, nodes[c]] for c in sorted(nodes)])
        files[f"{level}_modularity_edges.csv"] = csv_bytes(
            ["source", "target", "n_ij", "jaccard"],
            [[a, b, n, real(r)] for (a, b), (n, r) in sorted(mod_edges.items())],
        )
        files[f"{level}_mst_edges.csv"] = csv_bytes(
            ["source", "target", "n_ij", "jaccard", "distance"],
            [[a, b, n, real(r), real(1 / r)] for (a, b), (n, r) in sorted(mst_edges.items())],
        )
        order = sorted(nodes, key=lambda c: (-nodes[c], c))
        files[f"{level}_metrics.csv"] = csv_bytes(
            ["code", "patents", "modularity_class", "degree", "betweenness", "mst_degree", "mst_betweenness"],
            [
                [c, nodes[c], partition[c], g_mod.degree(c), half_up(bc[c], 6), g_mst.degree(c), half_up(mst_bc[c], 6)]
                for c in order
            ],
        )
        files[f"{level}_modularity.graphml"] = graphml(
            level,
            nodes,
            mod_edges,
            [
                ("occurrence", "int", {c: nodes[c] for c in nodes}),
                ("degree", "int", {c: g_mod.degree(c) for c in nodes}),
                ("betweenness", "double", {c: half_up(bc[c], 6) for c in nodes}),
                ("modularity_class", "int", partition),
                ("component", "int", comp_of),
            ],
            [
                ("n_ij", "int", {e: v[0] for e, v in mod_edges.items()}),
                ("jaccard", "double", {e: real(v[1]) for e, v in mod_edges.items()}),
            ],
        )
        files[f"{level}_mst.graphml"] = graphml(
            level,
            nodes,
            mst_edges,
            [
                ("occurrence", "int", {c: nodes[c] for c in nodes}),
                ("degree", "int", {c: g_mst.degree(c) for c in nodes}),
                ("betweenness", "double", {c: half_up(mst_bc[c], 6) for c in nodes}),
                ("component", "int", mst_comp_of),
            ],
            [
                ("n_ij", "int", {e: v[0] for e, v in mst_edges.items()}),
                ("jaccard", "double", {e: real(v[1]) for e, v in mst_edges.items()}),
                ("distance", "double", {e: real(1 / v[1]) for e, v in mst_edges.items()}),
            ],
        )
        top_k = cfg["top_k"]
        summary = {
            "modularity_network": summarize(level, nodes, mod_edges, comps, partition, top_k, q),
            "mst_network": summarize(level, nodes, mst_edges, mst_comps, None, top_k)
            | {"total_distance": float(total)},
        }
        files[f"{level}_summary.json"] = json.dumps(summary, indent=2, sort_keys=True) + "\n"
        manifest["networks"][level] = {
            "modularity": {
                "node_count": len(nodes),
                "edge_count": len(mod_edges),
                "component_count": len(comps),
                "community_count": len(set(partition.values())),
            },
            "mst": {
                "node_count": len(nodes),
                "edge_count": len(mst_edges),
                "component_count": len(mst_comps),
                "component_sizes": [len(c) for c in mst_comps],
            },
            "occurrence": dict(sorted(nodes.items())),
            "edges": [
                {"source": a, "target": b, "n_ij": n, "jaccard": half_up(r, 3)} for (a, b), (n, r) in sorted(edges.items())
            ],
        }
    files["replication_expected.json"] = json.dumps(manifest, indent=2) + "\n"
    files.update(stats_files(manifest["corpus"]))
    return files


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args(argv)
    cfg = tomllib.loads((FIXTURES / "fixture.toml").read_text(encoding="utf-8"))
    files = golden_files(cfg)
    stale = []
    for name, text in sorted(files.items()):
        path = GOLDEN / name
        if args.check:
            if not path.exists() or path.read_text(encoding="utf-8") != text:
                stale.append(name)
        else:
            GOLDEN.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path.relative_to(ROOT)}")
    if stale:
        print("stale golden files: " + ", ".join(stale))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
