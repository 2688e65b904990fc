import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_corpus, random_group_code
from oracles import (
    brute_betweenness,
    exhaustive_min_forest_weight,
    exhaustive_modularity_optimum,
    is_forest,
    modularity_by_pairs,
    random_graph,
    union_find_components,
)
from ipcmap.cooccurrence import build_graph, to_distance_graph
from ipcmap.graph import WeightedGraph
from ipcmap.ipc import IpcLevel
from ipcmap.metrics import (
    PartitionMismatch,
    UnknownNode,
    betweenness_centrality,
    compute_metrics,
    connected_components,
    degree,
    louvain_communities,
    louvain_levels,
    minimum_spanning_forest,
    modularity,
)


def wg(n, edges):
    return WeightedGraph(range(n), edges)


def two_cliques():
    edges = {e: 1 for e in itertools.combinations(range(5), 2)}
    edges.update({e: 1 for e in itertools.combinations(range(5, 10), 2)})
    edges[(4, 5)] = 1
    return wg(10, edges)


weights = lambda rng: Fraction(rng.randint(1, 6), rng.randint(1, 3))  # noqa: E731


# degree / components


def test_degree_and_unknown_node():
    g = wg(4, {(0, 1): 1, (0, 2): 1})
    assert [degree(g, u) for u in range(4)] == [2, 1, 1, 0]
    with pytest.raises(UnknownNode):
        degree(g, 9)


def test_components_ordering():
    g = wg(7, {(5, 6): 1, (0, 3): 1, (3, 4): 1})
    assert connected_components(g) == [[0, 3, 4], [5, 6], [1], [2]]


@given(st.randoms(use_true_random=False))
def test_handshake_and_components(rnd):
    nodes, edges = random_graph(rnd, 12)
    g = WeightedGraph(nodes, edges)
    assert sum(degree(g, u) for u in nodes) == 2 * len(edges)
    comps = connected_components(g)
    assert [set(c) for c in comps] == union_find_components(nodes, edges)
    assert sorted(u for c in comps for u in c) == nodes


# betweenness


def test_betweenness_path_midpoint():
    bc = betweenness_centrality(wg(3, {(0, 1): 1, (1, 2): 1}))
    assert bc == {0: 0.0, 1: 1.0, 2: 0.0}


@pytest.mark.parametrize("leaves", [2, 3, 6])
def test_betweenness_star_center(leaves):
    bc = betweenness_centrality(wg(leaves + 1, {(0, i): 1 for i in range(1, leaves + 1)}))
    assert bc[0] == 1.0
    assert all(bc[i] == 0.0 for i in range(1, leaves + 1))


def test_betweenness_unnormalized_and_tiny():
    bc = betweenness_centrality(wg(4, {(0, 1): 1, (1, 2): 1, (2, 3): 1}), normalized=False)
    assert bc == {0: 0.0, 1: 2.0, 2: 2.0, 3: 0.0}
    assert betweenness_centrality(wg(2, {(0, 1): 1})) == {0: 0.0, 1: 0.0}


def test_betweenness_normalizes_by_whole_graph():
    # P3 plus an isolated node: 1 / ((4-1)(4-2)/2).
    bc = betweenness_centrality(wg(4, {(0, 1): 1, (1, 2): 1}))
    assert bc[1] == pytest.approx(1 / 3, abs=1e-15)


def test_weighted_betweenness_takes_cheap_detour():
    g = wg(3, {(0, 2): Fraction(5), (0, 1): Fraction(2), (1, 2): Fraction(2)})
    assert betweenness_centrality(g, use_weights=True)[1] == 1.0
    assert betweenness_centrality(g)[1] == 0.0


@given(st.randoms(use_true_random=False), st.booleans())
def test_betweenness_matches_brute_force(rnd, weighted):
    nodes, edges = random_graph(rnd, 9, weights=weights if weighted else None)
    got = betweenness_centrality(WeightedGraph(nodes, edges), use_weights=weighted)
    want = brute_betweenness(nodes, edges)
    for u in nodes:
        assert got[u] == pytest.approx(want[u], abs=1e-9)


@given(st.randoms(use_true_random=False))
def test_betweenness_matches_networkx(rnd):
    nodes, edges = random_graph(rnd, 14)
    nxg = nx.Graph()
    nxg.add_nodes_from(nodes)
    nxg.add_edges_from(edges)
    want = nx.betweenness_centrality(nxg, normalized=True)
    got = betweenness_centrality(WeightedGraph(nodes, edges))
    for u in nodes:
        assert got[u] == pytest.approx(want[u], abs=1e-9)
        assert 0.0 <= got[u] <= 1.0 + 1e-12


def test_cooccurrence_graph_weighted_mode_uses_inverse_jaccard():
    rng = random.Random(3)
    docs = [[random_group_code(rng, 9) for _ in range(rng.randint(1, 4))] for _ in range(40)]
    g = build_graph(make_corpus(docs), IpcLevel.GROUP)
    dist = {(u, v): w for u, v, w in to_distance_graph(g).edges()}
    want = brute_betweenness(list(g.nodes), dist)
    got = betweenness_centrality(g, use_weights=True)
    for u in g.nodes:
        assert got[u] == pytest.approx(want[u], abs=1e-9)


# modularity / Louvain


def test_modularity_single_community():
    g = two_cliques()
    for gamma in (0.5, 1.0, 2.0):
        assert modularity(g, dict.fromkeys(range(10), 0), gamma) == pytest.approx(1 - gamma, abs=1e-12)


def test_modularity_edgeless_and_mismatch():
    assert modularity(wg(3, {}), {0: 0, 1: 1, 2: 2}) == 0.0
    with pytest.raises(PartitionMismatch):
        modularity(wg(3, {}), {0: 0, 1: 1})


@given(st.randoms(use_true_random=False), st.floats(0.2, 2.0))
def test_modularity_matches_pairwise_formula(rnd, gamma):
    nodes, edges = random_graph(rnd, 9, weights=lambda r: r.uniform(0.05, 1.0))
    part = {u: rnd.randrange(3) for u in nodes}
    got = modularity(WeightedGraph(nodes, edges), part, gamma)
    assert got == pytest.approx(modularity_by_pairs(nodes, edges, part, gamma), abs=1e-12)


def test_louvain_two_cliques():
    g = two_cliques()
    part, q = louvain_communities(g, seed=0)
    assert part == {u: 0 if u < 5 else 1 for u in range(10)}
    # 21 unit edges, each clique has 10 internal edges and degree sum 21.
    assert q == pytest.approx(2 * (20 / 42 - 0.25), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_louvain_small_graphs_reach_exhaustive_optimum(seed):
    # Two triangles joined by one edge: the optimum is unique and easy to find.
    edges = {(0, 1): 1, (0, 2): 1, (1, 2): 1, (3, 4): 1, (3, 5): 1, (4, 5): 1, (2, 3): 1}
    part, q = louvain_communities(wg(6, edges), seed=seed)
    best, best_q = exhaustive_modularity_optimum(list(range(6)), edges)
    assert q == pytest.approx(best_q, abs=1e-9)
    assert sorted(sorted(b) for b in best) == [[0, 1, 2], [3, 4, 5]]


def test_louvain_degenerate_graphs():
    part, q = louvain_communities(wg(2, {(0, 1): 1}))
    assert part == {0: 0, 1: 0}
    assert q == 0.0
    part, q = louvain_communities(wg(3, {}))
    assert part == {0: 0, 1: 1, 2: 2} and q == 0.0
    with pytest.raises(ValueError):
        louvain_communities(wg(0, {}))


def test_louvain_is_deterministic_per_seed():
    rng = random.Random(8)
    nodes, edges = random_graph(rng, 30, p=0.15, weights=lambda r: r.uniform(0.05, 1))
    g = WeightedGraph(nodes, edges)
    assert louvain_communities(g, seed=4) == louvain_communities(g, seed=4)


@given(st.randoms(use_true_random=False), st.integers(0, 50), st.sampled_from([0.5, 1.0, 1.5]))
def test_louvain_properties(rnd, seed, gamma):
    nodes, edges = random_graph(rnd, 14, weights=lambda r: r.uniform(0.05, 1.0))
    g = WeightedGraph(nodes, edges)
    part, q = louvain_communities(g, gamma, seed)
    assert set(part) == set(nodes)
    labels = sorted(set(part.values()))
    assert labels == list(range(len(labels)))
    sizes = [sum(1 for u in nodes if part[u] == c) for c in labels]
    assert sizes == sorted(sizes, reverse=True)
    assert q == pytest.approx(modularity_by_pairs(nodes, edges, part, gamma), abs=1e-12)
    # Louvain never merges across components.
    comp = {u: i for i, c in enumerate(connected_components(g)) for u in c}
    for u, v in itertools.combinations(nodes, 2):
        if part[u] == part[v]:
            assert comp[u] == comp[v]
    # Each level can only improve on the singleton start.
    qs = [modularity(g, {u: i for i, u in enumerate(nodes)}, gamma)]
    qs += [modularity(g, p, gamma) for p in louvain_levels(g, gamma, seed)]
    assert all(b >= a - 1e-12 for a, b in zip(qs, qs[1:]))


# spanning forest


def test_mst_triangle():
    f = minimum_spanning_forest(wg(3, {(0, 1): 1, (1, 2): 2, (0, 2): 3}))
    assert f.edges == {(0, 1): 1, (1, 2): 2}
    assert f.total_weight == 3


def test_mst_ties_break_lexicographically():
    f = minimum_spanning_forest(wg(3, {(0, 1): 1, (1, 2): 1, (0, 2): 1}))
    assert set(f.edges) == {(0, 1), (0, 2)}


def test_mst_two_disjoint_triangles():
    edges = {(0, 1): 2, (1, 2): 1, (0, 2): 1, (3, 4): 5, (4, 5): 4, (3, 5): 6}
    f = minimum_spanning_forest(wg(6, edges))
    assert f.total_weight == 2 + 9
    assert len(f.edges) == 4
    assert connected_components(f.as_graph()) == [[0, 1, 2], [3, 4, 5]]


def test_mst_rejects_nonpositive():
    with pytest.raises(ValueError):
        minimum_spanning_forest(wg(2, {(0, 1): 0}))


@given(st.randoms(use_true_random=False))
def test_mst_is_minimum_spanning_forest(rnd):
    nodes, edges = random_graph(rnd, 8, weights=weights)
    g = WeightedGraph(nodes, edges)
    f = minimum_spanning_forest(g)
    assert is_forest(nodes, f.edges)
    assert f.total_weight == exhaustive_min_forest_weight(nodes, edges)
    for comp in connected_components(g):
        inside = [e for e in f.edges if e[0] in comp]
        assert len(inside) == len(comp) - 1
    # Cycle property: no non-forest edge is lighter than the heaviest forest edge on its path.
    fg = f.as_graph()
    for (u, v), w in edges.items():
        if (u, v) in f.edges:
            continue
        path = nx.shortest_path(_nx(fg), u, v)
        assert all(f.edges[tuple(sorted(p))] <= w for p in zip(path, path[1:]))


def _nx(g):
    out = nx.Graph()
    out.add_nodes_from(g.nodes)
    out.add_edges_from((u, v) for u, v, _ in g.edges())
    return out


# per-node table


def test_compute_metrics_row_order_and_fields(fixture_csv):
    from ipcmap.corpus import load_corpus

    g = build_graph(load_corpus(fixture_csv), IpcLevel.SUBCLASS)
    f = minimum_spanning_forest(g)
    mst = g.restrict_edges(f.edges)
    part, _ = louvain_communities(g)
    table = compute_metrics(g, part, mst)
    assert len(table) == len(g.nodes)
    keys = [(-r.occurrence_count, r.code) for r in table]
    assert keys == sorted(keys)
    for r in table:
        assert r.degree == degree(g, r.code)
        assert r.mst_degree == degree(mst, r.code)
        assert r.modularity_class == part[r.code]
