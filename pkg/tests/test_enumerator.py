"""End-to-end tests for the enumeration driver."""

import math

import pytest

from pmenum.enumerator import count_matchings, enumerate_matchings, matching_of_tree
from pmenum.errors import NoPerfectMatching
from pmenum.graph import build_graph
from pmenum.oracle import (
    brute_force,
    complete,
    cycle,
    min_count_graph,
    path_substituted,
    permanent,
    random_with_matching,
)


def enumerate_sets(g):
    seen = []

    def sink(tree):
        seen.append(frozenset(matching_of_tree(g.arena, tree)))

    count, stats = enumerate_matchings(g, sink)
    assert count == len(seen)
    return seen, stats


def test_single_edge():
    g = build_graph(1, 1, [(0, 0)])
    seen, stats = enumerate_sets(g)
    assert seen == [frozenset({0})]
    assert stats.matchings == 1


def test_no_perfect_matching_raises():
    g = build_graph(2, 2, [(0, 0), (1, 0)])
    with pytest.raises(NoPerfectMatching):
        enumerate_matchings(g)
    assert count_matchings(g) == 0


def test_input_graph_is_not_modified():
    g = complete(3)
    before = (list(g.edge_alive), list(g.alive_v))
    enumerate_matchings(g)
    assert (list(g.edge_alive), list(g.alive_v)) == before


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_complete_graph_counts(n):
    assert count_matchings(complete(n)) == math.factorial(n)


@pytest.mark.parametrize("nv", [4, 6, 8, 12, 16])
def test_cycles_have_two_matchings(nv):
    g = cycle(nv)
    seen, _ = enumerate_sets(g)
    assert len(seen) == 2
    assert set(seen) == brute_force(g)


@pytest.mark.parametrize("n,k", [(3, 1), (3, 3), (4, 1), (4, 3)])
def test_substituted_path_counts(n, k):
    assert count_matchings(path_substituted(n, k)) == math.factorial(n)


def test_min_count_identity():
    for m in range(6, 9):
        assert count_matchings(min_count_graph(6, m)) == m - 6 + 2


@pytest.mark.parametrize("seed", range(50))
@pytest.mark.parametrize("density", [0.3, 0.5, 0.8])
def test_matches_brute_force(seed, density):
    g = random_with_matching(6, 2025 + seed, density)
    seen, _ = enumerate_sets(g)
    assert len(set(seen)) == len(seen), "a matching was delivered twice"
    assert set(seen) == brute_force(g)


@pytest.mark.parametrize("seed", range(10))
def test_matches_permanent_on_larger_instances(seed):
    g = random_with_matching(10, 11000 + seed, 0.35)
    assert count_matchings(g) == permanent(g)


@pytest.mark.parametrize("seed", range(10))
def test_each_matching_is_perfect(seed):
    g = random_with_matching(7, 12000 + seed, 0.5)
    n = g.vertex_count()

    def sink(tree):
        edges = matching_of_tree(g.arena, tree)
        verts = [v for e in edges for v in g.endpoints(e)]
        assert len(verts) == n and len(set(verts)) == n

    enumerate_matchings(g, sink)


@pytest.mark.parametrize("seed", range(10))
def test_delivery_order_is_deterministic(seed):
    runs = []
    for _ in range(2):
        g = random_with_matching(6, 13000 + seed, 0.6)
        runs.append(enumerate_sets(g)[0])
    assert runs[0] == runs[1]


def test_stats_fields_are_sane():
    _, stats = enumerate_matchings(complete(4))
    d = stats.as_dict()
    assert d["matchings"] == 24
    assert d["elementary_steps"] > 0
    assert d["steps_per_matching"] > 0
    assert d["max_depth"] >= 1
    assert d["peak_memory_nodes"] >= d["nodes_created"]
    assert set(d) == {
        "matchings",
        "elementary_steps",
        "steps_per_matching",
        "splits",
        "nodes_created",
        "peak_memory_nodes",
        "max_depth",
    }
