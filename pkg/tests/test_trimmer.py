"""Tests for graph trimming: potential, bridges, cycles, and contractions."""

import math

import pytest

from pmenum.circuit import materialize
from pmenum.graph import (
    OrientedView,
    build_graph,
    classify_edges,
    find_initial_matching,
)
from pmenum.oracle import (
    brute_force,
    complete,
    cycle,
    path_substituted,
    random_with_matching,
)
from pmenum.trimmer import potential_of, trim


def trimmed(g):
    m = find_initial_matching(g)
    return trim(g, m)


def encoded_matchings(g):
    """All matchings encoded by a graph whose edges carry circuit nodes."""
    edges = g.alive_edges()
    assert len(edges) == 1
    return materialize(g.arena, g.edge_node[edges[0]])


def test_single_edge_is_already_trimmed():
    g = build_graph(1, 1, [(0, 0)])
    _, _, report = trimmed(g)
    assert g.alive_edge_count() == 1
    assert report.potential_after == 1


def test_cycle_trims_to_one_edge_with_both_matchings():
    g = cycle(6)
    expected = brute_force(g)
    _, _, report = trimmed(g)
    assert g.alive_edge_count() == 1
    assert report.potential_after == 2
    assert encoded_matchings(g) == expected


def test_cycle_trim_node_budget():
    """A cycle of 2n vertices folds into 2n - 1 fresh circuit nodes."""
    g = cycle(10)
    before = len(g.arena)
    trimmed(g)
    assert len(g.arena) - before == 9


def test_forbidden_bridge_removed_and_squares_folded():
    # Two squares joined by a bridge that no perfect matching can use.
    edges = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (1, 2)]
    g = build_graph(4, 4, edges)
    expected = brute_force(g)
    _, _, report = trimmed(g)
    assert report.forbidden_removed == 1
    assert g.alive_edge_count() == 1
    assert report.potential_after == 4
    assert encoded_matchings(g) == expected


def test_forced_edges_merge_into_one():
    # A path of forced edges hanging off a square.
    edges = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)]
    g = build_graph(4, 4, edges)
    expected = brute_force(g)
    m = find_initial_matching(g)
    cls = classify_edges(OrientedView(g, m))
    assert len(cls.b_plus) == 2
    _, _, report = trim(g, m)
    assert report.forced_merged == 2
    assert g.alive_edge_count() == 1
    assert encoded_matchings(g) == expected


@pytest.mark.parametrize("n,k", [(3, 1), (3, 3), (3, 5), (4, 3), (5, 3)])
def test_path_substituted_trims_to_complete_core(n, k):
    """Degree-two chains contract away, preserving the matching count."""
    g = path_substituted(n, k)
    expected = len(brute_force(g, cap=25)) if n <= 4 else None
    m = find_initial_matching(g)
    phi_before = potential_of(g, m)
    trim(g, m)
    phi_after = potential_of(g, m)
    assert phi_after >= phi_before
    assert all(g.degree(v) != 2 for v in g.alive_vertices())
    if g.alive_edge_count() == 1 and expected is not None:
        assert len(encoded_matchings(g)) == expected


@pytest.mark.parametrize("seed", range(60))
@pytest.mark.parametrize("density", [0.3, 0.5, 0.8])
def test_trim_preserves_matchings_on_random_instances(seed, density):
    g = random_with_matching(6, 7000 + seed, density)
    expected = brute_force(g)
    m = find_initial_matching(g)
    phi_before = potential_of(g, m)
    trim(g, m)
    assert potential_of(g, m) >= phi_before
    assert m.is_perfect(g)
    for v in g.alive_vertices():
        assert g.degree(v) != 2
    if g.alive_edge_count() == 1:
        assert encoded_matchings(g) == expected


def test_trim_leaves_dense_graph_alone():
    g = complete(4)
    _, _, report = trimmed(g)
    assert g.alive_edge_count() == 16
    assert report.nodes_created == 0


def test_potential_of_complete_graph():
    g = complete(3)
    m = find_initial_matching(g)
    # One component, unit leaves: 9 - 6 + 2.
    assert potential_of(g, m) == 5


@pytest.mark.parametrize("seed", range(20))
def test_potential_is_a_lower_bound_on_the_count(seed):
    g = random_with_matching(6, 9100 + seed, 0.6)
    total = len(brute_force(g))
    m = find_initial_matching(g)
    assert potential_of(g, m) <= total
    trim(g, m)
    # Residual matchings weighted by their nodes' potentials recover the
    # original count exactly; the potential stays a lower bound on it.
    arena = g.arena
    weighted = sum(
        math.prod(arena.pot[g.edge_node[e]] for e in mm) for mm in brute_force(g)
    )
    assert weighted == total
    assert potential_of(g, m) <= total
