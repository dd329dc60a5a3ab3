"""Tests for the exhaustive oracles and the instance generators."""

import math

import pytest

from pmenum.errors import MalformedInput, TestGuard
from pmenum.oracle import (
    brute_force,
    complete,
    cycle,
    m_plus_set,
    min_count_graph,
    oracle_cap,
    path_substituted,
    permanent,
    random_with_matching,
)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_brute_force_counts_complete_graphs(n):
    g = complete(n)
    assert len(brute_force(g)) == math.factorial(n)


def test_brute_force_edges_are_matchings():
    g = complete(3)
    for m in brute_force(g):
        verts = [v for e in m for v in g.endpoints(e)]
        assert len(verts) == len(set(verts)) == 6


def test_brute_force_empty_when_unbalanced():
    g = complete(2)
    for e in sorted(g.inc[0]):
        g.kill_edge(e)
    g.kill_vertex(0)
    assert brute_force(g) == set()


def test_brute_force_cap_guard(monkeypatch):
    with pytest.raises(TestGuard):
        brute_force(complete(12))
    monkeypatch.setenv("PMENUM_ORACLE_CAP", "4")
    assert oracle_cap() == 4
    with pytest.raises(TestGuard):
        brute_force(complete(5))
    monkeypatch.setenv("PMENUM_ORACLE_CAP", "banana")
    with pytest.raises(MalformedInput):
        oracle_cap()


@pytest.mark.parametrize("seed", range(30))
def test_permanent_equals_brute_force_count(seed):
    g = random_with_matching(6, 400 + seed, 0.5)
    assert permanent(g) == len(brute_force(g))


def test_permanent_of_complete_graphs():
    for n in range(1, 7):
        assert permanent(complete(n)) == math.factorial(n)


def test_m_plus_set_is_matchings_through_edge():
    g = complete(3)
    for e in g.alive_edges():
        subset = m_plus_set(g, e)
        assert subset == {m for m in brute_force(g) if e in m}
        assert len(subset) == 2


def test_cycle_generator():
    g = cycle(10)
    assert g.vertex_count() == 10
    assert g.alive_edge_count() == 10
    assert all(g.degree(v) == 2 for v in g.alive_vertices())
    assert len(brute_force(g)) == 2
    with pytest.raises(MalformedInput):
        cycle(7)
    with pytest.raises(MalformedInput):
        cycle(2)


@pytest.mark.parametrize("n,k", [(3, 1), (3, 3), (3, 5), (4, 3)])
def test_path_substituted_has_factorial_matchings(n, k):
    g = path_substituted(n, k)
    assert len(brute_force(g, cap=25)) == math.factorial(n)


def test_path_substituted_rejects_even_k():
    with pytest.raises(MalformedInput):
        path_substituted(3, 2)


@pytest.mark.parametrize("n", [6, 10])
def test_min_count_graph_has_promised_count(n):
    m_hi = n * n // 16 + (5 * n) // 4 - 1
    for m in range(n, m_hi + 1):
        g = min_count_graph(n, m)
        assert g.alive_edge_count() == m
        assert len(brute_force(g, cap=12)) == m - n + 2


def test_min_count_graph_rejects_bad_parameters():
    with pytest.raises(MalformedInput):
        min_count_graph(8, 9)  # wrong residue
    with pytest.raises(MalformedInput):
        min_count_graph(6, 9)  # too many edges for n = 6
    with pytest.raises(MalformedInput):
        min_count_graph(6, 5)  # fewer edges than vertices on one side


@pytest.mark.parametrize("seed", range(10))
def test_random_generator_is_reproducible_and_matchable(seed):
    a = random_with_matching(7, seed, 0.5)
    b = random_with_matching(7, seed, 0.5)
    assert [a.endpoints(e) for e in a.alive_edges()] == [
        b.endpoints(e) for e in b.alive_edges()
    ]
    assert len(brute_force(a)) >= 1
