"""Tests for minimal-edge selection and the recursive split step."""

import pytest

from pmenum.errors import NoPerfectMatching
from pmenum.graph import (
    OrientedView,
    classify_edges,
    find_initial_matching,
)
from pmenum.oracle import brute_force, complete, m_plus_set, random_with_matching
from pmenum.splitter import (
    choose_split,
    decompose,
    find_m_plus_minimal,
    reachability,
)
from pmenum.trimmer import potential_of, trim


def trimmed_components(n, seed, density):
    """Trimmed strongly connected graphs harvested from a random instance."""
    g = random_with_matching(n, seed, density)
    try:
        m = find_initial_matching(g)
    except NoPerfectMatching:
        return []
    trim(g, m)
    cls = classify_edges(OrientedView(g, m))
    out = []
    for i in cls.nontrivial_components():
        sub = g.copy()
        sub.restrict_to(set(cls.components[i]))
        sub_m = type(m)(sub)
        for e in sorted(sub.alive_edges()):
            if e in m.edges:
                sub_m.add(sub, e)
        out.append((sub, sub_m))
    return out


def all_split_instances(count, n=6, density=0.5, base_seed=5000):
    found = []
    seed = base_seed
    while len(found) < count and seed < base_seed + 400:
        found.extend(trimmed_components(n, seed, density))
        seed += 1
    return found[:count]


@pytest.mark.parametrize("seed", range(40))
def test_minimal_edge_certificate(seed):
    """No other edge's matching set is strictly inside the chosen one."""
    for g, m in trimmed_components(6, 3000 + seed, 0.5):
        pi, m_pi = find_m_plus_minimal(g, m)
        assert pi in m_pi.edges
        assert m_pi.is_perfect(g)
        chosen = m_plus_set(g, pi)
        assert frozenset(m_pi.edges) in chosen
        for e in g.alive_edges():
            other = m_plus_set(g, e)
            assert not (other < chosen)


def test_split_on_complete_graph():
    g = complete(3)
    m = find_initial_matching(g)
    res = choose_split(g, m)
    assert res.pi in res.a_edges
    assert res.b_edges and not (res.a_edges & res.b_edges)
    assert 10 * res.delta >= g.alive_edge_count()
    classes = {frozenset(mm) for mm in brute_force(g)}
    in_a = brute_force(res.g_a)
    in_b = brute_force(res.g_b)
    assert in_a | in_b == classes
    assert not (in_a & in_b)


@pytest.mark.parametrize("seed", range(60))
def test_split_partitions_the_matchings(seed):
    """The two children's matching sets partition the parent's exactly."""
    for g, m in trimmed_components(6, 5000 + seed, 0.5):
        parent = brute_force(g)
        res = choose_split(g, m)
        in_a = brute_force(res.g_a)
        in_b = brute_force(res.g_b)
        assert in_a | in_b == parent
        assert not (in_a & in_b)
        assert res.m_a.is_perfect(res.g_a)
        assert res.m_b.is_perfect(res.g_b)
        assert frozenset(res.m_a.edges) in in_a
        assert frozenset(res.m_b.edges) in in_b


@pytest.mark.parametrize("seed", range(60))
def test_split_charging_inequality(seed):
    for g, m in trimmed_components(7, 6000 + seed, 0.4):
        phi = potential_of(g, m)
        res = choose_split(g, m)
        gain = (
            potential_of(res.g_a, res.m_a)
            + potential_of(res.g_b, res.m_b)
            - phi
        )
        assert gain == res.delta
        assert 10 * gain >= g.alive_edge_count()


@pytest.mark.parametrize("seed", range(40))
def test_component_poset_shape(seed):
    for g, m in trimmed_components(6, 8200 + seed, 0.5):
        pi, m_pi = find_m_plus_minimal(g, m)
        ctx = decompose(g, pi, m_pi)
        keys = ctx.keys()
        assert keys[0] == "tau" and keys[-1] == "sigma"
        others = set(keys) - {"tau"}
        assert ctx.below["tau"] == others
        for k in keys:
            assert k not in ctx.below[k]
            if k != "sigma":
                assert "sigma" in ctx.below[k]
        covered = {v for comp in ctx.components for v in comp}
        covered |= {ctx.sigma, ctx.tau}
        assert covered == set(g.alive_vertices())
        internal = set(g.alive_edges()) - ctx.external - {pi}
        for e in internal:
            u, v = g.endpoints(e)
            assert ctx.key_of[u] == ctx.key_of[v]


def closure(g, view, pi, removed, skip_vertices=frozenset()):
    """Vertex-pair reachability by Floyd-Warshall, independent of the DFS code."""
    verts = [v for v in g.alive_vertices() if v not in skip_vertices]
    reach = {(x, y): x == y for x in verts for y in verts}
    for e in g.alive_edges():
        if e == pi or e in removed:
            continue
        t, h = view.arc(e)
        if t in skip_vertices or h in skip_vertices:
            continue
        reach[(t, h)] = True
    for k in verts:
        for x in verts:
            if reach[(x, k)]:
                for y in verts:
                    if reach[(k, y)]:
                        reach[(x, y)] = True
    return reach


@pytest.mark.parametrize("seed", range(25))
def test_reachability_against_transitive_closure(seed):
    for g, m in trimmed_components(5, 9000 + seed, 0.6):
        pi, m_pi = find_m_plus_minimal(g, m)
        ctx = decompose(g, pi, m_pi)
        removed = set(sorted(ctx.external)[:1])
        report = reachability(g, ctx, removed)
        view = OrientedView(g, m_pi)
        reach = closure(g, view, pi, removed)
        expected_edges = set()
        for e in ctx.external - removed:
            t, h = view.arc(e)
            if reach[(ctx.tau, t)] and reach[(h, ctx.sigma)]:
                expected_edges.add(e)
        assert report.reachable_edges == expected_edges
        for i, comp in enumerate(ctx.components):
            hits = any(
                reach[(ctx.tau, x)] and reach[(x, ctx.sigma)] for x in comp
            )
            assert (i in report.reachable_components) == hits
            if hits:
                detour = closure(g, view, pi, removed, skip_vertices=comp)
                assert (i in report.avoidable_components) == detour[
                    (ctx.tau, ctx.sigma)
                ]


@pytest.mark.parametrize("seed", range(40))
def test_split_is_deterministic(seed):
    instances = trimmed_components(6, 4000 + seed, 0.5)
    again = trimmed_components(6, 4000 + seed, 0.5)
    for (g1, m1), (g2, m2) in zip(instances, again):
        r1 = choose_split(g1, m1)
        r2 = choose_split(g2, m2)
        assert (r1.pi, r1.case, r1.a_edges, r1.b_edges) == (
            r2.pi,
            r2.case,
            r2.a_edges,
            r2.b_edges,
        )
