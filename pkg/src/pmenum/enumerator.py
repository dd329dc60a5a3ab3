"""Enumerating all perfect matchings of a bipartite graph.

The driver keeps a stack of (graph, matching) pairs.  Each pair is
first trimmed down to a graph with minimum degree three whose matchings
are encoded, via the node annotations on its edges, as subtrees of a
shared union/product circuit.  A pair whose graph is a single edge is
exhausted by walking that circuit; otherwise one strongly connected
component is split into two edge-disjoint matching classes which are
pushed back.  The potential gained by trimming and splitting pays for
the traversal, so the whole run takes time proportional to the output
plus the size of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .circuit import CircuitArena, current_leaves, visit_all
from .errors import InvariantViolation
from .graph import (
    BipartiteGraph,
    Matching,
    OrientedView,
    classify_edges,
    find_initial_matching,
)
from .splitter import choose_split
from .trimmer import trim


@dataclass
class EnumerationStats:
    matchings: int = 0
    elementary_steps: int = 0
    splits: int = 0
    nodes_created: int = 0
    peak_memory_nodes: int = 0
    max_depth: int = 0

    @property
    def steps_per_matching(self) -> float:
        return self.elementary_steps / max(1, self.matchings)

    def as_dict(self) -> dict[str, object]:
        return {
            "matchings": self.matchings,
            "elementary_steps": self.elementary_steps,
            "steps_per_matching": round(self.steps_per_matching, 3),
            "splits": self.splits,
            "nodes_created": self.nodes_created,
            "peak_memory_nodes": self.peak_memory_nodes,
            "max_depth": self.max_depth,
        }


def matching_of_tree(arena: CircuitArena, tree: int) -> list[int]:
    """The edge handles encoded by a visited circuit subtree, sorted."""
    return sorted(current_leaves(arena, tree))


def enumerate_matchings(
    g: BipartiteGraph,
    sink: Callable[[int], None] | None = None,
) -> tuple[int, EnumerationStats]:
    """Count all perfect matchings of ``g``, reporting each to ``sink``.

    ``sink`` receives a circuit node handle per matching; pass it to
    ``matching_of_tree`` to read the edges.  The handle is only valid
    until the next matching is produced.  Raises NoPerfectMatching when
    there is none.  ``g`` itself is not modified.
    """
    arena = g.arena
    steps_before = arena.steps
    nodes_before = len(arena)
    stats = EnumerationStats()
    work = g.copy()
    m = find_initial_matching(work)
    trim(work, m)
    stack: list[tuple[BipartiteGraph, Matching, int]] = [(work, m, 1)]
    count = 0
    scaffolding = 0
    while stack:
        cur, cur_m, depth = stack.pop()
        stats.max_depth = max(stats.max_depth, depth)
        edges = cur.alive_edges()
        if len(edges) == 1:
            before_visit = len(arena)
            visited, _ = visit_all(arena, cur.edge_node[edges[0]], sink or (lambda t: None))
            # The traversal's scaffolding nodes are not part of the encoding.
            scaffolding += len(arena) - before_visit
            count += visited
            continue
        cls = classify_edges(OrientedView(cur, cur_m))
        comp = cls.components[cls.nontrivial_components()[0]]
        sub = cur.copy()
        sub.restrict_to(set(comp))
        sub_m = Matching(sub)
        for e in sorted(sub.alive_edges()):
            if e in cur_m.edges:
                sub_m.add(sub, e)
        if not sub_m.is_perfect(sub):
            raise InvariantViolation("component matching is not perfect")
        res = choose_split(sub, sub_m)
        stats.splits += 1
        # Push B first so the class keeping pi is expanded first.
        for removed, child_m in ((res.b_edges, res.m_b), (res.a_edges, res.m_a)):
            nxt = cur.copy()
            nxt_m = cur_m.copy()
            for v in sorted(comp):
                e = nxt_m.mate[v]
                if e is not None:
                    nxt_m.remove(nxt, e)
            for e in sorted(child_m.edges):
                nxt_m.add(nxt, e)
            for e in sorted(removed):
                nxt.kill_edge(e)
            trim(nxt, nxt_m)
            stack.append((nxt, nxt_m, depth + 1))
    stats.matchings = count
    stats.elementary_steps = arena.steps - steps_before
    stats.nodes_created = len(arena) - nodes_before - scaffolding
    stats.peak_memory_nodes = len(arena)
    return count, stats


def count_matchings(g: BipartiteGraph) -> int:
    """The number of perfect matchings, or zero when none exists."""
    from .errors import NoPerfectMatching

    try:
        count, _ = enumerate_matchings(g)
    except NoPerfectMatching:
        return 0
    return count
