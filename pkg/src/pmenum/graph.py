"""Bipartite graphs with stable handles, matchings, and edge classification.

Vertices and edges are integer handles that stay valid for the lifetime of
a graph: deletion flips an ``alive`` flag and never reindexes.  Vertices
``0 .. left_count-1`` form the left class and the rest the right class;
merging two vertices (during trimming) always reuses an existing handle of
the same class, so the class of a handle never changes.

Every edge carries a handle into a :class:`~pmenum.circuit.CircuitArena`
node that encodes which matchings of the *original* graph the edge stands
for after rewriting.

The orientation used throughout: given a perfect matching M, matching
edges point left-to-right and all other edges point right-to-left.  An
edge lies on an alternating cycle exactly when its endpoints share a
strongly connected component of that orientation, which is how
:func:`classify_edges` finds the edges contained in every perfect
matching (``b_plus``) and in none (``b_minus``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .circuit import CircuitArena
from .errors import InvariantViolation, MalformedInput, NoPerfectMatching

LEFT = 0
RIGHT = 1


class BipartiteGraph:
    """A bipartite multigraph under edit, sharing a circuit arena.

    Parallel edges are not stored: callers detect a would-be parallel
    edge through ``edge_between`` and merge circuit nodes instead.
    """

    def __init__(self, left_count: int, right_count: int, arena: CircuitArena):
        if left_count < 1 or right_count < 1:
            raise MalformedInput("both vertex classes must be non-empty")
        self.left_count = left_count
        self.right_count = right_count
        self.arena = arena
        n = left_count + right_count
        self.alive_v = [True] * n
        self.inc: list[set[int]] = [set() for _ in range(n)]
        self.edge_u: list[int] = []  # left endpoint
        self.edge_v: list[int] = []  # right endpoint
        self.edge_alive: list[bool] = []
        self.edge_node: list[int] = []
        self._adj: dict[tuple[int, int], int] = {}

    # -- basic queries -------------------------------------------------

    def vertex_count(self) -> int:
        return len(self.alive_v)

    def side(self, v: int) -> int:
        return LEFT if v < self.left_count else RIGHT

    def degree(self, v: int) -> int:
        return len(self.inc[v])

    def alive_vertices(self) -> list[int]:
        return [v for v in range(len(self.alive_v)) if self.alive_v[v]]

    def alive_edges(self) -> list[int]:
        return [e for e in range(len(self.edge_alive)) if self.edge_alive[e]]

    def alive_edge_count(self) -> int:
        return sum(self.edge_alive)

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.edge_u[e], self.edge_v[e]

    def other_endpoint(self, e: int, v: int) -> int:
        u, w = self.edge_u[e], self.edge_v[e]
        return w if v == u else u

    def edge_between(self, a: int, b: int) -> int | None:
        """Alive edge joining ``a`` and ``b``, if any (order-insensitive)."""
        if self.side(a) == RIGHT:
            a, b = b, a
        return self._adj.get((a, b))

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.other_endpoint(e, v) for e in self.inc[v])

    # -- mutation ------------------------------------------------------

    def add_edge(self, a: int, b: int, node: int) -> int:
        if self.side(a) == RIGHT:
            a, b = b, a
        if self.side(a) != LEFT or self.side(b) != RIGHT:
            raise MalformedInput("edge endpoints must lie in different classes")
        if not (self.alive_v[a] and self.alive_v[b]):
            raise InvariantViolation("edge endpoint is dead")
        if (a, b) in self._adj:
            raise InvariantViolation("parallel edges must be merged, not added")
        e = len(self.edge_u)
        self.edge_u.append(a)
        self.edge_v.append(b)
        self.edge_alive.append(True)
        self.edge_node.append(node)
        self.inc[a].add(e)
        self.inc[b].add(e)
        self._adj[(a, b)] = e
        return e

    def kill_edge(self, e: int) -> None:
        if not self.edge_alive[e]:
            raise InvariantViolation("edge is already dead")
        self.edge_alive[e] = False
        u, v = self.edge_u[e], self.edge_v[e]
        self.inc[u].discard(e)
        self.inc[v].discard(e)
        del self._adj[(u, v)]

    def kill_vertex(self, v: int) -> None:
        if self.inc[v]:
            raise InvariantViolation("cannot kill a vertex with alive edges")
        self.alive_v[v] = False

    def set_node(self, e: int, node: int) -> None:
        self.edge_node[e] = node

    def copy(self) -> "BipartiteGraph":
        g = BipartiteGraph.__new__(BipartiteGraph)
        g.left_count = self.left_count
        g.right_count = self.right_count
        g.arena = self.arena
        g.alive_v = list(self.alive_v)
        g.inc = [set(s) for s in self.inc]
        g.edge_u = list(self.edge_u)
        g.edge_v = list(self.edge_v)
        g.edge_alive = list(self.edge_alive)
        g.edge_node = list(self.edge_node)
        g._adj = dict(self._adj)
        return g

    def restrict_to(self, vertices) -> None:
        """Kill everything outside ``vertices`` (a set of handles)."""
        for e in self.alive_edges():
            if self.edge_u[e] not in vertices or self.edge_v[e] not in vertices:
                self.kill_edge(e)
        for v in self.alive_vertices():
            if v not in vertices:
                self.kill_vertex(v)

    def check_consistency(self) -> None:
        """Cross-check incidence lists against the adjacency map."""
        pairs = {}
        for e in self.alive_edges():
            u, v = self.edge_u[e], self.edge_v[e]
            if not (self.alive_v[u] and self.alive_v[v]):
                raise InvariantViolation("alive edge with dead endpoint")
            if e not in self.inc[u] or e not in self.inc[v]:
                raise InvariantViolation("alive edge missing from incidence list")
            pairs[(u, v)] = e
        if pairs != self._adj:
            raise InvariantViolation("adjacency map out of sync")
        for v in range(len(self.alive_v)):
            for e in self.inc[v]:
                if not self.edge_alive[e]:
                    raise InvariantViolation("dead edge in incidence list")


def build_graph(
    left_count: int, right_count: int, edges, arena: CircuitArena | None = None
) -> BipartiteGraph:
    """Create a graph from 0-based ``(left, right)`` pairs with one leaf per edge.

    ``right`` indices are given relative to the right class, i.e. in
    ``0 .. right_count-1``.
    """
    if arena is None:
        arena = CircuitArena()
    g = BipartiteGraph(left_count, right_count, arena)
    seen = set()
    for pair in edges:
        u, v = pair
        if not (0 <= u < left_count and 0 <= v < right_count):
            raise MalformedInput(f"edge {pair} out of range")
        if (u, v) in seen:
            raise MalformedInput(f"duplicate edge {pair}")
        seen.add((u, v))
        e = len(g.edge_u)
        g.add_edge(u, left_count + v, arena.leaf(e))
    return g


class Matching:
    """A matching stored as mate-edge per vertex plus the edge set."""

    def __init__(self, g: BipartiteGraph):
        self.mate: list[int | None] = [None] * g.vertex_count()
        self.edges: set[int] = set()

    def add(self, g: BipartiteGraph, e: int) -> None:
        u, v = g.endpoints(e)
        if self.mate[u] is not None or self.mate[v] is not None:
            raise InvariantViolation("vertex matched twice")
        self.mate[u] = e
        self.mate[v] = e
        self.edges.add(e)

    def remove(self, g: BipartiteGraph, e: int) -> None:
        u, v = g.endpoints(e)
        self.mate[u] = None
        self.mate[v] = None
        self.edges.discard(e)

    def copy(self) -> "Matching":
        m = Matching.__new__(Matching)
        m.mate = list(self.mate)
        m.edges = set(self.edges)
        return m

    def is_perfect(self, g: BipartiteGraph) -> bool:
        return all(
            self.mate[v] is not None and g.edge_alive[self.mate[v]]
            for v in g.alive_vertices()
        )


class OrientedView:
    """Read-only view of D(G, M): matching edges left-to-right, rest reversed."""

    def __init__(self, g: BipartiteGraph, m: Matching):
        self.graph = g
        self.matching = m

    def out_arcs(self, v: int):
        """Yield ``(edge, head)`` pairs leaving ``v``, in edge-handle order."""
        g, m = self.graph, self.matching
        if g.side(v) == LEFT:
            e = m.mate[v]
            if e is not None and g.edge_alive[e]:
                yield e, g.edge_v[e]
        else:
            for e in sorted(g.inc[v]):
                if e not in m.edges:
                    yield e, g.edge_u[e]

    def arc(self, e: int) -> tuple[int, int]:
        """Return ``(tail, head)`` of edge ``e`` in the orientation."""
        g = self.graph
        if e in self.matching.edges:
            return g.edge_u[e], g.edge_v[e]
        return g.edge_v[e], g.edge_u[e]


def find_initial_matching(g: BipartiteGraph) -> Matching:
    """Hopcroft-Karp maximum matching; raises if it is not perfect."""
    left = [v for v in g.alive_vertices() if g.side(v) == LEFT]
    right = [v for v in g.alive_vertices() if g.side(v) == RIGHT]
    if len(left) != len(right):
        raise NoPerfectMatching("vertex classes have different sizes")
    inf = float("inf")
    mate: dict[int, int | None] = {v: None for v in left + right}
    dist: dict[int, float] = {}

    def bfs() -> bool:
        queue = deque()
        for u in left:
            if mate[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = False
        while queue:
            u = queue.popleft()
            for e in g.inc[u]:
                w = g.edge_v[e]
                nxt = mate[w]
                if nxt is None:
                    found = True
                elif dist[nxt] == inf:
                    dist[nxt] = dist[u] + 1
                    queue.append(nxt)
        return found

    def dfs(u: int) -> bool:
        for e in sorted(g.inc[u]):
            w = g.edge_v[e]
            nxt = mate[w]
            if nxt is None or (dist[nxt] == dist[u] + 1 and dfs(nxt)):
                mate[u] = w
                mate[w] = u
                return True
        dist[u] = inf
        return False

    size = 0
    while bfs():
        for u in left:
            if mate[u] is None and dfs(u):
                size += 1
    if size != len(left):
        raise NoPerfectMatching("graph has no perfect matching")
    m = Matching(g)
    for u in left:
        e = g.edge_between(u, mate[u])
        m.add(g, e)
    return m


def alternating_cycle_through(
    view: OrientedView, e: int, banned=frozenset()
) -> list[int] | None:
    """Directed cycle of D(G, M) through edge ``e``, avoiding ``banned`` edges.

    Returns the cycle as an edge list starting with ``e``, or ``None`` when
    no alternating cycle through ``e`` exists.  Flipping the matching along
    the cycle toggles membership of ``e``.
    """
    g = view.graph
    tail, head = view.arc(e)
    # Depth-first search for a directed path head -> tail.
    parent: dict[int, tuple[int, int]] = {}
    stack = [head]
    seen = {head}
    while stack:
        x = stack.pop()
        if x == tail:
            break
        for f, y in view.out_arcs(x):
            if f == e or f in banned or y in seen:
                continue
            seen.add(y)
            parent[y] = (x, f)
            stack.append(y)
    else:
        return None
    path = []
    x = tail
    while x != head:
        x, f = parent[x]
        path.append(f)
    path.reverse()
    return [e] + path


def flip(g: BipartiteGraph, m: Matching, cycle: list[int]) -> Matching:
    """Return the matching symmetric-difference of ``m`` with a cycle."""
    if len(cycle) % 2 != 0:
        raise InvariantViolation("alternating cycle must have even length")
    inside = [e for e in cycle if e in m.edges]
    if len(inside) * 2 != len(cycle):
        raise InvariantViolation("cycle does not alternate with the matching")
    out = m.copy()
    for e in inside:
        out.remove(g, e)
    for e in cycle:
        if e not in inside:
            out.add(g, e)
    return out


@dataclass
class EdgeClassification:
    """Result of :func:`classify_edges`.

    ``components`` lists vertex sets ordered by their smallest handle;
    ``trivial[i]`` is true when component ``i`` is the endpoint pair of an
    edge contained in every perfect matching.
    """

    b_plus: set[int]
    b_minus: set[int]
    components: list[frozenset[int]]
    trivial: list[bool]
    comp_of: dict[int, int]

    def nontrivial_components(self) -> list[int]:
        return [i for i, t in enumerate(self.trivial) if not t]


def _strongly_connected_components(view: OrientedView) -> list[list[int]]:
    """Iterative Tarjan over the matching orientation."""
    g = view.graph
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in g.alive_vertices():
        if root in index:
            continue
        work: list[tuple[int, list[int], int]] = []
        succ = [h for _, h in view.out_arcs(root)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work.append((root, succ, 0))
        g.arena.charge(len(succ) + 1)
        while work:
            v, succ, i = work.pop()
            if i < len(succ):
                work.append((v, succ, i + 1))
                w = succ[i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    nxt = [h for _, h in view.out_arcs(w)]
                    g.arena.charge(len(nxt) + 1)
                    work.append((w, nxt, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    sccs.append(comp)
                if work:
                    p = work[-1][0]
                    low[p] = min(low[p], low[v])
    return sccs


def classify_edges(view: OrientedView) -> EdgeClassification:
    """Split edges into forced / forbidden / free and find components.

    An edge lies in some alternating cycle exactly when its endpoints
    share a strongly connected component of D(G, M); otherwise it is
    forced (``b_plus``, matching edges) or forbidden (``b_minus``).  The
    classification does not depend on which perfect matching M is used.
    """
    g, m = view.graph, view.matching
    if not m.is_perfect(g):
        raise InvariantViolation("classification needs a perfect matching")
    sccs = _strongly_connected_components(view)
    scc_of: dict[int, int] = {}
    for i, comp in enumerate(sccs):
        for v in comp:
            scc_of[v] = i
    b_plus: set[int] = set()
    b_minus: set[int] = set()
    for e in g.alive_edges():
        u, v = g.endpoints(e)
        if scc_of[u] != scc_of[v]:
            (b_plus if e in m.edges else b_minus).add(e)
    comps: list[frozenset[int]] = []
    trivial: list[bool] = []
    for comp in sccs:
        if len(comp) > 1:
            comps.append(frozenset(comp))
            trivial.append(False)
    for e in sorted(b_plus):
        u, v = g.endpoints(e)
        if len(sccs[scc_of[u]]) != 1 or len(sccs[scc_of[v]]) != 1:
            raise InvariantViolation("forced edge endpoint inside a cycle")
        comps.append(frozenset((u, v)))
        trivial.append(True)
    order = sorted(range(len(comps)), key=lambda i: min(comps[i]))
    comps = [comps[i] for i in order]
    trivial = [trivial[i] for i in order]
    comp_of = {}
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    if len(comp_of) != len(g.alive_vertices()):
        raise InvariantViolation("components do not cover the graph")
    return EdgeClassification(b_plus, b_minus, comps, trivial, comp_of)
