"""Graph trimming: rewrite a graph into a small core with the same matchings.

Trimming removes edges in no perfect matching, merges edges in every
perfect matching into one isolated edge, and contracts away every vertex
of degree two, recording the eliminated structure in circuit nodes on the
surviving edges.  The result has at most one isolated edge, every other
component strongly connected under the matching orientation with minimum
degree three, and the product of the component potentials never drops.

Degree-two elimination runs in two phases.  Phase one removes all
degree-two vertices present at the start, one partite class at a time
(left first): their incident edges form a forest and each tree is
contracted into a single vertex, with prefix/suffix product chains
keeping the node count linear in the tree size.  Phase two handles the
degree-two vertices that contraction creates.  To stay within the
per-operation budget it defers multiplying a contraction's node onto a
vertex's incident edges: each vertex keeps *groups* of edges, each group
sharing one pending factor, and an edge's true node is its stored node
times the pending factor of its group at either endpoint.  Exactly one
group per vertex has no pending factor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation
from .graph import (
    LEFT,
    RIGHT,
    BipartiteGraph,
    EdgeClassification,
    Matching,
    OrientedView,
    classify_edges,
)


def potential_of(g: BipartiteGraph, m: Matching) -> int:
    """Product over components of (sum of edge potentials - |V| + 2).

    Edges in no perfect matching contribute nothing; an isolated edge's
    component potential is just its node's potential.  The value is a
    lower bound on the number of matchings the graph encodes.
    """
    if g.alive_edge_count() == 0:
        return 1
    cls = classify_edges(OrientedView(g, m))
    arena = g.arena
    total = 1
    for i, comp in enumerate(cls.components):
        phi_e = 0
        for v in comp:
            if g.side(v) != LEFT:
                continue
            for e in g.inc[v]:
                if g.edge_v[e] in comp:
                    phi_e += arena.pot[g.edge_node[e]]
        phi = phi_e - len(comp) + 2
        if phi < 1:
            raise InvariantViolation("component potential below one")
        total *= phi
    return total


@dataclass
class TrimReport:
    vertices_removed: int
    edges_removed: int
    nodes_created: int
    forbidden_removed: int
    forced_merged: int
    potential_before: int
    potential_after: int


def strip_bridges(g: BipartiteGraph, m: Matching, cls: EdgeClassification) -> int | None:
    """Drop forbidden edges and merge all forced edges into one.

    Returns the handle of the surviving isolated edge, or ``None`` when
    the graph has no forced edges.
    """
    for e in sorted(cls.b_minus):
        g.kill_edge(e)
    plus = sorted(cls.b_plus)
    if not plus:
        return None
    keep = plus[0]
    if len(plus) > 1:
        node = g.arena.product_fold(g.edge_node[e] for e in plus)
        g.set_node(keep, node)
        for e in plus[1:]:
            m.remove(g, e)
            u, v = g.endpoints(e)
            g.kill_edge(e)
            g.kill_vertex(u)
            g.kill_vertex(v)
    return keep


def trim(g: BipartiteGraph, m: Matching) -> tuple[BipartiteGraph, Matching, TrimReport]:
    """Trim ``g`` in place (with its matching) and report what happened."""
    arena = g.arena
    nodes0 = arena.created
    v0 = len(g.alive_vertices())
    e0 = g.alive_edge_count()
    pot_before = potential_of(g, m)
    forbidden = forced = 0
    if e0 > 1:
        cls = classify_edges(OrientedView(g, m))
        forbidden = len(cls.b_minus)
        forced = len(cls.b_plus)
        strip_bridges(g, m, cls)
        for i in cls.nontrivial_components():
            _trim_component(g, m, set(cls.components[i]))
        _merge_isolated_edges(g, m)
    pot_after = potential_of(g, m)
    if pot_after < pot_before:
        raise InvariantViolation("trimming lowered the graph potential")
    _check_trimmed(g)
    report = TrimReport(
        vertices_removed=v0 - len(g.alive_vertices()),
        edges_removed=e0 - g.alive_edge_count(),
        nodes_created=arena.created - nodes0,
        forbidden_removed=forbidden,
        forced_merged=forced,
        potential_before=pot_before,
        potential_after=pot_after,
    )
    return g, m, report


def _check_trimmed(g: BipartiteGraph) -> None:
    isolated = 0
    for v in g.alive_vertices():
        d = g.degree(v)
        if d == 0:
            raise InvariantViolation("trimmed graph has an isolated vertex")
        if d == 1:
            isolated += 1
        elif d == 2:
            raise InvariantViolation("trimmed graph kept a degree-two vertex")
    if isolated > 2:
        raise InvariantViolation("trimmed graph has more than one isolated edge")


def _merge_isolated_edges(g: BipartiteGraph, m: Matching) -> None:
    iso = [
        e
        for e in g.alive_edges()
        if g.degree(g.edge_u[e]) == 1 and g.degree(g.edge_v[e]) == 1
    ]
    if len(iso) <= 1:
        return
    keep = iso[0]
    node = g.arena.product_fold(g.edge_node[e] for e in iso)
    g.set_node(keep, node)
    for e in iso[1:]:
        m.remove(g, e)
        u, v = g.endpoints(e)
        g.kill_edge(e)
        g.kill_vertex(u)
        g.kill_vertex(v)


def _is_cycle(g: BipartiteGraph, comp: set[int]) -> bool:
    return len(comp) >= 4 and all(g.degree(v) == 2 for v in comp)


def _trim_component(g: BipartiteGraph, m: Matching, comp: set[int]) -> None:
    """Reduce one strongly connected component; mutates ``comp`` alongside."""
    if len(comp) <= 2:
        return
    if _is_cycle(g, comp):
        trim_cycle(g, m, comp)
        return
    status = _phase1(g, m, comp)
    if status == "cycle":
        trim_cycle(g, m, comp)
        return
    if len(comp) > 2:
        _phase2(g, m, comp)
    if len(comp) > 2:
        for v in comp:
            if g.degree(v) < 3:
                raise InvariantViolation("component not fully trimmed")


def trim_cycle(g: BipartiteGraph, m: Matching, comp: set[int]) -> int:
    """Contract a cycle component to one edge encoding its two matchings."""
    if not _is_cycle(g, comp):
        raise InvariantViolation("trim_cycle needs a cycle component")
    edges = sorted(e for e in g.alive_edges() if g.edge_u[e] in comp)
    e0 = edges[0]
    # Walk the cycle, two-coloring edges by position.
    halves: tuple[list[int], list[int]] = ([], [])
    cur_edge = e0
    cur_v = g.edge_v[e0]
    color = 0
    while True:
        halves[color].append(cur_edge)
        nxt = next(f for f in g.inc[cur_v] if f != cur_edge)
        cur_v = g.other_endpoint(nxt, cur_v)
        cur_edge = nxt
        color ^= 1
        g.arena.charge()
        if cur_edge == e0:
            break
    arena = g.arena
    node = arena.union(
        arena.product_fold(g.edge_node[e] for e in sorted(halves[0])),
        arena.product_fold(g.edge_node[e] for e in sorted(halves[1])),
    )
    u0, v0 = g.endpoints(e0)
    for e in edges:
        if e in m.edges:
            m.remove(g, e)
        g.kill_edge(e)
    for v in sorted(comp):
        if v not in (u0, v0):
            g.kill_vertex(v)
    comp.clear()
    comp.update((u0, v0))
    ne = g.add_edge(u0, v0, node)
    m.add(g, ne)
    return ne


# -- phase one: forest contraction ------------------------------------


def _phase1(g: BipartiteGraph, m: Matching, comp: set[int]) -> str:
    for side in (LEFT, RIGHT):
        if len(comp) <= 2:
            return "ok"
        if _is_cycle(g, comp):
            return "cycle"
        w_set = sorted(v for v in comp if g.side(v) == side and g.degree(v) == 2)
        if not w_set:
            continue
        trees = _w_forest(g, w_set)
        if trees is None:
            if not _is_cycle(g, comp):
                raise InvariantViolation("cyclic degree-two neighborhood in a non-cycle")
            return "cycle"
        for tree in trees:
            _trim_tree(g, m, comp, *tree)
    return "ok"


def _w_forest(g: BipartiteGraph, w_list: list[int]):
    """Group the degree-two vertices' incident edges into trees.

    Returns a list of ``(w_vertices, tree_edges)`` pairs sorted by their
    smallest vertex, or ``None`` when the edges contain a cycle (which
    means the whole component is a cycle).
    """
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    edges_by_root: dict[int, set[int]] = {}
    members: dict[int, set[int]] = {}
    for u in w_list:
        for e in sorted(g.inc[u]):
            a, b = g.endpoints(e)
            ra, rb = find(a), find(b)
            if ra == rb:
                return None
            parent[ra] = rb
            root = find(rb)
            es = edges_by_root.pop(ra, set()) | edges_by_root.pop(rb, set())
            vs = members.pop(ra, {a}) | members.pop(rb, {b})
            es.add(e)
            vs.update((a, b))
            edges_by_root[root] = es
            members[root] = vs
    trees = []
    w_all = set(w_list)
    for root, es in edges_by_root.items():
        trees.append((sorted(members[root] & w_all), es))
    trees.sort(key=lambda t: min(t[0]))
    return trees


def _trim_tree(
    g: BipartiteGraph, m: Matching, comp: set[int], w_vertices: list[int], tree_edges: set[int]
) -> None:
    """Contract one tree of degree-two vertices into its lowest hub vertex.

    ``w_vertices`` are the degree-two vertices; their neighbors (the hub
    side of the tree) are merged into a single vertex ``z``.  For every
    hub vertex ``v`` the unique maximum matching of the tree avoiding
    ``v`` becomes a product node ``t_v``, and ``v``'s outside edges move
    to ``z`` multiplied by ``t_v``.
    """
    arena = g.arena
    w_set = set(w_vertices)
    hubs = set()
    for e in tree_edges:
        for x in g.endpoints(e):
            if x not in w_set:
                hubs.add(x)
    root = min(hubs)

    # Root the tree: alternate hub / degree-two levels.
    parent_edge: dict[int, int] = {}
    parent_of: dict[int, int] = {}
    children: dict[int, list[int]] = {v: [] for v in hubs | w_set}
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for e in sorted(g.inc[x]):
            if e not in tree_edges or e == parent_edge.get(x):
                continue
            y = g.other_endpoint(e, x)
            if y in seen:
                continue
            seen.add(y)
            parent_edge[y] = e
            parent_of[y] = x
            children[x].append(y)
            order.append(y)
    if seen != hubs | w_set:
        raise InvariantViolation("tree traversal missed vertices")

    # Nodes for "odd" edges (hub above, degree-two vertex below), built
    # leaves-first: the matching of the subtree hanging below u.
    odd_t: dict[int, int] = {}
    for u in reversed(order):
        if u not in w_set:
            continue
        kids = children[u]
        if len(kids) != 1:
            raise InvariantViolation("degree-two vertex must have one child hub")
        v = kids[0]
        e_uv = g.edge_between(u, v)
        odd_t[u] = arena.product_fold(
            [g.edge_node[e_uv]] + [odd_t[c] for c in children[v]]
        )

    # Nodes for "even" edges (degree-two vertex above, hub below), built
    # root-first with prefix/suffix chains, plus the per-hub node t_v.
    even_t: dict[int, int] = {}
    t_v: dict[int, int] = {}
    for w in order:
        if w in w_set:
            continue
        kids = children[w]
        t0 = even_t[parent_of[w]] if w != root else None
        items = [odd_t[u] for u in kids]
        k = len(items)
        pre: list[int | None] = [None] * (k + 1)
        for j in range(k):
            pre[j + 1] = arena.product(pre[j], items[j])
        suf: list[int | None] = [None] * (k + 1)
        for j in range(k - 1, -1, -1):
            suf[j] = arena.product(items[j], suf[j + 1])
        for j, u in enumerate(kids):
            rest = arena.product(pre[j], suf[j + 1])
            even_t[u] = arena.product(
                arena.product(t0, g.edge_node[g.edge_between(w, u)]), rest
            )
        t_v[w] = arena.product(t0, pre[k])
        if t_v[w] is None:
            raise InvariantViolation("hub with no matching factor")

    # Collect outside edges before tearing the tree down.
    moves = []  # (edge, hub, other endpoint, new node, was matched)
    for v in sorted(hubs):
        for e in sorted(g.inc[v]):
            if e in tree_edges:
                continue
            y = g.other_endpoint(e, v)
            moves.append((e, v, y, arena.product(g.edge_node[e], t_v[v]), e in m.edges))

    for e in tree_edges:
        if e in m.edges:
            m.remove(g, e)
        g.kill_edge(e)
    for e, _, _, _, was in moves:
        if was:
            m.remove(g, e)
        g.kill_edge(e)
    for u in sorted(w_set):
        g.kill_vertex(u)
        comp.discard(u)
    for v in sorted(hubs):
        if v != root:
            g.kill_vertex(v)
            comp.discard(v)

    matched_to = None
    for e, v, y, node, was in moves:
        ex = g.edge_between(root, y)
        if ex is None:
            g.add_edge(root, y, node)
        else:
            g.set_node(ex, arena.union(g.edge_node[ex], node))
        if was:
            if matched_to is not None:
                raise InvariantViolation("two outside matching edges on one tree")
            matched_to = y
    if matched_to is None:
        raise InvariantViolation("contracted tree lost its matching edge")
    m.add(g, g.edge_between(root, matched_to))


# -- phase two: grouped contraction ------------------------------------


class VertexGroups:
    """Pending circuit factors for the edges around each vertex.

    ``groups[v]`` is a list of ``[node, edge_set]`` pairs; a ``None``
    node means no pending factor, and exactly one group per vertex is
    pending-free.  An edge's true node is its stored node multiplied by
    the pending factors of its group at both endpoints.
    """

    def __init__(self, g: BipartiteGraph, vertices):
        self.g = g
        self.groups: dict[int, list[list]] = {}
        self.index: dict[tuple[int, int], int] = {}
        for v in vertices:
            self.groups[v] = [[None, set(g.inc[v])]]
            for e in g.inc[v]:
                self.index[(e, v)] = 0

    def group_count(self, v: int) -> int:
        return len(self.groups[v])

    def true_potential(self, e: int) -> int:
        g = self.g
        p = g.arena.pot[g.edge_node[e]]
        for v in g.endpoints(e):
            node = self.groups[v][self.index[(e, v)]][0]
            if node is not None:
                p *= g.arena.pot[node]
        return p

    def _empty_index(self, v: int) -> int:
        for i, (node, _) in enumerate(self.groups[v]):
            if node is None:
                return i
        raise InvariantViolation("vertex lost its pending-free group")

    def clear_vertex(self, v: int) -> None:
        """Fold every pending factor of ``v`` into its edges (cost: degree)."""
        g = self.g
        merged: set[int] = set()
        for node, edges in self.groups[v]:
            if node is not None:
                for e in sorted(edges):
                    g.set_node(e, g.arena.product(g.edge_node[e], node))
            merged |= edges
        self.groups[v] = [[None, merged]]
        for e in merged:
            self.index[(e, v)] = 0

    def clear_edge(self, e: int) -> None:
        """Fold both endpoints' pending factors into one edge (cost: O(1))."""
        g = self.g
        for v in g.endpoints(e):
            gi = self.index[(e, v)]
            node, edges = self.groups[v][gi]
            if node is None:
                continue
            g.set_node(e, g.arena.product(g.edge_node[e], node))
            edges.discard(e)
            free = self._empty_index(v)
            self.groups[v][free][1].add(e)
            self.index[(e, v)] = free

    def register(self, e: int, v: int, gi: int) -> None:
        self.groups[v][gi][1].add(e)
        self.index[(e, v)] = gi

    def unregister(self, e: int, v: int) -> int:
        gi = self.index.pop((e, v))
        self.groups[v][gi][1].discard(e)
        return gi

    def multiply_all(self, v: int, factor: int) -> None:
        """Multiply every group of ``v`` by ``factor`` and open a new
        pending-free group (cost: number of groups, not degree)."""
        for grp in self.groups[v]:
            grp[0] = self.g.arena.product(grp[0], factor)
        self.groups[v].append([None, set()])

    def drop_vertex(self, v: int) -> None:
        for _, edges in self.groups[v]:
            if edges:
                raise InvariantViolation("dropping a vertex with registered edges")
        del self.groups[v]


def _phase2(g: BipartiteGraph, m: Matching, comp: set[int]) -> None:
    arena = g.arena
    vg = VertexGroups(g, sorted(comp))

    def finish() -> None:
        for v in sorted(comp):
            vg.clear_vertex(v)

    def check_invariant3() -> None:
        for u in sorted(comp):
            if g.degree(u) != 2:
                continue
            e1, e2 = sorted(g.inc[u])
            for ea, eb in ((e1, e2), (e2, e1)):
                v = g.other_endpoint(eb, u)
                if vg.true_potential(ea) >= 2:
                    continue
                if vg.true_potential(eb) >= max(2, vg.group_count(v)):
                    continue
                raise InvariantViolation("degree-two potential invariant broken")

    while True:
        if len(comp) <= 2:
            break
        degree_two = sorted(v for v in comp if g.degree(v) == 2)
        if not degree_two:
            break
        if any(g.degree(v) < 2 for v in comp):
            raise InvariantViolation("degree-one vertex inside a component")
        if _is_cycle(g, comp):
            finish()
            trim_cycle(g, m, comp)
            return
        check_invariant3()
        arena.charge(len(degree_two))

        # Case one: some degree-two vertex has both edges of potential >= 2;
        # fold all pending factors around it and contract it directly.
        case1 = None
        for u in degree_two:
            e1, e2 = sorted(g.inc[u])
            if vg.true_potential(e1) >= 2 and vg.true_potential(e2) >= 2:
                case1 = u
                break
        if case1 is not None:
            _phase2_case1(g, m, comp, vg, case1)
            continue

        # Case two: pick the lowest vertex v with degree-two neighbors whose
        # v-side edge has potential >= 2 (the far edge then has potential 1),
        # and contract all of them at once, deferring v's new factor.
        done = False
        for v in sorted(comp):
            spider = []
            for e in sorted(g.inc[v]):
                u = g.other_endpoint(e, v)
                if g.degree(u) != 2:
                    continue
                e_far = next(f for f in g.inc[u] if f != e)
                if vg.true_potential(e) >= 2 and vg.true_potential(e_far) == 1:
                    spider.append((u, e, g.other_endpoint(e_far, u), e_far))
            if spider:
                _phase2_case2(g, m, comp, vg, v, spider)
                done = True
                break
        if not done:
            raise InvariantViolation("no contraction case applies")

    finish()


def _phase2_case1(g, m, comp, vg: VertexGroups, u: int) -> None:
    arena = g.arena
    e1, e2 = sorted(g.inc[u])
    v = g.other_endpoint(e1, u)
    w = g.other_endpoint(e2, u)
    vg.clear_vertex(u)
    vg.clear_vertex(v)
    vg.clear_vertex(w)
    node_uv, node_uw = g.edge_node[e1], g.edge_node[e2]
    z, dying = (v, w) if v < w else (w, v)
    # Matchings keeping an edge at z used the far u-edge, and vice versa.
    z_factor = node_uw if z == v else node_uv
    dying_factor = node_uv if z == v else node_uw
    for e in (e1, e2):
        if e in m.edges:
            m.remove(g, e)
        vg.unregister(e, u)
        vg.unregister(e, g.other_endpoint(e, u))
        g.kill_edge(e)
    g.kill_vertex(u)
    comp.discard(u)
    vg.drop_vertex(u)
    for e in sorted(g.inc[z]):
        g.set_node(e, arena.product(g.edge_node[e], z_factor))
        arena.charge()
    for e in sorted(g.inc[dying]):
        _move_simple(g, m, vg, e, dying, z, dying_factor)
    g.kill_vertex(dying)
    comp.discard(dying)
    vg.drop_vertex(dying)


def _move_simple(g, m, vg: VertexGroups, e: int, src: int, dst: int, factor: int) -> None:
    arena = g.arena
    y = g.other_endpoint(e, src)
    node = arena.product(g.edge_node[e], factor)
    was = e in m.edges
    if was:
        m.remove(g, e)
    gi_y = vg.unregister(e, y)
    vg.unregister(e, src)
    g.kill_edge(e)
    ex = g.edge_between(dst, y)
    if ex is None:
        ne = g.add_edge(dst, y, node)
        vg.register(ne, dst, vg._empty_index(dst))
        vg.register(ne, y, gi_y)
        if was:
            m.add(g, ne)
    else:
        vg.clear_edge(ex)
        y_node = vg.groups[y][gi_y][0]
        true_new = arena.product(node, y_node)
        g.set_node(ex, arena.union(g.edge_node[ex], true_new))
        if was:
            m.add(g, ex)


def _phase2_case2(g, m, comp, vg: VertexGroups, v: int, spider) -> None:
    """Contract all qualifying degree-two neighbors of ``v`` at once.

    ``spider`` holds ``(u, edge u-v, w, edge u-w)`` rows: u is removed, w
    is merged into v, and v's pending factor for the lost spider edges is
    deferred into its groups instead of touching every incident edge.
    """
    arena = g.arena
    ws = [row[2] for row in spider]
    if len(set(ws)) != len(ws) or v in ws:
        raise InvariantViolation("spider legs must end in distinct vertices")
    for u, e_uv, w, e_uw in spider:
        vg.clear_edge(e_uv)
        vg.clear_edge(e_uw)
    for w in sorted(ws):
        vg.clear_vertex(w)
    far = [g.edge_node[row[3]] for row in spider]
    near = [g.edge_node[row[1]] for row in spider]
    k = len(spider)
    pre: list[int | None] = [None] * (k + 1)
    for j in range(k):
        pre[j + 1] = arena.product(pre[j], far[j])
    suf: list[int | None] = [None] * (k + 1)
    for j in range(k - 1, -1, -1):
        suf[j] = arena.product(far[j], suf[j + 1])
    t_v = pre[k]
    t_w = [arena.product(near[j], arena.product(pre[j], suf[j + 1])) for j in range(k)]

    # Tear out the spider, remembering how the matching covered it.
    matched_leg = None  # index whose u was matched to v
    for j, (u, e_uv, w, e_uw) in enumerate(spider):
        if e_uv in m.edges:
            matched_leg = j
            m.remove(g, e_uv)
        if e_uw in m.edges:
            m.remove(g, e_uw)
        vg.unregister(e_uv, u)
        vg.unregister(e_uv, v)
        vg.unregister(e_uw, u)
        vg.unregister(e_uw, w)
        g.kill_edge(e_uv)
        g.kill_edge(e_uw)
        g.kill_vertex(u)
        comp.discard(u)
        vg.drop_vertex(u)

    vg.multiply_all(v, t_v)

    for j, (u, e_uv, w, e_uw) in enumerate(spider):
        for e in sorted(g.inc[w]):
            _move_simple(g, m, vg, e, w, v, t_w[j])
        g.kill_vertex(w)
        comp.discard(w)
        vg.drop_vertex(w)
    if matched_leg is None and m.mate[v] is None:
        raise InvariantViolation("spider contraction lost the matching at v")
