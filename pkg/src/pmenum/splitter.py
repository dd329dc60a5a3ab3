"""Splitting a trimmed strongly connected graph into two matching classes.

Given such a graph G, the splitter picks an edge ``pi`` whose set of
matchings-through-it is minimal under inclusion, and partitions the
edges around it into sets A and B such that the matchings of G are
exactly the disjoint union of those of G - A and G - B.  The partition
is chosen so that the two children's potentials exceed the parent's by
at least |E(G)| / 10, which pays for all work done at this step.

Terminology used below: ``sigma`` and ``tau`` are the endpoints of
``pi`` (tail and head in the matching orientation).  Deleting the other
edges around them leaves a graph whose components, ordered by
reachability, form a poset with unique minimum ``tau`` and maximum
``sigma``; every matching avoiding ``pi`` crosses each "cut" of that
poset (the outgoing boundary of a downward-closed set) exactly once,
which is what makes boundary-based splits exhaustive and disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvariantViolation
from .graph import (
    BipartiteGraph,
    Matching,
    OrientedView,
    alternating_cycle_through,
    classify_edges,
    flip,
)
from .trimmer import potential_of

CHARGE_FACTOR = 10  # split must gain at least |E| / CHARGE_FACTOR potential


def _matching_containing(g: BipartiteGraph, m: Matching, e: int) -> Matching:
    if e in m.edges:
        return m
    cyc = alternating_cycle_through(OrientedView(g, m), e)
    if cyc is None:
        raise InvariantViolation("edge is in no perfect matching")
    return flip(g, m, cyc)


def _matching_avoiding(g: BipartiteGraph, m: Matching, e: int) -> Matching:
    if e not in m.edges:
        return m
    cyc = alternating_cycle_through(OrientedView(g, m), e)
    if cyc is None:
        raise InvariantViolation("edge is in every perfect matching")
    return flip(g, m, cyc)


def find_m_plus_minimal(g: BipartiteGraph, m: Matching) -> tuple[int, Matching]:
    """An edge whose matching set is minimal, with a matching through it.

    Starts from the lowest edge handle; if that edge is not minimal, a
    forbidden-after-deletion witness edge leads along an alternating
    cycle to an edge whose component has a second forbidden incoming
    edge, and that edge works.
    """
    e = min(g.alive_edges())
    m_avoid = _matching_avoiding(g, m, e)
    g_minus = g.copy()
    g_minus.kill_edge(e)
    cls_minus = classify_edges(OrientedView(g_minus, m_avoid))
    m_with = _matching_containing(g, m, e)
    g_plus = g.copy()
    for f in sorted(set(g.inc[g.edge_u[e]]) | set(g.inc[g.edge_v[e]])):
        if f != e:
            g_plus.kill_edge(f)
    cls_plus = classify_edges(OrientedView(g_plus, m_with))
    bad = sorted(cls_minus.b_minus - cls_plus.b_plus)
    if not bad:
        return e, m_with
    h = bad[0]
    cyc = alternating_cycle_through(OrientedView(g, m_avoid), h)
    if cyc is None or e not in cyc:
        raise InvariantViolation("witness cycle must pass the starting edge")
    incoming: dict[int, int] = {}
    for f in cls_minus.b_minus:
        head = g.edge_u[f]  # forbidden edges point right-to-left
        k = cls_minus.comp_of[head]
        incoming[k] = incoming.get(k, 0) + 1
    idx = cyc.index(e)
    for f in cyc[idx + 1 :] + cyc[:idx]:
        if f in cls_minus.b_minus and incoming[cls_minus.comp_of[g.edge_u[f]]] >= 2:
            return f, _matching_containing(g, m, f)
    raise InvariantViolation("no minimal edge found along the witness cycle")


@dataclass
class SplitContext:
    """The component poset of G with the edges around ``pi`` deleted."""

    pi: int
    sigma: int
    tau: int
    m_pi: Matching
    components: list[frozenset[int]]  # excludes the {sigma, tau} pair
    trivial: list[bool]
    key_of: dict[int, object]  # vertex -> component index or "sigma"/"tau"
    external: set[int]  # edges not internal to any component (pi excluded)
    arcs: dict[object, set[object]]  # deduplicated poset arcs
    below: dict[object, set[object]] = field(default_factory=dict)  # strict

    def keys(self) -> list[object]:
        return ["tau", *range(len(self.components)), "sigma"]

    def leq(self, a, b) -> bool:
        return a == b or b in self.below[a]

    def down_set(self, *tops) -> set[object]:
        out = set()
        for t in tops:
            out.add(t)
            out.update(k for k in self.keys() if t in self.below[k])
        return out

    def edge_keys(self, g: BipartiteGraph, e: int) -> tuple[object, object]:
        """(tail key, head key) of an external edge under the orientation."""
        if e in self.m_pi.edges:
            return self.key_of[g.edge_u[e]], self.key_of[g.edge_v[e]]
        return self.key_of[g.edge_v[e]], self.key_of[g.edge_u[e]]

    def boundary(self, g: BipartiteGraph, ideal: set[object]) -> set[int]:
        """External edges leaving the downward-closed set ``ideal``."""
        out = set()
        for e in self.external:
            t, h = self.edge_keys(g, e)
            if t in ideal and h not in ideal:
                out.add(e)
        return out


def decompose(g: BipartiteGraph, pi: int, m_pi: Matching) -> SplitContext:
    sigma, tau = g.endpoints(pi)
    g_plus = g.copy()
    for f in sorted(set(g.inc[sigma]) | set(g.inc[tau])):
        if f != pi:
            g_plus.kill_edge(f)
    cls = classify_edges(OrientedView(g_plus, m_pi))
    comps: list[frozenset[int]] = []
    trivial: list[bool] = []
    key_of: dict[int, object] = {sigma: "sigma", tau: "tau"}
    for comp, triv in zip(cls.components, cls.trivial):
        if sigma in comp:
            if comp != frozenset((sigma, tau)):
                raise InvariantViolation("pi endpoints not their own component")
            continue
        for v in comp:
            key_of[v] = len(comps)
        comps.append(comp)
        trivial.append(triv)
    external: set[int] = set()
    for e in g.alive_edges():
        if e == pi:
            continue
        if key_of[g.edge_u[e]] != key_of[g.edge_v[e]]:
            external.add(e)
    ctx = SplitContext(pi, sigma, tau, m_pi, comps, trivial, key_of, external, {})
    arcs: dict[object, set[object]] = {k: set() for k in ctx.keys()}
    for e in external:
        t, h = ctx.edge_keys(g, e)
        arcs[t].add(h)
    ctx.arcs = arcs
    # Strict descendant sets by depth-first search from every key.
    for k in ctx.keys():
        seen: set[object] = set()
        stack = list(arcs[k])
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(arcs[x])
        if k in seen:
            raise InvariantViolation("component order contains a cycle")
        ctx.below[k] = seen
    others = set(ctx.keys()) - {"tau", "sigma"}
    if ctx.below["tau"] != others | {"sigma"}:
        raise InvariantViolation("tau is not the unique minimum")
    if any("sigma" not in ctx.below[k] for k in others):
        raise InvariantViolation("sigma is not the unique maximum")
    return ctx


@dataclass
class ReachabilityReport:
    reachable_edges: set[int]
    reachable_components: set[int]
    avoidable_components: set[int]


def reachability(g: BipartiteGraph, ctx: SplitContext, removed: set[int]) -> ReachabilityReport:
    """Which external edges/components a matching avoiding ``pi`` can use
    after deleting ``removed``.

    An external edge is *reachable* when some tau-to-sigma walk of the
    orientation (minus ``removed``) passes it, a component when such a
    walk meets it, and a component is *avoidable* when it is reachable
    but some walk misses it entirely.
    """
    view = OrientedView(g, ctx.m_pi)

    def forward(skip_vertices=frozenset()) -> set[int]:
        seen = set()
        stack = [] if ctx.tau in skip_vertices else [ctx.tau]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            g.arena.charge()
            for f, y in view.out_arcs(x):
                if f != ctx.pi and f not in removed and y not in skip_vertices:
                    stack.append(y)
        return seen

    fwd = forward()
    bwd = set()
    stack = [ctx.sigma]
    in_arcs: dict[int, list[tuple[int, int]]] = {}
    for e in g.alive_edges():
        if e == ctx.pi or e in removed:
            continue
        t, h = view.arc(e)
        in_arcs.setdefault(h, []).append((e, t))
    while stack:
        x = stack.pop()
        if x in bwd:
            continue
        bwd.add(x)
        g.arena.charge()
        for f, y in in_arcs.get(x, ()):
            stack.append(y)
    edges = set()
    for e in ctx.external:
        if e in removed:
            continue
        t, h = view.arc(e)
        if t in fwd and h in bwd:
            edges.add(e)
    comps = {
        i
        for i, comp in enumerate(ctx.components)
        if any(v in fwd and v in bwd for v in comp)
    }
    avoidable = set()
    for i in comps:
        seen = forward(skip_vertices=ctx.components[i])
        if ctx.sigma in seen:
            avoidable.add(i)
    return ReachabilityReport(edges, comps, avoidable)


@dataclass
class SplitResult:
    pi: int
    case: int
    a_edges: set[int]
    b_edges: set[int]
    delta: int
    g_a: BipartiteGraph
    m_a: Matching
    g_b: BipartiteGraph
    m_b: Matching


def _child(g: BipartiteGraph, m_pi: Matching, removed: set[int]):
    """Copy of ``g`` without ``removed``, with a perfect matching."""
    if m_pi.edges & removed:
        # Only pi itself can be matched and removed; reroute the matching
        # along an alternating cycle that dodges the other removed edges.
        cyc = alternating_cycle_through(
            OrientedView(g, m_pi), next(iter(m_pi.edges & removed)), banned=removed
        )
        if cyc is None:
            raise InvariantViolation("child graph has no perfect matching")
        m2 = flip(g, m_pi, cyc)
    else:
        m2 = m_pi.copy()
    if m2.edges & removed:
        raise InvariantViolation("child matching uses a removed edge")
    g2 = g.copy()
    for e in sorted(removed):
        g2.kill_edge(e)
    return g2, m2


def choose_split(g: BipartiteGraph, m: Matching) -> SplitResult:
    """Pick A and B for a trimmed strongly connected graph.

    Tries the cases in a fixed order; the first applicable one is used
    and its potential gain is verified exactly, never estimated.
    """
    n_edges = g.alive_edge_count()
    if n_edges < 2:
        raise InvariantViolation("nothing to split")
    phi_g = potential_of(g, m)
    pi, m_pi = find_m_plus_minimal(g, m)
    sigma, tau = g.endpoints(pi)

    def build(a: set[int], b: set[int], case: int, strict: bool = True):
        if pi not in a or not b or a & b:
            raise InvariantViolation(f"malformed split in case {case}")
        g_a, m_a = _child(g, m_pi, a)
        g_b, m_b = _child(g, m_pi, b)
        delta = potential_of(g_a, m_a) + potential_of(g_b, m_b) - phi_g
        if CHARGE_FACTOR * delta < n_edges:
            if strict:
                raise InvariantViolation(
                    f"case {case} split gains too little potential"
                )
            return None
        return SplitResult(pi, case, a, b, delta, g_a, m_a, g_b, m_b)

    # Case 1: removing pi alone is already well charged (always true when
    # deleting pi forbids further edges).
    b1 = set(g.inc[tau]) - {pi}
    result = build({pi}, b1, 1, strict=False)
    if result is not None:
        return result

    ctx = decompose(g, pi, m_pi)
    nontrivial = [i for i, t in enumerate(ctx.trivial) if not t]

    # Case 2: two incomparable non-trivial components.
    for ai in range(len(nontrivial)):
        for bi in range(ai + 1, len(nontrivial)):
            ka, kb = nontrivial[ai], nontrivial[bi]
            if ctx.leq(ka, kb) or ctx.leq(kb, ka):
                continue
            ideal = ctx.down_set(ka, kb)
            b = {e for e in ctx.external if ctx.edge_keys(g, e)[0] == kb}
            boundary = ctx.boundary(g, ideal)
            if not b <= boundary:
                raise InvariantViolation("outgoing edges of a maximal component leave the ideal")
            return build((boundary - b) | {pi}, b, 2)

    chain = _maximal_chain(ctx, nontrivial)
    kappa = chain[1:-1]
    if not kappa:
        raise InvariantViolation("empty chain after case 2")

    def out_edges(key):
        return sorted(e for e in ctx.external if ctx.edge_keys(g, e)[0] == key)

    def in_edges(key):
        return sorted(e for e in ctx.external if ctx.edge_keys(g, e)[1] == key)

    # Case 3: several edges between tau and the first chain component, or
    # between the last one and sigma.
    tau_first = [e for e in out_edges("tau") if ctx.edge_keys(g, e)[1] == kappa[0]]
    if len(tau_first) >= 2:
        b = {tau_first[0]}
        return build(set(g.inc[tau]) - b, b, 3)
    last_sigma = [e for e in in_edges("sigma") if ctx.edge_keys(g, e)[0] == kappa[-1]]
    if len(last_sigma) >= 2:
        b = {last_sigma[0]}
        return build(set(g.inc[sigma]) - b, b, 3)

    # Case 4: the first chain component has a single outgoing edge, or the
    # last a single incoming one.
    ideal_lo = ctx.down_set(kappa[0])
    ideal_hi = {k for k in ctx.keys() if not ctx.leq(kappa[-1], k)}
    def build_boundary(ideal: set[object], b: set[int], case: int) -> SplitResult:
        boundary = ctx.boundary(g, ideal)
        if not b <= boundary:
            raise InvariantViolation(f"case {case} edge not on the boundary")
        return build((boundary - b) | {pi}, b, case)

    outs = out_edges(kappa[0])
    if len(outs) == 1:
        return build_boundary(ideal_lo, {outs[0]}, 4)
    ins = in_edges(kappa[-1])
    if len(ins) == 1:
        return build_boundary(ideal_hi, {ins[0]}, 4)

    # Case 5: the second chain component has a single incoming edge, or
    # the second-to-last a single outgoing one.
    if len(kappa) >= 2:
        ins2 = in_edges(kappa[1])
        if len(ins2) == 1:
            return build_boundary(ideal_lo, {ins2[0]}, 5)
        outs2 = out_edges(kappa[-2])
        if len(outs2) == 1:
            return build_boundary(ideal_hi, {outs2[0]}, 5)

    # Case 6: split a whole boundary, keeping every component reachable on
    # both sides.
    d_lo = ctx.boundary(g, ideal_lo)
    d_hi = ctx.boundary(g, ideal_hi)
    common = sorted(d_lo & d_hi)
    if not common:
        ideal = ideal_lo if len(d_lo) <= len(d_hi) else ideal_hi
        a, b = greedy_boundary_split(g, ctx, ideal)
        return build(a | {pi}, b, 6)
    forced = {common[0]}
    e_tau = [e for e in sorted(d_lo) if ctx.edge_keys(g, e)[0] == "tau"]
    if e_tau:
        forced.add(e_tau[0])
    e_sigma = [e for e in sorted(d_lo) if ctx.edge_keys(g, e)[1] == "sigma"]
    if e_sigma:
        forced.add(e_sigma[0])
    a, b = greedy_boundary_split(g, ctx, ideal_lo, forced)
    return build(a | {pi}, b, 6)


def _maximal_chain(ctx: SplitContext, nontrivial: list[int]) -> list[object]:
    """A maximal chain from tau to sigma through every non-trivial component."""

    def rank(k):
        if k == "tau":
            return (-1,)
        if k == "sigma":
            return (len(ctx.components),)
        return (k,)

    anchors = sorted(nontrivial, key=lambda k: len(ctx.below[k]), reverse=True)
    for x, y in zip(anchors, anchors[1:]):
        if not ctx.leq(x, y):
            raise InvariantViolation("non-trivial components not totally ordered")
    chain = ["tau"]
    for target in anchors + ["sigma"]:
        while chain[-1] != target:
            cur = chain[-1]
            cands = [
                z
                for z in ctx.keys()
                if z != cur and ctx.leq(cur, z) and ctx.leq(z, target)
            ]
            covers = [
                z
                for z in cands
                if not any(z2 != z and ctx.leq(z2, z) for z2 in cands)
            ]
            chain.append(min(covers, key=rank))
    return chain


def greedy_boundary_split(
    g: BipartiteGraph,
    ctx: SplitContext,
    ideal: set[object],
    forced_b: set[int] = frozenset(),
) -> tuple[set[int], set[int]]:
    """Two-color a boundary so every adjacent component sees both colors.

    Components that are maximal inside the ideal need an outgoing edge of
    each color, and components minimal outside need an incoming edge of
    each color (each has at least two, so walks that alternate colors can
    satisfy everyone; a local repair pass handles odd closed walks).
    Uncolored leftovers go to A.
    """
    boundary = sorted(ctx.boundary(g, ideal))
    relevant: dict[object, list[int]] = {}
    comp_keys = set(range(len(ctx.components)))
    maximal = {
        k
        for k in ideal & comp_keys
        if not any(k2 in ideal and k2 != k and ctx.leq(k, k2) for k2 in ideal)
    }
    outside = set(ctx.keys()) - ideal
    minimal = {
        k
        for k in outside & comp_keys
        if not any(k2 in outside and k2 != k and ctx.leq(k2, k) for k2 in outside)
    }
    edge_sides: dict[int, list[object]] = {}
    for e in boundary:
        t, h = ctx.edge_keys(g, e)
        sides = []
        if t in maximal:
            sides.append(t)
            relevant.setdefault(t, []).append(e)
        if h in minimal:
            sides.append(h)
            relevant.setdefault(h, []).append(e)
        edge_sides[e] = sides
    for k, es in relevant.items():
        if len(es) < 2:
            raise InvariantViolation("boundary component with fewer than two edges")
    color: dict[int, str] = {e: "B" for e in forced_b if e in set(boundary)}

    def colors_of(k) -> set[str]:
        return {color[e] for e in relevant[k] if e in color}

    def pick_start():
        for k in sorted(relevant, key=str):
            missing = {"A", "B"} - colors_of(k)
            open_edges = [e for e in relevant[k] if e not in color]
            if missing and open_edges:
                return k, sorted(missing)[0]
        return None

    while True:
        start = pick_start()
        if start is None:
            break
        k, c = start
        while True:
            open_edges = [e for e in relevant[k] if e not in color]
            if not open_edges:
                break
            e = open_edges[0]
            color[e] = c
            nxt = [k2 for k2 in edge_sides[e] if k2 != k]
            c = "A" if c == "B" else "B"
            if not nxt or c not in ({"A", "B"} - colors_of(nxt[0])):
                break
            k = nxt[0]

    # Repair pass for components stuck with one color.
    for _ in range(len(boundary) + 1):
        broken = [
            k for k in sorted(relevant, key=str) if len(colors_of(k)) < 2
        ]
        if not broken:
            break
        fixed = False
        for k in broken:
            missing = sorted({"A", "B"} - colors_of(k))[0]
            have = "A" if missing == "B" else "B"
            for e in relevant[k]:
                if color.get(e) != have:
                    continue
                others = [k2 for k2 in edge_sides[e] if k2 != k]
                ok = all(
                    any(color.get(f) == have for f in relevant[k2] if f != e)
                    for k2 in others
                )
                if ok:
                    color[e] = missing
                    fixed = True
                    break
            if fixed:
                break
        if not fixed:
            raise InvariantViolation("cannot two-color the boundary")
    for k in relevant:
        if len(colors_of(k)) < 2:
            raise InvariantViolation("boundary component misses a color")
    b = {e for e in boundary if color.get(e) == "B"}
    a = set(boundary) - b
    if not b:
        b = {boundary[0]}
        a.discard(boundary[0])
    return a, b
