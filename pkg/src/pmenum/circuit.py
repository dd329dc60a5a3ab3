"""Append-only union-product circuits over graph edges.

A circuit node encodes a set of partial matchings of the original graph:
a leaf stands for one edge, a union node for the disjoint union of its
children's sets, and a product node for all unions of one matching from
each child.  The ``potential`` of a node is the size of the encoded set
and is maintained exactly (Python integers).

``visit_all`` walks every encoded matching of a root node in constant
amortized time by moving *visit pointers* around the circuit: at any
moment the pointers below the root select one matching (a "visiting
tree"), and each step advances the tree to the next matching.
"""

from __future__ import annotations

from .errors import InvariantViolation, TestGuard

LEAF = 0
UNION = 1
PRODUCT = 2

_KIND_NAMES = {LEAF: "leaf", UNION: "union", PRODUCT: "product"}


class CircuitArena:
    """Backing store for circuit nodes, shared by all graphs of a session.

    Nodes are identified by dense integer handles and never removed, so
    handles stay valid across graph copies.  ``steps`` is a session-wide
    counter of elementary operations (stack pops, edges scanned, nodes
    created) used by the statistics output.
    """

    def __init__(self):
        self.kind: list[int] = []
        self.left: list[int | None] = []
        self.right: list[int | None] = []
        self.edge: list[int | None] = []
        self.pot: list[int] = []
        self.skip: list[int | None] = []
        self.visit_left: list[int | None] = []
        self.visit_right: list[int | None] = []
        self.created = 0
        self.steps = 0

    def charge(self, n: int = 1) -> None:
        self.steps += n

    def __len__(self) -> int:
        return len(self.kind)

    def _new(self, kind, left, right, edge, pot, skip, vl, vr) -> int:
        u = len(self.kind)
        self.kind.append(kind)
        self.left.append(left)
        self.right.append(right)
        self.edge.append(edge)
        self.pot.append(pot)
        self.skip.append(skip)
        self.visit_left.append(vl)
        self.visit_right.append(vr)
        self.created += 1
        self.steps += 1
        return u

    def leaf(self, edge_id: int) -> int:
        return self._new(LEAF, None, None, edge_id, 1, None, None, None)

    def union(self, l: int, r: int) -> int:
        return self._new(UNION, l, r, None, self.pot[l] + self.pot[r], None, None, None)

    def product(self, l: int | None, r: int | None) -> int | None:
        """Product of two nodes; an absent child acts as the identity."""
        if l is None:
            return r
        if r is None:
            return l
        pl, pr = self.pot[l], self.pot[r]
        pot = pl * pr
        if self.kind[l] == UNION or self.kind[r] == UNION or (pl >= 2 and pr >= 2):
            # Free node: its visit pointers move during enumeration — except
            # on a side whose child has potential one, which never changes.
            u = self._new(
                PRODUCT, l, r, None, pot, None,
                l if pl == 1 else None,
                r if pr == 1 else None,
            )
            self.skip[u] = u
            return u
        # Both children are products or leaves and at least one has
        # potential one: the visit pointers are fixed at creation and the
        # node delegates pointer moves to the larger child's free node.
        skip = None
        if pl >= 2:
            skip = self.skip[l]
        elif pr >= 2:
            skip = self.skip[r]
        return self._new(PRODUCT, l, r, None, pot, skip, l, r)

    def product_fold(self, nodes) -> int | None:
        """Left-associated product of a sequence (identity for empty)."""
        out = None
        for u in nodes:
            out = self.product(out, u)
        return out

    def _bootstrap_product(self, left: int | None = None) -> int:
        """Private constructor for the two artificial enumeration nodes."""
        pot = 1 if left is None else self.pot[left]
        u = self._new(PRODUCT, left, None, None, pot, None, None, None)
        self.skip[u] = u
        return u

    def dump(self, root: int | None = None) -> str:
        """Human-readable listing of the circuit (for debugging)."""
        ids = range(len(self.kind)) if root is None else sorted(_reachable(self, root))
        lines = []
        for u in ids:
            kind = _KIND_NAMES[self.kind[u]]
            if self.kind[u] == LEAF:
                lines.append(f"{u}: leaf edge={self.edge[u]} pot={self.pot[u]}")
            else:
                lines.append(
                    f"{u}: {kind} left={self.left[u]} right={self.right[u]} "
                    f"pot={self.pot[u]} skip={self.skip[u]}"
                )
        return "\n".join(lines)


def _reachable(arena: CircuitArena, root: int) -> set[int]:
    seen = set()
    stack = [root]
    while stack:
        u = stack.pop()
        if u in seen or u is None:
            continue
        seen.add(u)
        if arena.kind[u] != LEAF:
            stack.extend(c for c in (arena.left[u], arena.right[u]) if c is not None)
    return seen


def side_sequence(arena: CircuitArena, u: int, side: int):
    """Yield the product/leaf nodes below child ``side`` of product ``u``.

    These are the nodes reached from the child by descending through
    union nodes only, left child first; the visit pointer of ``u`` on
    that side cycles through exactly this sequence.
    """
    child = arena.left[u] if side == 0 else arena.right[u]
    if child is None:
        return
    stack = [child]
    while stack:
        x = stack.pop()
        if arena.kind[x] == UNION:
            stack.append(arena.right[x])
            stack.append(arena.left[x])
        else:
            yield x


class _Seq:
    """Resumable cursor over one side sequence with one-node lookahead."""

    __slots__ = ("stack", "cur", "nxt")

    def __init__(self, arena: CircuitArena, u: int, side: int):
        child = arena.left[u] if side == 0 else arena.right[u]
        self.stack = [child]
        self.cur = self._advance(arena)
        self.nxt = self._advance(arena)

    def _advance(self, arena: CircuitArena) -> int | None:
        stack = self.stack
        while stack:
            x = stack.pop()
            if arena.kind[x] == UNION:
                stack.append(arena.right[x])
                stack.append(arena.left[x])
            else:
                return x
        return None

    def step(self, arena: CircuitArena) -> None:
        self.cur = self.nxt
        self.nxt = self._advance(arena)


def visit_all(arena: CircuitArena, root: int, sink) -> tuple[int, int]:
    """Visit every matching encoded by ``root`` exactly once.

    ``sink`` receives the handle of the current visiting-tree root after
    each advance; :func:`current_leaves` on that handle reads off the
    matching.  Returns ``(count, steps)`` where ``steps`` counts stack
    pops and satisfies ``steps <= 6 * potential(root)``.
    """
    # Two artificial nodes drive the top level: a childless product a1 and
    # a free product a3 whose left side sequence is a1 followed by the
    # sequence of the real root, so the first advance installs the first
    # real tree and the machinery needs no special first-step handling.
    a1 = arena._bootstrap_product()
    a2 = arena.union(a1, root)
    a3 = arena._bootstrap_product(left=a2)

    seqs: dict[tuple[int, int], _Seq] = {}
    ready: list[tuple[int, int, int]] = []
    waiting: list[tuple[int, int]] = []

    def make_ready(u: int, v: int, side: int) -> None:
        if side == 0:
            arena.visit_left[u] = v
        else:
            arena.visit_right[u] = v
        ready.append((u, v, side))
        if arena.pot[v] >= 2:
            # Queue initialization of the enumerating sides of the free
            # node governing v.  A side whose child has potential one has
            # a fixed pointer and is never queued, which is what keeps the
            # traversal cost linear in the potential.
            s = arena.skip[v]
            rc = arena.right[s]
            if rc is not None and arena.pot[rc] >= 2:
                waiting.append((s, 1))
            if arena.pot[arena.left[s]] >= 2:
                waiting.append((s, 0))

    seqs[(a3, 0)] = _Seq(arena, a3, 0)
    if seqs[(a3, 0)].cur != a1:
        raise InvariantViolation("bootstrap sequence must start at the stub")
    arena.visit_left[a3] = a1
    ready.append((a3, a1, 0))

    count = 0
    steps = 0
    while ready:
        u, v, side = ready.pop()
        steps += 1
        seq = seqs[(u, side)]
        if seq.nxt is None:
            # This side of u is exhausted.
            left, right = arena.left[u], arena.right[u]
            if side == 1 and arena.pot[left] >= 2:
                # The left pointer of u will advance later and must then
                # restart the right side from the beginning.
                waiting.append((u, 1))
            elif side == 0 and right is not None and arena.pot[right] >= 2:
                # u is exhausted altogether; discard the restart entry
                # that the final right-side exhaustion pushed.
                dropped = waiting.pop()
                steps += 1
                if dropped != (u, 1):
                    raise InvariantViolation("waiting stack out of order")
            continue
        seq.step(arena)
        make_ready(u, seq.cur, side)
        while waiting:
            x, d = waiting.pop()
            steps += 1
            seqs[(x, d)] = _Seq(arena, x, d)
            first = seqs[(x, d)].cur
            if first is None:
                raise InvariantViolation("empty side sequence")
            make_ready(x, first, d)
        count += 1
        sink(arena.visit_left[a3])
    arena.charge(steps)
    if steps > 6 * arena.pot[root]:
        raise InvariantViolation(
            f"visit took {steps} steps for potential {arena.pot[root]}"
        )
    if waiting:
        raise InvariantViolation("waiting stack not drained")
    if count != arena.pot[root]:
        raise InvariantViolation(
            f"visited {count} matchings, potential says {arena.pot[root]}"
        )
    return count, steps


def current_leaves(arena: CircuitArena, tree: int) -> list[int]:
    """Edge handles of the matching selected by the current visit pointers."""
    out: list[int] = []
    stack = [tree]
    while stack:
        x = stack.pop()
        if arena.kind[x] == LEAF:
            out.append(arena.edge[x])
            continue
        l, r = arena.visit_left[x], arena.visit_right[x]
        if l is None or r is None:
            raise InvariantViolation("visit pointer not set inside a tree")
        stack.append(r)
        stack.append(l)
    return out


def materialize(arena: CircuitArena, root: int, cap: int = 10000) -> frozenset:
    """The full encoded set of ``root`` as a frozenset of edge frozensets.

    Testing helper; guarded by ``cap`` on the potential of any node
    touched, since the result can be exponentially large.
    """
    memo: dict[int, frozenset] = {}

    def rec(u: int) -> frozenset:
        if u in memo:
            return memo[u]
        if arena.pot[u] > cap:
            raise TestGuard(f"node potential {arena.pot[u]} exceeds cap {cap}")
        if arena.kind[u] == LEAF:
            out = frozenset((frozenset((arena.edge[u],)),))
        elif arena.kind[u] == UNION:
            a, b = rec(arena.left[u]), rec(arena.right[u])
            if a & b:
                raise InvariantViolation("union children overlap")
            out = a | b
        else:
            a, b = rec(arena.left[u]), rec(arena.right[u])
            pairs = []
            for x in a:
                for y in b:
                    if len(x) + len(y) != len(x | y):
                        raise InvariantViolation("product children collide")
                    pairs.append(x | y)
            out = frozenset(pairs)
            if len(out) != len(a) * len(b):
                raise InvariantViolation("product children collide")
        if len(out) != arena.pot[u]:
            raise InvariantViolation("potential disagrees with encoded set size")
        memo[u] = out
        return out

    return rec(root)
