"""Slow but independent checks and instance generators.

Nothing here shares code with the enumerator: matchings are found by
plain backtracking and counted with Ryser's permanent formula, so the
two sides of every test reach their answer along different routes.
"""

from __future__ import annotations

import os
import random

from .errors import MalformedInput, TestGuard
from .graph import LEFT, BipartiteGraph, build_graph

_DEFAULT_BRUTE_CAP = 10
_PERMANENT_CAP = 20


def oracle_cap() -> int:
    """Size cap for the backtracking oracle (env ``PMENUM_ORACLE_CAP``)."""
    raw = os.environ.get("PMENUM_ORACLE_CAP")
    if raw is None:
        return _DEFAULT_BRUTE_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise MalformedInput(f"PMENUM_ORACLE_CAP must be an integer: {raw!r}") from exc


def brute_force(g: BipartiteGraph, cap: int | None = None) -> set[frozenset[int]]:
    """All perfect matchings of the alive subgraph, as edge-handle sets."""
    if cap is None:
        cap = oracle_cap()
    left = [v for v in g.alive_vertices() if g.side(v) == LEFT]
    right = [v for v in g.alive_vertices() if g.side(v) != LEFT]
    if len(left) > cap:
        raise TestGuard(f"{len(left)} left vertices exceed oracle cap {cap}")
    if len(left) != len(right):
        return set()
    out: set[frozenset[int]] = set()
    chosen: list[int] = []
    used: set[int] = set()

    def extend(i: int) -> None:
        if i == len(left):
            out.add(frozenset(chosen))
            return
        u = left[i]
        for e in sorted(g.inc[u]):
            w = g.other_endpoint(e, u)
            if w in used:
                continue
            used.add(w)
            chosen.append(e)
            extend(i + 1)
            chosen.pop()
            used.discard(w)

    extend(0)
    return out


def permanent(g: BipartiteGraph) -> int:
    """Number of perfect matchings via Ryser's formula with Gray-code sums."""
    left = [v for v in g.alive_vertices() if g.side(v) == LEFT]
    right = [v for v in g.alive_vertices() if g.side(v) != LEFT]
    n = len(left)
    if n != len(right):
        return 0
    if n == 0:
        return 1
    if n > _PERMANENT_CAP:
        raise TestGuard(f"{n} rows exceed permanent cap {_PERMANENT_CAP}")
    col_of = {v: j for j, v in enumerate(right)}
    rows = []
    for u in left:
        mask = 0
        for e in g.inc[u]:
            mask |= 1 << col_of[g.other_endpoint(e, u)]
        rows.append(mask)
    # Gray-code iteration over column subsets, keeping per-row counts of
    # selected columns; the product over rows is updated lazily.
    counts = [0] * n
    total = 0
    prev = 0
    sign = 1  # (-1)^(n - |S|) folded in at the end
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        bit = gray ^ prev
        j = bit.bit_length() - 1
        add = gray & bit
        for i in range(n):
            if rows[i] >> j & 1:
                counts[i] += 1 if add else -1
        prev = gray
        prod = 1
        for c in counts:
            if c == 0:
                prod = 0
                break
            prod *= c
        if prod:
            bits = bin(gray).count("1")
            total += prod if (n - bits) % 2 == 0 else -prod
    return total * sign


def m_plus_set(g: BipartiteGraph, e: int, cap: int | None = None) -> set[frozenset[int]]:
    """All perfect matchings that contain edge ``e`` (brute force)."""
    return {m for m in brute_force(g, cap) if e in m}


# -- generators --------------------------------------------------------


def complete(n: int) -> BipartiteGraph:
    """K_{n,n}; has n! perfect matchings."""
    if n < 1:
        raise MalformedInput("complete graph needs n >= 1")
    return build_graph(n, n, [(i, j) for i in range(n) for j in range(n)])


def cycle(num_vertices: int) -> BipartiteGraph:
    """The cycle on ``num_vertices`` vertices; has exactly 2 perfect matchings."""
    if num_vertices < 4 or num_vertices % 2 != 0:
        raise MalformedInput("cycle needs an even vertex count >= 4")
    n = num_vertices // 2
    edges = [(i, i) for i in range(n)] + [(i, (i + 1) % n) for i in range(n)]
    return build_graph(n, n, edges)


def path_substituted(n: int, k: int) -> BipartiteGraph:
    """K_{n,n} with every edge replaced by a path of ``k`` edges (``k`` odd).

    Each path forces its internal vertices pairwise, so the graph keeps
    exactly n! perfect matchings while growing much larger.
    """
    if k < 1 or k % 2 == 0:
        raise MalformedInput("substituted path length must be odd")
    if n < 1:
        raise MalformedInput("path_substituted needs n >= 1")
    # Build an edge list over abstract vertices first, then split by side.
    left_names: list[tuple] = [("u", i) for i in range(n)]
    right_names: list[tuple] = [("w", j) for j in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            prev = ("u", i)
            prev_side = 0
            for t in range(1, k):
                name = ("p", i, j, t)
                (right_names if prev_side == 0 else left_names).append(name)
                edges.append((prev, name))
                prev = name
                prev_side ^= 1
            edges.append((prev, ("w", j)))
    lid = {name: i for i, name in enumerate(left_names)}
    rid = {name: i for i, name in enumerate(right_names)}
    pairs = []
    for a, b in edges:
        if a in lid:
            pairs.append((lid[a], rid[b]))
        else:
            pairs.append((lid[b], rid[a]))
    return build_graph(len(left_names), len(right_names), pairs)


def min_count_graph(n: int, m: int) -> BipartiteGraph:
    """A graph on ``n`` vertices and ``m`` edges with exactly ``m - n + 2``
    perfect matchings.

    Construction: the cycle 1..n plus chords from odd vertices ``<= n/2``
    to even vertices ``>= n/2``.  Requires ``n + 2`` divisible by 4 and
    ``n <= m <= n*n/16 + 5*n/4 - 7/4``.
    """
    if (n + 2) % 4 != 0:
        raise MalformedInput("min_count_graph needs n + 2 divisible by 4")
    max_m = n * n / 16 + 5 * n / 4 - 7 / 4
    if not n <= m <= max_m:
        raise MalformedInput(f"edge count must satisfy {n} <= m <= {max_m:g}")
    cyc = {frozenset((i, i % n + 1)) for i in range(1, n + 1)}
    chords = sorted(
        (a, b)
        for a in range(1, n + 1, 2)
        if a <= n / 2
        for b in range(2, n + 1, 2)
        if b >= n / 2
        if frozenset((a, b)) not in cyc
    )
    extra = m - n
    pairs = sorted(tuple(sorted(p)) for p in cyc) + chords[:extra]
    # Odd labels form the left class.
    lid = {v: (v - 1) // 2 for v in range(1, n + 1, 2)}
    rid = {v: (v - 2) // 2 for v in range(2, n + 1, 2)}
    edges = []
    for a, b in pairs:
        if a % 2 == 1:
            edges.append((lid[a], rid[b]))
        else:
            edges.append((lid[b], rid[a]))
    return build_graph(n // 2, n // 2, edges)


def random_with_matching(n_left: int, seed: int, density: float) -> BipartiteGraph:
    """Random graph on ``n_left`` + ``n_left`` vertices with a planted
    perfect matching; the seed fixes the graph exactly (Mersenne Twister).
    """
    if n_left < 1:
        raise MalformedInput("random_with_matching needs n_left >= 1")
    if not 0.0 <= density <= 1.0:
        raise MalformedInput("density must lie in [0, 1]")
    rng = random.Random(seed)
    pairs = [(i, i) for i in range(n_left)]
    for i in range(n_left):
        for j in range(n_left):
            if i != j and rng.random() < density:
                pairs.append((i, j))
    return build_graph(n_left, n_left, pairs)
