"""Tests for the union/product circuit and the visiting-tree traversal."""

import random

import pytest

from pmenum.circuit import CircuitArena, current_leaves, materialize, visit_all
from pmenum.errors import InvariantViolation, TestGuard


def collect(arena: CircuitArena, root: int):
    out = []
    count, steps = visit_all(arena, root, lambda t: out.append(frozenset(current_leaves(arena, t))))
    return out, count, steps


def test_leaf_union_product_potentials():
    ar = CircuitArena()
    a, b, c = ar.leaf(0), ar.leaf(1), ar.leaf(2)
    assert ar.pot[a] == 1
    u = ar.union(a, b)
    assert ar.pot[u] == 2
    p = ar.product(u, c)
    assert ar.pot[p] == 2
    q = ar.product(a, b)
    assert ar.pot[q] == 1


def test_product_with_missing_operand_is_identity():
    ar = CircuitArena()
    a = ar.leaf(0)
    assert ar.product(a, None) == a
    assert ar.product(None, a) == a


def test_product_fold_left_associates():
    ar = CircuitArena()
    leaves = [ar.leaf(i) for i in range(4)]
    p = ar.product_fold(leaves)
    assert sorted(next(iter(materialize(ar, p)))) == [0, 1, 2, 3]
    assert ar.pot[p] == 1


def test_materialize_small_circuit():
    ar = CircuitArena()
    a, b, c, d = (ar.leaf(i) for i in range(4))
    root = ar.union(ar.product(a, b), ar.product(c, d))
    sets = materialize(ar, root)
    assert sets == {frozenset({0, 1}), frozenset({2, 3})}


def test_materialize_rejects_overlapping_union():
    ar = CircuitArena()
    a = ar.leaf(0)
    b = ar.leaf(0)
    bad = ar.union(a, b)
    with pytest.raises(InvariantViolation):
        materialize(ar, bad)


def test_materialize_rejects_colliding_product():
    ar = CircuitArena()
    bad = ar.product(ar.leaf(0), ar.leaf(0))
    with pytest.raises(InvariantViolation):
        materialize(ar, bad)


def test_materialize_cap_guard():
    ar = CircuitArena()
    root = ar.leaf(0)
    for i in range(1, 20):
        root = ar.union(root, ar.leaf(i))
    with pytest.raises(TestGuard):
        materialize(ar, root, cap=10)


def test_visit_single_leaf():
    ar = CircuitArena()
    out, count, steps = collect(ar, ar.leaf(7))
    assert out == [frozenset({7})]
    assert count == 1
    assert steps <= 6


def two_square_circuit(ar: CircuitArena) -> int:
    """Product of two unions: matchings of two squares glued by a dead edge."""
    leaves = [ar.leaf(i) for i in range(8)]
    c1 = ar.union(ar.product(leaves[0], leaves[1]), ar.product(leaves[2], leaves[3]))
    c2 = ar.union(ar.product(leaves[4], leaves[5]), ar.product(leaves[6], leaves[7]))
    return ar.product(c1, c2)


def test_visit_order_product_of_unions():
    """Golden order: right side varies fastest under a shared left prefix."""
    ar = CircuitArena()
    root = two_square_circuit(ar)
    out, count, steps = collect(ar, root)
    assert count == 4
    assert out == [
        frozenset({0, 1, 4, 5}),
        frozenset({0, 1, 6, 7}),
        frozenset({2, 3, 4, 5}),
        frozenset({2, 3, 6, 7}),
    ]
    assert steps == 12
    assert steps <= 6 * ar.pot[root]


def test_visit_order_union_of_mixed_products():
    """Golden order for products whose left child has potential one."""
    ar = CircuitArena()
    leaves = [ar.leaf(i) for i in range(8)]
    first = ar.product(leaves[7], ar.union(ar.product(leaves[0], leaves[4]),
                                           ar.product(leaves[1], leaves[2])))
    second = ar.product(leaves[6], ar.union(ar.product(leaves[0], leaves[5]),
                                            ar.product(leaves[1], leaves[3])))
    root = ar.union(first, second)
    out, count, steps = collect(ar, root)
    assert count == 4
    assert out == [
        frozenset({7, 0, 4}),
        frozenset({7, 1, 2}),
        frozenset({6, 0, 5}),
        frozenset({6, 1, 3}),
    ]
    assert steps == 9
    assert steps <= 6 * ar.pot[root]


def test_visit_order_is_deterministic():
    runs = []
    for _ in range(2):
        ar = CircuitArena()
        root = two_square_circuit(ar)
        runs.append(collect(ar, root))
    assert runs[0] == runs[1]


def random_circuit(ar: CircuitArena, rng: random.Random, next_leaf: list[int], depth: int) -> int:
    """A well-formed circuit over fresh leaves: unions get disjoint supports."""
    roll = rng.random()
    if depth == 0 or roll < 0.3:
        e = next_leaf[0]
        next_leaf[0] += 1
        return ar.leaf(e)
    if roll < 0.65:
        return ar.union(
            random_circuit(ar, rng, next_leaf, depth - 1),
            random_circuit(ar, rng, next_leaf, depth - 1),
        )
    return ar.product(
        random_circuit(ar, rng, next_leaf, depth - 1),
        random_circuit(ar, rng, next_leaf, depth - 1),
    )


@pytest.mark.parametrize("seed", range(40))
def test_visit_agrees_with_materialize_on_random_circuits(seed):
    """Each encoded set appears exactly once, and the visit cost stays linear."""
    rng = random.Random(seed)
    ar = CircuitArena()
    root = random_circuit(ar, rng, [0], rng.randint(1, 6))
    expected = materialize(ar, root, cap=5000)
    out, count, steps = collect(ar, root)
    assert count == ar.pot[root] == len(expected)
    assert len(set(out)) == len(out)
    assert set(out) == expected
    assert steps <= 6 * ar.pot[root]
