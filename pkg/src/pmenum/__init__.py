"""Enumerate all perfect matchings of a bipartite graph.

The core pipeline trims a graph down to a dense kernel whose matchings
are encoded in a shared union/product circuit, then recursively splits
the remaining matching classes; each matching is delivered in constant
amortized time.  See :func:`enumerate_matchings` for the library entry
point and :mod:`pmenum.cli` for the command-line interface.
"""

from .circuit import CircuitArena, current_leaves, materialize, visit_all
from .enumerator import (
    EnumerationStats,
    count_matchings,
    enumerate_matchings,
    matching_of_tree,
)
from .errors import InvariantViolation, MalformedInput, NoPerfectMatching, TestGuard
from .graph import (
    BipartiteGraph,
    Matching,
    OrientedView,
    build_graph,
    classify_edges,
    find_initial_matching,
)
from .splitter import choose_split, decompose, find_m_plus_minimal, reachability
from .trimmer import potential_of, trim

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "CircuitArena",
    "EnumerationStats",
    "InvariantViolation",
    "MalformedInput",
    "Matching",
    "NoPerfectMatching",
    "OrientedView",
    "TestGuard",
    "build_graph",
    "choose_split",
    "classify_edges",
    "count_matchings",
    "current_leaves",
    "decompose",
    "enumerate_matchings",
    "find_initial_matching",
    "find_m_plus_minimal",
    "matching_of_tree",
    "materialize",
    "potential_of",
    "reachability",
    "trim",
    "visit_all",
]
