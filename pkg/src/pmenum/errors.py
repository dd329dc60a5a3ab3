"""Exception types shared across the package."""


class MalformedInput(ValueError):
    """Raised when an input graph, file, or parameter fails validation."""


class NoPerfectMatching(Exception):
    """Raised when a graph has no perfect matching at all."""


class InvariantViolation(AssertionError):
    """Raised when an internal structural invariant is broken.

    Seeing this exception means a bug: the algorithm guarantees the
    violated property, so the state it inspected cannot legally occur.
    """


class TestGuard(Exception):
    """Raised when an exhaustive helper would exceed its size cap.

    The brute-force oracle and circuit materialization are meant for
    small instances only; the guard keeps an accidental large input
    from hanging a test run.
    """

    __test__ = False  # not a test class, despite the name
