"""Exception types shared across the package."""


class TopoDecideError(Exception):
    """Base class for all package errors."""


class EmptyInput(TopoDecideError, ValueError):
    pass


class DuplicateConflict(TopoDecideError, ValueError):
    """Two copies travelled the same relay path but disagree on content."""


class NotConflicting(TopoDecideError, ValueError):
    """A conflict-only quantity was requested for a unanimous observation."""


class InconsistentObservation(TopoDecideError):
    """The observed message vector has zero probability under both hypotheses."""


class SizeLimit(TopoDecideError):
    """Exhaustive cut-set enumeration would exceed the work budget."""


class TooLarge(TopoDecideError):
    """Brute-force oracle refused an instance with too many relays."""


class SingularCovariance(TopoDecideError, ArithmeticError):
    pass


class NoRoute(TopoDecideError):
    """The destination is not reachable from the source."""
