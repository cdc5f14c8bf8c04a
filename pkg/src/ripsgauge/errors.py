"""Exception hierarchy.

``PreconditionError`` subclasses map to CLI exit code 2 and ``ParseError`` to
exit code 3.
"""


class RipsGaugeError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(RipsGaugeError, ValueError):
    pass


class ParseError(RipsGaugeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraph(PreconditionError):
    pass


class NonPositiveLength(PreconditionError):
    pass


class SelfLoop(PreconditionError):
    pass


class BadVertex(PreconditionError):
    pass


class NonPositiveResolution(PreconditionError):
    pass


class UnknownGenerator(PreconditionError):
    pass


class BadParams(PreconditionError):
    pass


class SamplerBudgetZero(PreconditionError):
    pass


class EmptyProfile(PreconditionError):
    pass


class TooFewVertices(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class ZNotOnGeodesic(PreconditionError):
    pass


class EndpointInsideBall(PreconditionError):
    pass


class NoAdmissibleTriple(PreconditionError):
    pass


class BadBasepoint(PreconditionError):
    pass


class ZeroLevels(PreconditionError):
    pass


class ScaleExceedsDiameter(PreconditionError):
    pass


class NotATree(PreconditionError):
    """Raised when the tree-path check is handed a graph with a cycle.

    ``witness`` holds ``(x, y, walk, missed_vertex)`` when a walk avoiding part
    of the canonical geodesic was found, else ``None``.
    """

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)
