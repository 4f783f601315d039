"""Exception hierarchy.

Everything raised on purpose by the engine derives from :class:`MognetError`,
so callers (and the CLI) can separate data problems from programming errors.
"""


class MognetError(Exception):
    """Base class for all engine errors."""


# geometry
class MeasureOutOfRange(MognetError):
    pass


class EmptyInterval(MognetError):
    pass


class DegeneratePoints(MognetError):
    pass


class InvalidGeometry(MognetError):
    pass


# network
class EmptyInput(MognetError):
    pass


class DegenerateEdge(MognetError):
    pass


class UnknownRoute(MognetError):
    pass


class UnknownRouteAtNode(MognetError):
    pass


class NetworkFrozen(MognetError):
    pass


# routing
class NoPath(MognetError):
    pass


# motion
class UndefinedAtTime(MognetError):
    pass


class NoNearbyRoute(MognetError):
    pass


class UnitInvariantViolation(MognetError):
    pass


class TemporalOverlap(MognetError):
    pass


class ContinuityViolation(MognetError):
    pass


# store
class QuasiDisjointViolation(MognetError):
    def __init__(self, first, second):
        self.pair = (first, second)
        super().__init__(f"route intervals overlap: {first} and {second}")


class UnknownRecord(MognetError):
    pass


class MalformedRow(MognetError):
    def __init__(self, path, line, reason):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {reason}")


# generator
class TooFewNodes(MognetError):
    pass


# query language
class QueryError(MognetError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class QuerySyntaxError(QueryError):
    pass


class QueryTypeError(QueryError):
    pass


class QueryEvaluationError(QueryError):
    """An engine error raised while evaluating part of a query."""

    def __init__(self, message, line=None, col=None, original=None):
        self.original = original
        super().__init__(message, line, col)
