"""Exception hierarchy shared by every module."""


class MedianSpaceError(Exception):
    """Base class for all errors raised by this package."""


class NonMedian(MedianSpaceError):
    """A triple without a unique median, or a violated median-algebra axiom."""

    def __init__(self, message, witness=None, axiom=None):
        super().__init__(message)
        self.witness = witness
        self.axiom = axiom


class Disconnected(MedianSpaceError):
    pass


class NonPositiveWeight(MedianSpaceError):
    pass


class InconsistentWeights(MedianSpaceError):
    def __init__(self, message, wall=None):
        super().__init__(message)
        self.wall = wall


class EmptyIntersection(MedianSpaceError):
    pass


class NotDisjoint(MedianSpaceError):
    pass


class NotStronglySeparated(MedianSpaceError):
    pass


class NotInHull(MedianSpaceError):
    pass


class IntersectionNotSingleton(MedianSpaceError):
    pass


class PrecondViolated(MedianSpaceError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NoFamilyFound(MedianSpaceError):
    pass


class TooLargeForBruteForce(MedianSpaceError):
    pass


class BadParams(MedianSpaceError, ValueError):
    pass


class ParseError(MedianSpaceError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
