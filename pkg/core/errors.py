"""
Exception hierarchy.

Every error a library call can raise derives from EpsnetError, which is a
ValueError so callers that only care about bad input can catch that.
"""
from typing import Optional, Tuple


class EpsnetError(ValueError):
    """Base class for all epsnet errors."""


class SchemaError(EpsnetError):
    """Malformed JSON input."""


class AsymmetricMatrixError(EpsnetError):
    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"distance matrix not symmetric at ({i}, {j})")


class NegativeDistanceError(EpsnetError):
    def __init__(self, i: int, j: int, value: float):
        self.pair = (i, j)
        super().__init__(f"distance ({i}, {j}) = {value!r} is not positive")


class TriangleViolationError(EpsnetError):
    def __init__(self, i: int, j: int, k: int):
        self.triple = (i, j, k)
        super().__init__(f"triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")


class DisconnectedGraphError(EpsnetError):
    pass


class NonpositiveScaleError(EpsnetError):
    def __init__(self, scale: float):
        self.scale = scale
        super().__init__(f"scale must be positive, got {scale!r}")


class IndexOutOfRangeError(EpsnetError):
    def __init__(self, index: int, n: int):
        self.index = index
        super().__init__(f"point index {index} out of range for {n} points")


class IllegalMoveError(EpsnetError):
    """A basic move that would break the chain. reason is endpoint, distance or position."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"illegal move ({reason}){': ' + detail if detail else ''}")


class JunctionMismatchError(EpsnetError):
    pass


class ScaleMismatchError(EpsnetError):
    pass


class NotALoopError(EpsnetError):
    pass


class WrongComponentError(EpsnetError):
    pass


class ScaleOrderViolationError(EpsnetError):
    pass


class OutsideTruncationError(EpsnetError):
    pass


class StartMismatchError(EpsnetError):
    pass


class UndecidedError(EpsnetError):
    """A search ran out of budget without a certificate either way."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None):
        self.pair = pair
        super().__init__(message)


class InconsistentThreadError(EpsnetError):
    pass


class NotAHomotopyError(EpsnetError):
    pass


class SpecInvalidError(EpsnetError):
    pass
