"""Exception hierarchy shared by the engine and the command line."""


class NVError(Exception):
    """Base class for every error raised by the package."""


class OverflowLevel(NVError):
    pass


class DimensionMismatch(NVError):
    pass


class InvalidAddress(NVError):
    pass


class InvalidPattern(NVError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class NotBijective(NVError):
    pass


class DecodeError(NVError):
    pass


class ParseError(NVError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class UnsupportedDimension(NVError):
    pass


class NotPositive(NVError):
    pass


class UnverifiedDecomposition(NVError):
    pass


class RelationTableFailure(NVError):
    pass


class BallTooLarge(NVError):
    pass


class BoundViolation(NVError):
    pass
