"""Exception hierarchy shared by every module."""


class CyclicSplitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidLetter(CyclicSplitError, ValueError):
    """A symbol or signed letter does not belong to the alphabet."""

    def __init__(self, symbol, position=None):
        self.symbol = symbol
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown symbol {symbol!r}{where}")


class PreconditionViolation(CyclicSplitError, ValueError):
    pass


class InvalidAutomorphism(CyclicSplitError, ValueError):
    pass


class InvalidCut(InvalidAutomorphism):
    pass


class InvalidSpec(CyclicSplitError, ValueError):
    pass


class TrivialSubgroup(CyclicSplitError, ValueError):
    pass


class WrongRank(CyclicSplitError, ValueError):
    pass


class ResourceLimit(CyclicSplitError, RuntimeError):
    """A configured size cap was exceeded."""


class SkippedCase(CyclicSplitError):
    """Raised by test helpers when an instance does not meet their hypotheses."""
