"""
Exception types shared by the grpcoho engines.

Every engine error derives from GroupCohomologyError (itself a ValueError), so
callers can catch one type at the CLI boundary.
"""

from typing import Optional


class GroupCohomologyError(ValueError):
    """Base class for all engine errors."""


class DimensionMismatchError(GroupCohomologyError):
    """Matrix or vector shapes are incompatible."""


class UnsupportedInputError(GroupCohomologyError):
    """Input lies outside the supported group/module classes."""


class HomomorphismError(GroupCohomologyError):
    """Generator images do not define a (surjective) homomorphism."""


class LiftingError(GroupCohomologyError):
    """A lift through an exact resolution unexpectedly failed to exist."""


class ResourceLimitError(GroupCohomologyError):
    """A computation would exceed a configured size bound."""

    def __init__(self, message: str, rank_estimate: int, limit: int):
        super().__init__(f"{message} (estimated rank {rank_estimate}, limit {limit})")
        self.rank_estimate = rank_estimate
        self.limit = limit


class GrammarError(GroupCohomologyError):
    """Syntax error in a group/hom/module/word specification."""

    def __init__(self, message: str, text: str, position: int, source: Optional[str] = None):
        line = text.count("\n", 0, position) + 1
        column = position - (text.rfind("\n", 0, position) + 1) + 1
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.position = position


class GroupMismatchError(GroupCohomologyError):
    """Operands live over different groups."""
