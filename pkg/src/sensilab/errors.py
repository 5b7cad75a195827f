from __future__ import annotations


class SensilabError(Exception):
    """Base class for library errors."""


class UsageError(SensilabError, ValueError):
    """Malformed input or violated precondition."""

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None and text is not None:
            message = f"{message}\n  {text}\n  {' ' * position}^ (position {position})"
        super().__init__(message)


class ResourceLimitError(SensilabError):
    """A configured search cap or budget would be exceeded."""


class UnsupportedPointError(SensilabError):
    """The point is not of a form the operation can handle exactly."""


class InternalConsistencyError(SensilabError, AssertionError):
    """A self-verification step failed; indicates a bug, not bad input."""
