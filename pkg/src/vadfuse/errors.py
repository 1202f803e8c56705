"""Exception types raised by the package."""

from __future__ import annotations


class VadfuseError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(VadfuseError):
    """A text or binary input could not be parsed.

    Parsers never raise anything else on malformed input, no matter how
    garbled the bytes are. ``line`` is the 1-based line number when the
    failure can be pinned to one.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(VadfuseError):
    """A configuration value or combination of values is invalid."""
