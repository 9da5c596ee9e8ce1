"""Shared exception types.

Codec errors live here (rather than inside :mod:`sobot.codec`) because the
low-level kernels also need them without importing the codec package.
Every error that concerns a specific field carries a ``path`` such as
``"linear.z"`` or ``"points[3].x"``.
"""

from __future__ import annotations


class SobotError(Exception):
    """Base class for all package errors."""


class CodecError(SobotError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


class DuplicateName(CodecError):
    """Same schema name registered with a different definition."""


class CyclicSchema(CodecError):
    """Nested schema references form a cycle."""


class SchemaMismatch(CodecError):
    """Value tree does not conform to its schema."""


class Truncated(CodecError):
    """Encoded bytes end before the schema is fully decoded."""

    def __init__(self, message: str, path: str = "", offset: int = -1):
        self.offset = offset
        super().__init__(message, path)


class TrailingBytes(CodecError):
    """Decoding finished but unconsumed payload bytes remain."""


class InvalidUtf8(CodecError):
    """A string field does not hold valid UTF-8."""


class LengthMismatch(CodecError):
    """Flat data length does not match the product of the shape."""


class RaggedInput(CodecError):
    """Sibling lists of unequal length (or unequal nesting depth)."""


class MixedLeafTypes(CodecError):
    """Nested-list leaves mix ints and floats or use unsupported types."""
