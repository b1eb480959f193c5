"""Shared exception types.

Every error the library raises deliberately derives from OrnataError so the
CLI and service can map computation failures to exit code 1 / HTTP 409 without
guessing which exceptions are ours.
"""

from __future__ import annotations


class OrnataError(Exception):
    """Base class for all deliberate ornata errors."""


class ParseError(OrnataError):
    """Formula text rejected. Carries the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset


class EvalDomainError(OrnataError):
    """A numeric operation left its domain (ln of a negative, division by zero, ...).

    Names the operation and the offending value instead of letting NaN or inf
    propagate silently.
    """

    def __init__(self, op: str, value: float):
        super().__init__(f"domain error in {op} at value {value!r}")
        self.op = op
        self.value = value


class GeometryError(OrnataError):
    """Geometric construction failed (empty zero set, infeasible frame, ...)."""


class EmptyZeroSetError(GeometryError):
    """Implicit surface has no sign change inside the bounds."""


class DesignError(OrnataError):
    """Design document violates its schema. Carries the offending path."""

    def __init__(self, message: str, path: str = ""):
        full = f"{path}: {message}" if path else message
        super().__init__(full)
        self.message = message
        self.path = path
