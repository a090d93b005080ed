"""Error taxonomy shared by every module.

All errors raised on purpose by this package derive from StructLogicError,
so callers can catch one type at the CLI boundary and map it to exit code 2.
"""

from __future__ import annotations


class StructLogicError(Exception):
    """Base class for every deliberate error in this package."""


class SignatureError(StructLogicError):
    """A symbol is unknown, duplicated, or used with the wrong kind/arity."""


class DomainError(StructLogicError):
    """An element, tuple, or interpretation falls outside the structure's universe."""


class PinError(StructLogicError):
    """Isomorphism-search pins are non-injective or out of range."""


class CapacityError(StructLogicError):
    """A resource cap was exceeded.  Carries the count reached when known."""

    def __init__(self, message: str, count: int | None = None, limit: int | None = None):
        super().__init__(message)
        self.count = count
        self.limit = limit


class AssignmentError(StructLogicError):
    """A formula was evaluated with a free variable left unassigned."""


class KappaError(StructLogicError):
    """A quantifier target violates the active size threshold."""


class ArityError(StructLogicError):
    """Tuple lengths disagree where equal lengths are required."""


class ShapeError(StructLogicError):
    """A formula does not have the syntactic shape an operation requires."""


class EmissionError(StructLogicError):
    """Axiomatization could not emit a required sentence (e.g. an empty disjunction)."""


class IntersectionFailure(StructLogicError):
    """A class spec lacks the intersection property; carries the witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class UniversalityError(StructLogicError):
    """An allegedly substructure-closed class is not; carries the witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(StructLogicError):
    """Malformed input text.  Knows the line and column when available."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"{message} (at {line}:{col})"
        super().__init__(message)
        self.line = line
        self.col = col
