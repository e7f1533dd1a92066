"""Exception hierarchy.

Every domain failure raised by the engine derives from :class:`TriadError`,
so callers (and the CLI) can separate domain errors from programming errors.
"""

from __future__ import annotations


class TriadError(Exception):
    """Base class for all engine errors."""


# core model
class UnknownAttribute(TriadError):
    pass


class SortMismatch(TriadError):
    pass


class PartialValuation(TriadError):
    pass


class EnumerationTooLarge(TriadError):
    pass


class InfiniteCarrier(TriadError):
    pass


# semantic networks
class UndeclaredSymbol(TriadError):
    pass


class ArityViolation(TriadError):
    pass


class IndividualMismatch(TriadError):
    pass


# evaluation
class OutsideDomain(TriadError):
    pass


class NoSatisfier(TriadError):
    pass


class NotUnique(TriadError):
    def __init__(self, count: int, matches=()):
        self.count = count
        self.matches = tuple(matches)
        super().__init__(f"{count} satisfiers, expected exactly one")


class UnboundSymbol(TriadError):
    pass


class FormulaError(TriadError):
    """Formula is malformed for the requested use (e.g. two free variables)."""


# metadata levels
class LevelViolation(TriadError):
    pass


class NameCollision(TriadError):
    pass


class AccessDenied(TriadError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class MandatoryFieldMissing(TriadError):
    pass


# appraisal
class EmptyAssignment(TriadError):
    pass


class KindValueMismatch(TriadError):
    pass


class UnknownMetric(TriadError):
    pass


class UnknownUnit(TriadError):
    pass


class MissingMetric(TriadError):
    pass


# integration
class IllFormedComponent(TriadError):
    pass


class UnknownVersion(TriadError):
    pass


# access control
class UnknownRole(TriadError):
    pass


class AlreadyClosed(TriadError):
    pass


# events
class UndeclaredEntity(TriadError):
    pass


class IllegalTransition(TriadError):
    pass


class VacancyExhausted(TriadError):
    pass


class ScriptActionFailure(TriadError):
    pass


class ParseError(TriadError):
    """Raised by convenience loaders when a document has error diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse failed")
