"""Exception hierarchy.

Every error carries a ``witness`` where one makes sense, so the CLI can print
exactly which element (or pair, or coefficient) broke a condition.
"""

from __future__ import annotations

from typing import Any


class WittkitError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness

    def to_json(self) -> dict:
        out = {"error": type(self).__name__, "message": str(self)}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


def _jsonable(obj):
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


class LemmaViolation(AssertionError):
    """An internal consistency check failed. Always a bug."""


# --- posets -----------------------------------------------------------------

class PosetError(WittkitError):
    pass


class AxiomViolation(PosetError):
    def __init__(self, axiom: int, witness, detail: str = ""):
        msg = f"truncation poset axiom {axiom} violated at {witness!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg, witness)
        self.axiom = axiom

    def to_json(self) -> dict:
        out = super().to_json()
        out["axiom"] = self.axiom
        return out


class NotPartialOrder(PosetError):
    pass


class NotDivisionClosed(PosetError):
    pass


class WeightViolation(PosetError):
    pass


class LengthNotDivisible(PosetError):
    pass


class NotOrdinary(PosetError):
    pass


class SizeCapExceeded(PosetError):
    pass


# --- maps -------------------------------------------------------------------

class MapError(WittkitError):
    pass


class NotMonotone(MapError):
    pass


class NormRatioMismatch(MapError):
    pass


class SourceTargetMismatch(MapError):
    pass


class NotTMap(MapError):
    pass


class NotNMap(MapError):
    pass


# --- rings ------------------------------------------------------------------

class RingError(WittkitError):
    pass


class HandleMismatch(RingError):
    pass


class NotDivisible(RingError):
    pass


class NotTorsionFree(RingError):
    pass


class NoFrobeniusLift(RingError):
    pass


class UnboundVariable(RingError):
    pass


class PolynomialParseError(RingError):
    pass


# --- witt -------------------------------------------------------------------

class WittError(WittkitError):
    pass


class NotInImage(WittError):
    pass


class UniversalTooLarge(WittError):
    pass


# --- category ---------------------------------------------------------------

class CategoryError(WittkitError):
    pass


class DoesNotExist(CategoryError):
    pass


class JoinsRequired(CategoryError):
    pass


class DiagramTooLarge(CategoryError):
    pass


# --- io ---------------------------------------------------------------------

class ParseError(WittkitError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where, None)
        self.line = line
        self.column = column

    def to_json(self) -> dict:
        out = super().to_json()
        out["line"] = self.line
        out["column"] = self.column
        return out
