"""Exception hierarchy shared by every engine subsystem.

Every error the engine can signal is a subclass of PortalisError, so the
gateway and CLI can map failures to response codes / exit codes in one place.
"""

from __future__ import annotations


class PortalisError(Exception):
    """Base class for all engine errors."""

    #: short machine-readable code, defaults to the class name
    code = "error"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.code = cls.__name__


# ---------------------------------------------------------------------------
# core object model
# ---------------------------------------------------------------------------

class IllTypedPredicate(PortalisError):
    """Predicate references an unknown field or mismatched value kinds."""


class UnknownVersion(PortalisError):
    """Requested valuation index does not exist for an individual."""


class NotIndividualized(PortalisError):
    """No individual satisfies the describing predicate."""


class AmbiguousDescription(PortalisError):
    """More than one individual satisfies the describing predicate."""


class UnknownField(PortalisError):
    """Value assigned to a field the concept does not declare."""


class KindMismatch(PortalisError):
    """Value does not conform to the declared field kind."""


class UnknownConcept(PortalisError):
    """Concept name is not registered in the store."""


class UnknownIndividual(PortalisError):
    """Individual id is not registered in the store."""


class DuplicateId(PortalisError):
    """Identifier already taken; ids are never reused."""


class PartialAssignment(PortalisError):
    """Sort-variable mapping does not cover the whole index set."""


class ConceptMismatch(PortalisError):
    """Sort-variable image has a different concept than the target type."""


# ---------------------------------------------------------------------------
# metadata tower
# ---------------------------------------------------------------------------

class DepthExceeded(PortalisError):
    """Operation addresses a level beyond the configured tower depth."""


class LevelMismatch(PortalisError):
    """Object exists, but not at the level the operation requires."""


class UnknownObject(PortalisError):
    """No object (individual or meta predicate) with that id."""


# ---------------------------------------------------------------------------
# frame network
# ---------------------------------------------------------------------------

class UndeclaredSymbol(PortalisError):
    """Relation or constant not declared in the frame language."""


class MalformedPattern(PortalisError):
    """Query pattern puts a variable where only symbols are allowed."""


# ---------------------------------------------------------------------------
# profile engine / sessions
# ---------------------------------------------------------------------------

class UnknownDimensionValue(PortalisError):
    """Assignment value is outside the dimension's alphabet."""


class OutOfOrderChain(PortalisError):
    """Assignment chain does not follow the metric's dimension order."""


class IncompleteTable(PortalisError):
    """Metric table is missing a prefix entry."""


class UnknownProfile(PortalisError):
    """No persona declared under that name."""


class SessionClosed(PortalisError):
    """Session token refers to a closed session."""


class UnknownToken(PortalisError):
    """Session token was never issued."""


class AlreadyClosed(PortalisError):
    """Session was closed before; closed sessions never reopen."""


# ---------------------------------------------------------------------------
# warehouse facade
# ---------------------------------------------------------------------------

class UnknownRepository(PortalisError):
    """No repository registered under that name."""


class UnknownItem(PortalisError):
    """Repository holds no record with that id."""


class UnknownSource(PortalisError):
    """Content-critical mark names a source nobody registered."""


class InvalidCategoryCombination(PortalisError):
    """Media sub-category given for a category that has none."""


class MalformedChange(PortalisError):
    """Warehouse change descriptor is not well-formed for the repo kind."""


# ---------------------------------------------------------------------------
# events / pages / gateway
# ---------------------------------------------------------------------------

class UnknownPage(PortalisError):
    """No page definition under that id (or page not visible)."""


class UnknownEvent(PortalisError):
    """Event name bound to no script and no warehouse hook."""


class MissingEventArgument(PortalisError):
    """Script expression references an argument the event did not carry."""


class Forbidden(PortalisError):
    """Caller's access profile does not permit the operation."""
