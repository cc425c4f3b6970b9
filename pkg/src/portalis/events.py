"""User-triggered events, scripts and the content-refresh agent.

Client events run declaratively checked scripts that may only touch
client-side page-object overlays or ask for page refreshes; warehouse-update
hook scripts additionally may transition individuals and never run on a
client's behalf. The update agent owns the pending-refresh marks: in
event-driven mode a content-critical commit refreshes affected pages on the
spot, in periodic mode marks wait for the next period boundary, in manual
mode they wait for an explicit refresh call.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .errors import MissingEventArgument
from .frames import AtomicFrame
from .predicate import Value


class PolicyMode(str, enum.Enum):
    EVENT_DRIVEN = "event"
    PERIODIC = "periodic"
    MANUAL = "manual"


@dataclass(frozen=True)
class UpdatePolicy:
    mode: PolicyMode
    period: int = 1

    def __post_init__(self):
        if self.mode is PolicyMode.PERIODIC and self.period < 1:
            raise ValueError("periodic policy needs period >= 1")


@dataclass(frozen=True)
class Event:
    name: str
    args: Mapping[str, Value]
    token: Optional[str]  # None for engine-internal events
    timestamp: int


# -- script actions -----------------------------------------------------------

@dataclass(frozen=True)
class ArgRef:
    """Reference to an event argument inside a script expression."""

    name: str


ScriptExpr = Union["LiteralExpr", ArgRef]


@dataclass(frozen=True)
class LiteralExpr:
    value: Value


@dataclass(frozen=True)
class SetAction:
    page: str
    object: str
    field: str
    expr: ScriptExpr


@dataclass(frozen=True)
class RefreshAction:
    page: str


@dataclass(frozen=True)
class TransitionAction:
    individual_id: str
    assignments: tuple[tuple[str, ScriptExpr], ...]


ScriptAction = Union[SetAction, RefreshAction, TransitionAction]


@dataclass(frozen=True)
class Script:
    """Declaratively checked reaction to one event name."""

    name: str
    trigger: str
    actions: tuple[ScriptAction, ...]
    hook: bool = False  # warehouse-update hooks may transition individuals
    scenario: tuple[AtomicFrame, ...] = ()


def eval_script_expr(expr: ScriptExpr, event: Event) -> Value:
    if isinstance(expr, LiteralExpr):
        return expr.value
    value = event.args.get(expr.name)
    if value is None:
        raise MissingEventArgument(
            f"event {event.name!r} carries no argument {expr.name!r}")
    return value


# -- session overlays ---------------------------------------------------------

class OverlayStore:
    """Per-session page-object display state; dies with the session."""

    def __init__(self):
        # token -> page -> object -> field -> value
        self._state: dict[str, dict[str, dict[str, dict[str, Value]]]] = {}

    def set(self, token: str, page: str, obj: str, fname: str,
            value: Value) -> None:
        pages = self._state.setdefault(token, {})
        objects = pages.setdefault(page, {})
        objects.setdefault(obj, {})[fname] = value

    def for_page(self, token: Optional[str],
                 page: str) -> dict[str, dict[str, Value]]:
        if token is None:
            return {}
        found = self._state.get(token, {}).get(page, {})
        return {obj: dict(fields) for obj, fields in found.items()}

    def drop_session(self, token: str) -> None:
        self._state.pop(token, None)


# -- the update agent ---------------------------------------------------------

@dataclass
class UpdateAgent:
    """Pending-refresh bookkeeping for one deployment policy."""

    policy: UpdatePolicy
    pending: set[str] = field(default_factory=set)

    def mark(self, page_ids: set[str]) -> set[str]:
        """Coalesce marks; returns pages to refresh right now (event mode)."""
        self.pending.update(page_ids)
        if self.policy.mode is PolicyMode.EVENT_DRIVEN:
            due = set(self.pending)
            self.pending.clear()
            return due
        return set()

    def due_at(self, tick: int) -> set[str]:
        """Pages the agent refreshes at this logical tick."""
        if self.policy.mode is PolicyMode.EVENT_DRIVEN:
            due = set(self.pending)
            self.pending.clear()
            return due
        if self.policy.mode is PolicyMode.PERIODIC \
                and tick % self.policy.period == 0:
            due = set(self.pending)
            self.pending.clear()
            return due
        return set()

    def clear(self, page_id: str) -> None:
        self.pending.discard(page_id)

    def is_stale(self, page_id: str) -> bool:
        return page_id in self.pending
