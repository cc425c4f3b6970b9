"""Service facade: the JSON-shaped operations the HTTP server and CLI expose.

One thin layer above the engine that owns response shapes and the mapping
from engine errors to status codes. Forbidden pages answer exactly like
missing ones; the metadata endpoint is the only surface that distinguishes
Forbidden.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .engine import PortalEngine
from .errors import (
    AlreadyClosed,
    Forbidden,
    IllTypedPredicate,
    InvalidCategoryCombination,
    KindMismatch,
    MalformedChange,
    MissingEventArgument,
    OutOfOrderChain,
    PortalisError,
    SessionClosed,
    UnknownConcept,
    UnknownDimensionValue,
    UnknownField,
    UnknownIndividual,
    UnknownItem,
    UnknownObject,
    UnknownPage,
    UnknownProfile,
    UnknownRepository,
    UnknownToken,
)
from .predicate import Value

_STATUS = (
    ((UnknownToken, SessionClosed, AlreadyClosed), 401),
    ((Forbidden,), 403),
    ((UnknownPage, UnknownObject, UnknownItem, UnknownRepository,
      UnknownProfile, UnknownIndividual, UnknownConcept), 404),
    ((MalformedChange, IllTypedPredicate, KindMismatch, UnknownField,
      OutOfOrderChain, UnknownDimensionValue, MissingEventArgument,
      InvalidCategoryCombination), 400),
)


def status_for(error: Exception) -> int:
    for classes, status in _STATUS:
        if isinstance(error, classes):
            return status
    if isinstance(error, PortalisError):
        return 400
    return 500


def error_body(error: Exception) -> dict:
    code = getattr(error, "code", type(error).__name__)
    return {"error": code, "message": str(error)}


class PortalGateway:
    """Session lifecycle, page rendering, events, metadata, warehouse."""

    def __init__(self, engine: PortalEngine):
        self.engine = engine

    def open_session(self, profile_name: str) -> dict:
        session = self.engine.open_session(profile_name)
        profile = session.profile
        return {
            "token": session.token,
            "persona": profile.user_id,
            "rank": profile.rank.label,
            "dims": dict(profile.dims),
        }

    def close_session(self, token: str) -> dict:
        self.engine.close_session(token)
        return {"closed": True}

    def list_pages(self, token: str) -> dict:
        session = self.engine.sessions.validate(token)
        return {"pages": self.engine.list_pages(session.profile)}

    def get_page(self, token: str, page_id: str) -> dict:
        session = self.engine.sessions.validate(token)
        rendered = self.engine.render(page_id, token,
                                      enforce_profile=session.profile)
        return rendered.to_json()

    def submit_event(self, token: str, name: str,
                     args: Optional[Mapping[str, Value]] = None,
                     idempotency_key: Optional[str] = None) -> dict:
        return self.engine.dispatch_client(token, name, dict(args or {}),
                                           idempotency_key)

    def get_metadata(self, token: str, object_id: str) -> dict:
        return self.engine.get_metadata(token, object_id).to_json()

    def warehouse_update(self, repo: str, change: Mapping,
                         content_critical: bool) -> dict:
        return self.engine.warehouse.mutate(repo, change, content_critical)

    def agent_run(self, tick: int) -> dict:
        return {"refreshed": self.engine.run_agent(tick)}

    def personas_hint(self) -> list[str]:
        """Schema-declared persona names (CLI convenience, not an endpoint)."""
        return sorted(self.engine.personas)
