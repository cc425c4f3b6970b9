"""The composed middleware engine.

One PortalEngine instance owns every subsystem: the core store and its
metadata tower, the frame network, metric denotations and personas, the
session registry, the warehouse facade, scripts, page definitions and their
materializations, session overlays and the update agent. All writes funnel
through the engine lock (the single-writer commit point); tower caches and
freshness marks are maintained inside that commit, so reads never observe a
half-applied write.
"""

from __future__ import annotations

import itertools
import threading
from typing import Mapping, Optional

from .errors import (
    Forbidden,
    UnknownObject,
    UnknownPage,
    UnknownProfile,
    UnknownSource,
)
from .events import (
    ArgRef,
    Event,
    LiteralExpr,
    OverlayStore,
    PolicyMode,
    RefreshAction,
    Script,
    SetAction,
    TransitionAction,
    UpdateAgent,
    UpdatePolicy,
    eval_script_expr,
)
from .frames import FrameLanguage
from .hashing import content_hash
from .metatower import DEFAULT_MAX_DEPTH, MetadataRecord, MetaTower
from .model import Store
from .pages import (
    PageDefinition,
    PageMaterialization,
    RenderedPage,
    resolve_item,
)
from .predicate import Value
from .profiles import (
    AccessProfile,
    AssignmentDimension,
    DEFAULT_ALPHABETS,
    MetricDenotation,
    Rank,
    Session,
    SessionRegistry,
    UserProfile,
    derive_access_profile,
    page_visible,
)
from .warehouse import Warehouse


class PortalEngine:
    """Every subsystem wired together behind one commit point."""

    def __init__(self, policy: UpdatePolicy = UpdatePolicy(PolicyMode.EVENT_DRIVEN),
                 max_depth: int = DEFAULT_MAX_DEPTH):
        self._lock = threading.RLock()
        self.store = Store()
        self.tower = MetaTower(self.store, max_depth)
        self.frames = FrameLanguage()
        self.dimensions: dict[str, AssignmentDimension] = {
            name: AssignmentDimension(name, alphabet)
            for name, alphabet in DEFAULT_ALPHABETS.items()}
        self.metrics: dict[str, MetricDenotation] = {}
        self.personas: dict[str, UserProfile] = {}
        self.sessions = SessionRegistry()
        self.scripts: list[Script] = []
        self.pages: dict[str, PageDefinition] = {}
        self.page_order: list[str] = []
        self.overlays = OverlayStore()
        self.agent = UpdateAgent(policy)
        self.materializations: dict[str, PageMaterialization] = {}
        self.warehouse = Warehouse(
            self.store,
            on_commit=self._after_write,
            on_content_critical=self._on_content_critical)
        self._commits = 0
        self._event_clock = itertools.count(1)
        self._idempotency: dict[tuple[str, str], dict] = {}

    # ------------------------------------------------------------------
    # wiring used by the loader
    # ------------------------------------------------------------------

    def add_page(self, page: PageDefinition) -> None:
        self.pages[page.id] = page
        self.page_order.append(page.id)

    def finalize(self) -> None:
        """Materialize every page once the schema is fully installed."""
        with self._lock:
            for page_id in self.page_order:
                self._refresh(page_id)

    # ------------------------------------------------------------------
    # commit plumbing
    # ------------------------------------------------------------------

    def _after_write(self) -> None:
        """Runs inside every write commit: caches current, counter bumped."""
        self._commits += 1
        self.tower.recompute()

    def _pages_reading(self, source: str) -> set[str]:
        hit = set()
        for page in self.pages.values():
            if source in page.sources(self.warehouse):
                hit.add(page.id)
        return hit

    def _on_content_critical(self, repo_name: str) -> None:
        self._mark_sources({repo_name})

    def _mark_sources(self, sources: set[str]) -> None:
        affected: set[str] = set()
        for source in sources:
            affected.update(self._pages_reading(source))
        due = self.agent.mark(affected)
        for page_id in due:
            self._refresh(page_id)

    def mark_content_critical(self, repo_name: str) -> dict:
        """Record pending-refresh marks for pages reading the repository."""
        if repo_name not in self.warehouse.repos:
            raise UnknownSource(f"no source {repo_name!r} registered")
        with self._lock:
            self._mark_sources({repo_name})
            return {"marked": True, "repo": repo_name}

    # ------------------------------------------------------------------
    # core + tower writes
    # ------------------------------------------------------------------

    def transition_individual(self, individual_id: str,
                              new_values: Mapping[str, Value],
                              cause: str,
                              content_critical: bool = True) -> int:
        """State transition through the commit point; marks dependent pages."""
        with self._lock:
            ind = self.store.individual(individual_id)
            self.store.transition(individual_id, new_values, cause)
            self._after_write()
            if content_critical:
                self._mark_sources({f"individual:{individual_id}",
                                    f"concept:{ind.concept.name}"})
            return ind.version

    # ------------------------------------------------------------------
    # sessions
    # ------------------------------------------------------------------

    def persona(self, name: str) -> UserProfile:
        try:
            return self.personas[name]
        except KeyError:
            raise UnknownProfile(f"no persona {name!r} declared") from None

    def open_session(self, persona_name: str) -> Session:
        return self.sessions.open(self.persona(persona_name))

    def close_session(self, token: str) -> None:
        self.sessions.close(token)
        with self._lock:
            self.overlays.drop_session(token)
            self._idempotency = {key: value
                                 for key, value in self._idempotency.items()
                                 if key[0] != token}

    def access_profile(self, token: str) -> AccessProfile:
        session = self.sessions.validate(token)
        pages = [self.pages[pid] for pid in self.page_order]
        return derive_access_profile(session.profile, session, pages,
                                     self._page_objects)

    def _page_objects(self, page: PageDefinition) -> set[str]:
        """Individuals a page exposes: field items plus current id-set items."""
        objects: set[str] = set()
        for name, source in page.items:
            kind = type(source).__name__
            if kind == "FieldItem":
                objects.add(source.individual_id)
            elif kind == "IdsItem":
                mat = self.materializations.get(page.id)
                if mat and name in mat.items \
                        and isinstance(mat.items[name].value, list):
                    objects.update(str(v) for v in mat.items[name].value)
        return objects

    # ------------------------------------------------------------------
    # pages
    # ------------------------------------------------------------------

    def list_pages(self, profile: UserProfile) -> list[str]:
        return [pid for pid in self.page_order
                if page_visible(profile, self.pages[pid])]

    def _refresh(self, page_id: str) -> None:
        page = self.pages.get(page_id)
        if page is None:
            raise UnknownPage(f"no page {page_id!r}")
        items = {name: resolve_item(source, self.store, self.frames,
                                    self.warehouse, self._commits)
                 for name, source in page.items}
        self.materializations[page_id] = PageMaterialization(
            page_id, items, self._commits)
        self.agent.clear(page_id)

    def manual_refresh(self, page_id: str) -> RenderedPage:
        """Recompute one page from current warehouse state; clears its mark."""
        with self._lock:
            if page_id not in self.pages:
                raise UnknownPage(f"no page {page_id!r}")
            self._refresh(page_id)
            return self.render(page_id, token=None)

    def run_agent(self, tick: int) -> list[str]:
        """One agent pass at a logical tick; returns refreshed page ids."""
        with self._lock:
            due = self.agent.due_at(tick)
            for page_id in sorted(due):
                self._refresh(page_id)
            return sorted(due)

    def render(self, page_id: str, token: Optional[str],
               enforce_profile: Optional[UserProfile] = None) -> RenderedPage:
        """Materialized content plus the session's overlay.

        With enforce_profile set, an existing-but-invisible page answers
        exactly like a missing one.
        """
        page = self.pages.get(page_id)
        if page is None:
            raise UnknownPage(f"no page {page_id!r}")
        if enforce_profile is not None \
                and not page_visible(enforce_profile, page):
            raise UnknownPage(f"no page {page_id!r}")
        mat = self.materializations.get(page_id)
        if mat is None:
            with self._lock:
                self._refresh(page_id)
            mat = self.materializations[page_id]
        return RenderedPage(
            page_id=page_id,
            items=dict(mat.items),
            overlay=self.overlays.for_page(token, page_id),
            stale=self.agent.is_stale(page_id),
            refreshed_at=mat.refreshed_at,
        )

    def scratch_render(self, page_id: str) -> dict:
        """From-scratch recomputation oracle: resolve items right now."""
        page = self.pages.get(page_id)
        if page is None:
            raise UnknownPage(f"no page {page_id!r}")
        items = {name: resolve_item(source, self.store, self.frames,
                                    self.warehouse, self._commits)
                 for name, source in page.items}
        return {name: item.to_json() for name, item in sorted(items.items())}

    # ------------------------------------------------------------------
    # events
    # ------------------------------------------------------------------

    def next_timestamp(self) -> int:
        return next(self._event_clock)

    def dispatch_client(self, token: str, name: str,
                        args: Mapping[str, Value],
                        idempotency_key: Optional[str] = None) -> dict:
        """Exactly-once dispatch of a user-triggered event."""
        self.sessions.validate(token)
        if idempotency_key:
            cached = self._idempotency.get((token, idempotency_key))
            if cached is not None:
                return cached
        event = Event(name, dict(args), token, self.next_timestamp())
        effects = self._dispatch(event, client=True)
        summary = {"event": name, "timestamp": event.timestamp,
                   "effects": effects}
        if idempotency_key:
            self._idempotency[(token, idempotency_key)] = summary
        return summary

    def dispatch_internal(self, name: str,
                          args: Optional[Mapping[str, Value]] = None) -> dict:
        """Engine-side dispatch; the only path on which hooks run."""
        event = Event(name, dict(args or {}), None, self.next_timestamp())
        effects = self._dispatch(event, client=False)
        return {"event": name, "timestamp": event.timestamp,
                "effects": effects}

    def _dispatch(self, event: Event, client: bool) -> list[dict]:
        with self._lock:
            bound = [script for script in self.scripts
                     if script.trigger == event.name
                     and not (client and script.hook)]
            if not bound:
                return [{"type": "warning",
                         "message": f"no script bound to event {event.name!r}"}]
            effects: list[dict] = []
            for script in bound:
                for action in script.actions:
                    effects.append(self._run_action(script, action, event))
            return effects

    def _run_action(self, script: Script, action, event: Event) -> dict:
        if isinstance(action, SetAction):
            value = eval_script_expr(action.expr, event)
            self.overlays.set(event.token, action.page, action.object,
                              action.field, value)
            return {"type": "overlay", "script": script.name,
                    "page": action.page, "object": action.object,
                    "field": action.field, "value": value}
        if isinstance(action, RefreshAction):
            self._refresh(action.page)
            return {"type": "refresh", "script": script.name,
                    "page": action.page}
        if isinstance(action, TransitionAction):
            values = {fname: eval_script_expr(expr, event)
                      for fname, expr in action.assignments}
            version = self.transition_individual(
                action.individual_id, values,
                cause=f"event:{event.name}:{event.timestamp}")
            return {"type": "transition", "script": script.name,
                    "individual": action.individual_id, "version": version}
        raise UnknownObject(f"unknown script action {action!r}")

    # ------------------------------------------------------------------
    # metadata
    # ------------------------------------------------------------------

    def get_metadata(self, token: str, object_id: str) -> MetadataRecord:
        session = self.sessions.validate(token)
        if session.profile.rank is not Rank.ADMINISTRATOR:
            raise Forbidden("metadata access is an administrator privilege")
        return self.tower.describe(object_id)

    # ------------------------------------------------------------------
    # hashes / introspection
    # ------------------------------------------------------------------

    def store_hash(self) -> str:
        payload = {
            "concepts": {
                name: [[fname, kind.value] for fname, kind in concept.fields]
                for name, concept in sorted(self.store.concepts.items())},
            "individuals": {
                ind.id: {
                    "concept": ind.concept.name,
                    "states": [{"version": s.version, "cause": s.cause,
                                "values": s.as_dict()}
                               for s in ind.states]}
                for ind in sorted(self.store.all_individuals(),
                                  key=lambda i: i.id)},
        }
        return content_hash(payload)

    def hashes(self) -> dict[str, str]:
        with self._lock:
            result = {
                "store": self.store_hash(),
                "frames": content_hash(self.frames.snapshot()),
                "towerDefinitions": self.tower.definitions_hash(),
                "warehouse": self.warehouse.warehouse_hash(),
            }
            result.update({f"repo:{name}": digest for name, digest
                           in self.warehouse.content_hashes().items()})
            return result

    def summary(self) -> dict:
        return {
            "concepts": len(self.store.concepts),
            "individuals": len(self.store.individuals),
            "relations": len(self.frames.relations),
            "frames": self.frames.total_assertions(),
            "personas": len(self.personas),
            "metrics": sorted(self.metrics),
            "scripts": len(self.scripts),
            "sources": len(self.warehouse.repos),
            "pages": len(self.pages),
            "policy": self.agent.policy.mode.value,
        }
