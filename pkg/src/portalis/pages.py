"""Page definitions, content resolution and freshness-tracked rendering.

A page is a rank-gated, dimension-conditioned list of named content items.
Item sources cover the portal catalog, comprehension counts/id-sets over a
concept, a single individual's field, frame queries and literals. Resolving
a page materializes its items with per-item as-of versions; the engine keeps
one materialization per page and re-resolves only on refresh, which is what
makes staleness observable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import UnknownPage
from .frames import FrameLanguage, FramePattern, Variable
from .model import Store, comprehend
from .predicate import Expr, Value
from .profiles import Rank
from .warehouse import PORTAL_CATALOG, Warehouse

CATALOG_KIND = dict(PORTAL_CATALOG)


@dataclass(frozen=True)
class PortalKeyItem:
    key: str


@dataclass(frozen=True)
class CountItem:
    concept: str
    phi: Expr


@dataclass(frozen=True)
class IdsItem:
    concept: str
    phi: Expr


@dataclass(frozen=True)
class FieldItem:
    individual_id: str
    field: str


@dataclass(frozen=True)
class FrameQueryItem:
    pattern: FramePattern


@dataclass(frozen=True)
class LiteralItem:
    value: Value


ItemSource = Union[PortalKeyItem, CountItem, IdsItem, FieldItem,
                   FrameQueryItem, LiteralItem]


@dataclass(frozen=True)
class PageDefinition:
    id: str
    required_rank: Rank
    conditions: tuple[tuple[str, str], ...]
    items: tuple[tuple[str, ItemSource], ...]

    def sources(self, warehouse: Warehouse) -> set[str]:
        """Freshness dependencies: which mutations make this page stale."""
        deps: set[str] = set()
        for _, source in self.items:
            if isinstance(source, PortalKeyItem):
                kind = CATALOG_KIND[source.key]
                repo = warehouse._repo_of_kind(kind)
                deps.add(repo.name if repo else kind.value)
            elif isinstance(source, (CountItem, IdsItem)):
                deps.add(f"concept:{source.concept}")
            elif isinstance(source, FieldItem):
                deps.add(f"individual:{source.individual_id}")
            elif isinstance(source, FrameQueryItem):
                deps.add("frames")
        return deps


@dataclass(frozen=True)
class ResolvedItem:
    value: Optional[object]
    as_of: int
    absent: bool = False

    def to_json(self) -> dict:
        return {"value": self.value, "asOf": self.as_of, "absent": self.absent}


def resolve_item(source: ItemSource, store: Store, frames: FrameLanguage,
                 warehouse: Warehouse, commit_counter: int) -> ResolvedItem:
    if isinstance(source, PortalKeyItem):
        for item in warehouse.aggregate_portal_items():
            if item.key == source.key:
                return ResolvedItem(item.value, item.as_of, item.absent)
        return ResolvedItem(None, 0, absent=True)
    if isinstance(source, CountItem):
        matched = comprehend(store.of_concept(source.concept), source.phi)
        return ResolvedItem(len(matched), commit_counter)
    if isinstance(source, IdsItem):
        matched = comprehend(store.of_concept(source.concept), source.phi)
        return ResolvedItem(sorted(ind.id for ind in matched), commit_counter)
    if isinstance(source, FieldItem):
        ind = store.individual(source.individual_id)
        return ResolvedItem(ind.environment()[source.field], ind.version)
    if isinstance(source, FrameQueryItem):
        bindings = frames.query_frames(source.pattern)
        return ResolvedItem([dict(sorted(b.items())) for b in bindings],
                            commit_counter)
    if isinstance(source, LiteralItem):
        return ResolvedItem(source.value, 0)
    raise UnknownPage(f"unresolvable item source {source!r}")


@dataclass
class PageMaterialization:
    """Last-refreshed content of one page."""

    page_id: str
    items: dict[str, ResolvedItem]
    refreshed_at: int  # logical tick of the last refresh


@dataclass(frozen=True)
class RenderedPage:
    """What the gateway hands a session: materialized items + its overlay."""

    page_id: str
    items: dict[str, ResolvedItem]
    overlay: dict[str, dict[str, Value]]
    stale: bool
    refreshed_at: int

    def to_json(self) -> dict:
        return {
            "page": self.page_id,
            "items": {name: item.to_json()
                      for name, item in sorted(self.items.items())},
            "overlay": {obj: dict(sorted(fields.items()))
                        for obj, fields in sorted(self.overlay.items())},
            "stale": self.stale,
            "refreshedAt": self.refreshed_at,
        }


def describe_pattern(pattern: FramePattern) -> str:
    def term(t):
        return f"?{t.name}" if isinstance(t, Variable) else t
    return f"{pattern.relation}({term(pattern.subject)}, {term(pattern.object)})"
