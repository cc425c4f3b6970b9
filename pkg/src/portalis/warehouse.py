"""Simulated heterogeneous repositories behind cartridge-style adapters.

Four in-process stores (hr, finance, media, docs) hold kind-specific native
records. Each kind has one adapter that mirrors its records into the core
store as individuals of a fixed concept, so every fetch hands out the same
data-object triple regardless of where the bytes live. Portal items are the
display catalog aggregated over the stores; mutations funnel through one
entry point that keeps hashes, mirrors and freshness marks in step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

from .errors import (
    InvalidCategoryCombination,
    MalformedChange,
    UnknownItem,
    UnknownRepository,
)
from .hashing import content_hash
from .model import CURRENT, Concept, DataObject, Store
from .predicate import Expr, Kind, Value, evaluate, validate_predicate


class RepoKind(str, enum.Enum):
    HR = "hr"
    FINANCE = "finance"
    MEDIA = "media"
    DOCS = "docs"


class MediaCategory(str, enum.Enum):
    AUDIO = "audio"
    VIDEO = "video"
    IMAGE = "image"


class MediaSubCategory(str, enum.Enum):
    PHOTOS = "photos"
    LOGOS = "logos"
    CATALOGUES = "catalogues"


#: native record shape per repository kind
RECORD_FIELDS: dict[RepoKind, dict[str, Kind]] = {
    RepoKind.HR: {
        "name": Kind.TEXT,
        "country": Kind.TEXT,
        "company": Kind.TEXT,
        "openVacancy": Kind.BOOLEAN,
    },
    RepoKind.FINANCE: {
        "indicator": Kind.TEXT,
        "value": Kind.REAL,
        "period": Kind.TEXT,
    },
    RepoKind.MEDIA: {
        "category": Kind.TEXT,
        "subCategory": Kind.TEXT,
        "format": Kind.TEXT,
        "payload": Kind.MEDIA,
    },
    RepoKind.DOCS: {
        "name": Kind.TEXT,
        "email": Kind.TEXT,
        "department": Kind.TEXT,
    },
}

#: concept each adapter mirrors its kind into
ADAPTER_CONCEPTS: dict[RepoKind, str] = {
    RepoKind.HR: "HrPosition",
    RepoKind.FINANCE: "FinanceRecord",
    RepoKind.MEDIA: "MediaAsset",
    RepoKind.DOCS: "ContactEntry",
}

#: portal item catalog: key -> (repo kind it reads, computation tag)
PORTAL_CATALOG: tuple[tuple[str, RepoKind], ...] = (
    ("totalEstablishment", RepoKind.HR),
    ("countryCount", RepoKind.HR),
    ("companyCount", RepoKind.HR),
    ("vacancies", RepoKind.HR),
    ("revenues", RepoKind.FINANCE),
    ("profits", RepoKind.FINANCE),
    ("productionDynamics", RepoKind.FINANCE),
    ("stockValues", RepoKind.FINANCE),
    ("developmentPlans", RepoKind.FINANCE),
    ("contacts", RepoKind.DOCS),
)

FINANCE_KEYS = {"revenues", "profits", "productionDynamics", "stockValues",
                "developmentPlans"}


def adapter_concept(kind: RepoKind) -> Concept:
    return Concept(ADAPTER_CONCEPTS[kind],
                   tuple(RECORD_FIELDS[kind].items()))


@dataclass(frozen=True)
class MediaObject:
    id: str
    category: MediaCategory
    sub_category: Optional[MediaSubCategory]
    format: str
    payload: str

    def __post_init__(self):
        has_sub = self.sub_category is not None
        if has_sub != (self.category is MediaCategory.IMAGE):
            raise InvalidCategoryCombination(
                "sub-category goes with static images and nothing else")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "category": self.category.value,
            "subCategory":
                self.sub_category.value if self.sub_category else None,
            "format": self.format,
            "payload": self.payload,
        }


@dataclass(frozen=True)
class PortalItem:
    key: str
    value: Optional[Value]
    source: str
    as_of: int
    absent: bool = False

    def to_json(self) -> dict:
        return {"key": self.key, "value": self.value, "source": self.source,
                "asOf": self.as_of, "absent": self.absent}


class Repository:
    """One native store: kind-shaped records plus a running content hash."""

    def __init__(self, name: str, kind: RepoKind):
        self.name = name
        self.kind = kind
        self.records: dict[str, dict[str, Value]] = {}
        self.version = 0

    def content_hash(self) -> str:
        return content_hash({"kind": self.kind.value,
                             "records": self.records,
                             "version": self.version})

    def check_record(self, values: Mapping[str, Value],
                     total: bool) -> dict[str, Value]:
        fields = RECORD_FIELDS[self.kind]
        out: dict[str, Value] = {}
        for fname, value in values.items():
            kind = fields.get(fname)
            if kind is None:
                raise MalformedChange(
                    f"{self.kind.value} records have no field {fname!r}")
            if kind is Kind.REAL and isinstance(value, int) \
                    and not isinstance(value, bool):
                value = float(value)
            if kind is Kind.BOOLEAN and not isinstance(value, bool):
                raise MalformedChange(f"{fname} wants a boolean")
            if kind in (Kind.TEXT, Kind.MEDIA) and not isinstance(value, str):
                raise MalformedChange(f"{fname} wants text")
            if kind is Kind.REAL and not isinstance(value, float):
                raise MalformedChange(f"{fname} wants a number")
            out[fname] = value
        if total:
            missing = [f for f in fields if f not in out]
            # media sub-category defaults to empty outside static images
            if self.kind is RepoKind.MEDIA and missing == ["subCategory"]:
                out["subCategory"] = ""
                missing = []
            if missing:
                raise MalformedChange(
                    f"{self.kind.value} record misses fields {missing}")
        if self.kind is RepoKind.MEDIA:
            self._check_media(out, total)
        return out

    def _check_media(self, values: dict[str, Value], total: bool) -> None:
        category = values.get("category")
        if total:
            if category not in {c.value for c in MediaCategory}:
                raise MalformedChange(f"unknown media category {category!r}")
            sub = values.get("subCategory", "")
            if category == MediaCategory.IMAGE.value:
                if sub not in {s.value for s in MediaSubCategory}:
                    raise MalformedChange(
                        f"static images need a sub-category, got {sub!r}")
            elif sub:
                raise InvalidCategoryCombination(
                    "sub-category goes with static images and nothing else")


class Warehouse:
    """The unified facade over every repository.

    Mutations mirror into the core store through the kind's adapter and
    notify the freshness hook when the change is content-critical.
    """

    def __init__(self, store: Store,
                 on_commit: Optional[Callable[[], None]] = None,
                 on_content_critical: Optional[Callable[[str], None]] = None):
        self.store = store
        self.repos: dict[str, Repository] = {}
        self._on_commit = on_commit or (lambda: None)
        self._on_content_critical = on_content_critical or (lambda repo: None)
        for kind in RepoKind:
            name = ADAPTER_CONCEPTS[kind]
            if name not in store.concepts:
                store.add_concept(adapter_concept(kind))

    # -- registration ---------------------------------------------------------

    def add_repository(self, name: str, kind: RepoKind) -> Repository:
        if name in self.repos:
            raise UnknownRepository(f"repository {name!r} already registered")
        repo = Repository(name, kind)
        self.repos[name] = repo
        return repo

    def repository(self, name: str) -> Repository:
        try:
            return self.repos[name]
        except KeyError:
            raise UnknownRepository(f"unknown repository {name!r}") from None

    def seed(self, repo_name: str, item_id: str,
             values: Mapping[str, Value]) -> None:
        """Install a schema-declared record without freshness side effects."""
        repo = self.repository(repo_name)
        record = repo.check_record(values, total=True)
        if item_id in repo.records or item_id in self.store.individuals:
            raise MalformedChange(f"item id {item_id!r} already taken")
        repo.records[item_id] = record
        self.store.add_individual(item_id, ADAPTER_CONCEPTS[repo.kind],
                                  record, cause="initial")

    # -- uniform access -------------------------------------------------------

    def uniform_fetch(self, repo_name: str, item_id: str,
                      version: Union[int, str] = CURRENT) -> DataObject:
        """The data-object triple for a native record, via its adapter."""
        repo = self.repository(repo_name)
        if item_id not in repo.records:
            raise UnknownItem(f"{repo_name} holds no item {item_id!r}")
        return self.store.fetch(item_id, version)

    def media_repo(self) -> Optional[Repository]:
        for repo in self.repos.values():
            if repo.kind is RepoKind.MEDIA:
                return repo
        return None

    def search_media(self, category: MediaCategory,
                     sub_category: Optional[MediaSubCategory],
                     phi: Expr) -> list[MediaObject]:
        """Native-format search: taxonomy filter plus predicate, id order."""
        if sub_category is not None and category is not MediaCategory.IMAGE:
            raise InvalidCategoryCombination(
                "sub-category goes with static images and nothing else")
        schema = dict(RECORD_FIELDS[RepoKind.MEDIA])
        validate_predicate(phi, schema)
        repo = self.media_repo()
        results: list[MediaObject] = []
        if repo is None:
            return results
        for item_id in sorted(repo.records):
            record = repo.records[item_id]
            if record["category"] != category.value:
                continue
            if sub_category is not None \
                    and record["subCategory"] != sub_category.value:
                continue
            if not evaluate(phi, record):
                continue
            sub = record["subCategory"]
            results.append(MediaObject(
                id=item_id,
                category=MediaCategory(record["category"]),
                sub_category=MediaSubCategory(sub) if sub else None,
                format=record["format"],
                payload=record["payload"],
            ))
        return results

    # -- portal aggregation ---------------------------------------------------

    def aggregate_portal_items(self) -> list[PortalItem]:
        """One item per catalog key, recomputed from current records."""
        items = []
        for key, kind in PORTAL_CATALOG:
            items.append(self._portal_item(key, kind))
        return items

    def _repo_of_kind(self, kind: RepoKind) -> Optional[Repository]:
        for repo in self.repos.values():
            if repo.kind is kind:
                return repo
        return None

    def _portal_item(self, key: str, kind: RepoKind) -> PortalItem:
        repo = self._repo_of_kind(kind)
        if repo is None:
            return PortalItem(key, None, kind.value, 0, absent=True)
        records = repo.records
        if key == "totalEstablishment":
            value: Optional[Value] = sum(
                1 for r in records.values() if not r["openVacancy"])
        elif key == "vacancies":
            value = sum(1 for r in records.values() if r["openVacancy"])
        elif key == "countryCount":
            value = len({r["country"] for r in records.values()})
        elif key == "companyCount":
            value = len({r["company"] for r in records.values()})
        elif key == "contacts":
            value = len(records)
        elif key in FINANCE_KEYS:
            candidates = [(r["period"], rid, r["value"])
                          for rid, r in records.items() if r["indicator"] == key]
            if not candidates:
                return PortalItem(key, None, repo.name, repo.version,
                                  absent=True)
            candidates.sort()
            value = candidates[-1][2]
        else:
            return PortalItem(key, None, repo.name, repo.version, absent=True)
        return PortalItem(key, value, repo.name, repo.version)

    # -- mutation -------------------------------------------------------------

    def mutate(self, repo_name: str, change: Mapping,
               content_critical: bool) -> dict:
        """Apply one change descriptor atomically.

        Shapes: {"op": "add", "id": ..., "values": {...full record...}}
                {"op": "update", "id": ..., "values": {...partial...}}
        """
        repo = self.repository(repo_name)
        if not isinstance(change, Mapping):
            raise MalformedChange("change descriptor must be a mapping")
        op = change.get("op")
        item_id = change.get("id")
        values = change.get("values")
        if op not in ("add", "update") or not isinstance(item_id, str) \
                or not isinstance(values, Mapping):
            raise MalformedChange(
                "change needs op add|update, a string id and a values map")
        cause = f"warehouse:{repo_name}:{op}:{item_id}"
        if op == "add":
            record = repo.check_record(values, total=True)
            if item_id in repo.records or item_id in self.store.individuals:
                raise MalformedChange(f"item id {item_id!r} already taken")
            repo.records[item_id] = record
            self.store.add_individual(
                item_id, ADAPTER_CONCEPTS[repo.kind], record, cause=cause)
        else:
            if item_id not in repo.records:
                raise UnknownItem(f"{repo_name} holds no item {item_id!r}")
            partial = repo.check_record(values, total=False)
            merged = dict(repo.records[item_id])
            merged.update(partial)
            repo.check_record(merged, total=True)
            repo.records[item_id] = merged
            self.store.transition(item_id, partial, cause=cause)
        repo.version += 1
        self._on_commit()
        if content_critical:
            self._on_content_critical(repo_name)
        return {"accepted": True, "repo": repo_name, "id": item_id,
                "version": repo.version}

    # -- hashes ---------------------------------------------------------------

    def content_hashes(self) -> dict[str, str]:
        return {name: repo.content_hash()
                for name, repo in sorted(self.repos.items())}

    def warehouse_hash(self) -> str:
        return content_hash(self.content_hashes())
