"""Metadata level tower.

Level 0 is the core store's individuals. A level-(j+1) predicate classifies
level-j objects: lifting a predicate materializes its extension as a record
the level above, and the same comprehension machinery then filters data and
metadata alike. Definitions are immutable once lifted; only their cached
extensions move when the data underneath changes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import DepthExceeded, LevelMismatch, UnknownObject
from .hashing import content_hash
from .model import Store
from .predicate import (
    Expr,
    Kind,
    Value,
    evaluate,
    format_predicate,
    validate_predicate,
)
from .profiles import Rank

DEFAULT_MAX_DEPTH = 3

#: what a predicate one level up can see of a level-0 object
LEVEL0_SHAPE: dict[str, Kind] = {
    "id": Kind.TEXT,
    "concept": Kind.TEXT,
    "version": Kind.INTEGER,
}

#: what a predicate can see of a lifted predicate record
META_SHAPE: dict[str, Kind] = {
    "id": Kind.TEXT,
    "level": Kind.INTEGER,
    "extensionSize": Kind.INTEGER,
}


@dataclass
class MetaPredicate:
    """A lifted classifier living at level j+1 over level-j objects."""

    id: str
    level: int
    definition: Expr
    extension: frozenset[str] = frozenset()

    def definition_hash(self) -> str:
        return content_hash(format_predicate(self.definition))


@dataclass(frozen=True)
class MetadataRecord:
    """Administrative description of one object."""

    subject: str
    dimensions: tuple[str, ...] = ()
    integrity_constraints: tuple[str, ...] = ()
    access_rights: Rank = Rank.ADMINISTRATOR
    extras: Mapping[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "dimensions": list(self.dimensions),
            "integrityConstraints": list(self.integrity_constraints),
            "accessRights": self.access_rights.label,
            "extras": dict(self.extras),
        }


class MetaTower:
    """Bounded stack of predicate stores over a core-model store."""

    def __init__(self, store: Store, max_depth: int = DEFAULT_MAX_DEPTH):
        if max_depth < 1:
            raise ValueError("tower needs at least one meta level")
        self.store = store
        self.max_depth = max_depth
        # level j >= 1 -> ordered {predicate id -> MetaPredicate}
        self.levels: dict[int, dict[str, MetaPredicate]] = {
            j: {} for j in range(1, max_depth + 1)}
        self.records: dict[str, MetadataRecord] = {}
        self._counter = itertools.count(1)

    # -- shapes and environments --------------------------------------------

    def shape_at(self, level: int) -> dict[str, Kind]:
        return LEVEL0_SHAPE if level == 0 else META_SHAPE

    def object_ids(self, level: int) -> list[str]:
        if level == 0:
            return [ind.id for ind in self.store.all_individuals()]
        return list(self.levels.get(level, {}))

    def _environment(self, level: int, object_id: str) -> dict[str, Value]:
        if level == 0:
            ind = self.store.individual(object_id)
            state = ind.state_at()
            return {"id": ind.id, "concept": ind.concept.name,
                    "version": state.version}
        record = self.levels[level][object_id]
        return {"id": record.id, "level": record.level,
                "extensionSize": len(record.extension)}

    def _level_of(self, object_id: str) -> Optional[int]:
        if object_id in self.store.individuals:
            return 0
        for level, records in self.levels.items():
            if object_id in records:
                return level
        return None

    # -- operations ----------------------------------------------------------

    def lift(self, level: int, phi: Expr) -> MetaPredicate:
        """Materialize phi's extension as a classifier one level up.

        Pointwise-equal predicates (equal extension over the current level)
        collapse onto the already-lifted record.
        """
        if not 0 <= level < self.max_depth:
            raise DepthExceeded(
                f"cannot lift at level {level}; maximum depth is "
                f"{self.max_depth}")
        validate_predicate(phi, self.shape_at(level))
        extension = frozenset(
            oid for oid in self.object_ids(level)
            if evaluate(phi, self._environment(level, oid)))
        target = self.levels[level + 1]
        for existing in target.values():
            if existing.extension == extension:
                return existing
        record = MetaPredicate(f"m{next(self._counter)}", level + 1, phi,
                               extension)
        target[record.id] = record
        return record

    def apply_meta(self, classifier: MetaPredicate, object_id: str) -> bool:
        """Does the classifier hold of the level-(j-1) object?"""
        expected = classifier.level - 1
        actual = self._level_of(object_id)
        if actual is None:
            raise UnknownObject(f"no object {object_id!r} in the tower")
        if actual != expected:
            raise LevelMismatch(
                f"{object_id!r} lives at level {actual}, classifier wants "
                f"level {expected}")
        return bool(evaluate(classifier.definition,
                             self._environment(expected, object_id)))

    def comprehend_at_level(self, level: int, phi: Expr) -> set[str]:
        """Ids of level-j objects satisfying phi; uniform across levels."""
        if not 0 <= level <= self.max_depth:
            raise DepthExceeded(
                f"level {level} outside tower depth {self.max_depth}")
        validate_predicate(phi, self.shape_at(level))
        return {oid for oid in self.object_ids(level)
                if evaluate(phi, self._environment(level, oid))}

    def describe(self, subject: str) -> MetadataRecord:
        """Stored metadata record, or the admin-only default."""
        if self._level_of(subject) is None:
            raise UnknownObject(f"no object {subject!r}")
        stored = self.records.get(subject)
        if stored is not None:
            return stored
        return MetadataRecord(subject=subject)

    def register_metadata(self, record: MetadataRecord) -> MetadataRecord:
        """Attach a metadata record; constraints must live one level up."""
        subject_level = self._level_of(record.subject)
        if subject_level is None:
            raise UnknownObject(f"no object {record.subject!r}")
        above = subject_level + 1
        for pid in record.integrity_constraints:
            if pid not in self.levels.get(above, {}):
                raise UnknownObject(
                    f"constraint {pid!r} not found at level {above}")
        self.records[record.subject] = record
        return record

    # -- cache maintenance ----------------------------------------------------

    def recompute(self) -> None:
        """Refresh every extension cache, bottom level first.

        Definitions are untouched; this runs inside the engine's write
        commit so readers never observe a stale cache.
        """
        for level in range(1, self.max_depth + 1):
            below = level - 1
            for record in self.levels[level].values():
                record.extension = frozenset(
                    oid for oid in self.object_ids(below)
                    if evaluate(record.definition,
                                self._environment(below, oid)))

    def definitions_hash(self) -> str:
        """Hash over every lifted definition; stable under data mutation."""
        payload = {
            str(level): {pid: format_predicate(rec.definition)
                         for pid, rec in records.items()}
            for level, records in self.levels.items()}
        return content_hash(payload)
