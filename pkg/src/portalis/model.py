"""Core data object calculus.

A data object is the triple (concept, individual, state): a concept is a
named field schema shared by its individuals, an individual is an identified
entity, and an append-only sequence of versioned state records simulates its
dynamics. On top of the store sit the calculus operations: comprehension
(filter a domain by a predicate at a valuation index), unique
individualization, state transition, and sort-variable binding.

Reads never mutate; the engine serializes writes through one commit point.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import (
    AmbiguousDescription,
    ConceptMismatch,
    DuplicateId,
    IllTypedPredicate,
    KindMismatch,
    NotIndividualized,
    PartialAssignment,
    UnknownConcept,
    UnknownField,
    UnknownIndividual,
    UnknownVersion,
)
from .predicate import Expr, Kind, Value, evaluate, validate_predicate, value_conforms

CURRENT = "current"

#: pseudo-fields injected into every evaluation environment; concepts may not
#: declare fields with these names
PSEUDO_FIELDS: dict[str, Kind] = {
    "id": Kind.TEXT,
    "concept": Kind.TEXT,
    "version": Kind.INTEGER,
}


@dataclass(frozen=True)
class Concept:
    """Named field schema; the shape every state of an individual satisfies."""

    name: str
    fields: tuple[tuple[str, Kind], ...]

    def __post_init__(self):
        if not self.fields:
            raise ValueError(f"concept {self.name!r} declares no fields")
        seen = set()
        for fname, _ in self.fields:
            if fname in PSEUDO_FIELDS:
                raise ValueError(f"field name {fname!r} is reserved")
            if fname in seen:
                raise ValueError(
                    f"duplicate field {fname!r} in concept {self.name}")
            seen.add(fname)

    def schema(self) -> dict[str, Kind]:
        """Declared fields plus the pseudo-fields, for predicate validation."""
        merged = dict(self.fields)
        merged.update(PSEUDO_FIELDS)
        return merged

    def field_kinds(self) -> dict[str, Kind]:
        return dict(self.fields)


@dataclass(frozen=True)
class StateRecord:
    """One immutable snapshot; version k is the k-th (0-based) valuation."""

    version: int
    values: Mapping[str, Value]
    cause: str

    def as_dict(self) -> dict[str, Value]:
        return dict(self.values)


class Individual:
    """An identified entity with an append-only state history."""

    def __init__(self, id: str, concept: Concept,
                 values: Mapping[str, Value], cause: str = "initial"):
        check_values(concept, values, total=True)
        self.id = id
        self.concept = concept
        self.states: list[StateRecord] = [
            StateRecord(0, dict(values), cause)]

    @property
    def concept_name(self) -> str:
        return self.concept.name

    @property
    def version(self) -> int:
        return self.states[-1].version

    def state_at(self, version: Union[int, str] = CURRENT) -> StateRecord:
        if version == CURRENT:
            return self.states[-1]
        if not isinstance(version, int) or not 0 <= version < len(self.states):
            raise UnknownVersion(
                f"{self.id} has no state version {version!r}")
        return self.states[version]

    def environment(self, version: Union[int, str] = CURRENT) -> dict[str, Value]:
        """Total field environment for predicate evaluation."""
        state = self.state_at(version)
        env = state.as_dict()
        env["id"] = self.id
        env["concept"] = self.concept.name
        env["version"] = state.version
        return env

    def __repr__(self):
        return f"<Individual {self.id}:{self.concept.name} v{self.version}>"


@dataclass(frozen=True)
class DataObject:
    """The data-object triple a fetch hands out."""

    concept: Concept
    individual: Individual
    state: StateRecord


@dataclass(frozen=True)
class SortVariable:
    """A total assignment from an index set onto individuals of one concept."""

    index_set: frozenset[str]
    concept: str
    assignment: Mapping[str, str]  # index -> individual id


def check_values(concept: Concept, values: Mapping[str, Value],
                 total: bool) -> None:
    """Validate a (partial or total) value map against the concept."""
    kinds = concept.field_kinds()
    for fname, value in values.items():
        if fname not in kinds:
            raise UnknownField(
                f"concept {concept.name} declares no field {fname!r}")
        if not value_conforms(value, kinds[fname]):
            raise KindMismatch(
                f"{concept.name}.{fname} wants {kinds[fname].value}, "
                f"got {value!r}")
    if total:
        missing = [f for f in kinds if f not in values]
        if missing:
            raise KindMismatch(
                f"state for {concept.name} misses fields {missing}")


def coerce_reals(concept: Concept, values: Mapping[str, Value]) -> dict[str, Value]:
    """Store integer literals written into real fields as floats."""
    kinds = concept.field_kinds()
    out: dict[str, Value] = {}
    for fname, value in values.items():
        if (kinds.get(fname) is Kind.REAL and isinstance(value, int)
                and not isinstance(value, bool)):
            value = float(value)
        out[fname] = value
    return out


# ---------------------------------------------------------------------------
# calculus operations
# ---------------------------------------------------------------------------

def comprehend(domain: Iterable[Individual], phi: Expr,
               version: Union[int, str] = CURRENT) -> set[Individual]:
    """All individuals of the domain satisfying phi at the valuation index.

    The domain must be individuals of one concept; phi is validated against
    that concept's schema (plus pseudo-fields). The result is a plain value:
    re-running with unchanged inputs yields an equal set.
    """
    members = list(domain)
    if not members:
        return set()
    concept = members[0].concept
    for ind in members:
        if ind.concept is not concept and ind.concept.name != concept.name:
            raise IllTypedPredicate(
                "comprehension domain mixes concepts "
                f"{concept.name} and {ind.concept.name}")
    validate_predicate(phi, concept.schema())
    return {ind for ind in members
            if evaluate(phi, ind.environment(version))}


def individualize(domain: Iterable[Individual], phi: Expr,
                  version: Union[int, str] = CURRENT) -> Individual:
    """The unique individual described by phi; errors otherwise."""
    satisfiers = comprehend(domain, phi, version)
    if not satisfiers:
        raise NotIndividualized("no individual satisfies the description")
    if len(satisfiers) > 1:
        ids = sorted(ind.id for ind in satisfiers)
        raise AmbiguousDescription(
            f"description satisfied by {len(satisfiers)} individuals: {ids}")
    return next(iter(satisfiers))


def transition(individual: Individual, new_values: Mapping[str, Value],
               cause: str) -> Individual:
    """Append one state: previous values overlaid with new_values.

    Earlier state records are never touched; the version grows by exactly 1.
    """
    check_values(individual.concept, new_values, total=False)
    new_values = coerce_reals(individual.concept, new_values)
    previous = individual.states[-1]
    merged = previous.as_dict()
    merged.update(new_values)
    individual.states.append(
        StateRecord(previous.version + 1, merged, cause))
    return individual


class Store:
    """Registry of concepts and individuals with a single-writer lock.

    Ids are unique across the whole store (stricter than per-concept) so the
    metadata tower can address any object by bare id.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self.concepts: dict[str, Concept] = {}
        self.individuals: dict[str, Individual] = {}

    # -- registration -------------------------------------------------------

    def add_concept(self, concept: Concept) -> Concept:
        with self._lock:
            if concept.name in self.concepts:
                raise DuplicateId(f"concept {concept.name!r} already declared")
            self.concepts[concept.name] = concept
            return concept

    def add_individual(self, id: str, concept_name: str,
                       values: Mapping[str, Value],
                       cause: str = "initial") -> Individual:
        with self._lock:
            concept = self.concept(concept_name)
            if id in self.individuals:
                raise DuplicateId(f"individual id {id!r} already taken")
            ind = Individual(id, concept, coerce_reals(concept, values), cause)
            self.individuals[id] = ind
            return ind

    # -- lookup -------------------------------------------------------------

    def concept(self, name: str) -> Concept:
        try:
            return self.concepts[name]
        except KeyError:
            raise UnknownConcept(f"unknown concept {name!r}") from None

    def individual(self, id: str) -> Individual:
        try:
            return self.individuals[id]
        except KeyError:
            raise UnknownIndividual(f"unknown individual {id!r}") from None

    def of_concept(self, name: str) -> list[Individual]:
        self.concept(name)
        return [ind for ind in self.individuals.values()
                if ind.concept.name == name]

    def all_individuals(self) -> list[Individual]:
        return list(self.individuals.values())

    # -- writes -------------------------------------------------------------

    def transition(self, id: str, new_values: Mapping[str, Value],
                   cause: str) -> Individual:
        with self._lock:
            return transition(self.individual(id), new_values, cause)

    # -- sort variables -----------------------------------------------------

    def bind_sort(self, index_set: Iterable[str], concept_name: str,
                  mapping: Mapping[str, str]) -> SortVariable:
        """Validated assignment index -> individual of the target concept."""
        concept = self.concept(concept_name)
        indices = frozenset(index_set)
        missing = sorted(i for i in indices if i not in mapping)
        if missing:
            raise PartialAssignment(
                f"assignment misses indices {missing}")
        resolved: dict[str, str] = {}
        for index in sorted(indices):
            target = mapping[index]
            ind = self.individual(target)
            if ind.concept.name != concept.name:
                raise ConceptMismatch(
                    f"{target!r} has concept {ind.concept.name}, "
                    f"expected {concept.name}")
            resolved[index] = target
        return SortVariable(indices, concept.name, resolved)

    def fetch(self, id: str,
              version: Union[int, str] = CURRENT) -> DataObject:
        ind = self.individual(id)
        return DataObject(ind.concept, ind, ind.state_at(version))
