"""Semantic network of dyadic frames.

A frame language pairs a set of dyadic relation symbols with a set of
constants. An atomic frame applies one relation to an ordered pair of
constants; asserted frames populate the relation's extension, evaluation is
characteristic-function membership, and pattern queries enumerate bindings
for variables in subject/object position. Relations are never variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import MalformedPattern, UndeclaredSymbol, UnknownIndividual


@dataclass(frozen=True)
class AtomicFrame:
    relation: str
    subject: str
    object: str


@dataclass(frozen=True)
class Variable:
    """Query placeholder, written ?name in patterns."""

    name: str


Term = Union[str, Variable]


@dataclass(frozen=True)
class FramePattern:
    """Frame with constants or variables in subject/object position."""

    relation: str
    subject: Term
    object: Term


class FrameLanguage:
    """Declared relations and constants plus the asserted extensions."""

    def __init__(self, relations: Iterable[str] = (),
                 constants: Iterable[str] = ()):
        self.relations: set[str] = set(relations)
        self.constants: set[str] = set(constants)
        self.extensions: dict[str, set[tuple[str, str]]] = {
            r: set() for r in self.relations}

    # -- declarations ---------------------------------------------------------

    def declare_relation(self, name: str) -> None:
        self.relations.add(name)
        self.extensions.setdefault(name, set())

    def declare_constant(self, name: str) -> None:
        self.constants.add(name)

    def _check_frame(self, frame: AtomicFrame) -> None:
        if frame.relation not in self.relations:
            raise UndeclaredSymbol(f"undeclared relation {frame.relation!r}")
        for constant in (frame.subject, frame.object):
            if constant not in self.constants:
                raise UndeclaredSymbol(f"undeclared constant {constant!r}")

    # -- operations -----------------------------------------------------------

    def assert_frame(self, frame: AtomicFrame) -> "FrameLanguage":
        """Add the ordered pair to the relation's extension; idempotent."""
        self._check_frame(frame)
        self.extensions[frame.relation].add((frame.subject, frame.object))
        return self

    def evaluate_frame(self, frame: AtomicFrame) -> bool:
        """Characteristic-function membership of the ordered pair."""
        self._check_frame(frame)
        return (frame.subject, frame.object) in self.extensions[frame.relation]

    def query_frames(self, pattern: FramePattern) -> list[dict[str, str]]:
        """All bindings whose substitution makes the pattern hold.

        Sound and complete over the declared constants; deterministic order
        (constants sorted). An all-constant pattern yields [{}] when it holds
        and [] when it does not.
        """
        if isinstance(pattern.relation, Variable):
            raise MalformedPattern("relations are not variables")
        if pattern.relation not in self.relations:
            raise UndeclaredSymbol(f"undeclared relation {pattern.relation!r}")
        for term in (pattern.subject, pattern.object):
            if isinstance(term, str) and term not in self.constants:
                raise UndeclaredSymbol(f"undeclared constant {term!r}")

        variables: list[str] = []
        for term in (pattern.subject, pattern.object):
            if isinstance(term, Variable) and term.name not in variables:
                variables.append(term.name)

        bindings: list[dict[str, str]] = []
        seen: set[tuple[tuple[str, str], ...]] = set()
        for subject, obj in sorted(self.extensions[pattern.relation]):
            binding: dict[str, str] = {}
            if not _match(pattern.subject, subject, binding):
                continue
            if not _match(pattern.object, obj, binding):
                continue
            key = tuple(sorted(binding.items()))
            if key not in seen:
                seen.add(key)
                bindings.append(binding)
        return bindings

    # -- snapshots ------------------------------------------------------------

    def total_assertions(self) -> int:
        return sum(len(pairs) for pairs in self.extensions.values())

    def snapshot(self) -> dict[str, list[list[str]]]:
        return {rel: sorted([s, o] for s, o in pairs)
                for rel, pairs in sorted(self.extensions.items())}


def _match(term: Term, constant: str, binding: dict[str, str]) -> bool:
    if isinstance(term, Variable):
        bound = binding.get(term.name)
        if bound is None:
            binding[term.name] = constant
            return True
        return bound == constant
    return term == constant


@dataclass(frozen=True)
class TermBinding:
    """Denotation map from frame constants onto problem-domain individuals."""

    mapping: Mapping[str, str]

    def validate(self, language: FrameLanguage, store) -> "TermBinding":
        for constant, individual_id in self.mapping.items():
            if constant not in language.constants:
                raise UndeclaredSymbol(f"undeclared constant {constant!r}")
            if individual_id not in store.individuals:
                raise UnknownIndividual(
                    f"constant {constant!r} denotes unknown individual "
                    f"{individual_id!r}")
        return self
