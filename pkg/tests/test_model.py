from __future__ import annotations

import random

import pytest

from portalis.errors import (
    AmbiguousDescription,
    ConceptMismatch,
    DuplicateId,
    IllTypedPredicate,
    KindMismatch,
    NotIndividualized,
    PartialAssignment,
    UnknownField,
    UnknownVersion,
)
from portalis.hashing import content_hash
from portalis.model import (
    Concept,
    Store,
    comprehend,
    individualize,
    transition,
)
from portalis.predicate import (
    And,
    Compare,
    FALSE,
    FieldRef,
    Kind,
    Literal,
    Member,
    Or,
    TRUE,
)
from support import oracle_filter, populate, random_concept, random_predicate

VISITOR = Concept("Visitor", (("status", Kind.TEXT), ("visits", Kind.INTEGER)))


def visitor_store() -> Store:
    store = Store()
    store.add_concept(VISITOR)
    store.add_individual("ann", "Visitor", {"status": "registered",
                                            "visits": 3})
    store.add_individual("bob", "Visitor", {"status": "unregistered",
                                            "visits": 1})
    store.add_individual("cy", "Visitor", {"status": "corporate",
                                           "visits": 9})
    return store


# ---------------------------------------------------------------------------
# comprehension
# ---------------------------------------------------------------------------

def test_comprehend_true_is_whole_domain():
    store = visitor_store()
    domain = store.of_concept("Visitor")
    assert comprehend(domain, TRUE) == set(domain)


def test_comprehend_false_is_empty():
    store = visitor_store()
    assert comprehend(store.of_concept("Visitor"), FALSE) == set()


def test_comprehend_status_filter_matches_oracle():
    store = visitor_store()
    domain = store.of_concept("Visitor")
    phi = Compare("!=", FieldRef("status"), Literal("unregistered"))
    result = comprehend(domain, phi)
    assert result == oracle_filter(domain, phi)
    assert {ind.id for ind in result} == {"ann", "cy"}


def test_comprehend_rejects_unknown_field():
    store = visitor_store()
    with pytest.raises(IllTypedPredicate):
        comprehend(store.of_concept("Visitor"),
                   Compare("=", FieldRef("ghost"), Literal(1)))


def test_comprehend_rejects_kind_mismatch():
    store = visitor_store()
    with pytest.raises(IllTypedPredicate):
        comprehend(store.of_concept("Visitor"),
                   Compare("<", FieldRef("status"), Literal(5)))


def test_comprehend_unknown_version():
    store = visitor_store()
    with pytest.raises(UnknownVersion):
        comprehend(store.of_concept("Visitor"), TRUE, version=4)


def test_comprehend_mixed_domain_rejected():
    store = visitor_store()
    store.add_concept(Concept("Other", (("x", Kind.INTEGER),)))
    store.add_individual("o1", "Other", {"x": 1})
    with pytest.raises(IllTypedPredicate):
        comprehend(store.all_individuals(), TRUE)


def test_comprehend_is_value_like():
    store = visitor_store()
    domain = store.of_concept("Visitor")
    phi = Compare(">", FieldRef("visits"), Literal(2))
    assert comprehend(domain, phi) == comprehend(domain, phi)


def test_comprehend_randomized_oracle_equivalence():
    rng = random.Random(0xC0)
    for round_no in range(60):
        store = Store()
        concept = random_concept(rng, "Thing", n_fields=rng.randint(1, 5))
        store.add_concept(concept)
        domain = populate(rng, store, concept, rng.randint(0, 64))
        phi = random_predicate(rng, dict(concept.fields))
        assert comprehend(domain, phi) == oracle_filter(domain, phi), \
            f"diverged on round {round_no}"


def test_comprehend_extensionality():
    rng = random.Random(0xC1)
    store = Store()
    concept = random_concept(rng, "Thing")
    store.add_concept(concept)
    domain = populate(rng, store, concept, 24)
    for _ in range(40):
        phi = random_predicate(rng, dict(concept.fields))
        equivalent = And(phi, TRUE)  # pointwise equal by construction
        assert comprehend(domain, phi) == comprehend(domain, equivalent)


def test_comprehend_monotonicity():
    rng = random.Random(0xC2)
    store = Store()
    concept = random_concept(rng, "Thing")
    store.add_concept(concept)
    domain = populate(rng, store, concept, 24)
    for _ in range(40):
        phi = random_predicate(rng, dict(concept.fields))
        weaker = Or(phi, random_predicate(rng, dict(concept.fields)))
        assert comprehend(domain, phi) <= comprehend(domain, weaker)


# ---------------------------------------------------------------------------
# individualization
# ---------------------------------------------------------------------------

def test_individualize_singleton_domain():
    store = Store()
    store.add_concept(VISITOR)
    only = store.add_individual("solo", "Visitor",
                                {"status": "registered", "visits": 0})
    assert individualize([only], TRUE) is only


def test_individualize_unique_satisfier():
    store = visitor_store()
    domain = store.of_concept("Visitor")
    phi = Compare("=", FieldRef("status"), Literal("corporate"))
    assert len(oracle_filter(domain, phi)) == 1
    assert individualize(domain, phi).id == "cy"


def test_individualize_ambiguous():
    store = visitor_store()
    domain = store.of_concept("Visitor")
    phi = Compare(">", FieldRef("visits"), Literal(0))
    assert len(oracle_filter(domain, phi)) > 1
    with pytest.raises(AmbiguousDescription):
        individualize(domain, phi)


def test_individualize_no_satisfier():
    store = visitor_store()
    with pytest.raises(NotIndividualized):
        individualize(store.of_concept("Visitor"), FALSE)


def test_individualize_iff_comprehension_singleton():
    rng = random.Random(0xC3)
    store = Store()
    concept = random_concept(rng, "Thing")
    store.add_concept(concept)
    domain = populate(rng, store, concept, 16)
    for _ in range(80):
        phi = random_predicate(rng, dict(concept.fields))
        satisfiers = comprehend(domain, phi)
        if len(satisfiers) == 1:
            assert individualize(domain, phi) in satisfiers
        else:
            with pytest.raises((NotIndividualized, AmbiguousDescription)):
                individualize(domain, phi)


# ---------------------------------------------------------------------------
# transition
# ---------------------------------------------------------------------------

def _history(individual) -> str:
    return content_hash([{"version": s.version, "cause": s.cause,
                          "values": s.as_dict()} for s in individual.states])


def test_transition_identity_overlay():
    store = visitor_store()
    ann = store.individual("ann")
    before = ann.state_at().as_dict()
    transition(ann, {}, cause="noop")
    assert ann.version == 1
    assert ann.state_at(1).as_dict() == before


def test_transition_overlay_matches_manual_merge():
    store = Store()
    store.add_concept(Concept("Role", (("vacancies", Kind.INTEGER),
                                       ("title", Kind.TEXT))))
    role = store.add_individual("r1", "Role", {"vacancies": 5,
                                               "title": "engineer"})
    expected = role.state_at().as_dict()
    expected.update({"vacancies": 6})
    transition(role, {"vacancies": 6}, cause="evt-1")
    assert role.state_at().as_dict() == expected
    assert role.state_at().values["title"] == "engineer"


def test_transition_rejects_undeclared_field():
    store = visitor_store()
    with pytest.raises(UnknownField):
        transition(store.individual("ann"), {"ghost": 1}, cause="x")


def test_transition_rejects_kind_mismatch():
    store = visitor_store()
    with pytest.raises(KindMismatch):
        transition(store.individual("ann"), {"visits": "many"}, cause="x")


def test_transition_appends_exactly_one_and_keeps_history():
    store = visitor_store()
    ann = store.individual("ann")
    transition(ann, {"visits": 4}, cause="a")
    prior = _history(ann)
    prior_len = len(ann.states)
    transition(ann, {"visits": 5}, cause="b")
    assert len(ann.states) == prior_len + 1
    assert _history(ann).startswith("")  # hash recomputed without error
    assert content_hash([{"version": s.version, "cause": s.cause,
                          "values": s.as_dict()}
                         for s in ann.states[:prior_len]]) == prior
    assert ann.state_at(0).values["visits"] == 3


def test_version_is_monotone_index():
    store = visitor_store()
    ann = store.individual("ann")
    for k in range(1, 5):
        transition(ann, {}, cause=f"c{k}")
        assert ann.states[k].version == k


# ---------------------------------------------------------------------------
# sort variables
# ---------------------------------------------------------------------------

def test_bind_sort_empty_index_set():
    store = visitor_store()
    sv = store.bind_sort([], "Visitor", {})
    assert sv.index_set == frozenset()
    assert sv.assignment == {}


def test_bind_sort_total_mapping():
    store = visitor_store()
    sv = store.bind_sort(["u1", "u2"], "Visitor",
                         {"u1": "ann", "u2": "bob"})
    assert sv.assignment == {"u1": "ann", "u2": "bob"}
    assert sv.concept == "Visitor"


def test_bind_sort_partial_mapping_rejected():
    store = visitor_store()
    with pytest.raises(PartialAssignment):
        store.bind_sort(["u1", "u2"], "Visitor", {"u1": "ann"})


def test_bind_sort_concept_mismatch():
    store = visitor_store()
    store.add_concept(Concept("Finance", (("total", Kind.REAL),)))
    store.add_individual("fin1", "Finance", {"total": 1.0})
    with pytest.raises(ConceptMismatch):
        store.bind_sort(["u1"], "Visitor", {"u1": "fin1"})


def test_store_ids_never_reused():
    store = visitor_store()
    with pytest.raises(DuplicateId):
        store.add_individual("ann", "Visitor",
                             {"status": "registered", "visits": 0})
