#!/usr/bin/env python3
"""Walk the core object calculus: concepts, states, comprehension, frames.

Run: python demos/01_object_calculus.py
"""

from portalis import (
    AtomicFrame,
    Compare,
    Concept,
    FieldRef,
    FrameLanguage,
    FramePattern,
    Kind,
    Literal,
    MetaTower,
    Store,
    Variable,
    comprehend,
    individualize,
)

store = Store()
store.add_concept(Concept("Visitor", (("status", Kind.TEXT),
                                      ("visits", Kind.INTEGER))))
ann = store.add_individual("ann", "Visitor", {"status": "registered",
                                              "visits": 3})
bob = store.add_individual("bob", "Visitor", {"status": "unregistered",
                                              "visits": 1})
cy = store.add_individual("cy", "Visitor", {"status": "corporate",
                                            "visits": 9})

print("== comprehension ==")
frequent = Compare(">", FieldRef("visits"), Literal(2))
print("visits > 2 :", sorted(ind.id for ind in
                             comprehend(store.of_concept("Visitor"),
                                        frequent)))

print("\n== versioned states ==")
store.transition("ann", {"visits": 4}, cause="evt-login")
store.transition("ann", {"visits": 5}, cause="evt-login")
print("ann history:", [(s.version, s.values["visits"], s.cause)
                       for s in ann.states])
at_v0 = comprehend(store.of_concept("Visitor"), frequent, version=0)
print("visits > 2 at version 0 :", sorted(ind.id for ind in at_v0))

print("\n== unique individualization ==")
corporate = Compare("=", FieldRef("status"), Literal("corporate"))
print("the corporate visitor is:", individualize(store.of_concept("Visitor"),
                                                 corporate).id)

print("\n== metadata tower ==")
tower = MetaTower(store)
visitors = tower.lift(0, Compare("=", FieldRef("concept"),
                                 Literal("Visitor")))
print(f"lifted classifier {visitors.id} at level {visitors.level}, "
      f"extension {sorted(visitors.extension)}")
busy = tower.lift(1, Compare(">", FieldRef("extensionSize"), Literal(0)))
print("level-2 classifier over non-vacuous level-1 predicates:",
      sorted(busy.extension))

print("\n== frame network ==")
frames = FrameLanguage(["follows"], ["ann", "bob", "cy"])
frames.assert_frame(AtomicFrame("follows", "bob", "ann"))
frames.assert_frame(AtomicFrame("follows", "cy", "ann"))
print("follows(bob, ann)?", frames.evaluate_frame(
    AtomicFrame("follows", "bob", "ann")))
print("who follows ann? ", frames.query_frames(
    FramePattern("follows", Variable("who"), "ann")))
