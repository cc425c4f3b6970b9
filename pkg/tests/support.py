"""Shared test machinery: independent oracles and random generators.

The reference evaluator here is the brute-force oracle the suites compare
against. It is deliberately written from scratch (dict-dispatched, no reuse
of the engine's evaluator) so the dual-route checks stay honest.
"""

from __future__ import annotations

import random
import string

from portalis.model import Concept, Individual, Store
from portalis.predicate import (
    And,
    Compare,
    FieldRef,
    Kind,
    Literal,
    Member,
    Not,
    Or,
)

# ---------------------------------------------------------------------------
# independent predicate evaluation (the oracle side of dual-route checks)
# ---------------------------------------------------------------------------

def _ref_operand(node, env):
    if isinstance(node, Literal):
        return node.value
    return env[node.name]


def _ref_eq(a, b):
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def reference_eval(expr, env) -> bool:
    """Straight-line reference semantics for validated predicates."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, FieldRef):
        return env[expr.name]
    if isinstance(expr, Compare):
        a = _ref_operand(expr.left, env)
        b = _ref_operand(expr.right, env)
        table = {
            "=": lambda: _ref_eq(a, b),
            "!=": lambda: not _ref_eq(a, b),
            "<": lambda: a < b,
            "<=": lambda: a <= b,
            ">": lambda: a > b,
            ">=": lambda: a >= b,
        }
        return table[expr.op]()
    if isinstance(expr, Member):
        target = _ref_operand(expr.operand, env)
        return any(_ref_eq(target, choice.value) for choice in expr.choices)
    if isinstance(expr, And):
        return bool(reference_eval(expr.left, env)) \
            and bool(reference_eval(expr.right, env))
    if isinstance(expr, Or):
        return bool(reference_eval(expr.left, env)) \
            or bool(reference_eval(expr.right, env))
    if isinstance(expr, Not):
        return not reference_eval(expr.item, env)
    raise AssertionError(f"unknown node {expr!r}")


def oracle_filter(domain, phi, version="current"):
    """Linear-scan comprehension oracle."""
    return {ind for ind in domain
            if reference_eval(phi, ind.environment(version))}


# ---------------------------------------------------------------------------
# random generation
# ---------------------------------------------------------------------------

GEN_KINDS = (Kind.INTEGER, Kind.REAL, Kind.TEXT, Kind.BOOLEAN)

_TEXT_POOL = ["ash", "birch", "cedar", "dune", "elm"]
_REAL_POOL = [-2.5, -1.0, 0.0, 0.5, 1.5, 3.25]


def random_value(rng: random.Random, kind: Kind):
    if kind is Kind.INTEGER:
        return rng.randint(-5, 5)
    if kind is Kind.REAL:
        return rng.choice(_REAL_POOL)
    if kind is Kind.TEXT:
        return rng.choice(_TEXT_POOL)
    if kind is Kind.BOOLEAN:
        return rng.random() < 0.5
    raise AssertionError(kind)


def random_concept(rng: random.Random, name: str = "Thing",
                   n_fields: int = 4) -> Concept:
    fields = []
    for index in range(n_fields):
        fields.append((f"f{index}", rng.choice(GEN_KINDS)))
    return Concept(name, tuple(fields))


def populate(rng: random.Random, store: Store, concept: Concept,
             count: int, prefix: str = "i") -> list[Individual]:
    out = []
    for index in range(count):
        values = {fname: random_value(rng, kind)
                  for fname, kind in concept.fields}
        out.append(store.add_individual(f"{prefix}{index}", concept.name,
                                        values))
    return out


def random_predicate(rng: random.Random, schema: dict[str, Kind],
                     depth: int = 3):
    """Well-typed boolean expression over the schema."""
    if depth <= 0 or rng.random() < 0.25:
        return _random_atom(rng, schema)
    pick = rng.random()
    if pick < 0.35:
        return And(random_predicate(rng, schema, depth - 1),
                   random_predicate(rng, schema, depth - 1))
    if pick < 0.70:
        return Or(random_predicate(rng, schema, depth - 1),
                  random_predicate(rng, schema, depth - 1))
    return Not(random_predicate(rng, schema, depth - 1))


def _random_atom(rng: random.Random, schema: dict[str, Kind]):
    fields = list(schema.items())
    roll = rng.random()
    if roll < 0.08:
        return Literal(rng.random() < 0.5)
    fname, kind = rng.choice(fields)
    if kind is Kind.BOOLEAN and roll < 0.30:
        return FieldRef(fname)
    if roll < 0.75 or kind is Kind.BOOLEAN:
        ops = ("=", "!=") if kind is Kind.BOOLEAN \
            else ("=", "!=", "<", "<=", ">", ">=")
        return Compare(rng.choice(ops), FieldRef(fname),
                       Literal(random_value(rng, kind)))
    choices = tuple(Literal(random_value(rng, kind))
                    for _ in range(rng.randint(1, 3)))
    return Member(FieldRef(fname), choices)


def random_utf8_text(rng: random.Random, max_len: int = 120) -> str:
    pool = (string.ascii_letters + string.digits + string.punctuation
            + " \t\n" + "каталогΩ中文✓émoji🙂")
    return "".join(rng.choice(pool) for _ in range(rng.randint(0, max_len)))
